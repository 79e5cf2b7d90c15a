"""ECG arrhythmia frame detection toolkit.

Turns annotated ambulatory ECG records into YOLO-style detection datasets,
scores detector output against ground truth, and replays records through a
detector in (simulated) real time.
"""

from ._kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"

__all__ = ["KERNEL_BACKEND", "__version__"]
