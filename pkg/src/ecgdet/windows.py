"""Window extraction: 10 s slices centered on ectopic beats.

Windows are cut around every beat whose AAMI class is not N, shifted (never
padded) to stay inside the record, and thinned so centers keep a minimum
spacing. All beats inside a window become labels, N included.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .aami import map_symbol
from .errors import RecordTooShort
from .wfdb.types import Annotation, SignalRecord

DEFAULT_WINDOW_S = 10.0
DEFAULT_DEDUP_SPACING_S = 2.5


@dataclass(frozen=True)
class MappedBeat:
    """A beat annotation carrying its AAMI class id."""

    sample_index: int
    symbol: str
    class_id: int


@dataclass(frozen=True)
class WindowBeat:
    """A beat positioned relative to its window's start."""

    index: int
    symbol: str
    class_id: int


@dataclass(frozen=True)
class FrameWindow:
    """One signal slice plus the beats it contains."""

    record_id: str
    start_sample: int
    length_samples: int
    sampling_rate: float
    samples: np.ndarray
    beats: tuple[WindowBeat, ...]

    @property
    def center_sample(self) -> float:
        return self.start_sample + self.length_samples / 2.0


def mapped_beats(
    annotations: Iterable[Annotation],
    table: Optional[Mapping[str, int]] = None,
) -> list[MappedBeat]:
    """AAMI-map annotations; non-beat symbols are dropped here."""
    out = []
    for ann in annotations:
        class_id = map_symbol(ann.symbol, table)
        if class_id is not None:
            out.append(MappedBeat(ann.sample_index, ann.symbol, class_id))
    return out


def extract_windows(
    record: SignalRecord,
    beats: Sequence[MappedBeat],
    window_s: float = DEFAULT_WINDOW_S,
    dedup_spacing_s: float = DEFAULT_DEDUP_SPACING_S,
    channel: int = 0,
) -> list[FrameWindow]:
    """Cut one window per non-N beat, thinned by center spacing.

    A candidate is skipped when its (post-shift) window center lies within
    dedup_spacing_s of any previously emitted window's center. Emission
    follows beat order.
    """
    if dedup_spacing_s < 0:
        raise ValueError(f"dedup_spacing_s must be >= 0, got {dedup_spacing_s}")
    fs = record.sampling_rate
    length = int(round(window_s * fs))
    num_samples = record.num_samples
    if length > num_samples:
        raise RecordTooShort(
            f"record {record.record_id}: {num_samples} samples < {window_s} s window "
            f"({length} samples at {fs:g} Hz)"
        )
    signal = record.samples[channel]
    spacing_samples = dedup_spacing_s * fs

    windows: list[FrameWindow] = []
    emitted_centers: list[float] = []
    for beat in beats:
        if beat.class_id == 0:
            continue
        start = beat.sample_index - length // 2
        start = max(0, min(start, num_samples - length))
        center = start + length / 2.0
        if any(abs(center - c) <= spacing_samples for c in emitted_centers):
            continue
        contained = tuple(
            WindowBeat(b.sample_index - start, b.symbol, b.class_id)
            for b in beats
            if start <= b.sample_index < start + length
        )
        windows.append(
            FrameWindow(
                record_id=record.record_id,
                start_sample=start,
                length_samples=length,
                sampling_rate=fs,
                samples=np.asarray(signal[start : start + length]),
                beats=contained,
            )
        )
        emitted_centers.append(center)
    return windows
