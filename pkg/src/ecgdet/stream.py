"""Real-time replay harness: sliding frames, pluggable detectors, latency.

A record replays as a stream of 10 s windows. Each window is rendered
(preprocess), handed to a DetectorPort (inference), post-processed, and
timed. In realtime mode a paced producer feeds a single-slot handoff and
late frames are dropped, never queued.
"""

from __future__ import annotations

import queue
import subprocess
import threading
import time
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional, Sequence

import numpy as np

from . import png
from .boxes import Detection, LabeledBox, nms, soft_nms
from .errors import ConfigError, InputError, ParseError, RecordTooShort
from .metrics import EvalReport, evaluate
from .render import DEFAULT_STYLE, RenderStyle, render_frame
from .wfdb.types import SignalRecord
from .windows import FrameWindow, MappedBeat, WindowBeat

POST_PROCESSORS = ("nms", "soft_nms", "none")
SPEEDS = ("realtime", "max")


def replay(
    record: SignalRecord,
    beats: Sequence[MappedBeat],
    frame_s: float = 10.0,
    hop_s: float = 1.0,
    speed: str = "max",
    channel: int = 0,
    clock: Callable[[], float] = time.monotonic,
    sleep: Callable[[float], None] = time.sleep,
) -> Iterator[FrameWindow]:
    """Yield sliding windows at t = frame_s, frame_s + hop_s, ...

    Window k covers [t_k - frame_s, t_k]. In realtime mode each window is
    released when the wall clock reaches t_k (relative to the stream
    start); in max mode windows come as fast as the consumer pulls them.
    """
    if hop_s <= 0:
        raise ConfigError(f"hop_s must be positive, got {hop_s}")
    if speed not in SPEEDS:
        raise ConfigError(f"speed must be one of {SPEEDS}, got {speed!r}")
    fs = record.sampling_rate
    length = int(round(frame_s * fs))
    num_samples = record.num_samples
    if length > num_samples:
        raise RecordTooShort(
            f"record {record.record_id}: {num_samples} samples < {frame_s} s frame"
        )
    signal = record.samples[channel]
    duration_s = num_samples / fs
    count = int((duration_s - frame_s) / hop_s) + 1
    t0 = clock()
    for k in range(count):
        t_k = frame_s + k * hop_s
        if speed == "realtime":
            # First frame exists once frame_s seconds of signal have arrived.
            delay = (t_k - frame_s) - (clock() - t0)
            if delay > 0:
                sleep(delay)
        end = int(round(t_k * fs))
        end = min(end, num_samples)
        start = end - length
        contained = tuple(
            WindowBeat(b.sample_index - start, b.symbol, b.class_id)
            for b in beats
            if start <= b.sample_index < end
        )
        yield FrameWindow(
            record_id=record.record_id,
            start_sample=start,
            length_samples=length,
            sampling_rate=fs,
            samples=np.asarray(signal[start:end]),
            beats=contained,
        )


class DetectorPort:
    """Abstract detector: image in, detections out. Labels are withheld."""

    name = "abstract"

    def detect(self, image: np.ndarray) -> list[Detection]:
        raise NotImplementedError

    def close(self) -> None:
        pass


class DetectorFailure(RuntimeError):
    """A detector failed on one frame; the session continues."""


class OracleDetector(DetectorPort):
    """Echoes ground truth at confidence 1.0.

    The session feeds it each frame's labels through observe_truth before
    calling detect; the port signature itself never exposes labels, so real
    detector implementations cannot receive them.
    """

    name = "oracle"

    def __init__(self) -> None:
        self._labels: tuple[LabeledBox, ...] = ()

    def observe_truth(self, labels: Sequence[LabeledBox]) -> None:
        self._labels = tuple(labels)

    def detect(self, image: np.ndarray) -> list[Detection]:
        return [Detection(lb.class_id, lb.box, 1.0) for lb in self._labels]


# --- Subprocess line protocol -------------------------------------------------
#
# Harness -> detector:  "FRAME <id> <png-byte-length>\n" + raw PNG bytes
# Detector -> harness:  "DET <id> <n>\n" + n lines "class cx cy w h conf"
# Floats are fixed 6-decimal.


def write_frame_message(stream, frame_id: str, png_bytes: bytes) -> None:
    stream.write(f"FRAME {frame_id} {len(png_bytes)}\n".encode("ascii"))
    stream.write(png_bytes)
    stream.flush()


def read_frame_message(stream) -> Optional[tuple[str, bytes]]:
    """Read one FRAME message; None on clean end of stream."""
    header = stream.readline()
    if not header:
        return None
    parts = header.decode("ascii", "replace").split()
    if len(parts) != 3 or parts[0] != "FRAME":
        raise ParseError(f"bad frame header: {header!r}")
    frame_id = parts[1]
    try:
        length = int(parts[2])
    except ValueError:
        raise ParseError(f"bad frame length in header: {header!r}") from None
    data = stream.read(length)
    if len(data) != length:
        raise ParseError(f"truncated frame payload: expected {length}, got {len(data)}")
    return frame_id, data


def write_detections_message(stream, frame_id: str, detections: Sequence[Detection]) -> None:
    stream.write(f"DET {frame_id} {len(detections)}\n".encode("ascii"))
    for det in detections:
        b = det.box
        line = f"{det.class_id} {b.cx:.6f} {b.cy:.6f} {b.w:.6f} {b.h:.6f} {det.confidence:.6f}\n"
        stream.write(line.encode("ascii"))
    stream.flush()


def read_detections_message(stream) -> tuple[str, list[Detection]]:
    header = stream.readline()
    if not header:
        raise ParseError("detector closed the stream mid-protocol")
    parts = header.decode("ascii", "replace").split()
    if len(parts) != 3 or parts[0] != "DET":
        raise ParseError(f"bad detection header: {header!r}")
    frame_id = parts[1]
    try:
        count = int(parts[2])
    except ValueError:
        raise ParseError(f"bad detection count: {header!r}") from None
    detections = []
    for _ in range(count):
        line = stream.readline()
        fields = line.decode("ascii", "replace").split()
        if len(fields) != 6:
            raise ParseError(f"bad detection line: {line!r}")
        try:
            class_id = int(fields[0])
            cx, cy, w, h, conf = (float(f) for f in fields[1:])
        except ValueError:
            raise ParseError(f"bad detection line: {line!r}") from None
        from .boxes import BoundingBox

        detections.append(Detection(class_id, BoundingBox(cx, cy, w, h), conf))
    return frame_id, detections


class SubprocessDetector(DetectorPort):
    """Runs an external detector process over the line protocol."""

    name = "subprocess"

    def __init__(self, command: Sequence[str]):
        self.command = list(command)
        try:
            self._proc = subprocess.Popen(
                self.command, stdin=subprocess.PIPE, stdout=subprocess.PIPE
            )
        except OSError as exc:
            raise InputError(f"cannot start detector {self.command!r}: {exc}") from exc
        self._counter = 0

    def detect(self, image: np.ndarray) -> list[Detection]:
        if self._proc.poll() is not None:
            raise DetectorFailure(f"detector process exited with {self._proc.returncode}")
        frame_id = f"f{self._counter}"
        self._counter += 1
        try:
            write_frame_message(self._proc.stdin, frame_id, png.encode(image))
            echo_id, detections = read_detections_message(self._proc.stdout)
        except (OSError, ParseError) as exc:
            raise DetectorFailure(str(exc)) from exc
        if echo_id != frame_id:
            raise DetectorFailure(f"detector answered {echo_id!r} for frame {frame_id!r}")
        return detections

    def close(self) -> None:
        if self._proc.poll() is None:
            try:
                self._proc.stdin.close()
                self._proc.wait(timeout=2.0)
            except (OSError, subprocess.TimeoutExpired):
                self._proc.kill()


class WeightsDetector(DetectorPort):
    """Runs an exported ONNX graph (optional feature; needs onnxruntime).

    Graph contract: input float32 (1, 3, H, W) scaled to [0, 1]; output
    float32 (N, 6) rows of [class_id, cx, cy, w, h, confidence].
    """

    name = "weights"

    def __init__(self, weights_path: str):
        try:
            import onnxruntime  # type: ignore
        except ImportError as exc:
            raise InputError(
                "WeightsDetector needs the optional onnxruntime package"
            ) from exc
        try:
            self._session = onnxruntime.InferenceSession(weights_path)
        except Exception as exc:
            raise InputError(f"cannot load weights {weights_path}: {exc}") from exc
        self._input_name = self._session.get_inputs()[0].name

    def detect(self, image: np.ndarray) -> list[Detection]:
        from .boxes import BoundingBox

        x = image.astype(np.float32) / 255.0
        x = np.transpose(x, (2, 0, 1))[None, ...]
        try:
            (rows,) = self._session.run(None, {self._input_name: x})
        except Exception as exc:
            raise DetectorFailure(str(exc)) from exc
        out = []
        for row in np.asarray(rows).reshape(-1, 6):
            out.append(
                Detection(int(row[0]), BoundingBox(*(float(v) for v in row[1:5])), float(row[5]))
            )
        return out


# --- Session ------------------------------------------------------------------


@dataclass(frozen=True)
class LatencyBreakdown:
    preprocess_ms: float
    inference_ms: float
    postprocess_ms: float
    total_ms: float


@dataclass
class FrameResult:
    frame_id: str
    latency: LatencyBreakdown
    detections: list[Detection]
    failed: bool = False
    error: str = ""


@dataclass
class SessionReport:
    record_id: str
    detector_name: str
    post_processor: str
    speed: str
    frames_emitted: int
    frames_processed: int
    frames_failed: int
    frames_dropped: int
    results: list[FrameResult]
    latency_summary: dict[str, dict[str, float]]
    eval: Optional[EvalReport]
    detections_by_frame: dict[str, list[Detection]] = field(default_factory=dict)
    truths_by_frame: dict[str, list[LabeledBox]] = field(default_factory=dict)

    @property
    def map50(self) -> Optional[float]:
        return self.eval.map50 if self.eval is not None else None


def _percentile(sorted_values: list[float], q: float) -> float:
    # Nearest-rank percentile over an already-sorted list.
    n = len(sorted_values)
    rank = max(1, int(-(-q * n // 100)))  # ceil(q*n/100)
    return sorted_values[min(n - 1, rank - 1)]


def summarize_latency(results: Sequence[FrameResult]) -> dict[str, dict[str, float]]:
    fields = {
        "preprocess_ms": lambda r: r.latency.preprocess_ms,
        "inference_ms": lambda r: r.latency.inference_ms,
        "postprocess_ms": lambda r: r.latency.postprocess_ms,
        "total_ms": lambda r: r.latency.total_ms,
        # Pipeline cost with the detector excluded.
        "overhead_ms": lambda r: r.latency.preprocess_ms + r.latency.postprocess_ms,
    }
    out: dict[str, dict[str, float]] = {}
    for name, get in fields.items():
        values = sorted(get(r) for r in results)
        if not values:
            out[name] = {"mean": 0.0, "p50": 0.0, "p95": 0.0, "p99": 0.0}
            continue
        out[name] = {
            "mean": sum(values) / len(values),
            "p50": _percentile(values, 50),
            "p95": _percentile(values, 95),
            "p99": _percentile(values, 99),
        }
    return out


def _apply_post(detections: list[Detection], post: str, post_iou: float, sigma: float, floor: float) -> list[Detection]:
    if post == "nms":
        return nms(detections, post_iou)
    if post == "soft_nms":
        return soft_nms(detections, sigma, floor)
    return list(detections)


def run_session(
    record: SignalRecord,
    beats: Sequence[MappedBeat],
    detector: DetectorPort,
    post_processor: str = "nms",
    speed: str = "max",
    frame_s: float = 10.0,
    hop_s: float = 1.0,
    style: RenderStyle = DEFAULT_STYLE,
    post_iou: float = 0.45,
    soft_sigma: float = 0.5,
    score_floor: float = 0.001,
    evaluate_truth: bool = True,
    sink: Optional[Callable[[FrameResult], None]] = None,
    clock: Callable[[], float] = time.monotonic,
    sleep: Callable[[float], None] = time.sleep,
) -> SessionReport:
    """Replay a record through a detector and aggregate the session.

    A failing detector marks the frame failed and the session continues.
    In realtime mode frames the consumer cannot keep up with are dropped
    through the single-slot handoff and counted.
    """
    if post_processor not in POST_PROCESSORS:
        raise ConfigError(f"post_processor must be one of {POST_PROCESSORS}")

    results: list[FrameResult] = []
    detections_by_frame: dict[str, list[Detection]] = {}
    truths_by_frame: dict[str, list[LabeledBox]] = {}
    emitted = 0
    dropped = 0

    def process(window: FrameWindow) -> None:
        t0 = time.perf_counter()
        frame = render_frame(window, style)
        t1 = time.perf_counter()
        truths_by_frame[frame.frame_id] = list(frame.labels)
        observe = getattr(detector, "observe_truth", None)
        if observe is not None:
            observe(frame.labels)
        failed = False
        error = ""
        try:
            raw = detector.detect(frame.image)
        except Exception as exc:  # any per-frame detector fault
            raw = []
            failed = True
            error = f"{type(exc).__name__}: {exc}"
        t2 = time.perf_counter()
        final = [] if failed else _apply_post(raw, post_processor, post_iou, soft_sigma, score_floor)
        t3 = time.perf_counter()
        latency = LatencyBreakdown(
            preprocess_ms=(t1 - t0) * 1e3,
            inference_ms=(t2 - t1) * 1e3,
            postprocess_ms=(t3 - t2) * 1e3,
            total_ms=(t3 - t0) * 1e3,
        )
        result = FrameResult(frame.frame_id, latency, final, failed=failed, error=error)
        results.append(result)
        detections_by_frame[frame.frame_id] = final
        if sink is not None:
            sink(result)

    frames = replay(record, beats, frame_s, hop_s, speed, clock=clock, sleep=sleep)
    if speed == "max":
        for window in frames:
            emitted += 1
            process(window)
    else:
        slot: queue.Queue = queue.Queue(maxsize=1)
        state = {"emitted": 0, "dropped": 0}
        stop = object()

        def produce() -> None:
            try:
                for window in frames:
                    state["emitted"] += 1
                    try:
                        slot.put_nowait(window)
                    except queue.Full:
                        state["dropped"] += 1
            finally:
                slot.put(stop)

        thread = threading.Thread(target=produce, name="replay-producer", daemon=True)
        thread.start()
        while True:
            item = slot.get()
            if item is stop:
                break
            process(item)
        thread.join()
        emitted = state["emitted"]
        dropped = state["dropped"]

    eval_report = None
    if evaluate_truth and any(truths_by_frame.values()):
        eval_report = evaluate(
            detections_by_frame,
            truths_by_frame,
            provenance={
                "record_id": record.record_id,
                "detector": detector.name,
                "post_processor": post_processor,
            },
        )
    return SessionReport(
        record_id=record.record_id,
        detector_name=detector.name,
        post_processor=post_processor,
        speed=speed,
        frames_emitted=emitted,
        frames_processed=len(results),
        frames_failed=sum(1 for r in results if r.failed),
        frames_dropped=dropped,
        results=results,
        latency_summary=summarize_latency(results),
        eval=eval_report,
        detections_by_frame=detections_by_frame,
        truths_by_frame=truths_by_frame,
    )


def parse_live_samples(lines) -> Iterator[tuple[float, int]]:
    """Parse the live-ingestion protocol: one `t_ms,adu` pair per line."""
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip() if isinstance(raw, str) else raw.decode("ascii", "replace").strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise ParseError(f"expected 't_ms,adu', got {line!r}", line=lineno)
        try:
            yield float(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"malformed sample pair: {line!r}", line=lineno) from None
