"""Box geometry and detector post-processing.

Boxes are normalized center-xywh over the frame. Suppression and matching
are deterministic: every ordering is total, with documented tie-breaks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import ParseError


@dataclass(frozen=True, order=True)
class BoundingBox:
    """Axis-aligned box: center (cx, cy) plus width/height, all fractions."""

    cx: float
    cy: float
    w: float
    h: float

    def corners(self) -> tuple[float, float, float, float]:
        """(x1, y1, x2, y2) corner form."""
        return (
            self.cx - self.w / 2.0,
            self.cy - self.h / 2.0,
            self.cx + self.w / 2.0,
            self.cy + self.h / 2.0,
        )

    @staticmethod
    def from_corners(x1: float, y1: float, x2: float, y2: float) -> "BoundingBox":
        return BoundingBox((x1 + x2) / 2.0, (y1 + y2) / 2.0, x2 - x1, y2 - y1)

    @property
    def area(self) -> float:
        return self.w * self.h

    def clipped(self) -> "BoundingBox":
        """Intersect with the unit square."""
        x1, y1, x2, y2 = self.corners()
        x1, y1 = max(0.0, x1), max(0.0, y1)
        x2, y2 = min(1.0, x2), min(1.0, y2)
        if x2 < x1:
            x1 = x2 = min(max(self.cx, 0.0), 1.0)
        if y2 < y1:
            y1 = y2 = min(max(self.cy, 0.0), 1.0)
        return BoundingBox.from_corners(x1, y1, x2, y2)

    def is_valid(self) -> bool:
        x1, y1, x2, y2 = self.corners()
        return 0.0 <= x1 < x2 <= 1.0 and 0.0 <= y1 < y2 <= 1.0


@dataclass(frozen=True)
class LabeledBox:
    """Ground-truth box: AAMI class id plus geometry."""

    class_id: int
    box: BoundingBox


@dataclass(frozen=True)
class Detection:
    """Detector output: class, geometry, confidence in [0, 1]."""

    class_id: int
    box: BoundingBox
    confidence: float


@dataclass(frozen=True)
class MatchResult:
    """Greedy prediction-to-truth assignment.

    Indices refer to the input sequences. Each index appears in at most
    one pair and every paired IoU meets the threshold.
    """

    pairs: tuple[tuple[int, int, float], ...]
    unmatched_predictions: tuple[int, ...]
    unmatched_ground_truths: tuple[int, ...]


def iou(a: BoundingBox, b: BoundingBox) -> float:
    """Intersection over union; 0 for disjoint boxes."""
    ax1, ay1, ax2, ay2 = a.corners()
    bx1, by1, bx2, by2 = b.corners()
    iw = min(ax2, bx2) - max(ax1, bx1)
    ih = min(ay2, by2) - max(ay1, by1)
    if iw <= 0.0 or ih <= 0.0:
        return 0.0
    inter = iw * ih
    # Areas derive from the same corner values as the intersection, so
    # identical boxes divide to exactly 1.0 whatever their coordinates.
    area_a = (ax2 - ax1) * (ay2 - ay1)
    area_b = (bx2 - bx1) * (by2 - by1)
    union = area_a + area_b - inter
    if union <= 0.0:
        return 0.0
    return inter / union


def _det_order_key(det: Detection):
    # Total order: confidence desc, then class id asc, then box coords.
    return (-det.confidence, det.class_id, det.box.cx, det.box.cy, det.box.w, det.box.h)


def nms(detections: Sequence[Detection], iou_threshold: float) -> list[Detection]:
    """Greedy per-class suppression.

    Keeps the highest-confidence detection, drops any same-class detection
    whose IoU with a kept one exceeds the threshold.
    """
    if not 0.0 < iou_threshold <= 1.0:
        raise ValueError(f"iou_threshold must be in (0, 1], got {iou_threshold}")
    ordered = sorted(detections, key=_det_order_key)
    kept: list[Detection] = []
    for det in ordered:
        suppressed = False
        for k in kept:
            if k.class_id == det.class_id and iou(k.box, det.box) > iou_threshold:
                suppressed = True
                break
        if not suppressed:
            kept.append(det)
    return kept


def soft_nms(
    detections: Sequence[Detection],
    sigma: float = 0.5,
    score_floor: float = 0.001,
) -> list[Detection]:
    """Gaussian soft suppression.

    Iteratively selects the most confident remaining detection per class
    and decays same-class neighbors by exp(-IoU^2 / sigma). Decayed
    detections below score_floor are dropped.
    """
    if sigma <= 0.0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if not 0.0 <= score_floor < 1.0:
        raise ValueError(f"score_floor must be in [0, 1), got {score_floor}")
    pool = list(detections)
    out: list[Detection] = []
    while pool:
        best_i = min(range(len(pool)), key=lambda i: _det_order_key(pool[i]))
        best = pool.pop(best_i)
        out.append(best)
        nxt: list[Detection] = []
        for det in pool:
            if det.class_id == best.class_id:
                ov = iou(best.box, det.box)
                if ov > 0.0:
                    decayed = det.confidence * math.exp(-(ov * ov) / sigma)
                    if decayed < score_floor:
                        continue
                    det = Detection(det.class_id, det.box, decayed)
            nxt.append(det)
        pool = nxt
    return sorted(out, key=_det_order_key)


def match_detections(
    predictions: Sequence[Detection],
    ground_truths: Sequence[LabeledBox],
    iou_threshold: float,
    class_agnostic: bool = False,
) -> MatchResult:
    """Greedy confidence-ordered matching.

    Each prediction, highest confidence first, claims the unclaimed ground
    truth with the best IoU at or above the threshold. Same-class only
    unless class_agnostic (the confusion-matrix mode).
    """
    order = sorted(range(len(predictions)), key=lambda i: _det_order_key(predictions[i]))
    claimed = [False] * len(ground_truths)
    pairs: list[tuple[int, int, float]] = []
    unmatched_preds: list[int] = []
    for pi in order:
        pred = predictions[pi]
        best_gi = -1
        best_iou = 0.0
        for gi, gt in enumerate(ground_truths):
            if claimed[gi]:
                continue
            if not class_agnostic and gt.class_id != pred.class_id:
                continue
            ov = iou(pred.box, gt.box)
            if ov >= iou_threshold and ov > best_iou:
                best_iou = ov
                best_gi = gi
        if best_gi >= 0:
            claimed[best_gi] = True
            pairs.append((pi, best_gi, best_iou))
        else:
            unmatched_preds.append(pi)
    unmatched_gts = [gi for gi, used in enumerate(claimed) if not used]
    return MatchResult(tuple(pairs), tuple(unmatched_preds), tuple(unmatched_gts))


# --- Detections interchange format -----------------------------------------
#
# Line-oriented text, one detection per line:
#   <frame_id> <class_id> <cx> <cy> <w> <h> <confidence>
# Floats are fixed 6-decimal. Frame ids must contain no whitespace.


def format_detection_line(frame_id: str, det: Detection) -> str:
    if any(ch.isspace() for ch in frame_id):
        raise ValueError(f"frame id may not contain whitespace: {frame_id!r}")
    b = det.box
    return (
        f"{frame_id} {det.class_id} "
        f"{b.cx:.6f} {b.cy:.6f} {b.w:.6f} {b.h:.6f} {det.confidence:.6f}"
    )


def format_detections(per_frame: Mapping[str, Sequence[Detection]]) -> str:
    lines = []
    for frame_id in sorted(per_frame):
        for det in per_frame[frame_id]:
            lines.append(format_detection_line(frame_id, det))
    return "\n".join(lines) + ("\n" if lines else "")


def parse_detections(text: str) -> dict[str, list[Detection]]:
    """Parse the interchange format back to per-frame detection lists."""
    per_frame: dict[str, list[Detection]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 7:
            raise ParseError(f"expected 7 fields, got {len(parts)}", line=lineno)
        frame_id = parts[0]
        try:
            class_id = int(parts[1])
            cx, cy, w, h, conf = (float(p) for p in parts[2:7])
        except ValueError:
            raise ParseError(f"malformed detection fields: {line!r}", line=lineno) from None
        if class_id < 0:
            raise ParseError(f"negative class id: {class_id}", line=lineno)
        if not 0.0 <= conf <= 1.0:
            raise ParseError(f"confidence out of [0,1]: {conf}", line=lineno)
        det = Detection(class_id, BoundingBox(cx, cy, w, h), conf)
        per_frame.setdefault(frame_id, []).append(det)
    return per_frame


def read_detections_file(path) -> dict[str, list[Detection]]:
    from pathlib import Path

    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        from .errors import InputError

        raise InputError(f"cannot read detections file {p}: {exc}") from exc
    return parse_detections(text)


def write_detections_file(path, per_frame: Mapping[str, Sequence[Detection]]) -> None:
    from pathlib import Path

    Path(path).write_text(format_detections(per_frame))
