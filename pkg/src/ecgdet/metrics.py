"""Detection evaluation: PR curves, AP/mAP, confusion matrix, class metrics.

Ground truths and detections are keyed by frame id. All orderings are
deterministic so reports are byte-stable across runs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .aami import AAMI_CLASSES
from .boxes import Detection, LabeledBox, _det_order_key, iou, match_detections

# IoU sweep 0.50:0.05:0.95, the mAP@50-95 convention.
DEFAULT_THRESHOLDS: tuple[float, ...] = tuple(round(0.50 + 0.05 * i, 2) for i in range(10))

DEFAULT_CONFUSION_IOU = 0.45
DEFAULT_CONFIDENCE_FLOOR = 0.25

FrameDetections = Mapping[str, Sequence[Detection]]
FrameTruths = Mapping[str, Sequence[LabeledBox]]


@dataclass(frozen=True)
class PrCurve:
    """Per-class precision/recall trace, one point per detection prefix."""

    class_id: int
    num_ground_truths: int
    # (confidence, precision, recall) per prefix of the sorted detections.
    points: tuple[tuple[float, float, float], ...]

    @property
    def defined(self) -> bool:
        return self.num_ground_truths > 0


def _ordered_class_detections(
    detections: FrameDetections, class_id: int
) -> list[tuple[str, Detection]]:
    entries: list[tuple[str, Detection]] = []
    for frame_id in detections:
        for det in detections[frame_id]:
            if det.class_id == class_id:
                entries.append((frame_id, det))
    entries.sort(key=lambda e: (-e[1].confidence, e[0], _det_order_key(e[1])))
    return entries


def pr_curve(
    detections: FrameDetections,
    ground_truths: FrameTruths,
    iou_threshold: float,
    class_id: int,
) -> PrCurve:
    """Cumulative TP/FP trace over detections sorted by confidence.

    A detection is a true positive when it claims a previously unclaimed
    same-class ground truth in its frame with IoU at or above the
    threshold (best IoU wins, earliest ground truth on ties).
    """
    gt_boxes: dict[str, list[LabeledBox]] = {}
    num_gt = 0
    for frame_id in ground_truths:
        boxes = [g for g in ground_truths[frame_id] if g.class_id == class_id]
        if boxes:
            gt_boxes[frame_id] = boxes
            num_gt += len(boxes)

    entries = _ordered_class_detections(detections, class_id)
    if num_gt == 0:
        return PrCurve(class_id=class_id, num_ground_truths=0, points=())

    claimed: dict[str, list[bool]] = {fid: [False] * len(b) for fid, b in gt_boxes.items()}
    points: list[tuple[float, float, float]] = []
    tp = 0
    for rank, (frame_id, det) in enumerate(entries, start=1):
        best_gi = -1
        best_iou = 0.0
        for gi, gt in enumerate(gt_boxes.get(frame_id, ())):
            if claimed[frame_id][gi]:
                continue
            ov = iou(det.box, gt.box)
            if ov >= iou_threshold and ov > best_iou:
                best_iou = ov
                best_gi = gi
        if best_gi >= 0:
            claimed[frame_id][best_gi] = True
            tp += 1
        points.append((det.confidence, tp / rank, tp / num_gt))
    return PrCurve(class_id=class_id, num_ground_truths=num_gt, points=tuple(points))


def average_precision(curve: PrCurve) -> Optional[float]:
    """101-point interpolated AP.

    The precision envelope (max precision at recall >= r) is sampled at
    r = 0.00, 0.01, ..., 1.00 and averaged. Undefined (None) when the
    class has no ground truths.
    """
    if not curve.defined:
        return None
    if not curve.points:
        return 0.0
    recalls = [p[2] for p in curve.points]
    precisions = [p[1] for p in curve.points]
    # Running max from the right: envelope[i] = max precision at rank >= i.
    envelope = precisions[:]
    for i in range(len(envelope) - 2, -1, -1):
        envelope[i] = max(envelope[i], envelope[i + 1])
    total = 0.0
    j = 0
    n = len(recalls)
    for step in range(101):
        r = step / 100.0
        while j < n and recalls[j] < r:
            j += 1
        if j < n:
            total += envelope[j]
    return total / 101.0


def mean_ap(per_class_ap: Mapping[int, Optional[float]] | Sequence[Optional[float]]) -> float:
    """Arithmetic mean over defined class APs."""
    values = list(per_class_ap.values()) if isinstance(per_class_ap, Mapping) else list(per_class_ap)
    defined = [v for v in values if v is not None]
    if not defined:
        raise ValueError("mean AP undefined: no class has ground truths")
    return sum(defined) / len(defined)


@dataclass(frozen=True)
class ApSweep:
    """AP per class per IoU threshold plus the derived mAP values."""

    thresholds: tuple[float, ...]
    # ap[class_id][threshold] -> AP or None when the class has no truths.
    per_class: Mapping[int, Mapping[float, Optional[float]]]
    map_per_threshold: Mapping[float, float]
    aggregate: float


def map_over_thresholds(
    detections: FrameDetections,
    ground_truths: FrameTruths,
    thresholds: Sequence[float] = DEFAULT_THRESHOLDS,
    num_classes: int = len(AAMI_CLASSES),
) -> ApSweep:
    """mAP at each IoU threshold and the mean over the sweep."""
    per_class: dict[int, dict[float, Optional[float]]] = {c: {} for c in range(num_classes)}
    map_per_threshold: dict[float, float] = {}
    for thr in thresholds:
        aps: dict[int, Optional[float]] = {}
        for c in range(num_classes):
            ap = average_precision(pr_curve(detections, ground_truths, thr, c))
            aps[c] = ap
            per_class[c][thr] = ap
        map_per_threshold[thr] = mean_ap(aps)
    aggregate = sum(map_per_threshold.values()) / len(map_per_threshold)
    return ApSweep(
        thresholds=tuple(thresholds),
        per_class=per_class,
        map_per_threshold=map_per_threshold,
        aggregate=aggregate,
    )


@dataclass
class ConfusionMatrix:
    """(num_classes + 1)^2 counts; last index is background.

    Rows are predicted classes, columns actual. Unmatched predictions land
    in the background column, missed ground truths in the background row.
    """

    counts: np.ndarray
    num_classes: int

    @property
    def background(self) -> int:
        return self.num_classes

    def normalized(self) -> np.ndarray:
        """Row-normalized view; all-zero rows stay zero."""
        c = self.counts.astype(np.float64)
        sums = c.sum(axis=1, keepdims=True)
        with np.errstate(invalid="ignore", divide="ignore"):
            out = np.where(sums > 0, c / sums, 0.0)
        return out


def confusion_matrix(
    detections: FrameDetections,
    ground_truths: FrameTruths,
    num_classes: int = len(AAMI_CLASSES),
    iou_threshold: float = DEFAULT_CONFUSION_IOU,
    confidence_floor: float = DEFAULT_CONFIDENCE_FLOOR,
) -> ConfusionMatrix:
    """Class-agnostic greedy matching per frame, then cell counting."""
    counts = np.zeros((num_classes + 1, num_classes + 1), dtype=np.int64)
    bg = num_classes
    frame_ids = sorted(set(detections) | set(ground_truths))
    for frame_id in frame_ids:
        preds = [d for d in detections.get(frame_id, ()) if d.confidence >= confidence_floor]
        gts = list(ground_truths.get(frame_id, ()))
        result = match_detections(preds, gts, iou_threshold, class_agnostic=True)
        for pi, gi, _ in result.pairs:
            counts[preds[pi].class_id, gts[gi].class_id] += 1
        for pi in result.unmatched_predictions:
            counts[preds[pi].class_id, bg] += 1
        for gi in result.unmatched_ground_truths:
            counts[bg, gts[gi].class_id] += 1
    return ConfusionMatrix(counts=counts, num_classes=num_classes)


@dataclass(frozen=True)
class ClassMetrics:
    """One-vs-rest metrics; None marks 0/0 (undefined), never coerced to 0."""

    accuracy: Optional[float]
    specificity: Optional[float]
    precision: Optional[float]
    recall: Optional[float]
    f1: Optional[float]


def _ratio(num: float, den: float) -> Optional[float]:
    return num / den if den > 0 else None


def class_metrics(confusion: ConfusionMatrix, class_id: int) -> ClassMetrics:
    """Accuracy, specificity, precision, recall, F1 for one class.

    One-vs-rest over the matrix with the background row and column
    excluded, so only real detections and real beats count.
    """
    c = confusion.num_classes
    if not 0 <= class_id < c:
        raise ValueError(f"class id out of range: {class_id}")
    m = confusion.counts[:c, :c]
    tp = int(m[class_id, class_id])
    fp = int(m[class_id, :].sum()) - tp
    fn = int(m[:, class_id].sum()) - tp
    tn = int(m.sum()) - tp - fp - fn
    precision = _ratio(tp, tp + fp)
    recall = _ratio(tp, tp + fn)
    if precision is None or recall is None or precision + recall == 0:
        f1 = None
    else:
        f1 = 2.0 * precision * recall / (precision + recall)
    return ClassMetrics(
        accuracy=_ratio(tp + tn, tp + tn + fp + fn),
        specificity=_ratio(tn, tn + fp),
        precision=precision,
        recall=recall,
        f1=f1,
    )


@dataclass(frozen=True)
class ClassReport:
    name: str
    class_id: int
    instances: int
    ap50: Optional[float]
    ap50_95: Optional[float]
    metrics: ClassMetrics


@dataclass
class EvalReport:
    """Full per-class and aggregate evaluation."""

    class_reports: tuple[ClassReport, ...]
    map50: float
    map50_95: float
    map_per_threshold: Mapping[float, float]
    confusion: ConfusionMatrix
    provenance: dict = field(default_factory=dict)

    @property
    def mean_metrics(self) -> ClassMetrics:
        """Average of each defined per-class metric (report bottom row)."""

        def avg(values: list[Optional[float]]) -> Optional[float]:
            defined = [v for v in values if v is not None]
            return sum(defined) / len(defined) if defined else None

        rows = [r.metrics for r in self.class_reports]
        return ClassMetrics(
            accuracy=avg([m.accuracy for m in rows]),
            specificity=avg([m.specificity for m in rows]),
            precision=avg([m.precision for m in rows]),
            recall=avg([m.recall for m in rows]),
            f1=avg([m.f1 for m in rows]),
        )


def evaluate(
    detections: FrameDetections,
    ground_truths: FrameTruths,
    num_classes: int = len(AAMI_CLASSES),
    class_names: Sequence[str] = AAMI_CLASSES,
    thresholds: Sequence[float] = DEFAULT_THRESHOLDS,
    confusion_iou: float = DEFAULT_CONFUSION_IOU,
    confidence_floor: float = DEFAULT_CONFIDENCE_FLOOR,
    provenance: Optional[dict] = None,
) -> EvalReport:
    """Run the complete metric suite over per-frame detections and truths."""
    sweep = map_over_thresholds(detections, ground_truths, thresholds, num_classes)
    confusion = confusion_matrix(
        detections, ground_truths, num_classes, confusion_iou, confidence_floor
    )
    instance_counts = {c: 0 for c in range(num_classes)}
    for frame_id in ground_truths:
        for gt in ground_truths[frame_id]:
            instance_counts[gt.class_id] += 1

    ap50_thr = thresholds[0]
    reports = []
    for c in range(num_classes):
        per_thr = sweep.per_class[c]
        defined = [v for v in per_thr.values() if v is not None]
        reports.append(
            ClassReport(
                name=class_names[c],
                class_id=c,
                instances=instance_counts[c],
                ap50=per_thr[ap50_thr],
                ap50_95=(sum(defined) / len(defined)) if defined else None,
                metrics=class_metrics(confusion, c),
            )
        )
    prov = dict(provenance or {})
    prov.setdefault("thresholds", list(sweep.thresholds))
    prov.setdefault("confusion_iou", confusion_iou)
    prov.setdefault("confidence_floor", confidence_floor)
    return EvalReport(
        class_reports=tuple(reports),
        map50=sweep.map_per_threshold[ap50_thr],
        map50_95=sweep.aggregate,
        map_per_threshold=sweep.map_per_threshold,
        confusion=confusion,
        provenance=prov,
    )
