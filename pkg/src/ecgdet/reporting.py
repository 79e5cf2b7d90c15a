"""Report rendering: text tables, CSV, and machine-readable mappings.

Display output rounds to 3 decimals; CSV and mapping output keep full
precision so a reparse reproduces the values exactly.
"""

from __future__ import annotations

import math
from typing import Mapping, Optional, Sequence

from .errors import ParseError
from .metrics import ClassMetrics, ConfusionMatrix, EvalReport

# Published per-class beat counts for the MIT-BIH ectopic-window dataset,
# used by comparison reports. Never asserted: our pipeline's thinning and
# exclusion knobs legitimately move these numbers.
REFERENCE_CLASS_COUNTS: Mapping[str, int] = {
    "N": 6424,
    "V": 2899,
    "S": 2225,
    "Q": 640,
    "F": 711,
}

_METRIC_COLUMNS = ("precision", "recall", "f1", "ap50", "ap50_95", "accuracy", "specificity")


def _fmt3(value: Optional[float]) -> str:
    return "-" if value is None else f"{value:.3f}"


def _fmt_full(value: Optional[float]) -> str:
    return "" if value is None else repr(float(value))


def _metric_tuple(m: ClassMetrics) -> tuple[Optional[float], ...]:
    return (m.precision, m.recall, m.f1, m.accuracy, m.specificity)


def render_text(report: EvalReport) -> str:
    """Human-readable summary table plus the confusion matrix."""
    lines = []
    lines.append(f"mAP@50     {report.map50:.3f}")
    lines.append(f"mAP@50-95  {report.map50_95:.3f}")
    lines.append("")
    header = f"{'class':<8}{'inst':>6}{'P':>8}{'R':>8}{'F1':>8}{'AP50':>8}{'AP50-95':>9}{'Acc':>8}{'Spec':>8}"
    lines.append(header)
    lines.append("-" * len(header))
    for row in report.class_reports:
        p, r, f1, acc, spec = _metric_tuple(row.metrics)
        lines.append(
            f"{row.name:<8}{row.instances:>6}"
            f"{_fmt3(p):>8}{_fmt3(r):>8}{_fmt3(f1):>8}"
            f"{_fmt3(row.ap50):>8}{_fmt3(row.ap50_95):>9}"
            f"{_fmt3(acc):>8}{_fmt3(spec):>8}"
        )
    mean = report.mean_metrics
    total = sum(r.instances for r in report.class_reports)
    ap50s = [r.ap50 for r in report.class_reports if r.ap50 is not None]
    ap95s = [r.ap50_95 for r in report.class_reports if r.ap50_95 is not None]
    p, r, f1, acc, spec = _metric_tuple(mean)
    lines.append(
        f"{'mean':<8}{total:>6}"
        f"{_fmt3(p):>8}{_fmt3(r):>8}{_fmt3(f1):>8}"
        f"{_fmt3(sum(ap50s) / len(ap50s) if ap50s else None):>8}"
        f"{_fmt3(sum(ap95s) / len(ap95s) if ap95s else None):>9}"
        f"{_fmt3(acc):>8}{_fmt3(spec):>8}"
    )
    lines.append("")
    lines.append(render_confusion(report.confusion, [r.name for r in report.class_reports]))
    return "\n".join(lines) + "\n"


def render_confusion(confusion: ConfusionMatrix, class_names: Sequence[str]) -> str:
    names = list(class_names) + ["bg"]
    width = max(6, max(len(n) for n in names) + 1)
    lines = ["confusion matrix (rows predicted, columns actual)"]
    lines.append(" " * width + "".join(f"{n:>{width}}" for n in names))
    for i, name in enumerate(names):
        row = confusion.counts[i]
        lines.append(f"{name:>{width}}" + "".join(f"{int(v):>{width}}" for v in row))
    return "\n".join(lines)


def render_csv(report: EvalReport) -> str:
    """Full-precision per-class rows plus a mean row."""
    cols = ["class", "instances", *_METRIC_COLUMNS]
    lines = [",".join(cols)]
    for row in report.class_reports:
        m = row.metrics
        values = [
            row.name,
            str(row.instances),
            _fmt_full(m.precision),
            _fmt_full(m.recall),
            _fmt_full(m.f1),
            _fmt_full(row.ap50),
            _fmt_full(row.ap50_95),
            _fmt_full(m.accuracy),
            _fmt_full(m.specificity),
        ]
        lines.append(",".join(values))
    mean = report.mean_metrics
    total = sum(r.instances for r in report.class_reports)
    lines.append(
        ",".join(
            [
                "mean",
                str(total),
                _fmt_full(mean.precision),
                _fmt_full(mean.recall),
                _fmt_full(mean.f1),
                _fmt_full(report.map50),
                _fmt_full(report.map50_95),
                _fmt_full(mean.accuracy),
                _fmt_full(mean.specificity),
            ]
        )
    )
    return "\n".join(lines) + "\n"


def parse_csv_report(text: str) -> list[dict[str, Optional[float] | str | int]]:
    """Reparse render_csv output; numeric fields come back as floats."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ParseError("empty report", line=1)
    cols = lines[0].split(",")
    expected = ["class", "instances", *_METRIC_COLUMNS]
    if cols != expected:
        raise ParseError(f"unexpected report header: {lines[0]!r}", line=1)
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != len(cols):
            raise ParseError(f"expected {len(cols)} fields", line=lineno)
        row: dict[str, Optional[float] | str | int] = {"class": parts[0], "instances": int(parts[1])}
        for name, raw in zip(_METRIC_COLUMNS, parts[2:]):
            row[name] = float(raw) if raw else None
        rows.append(row)
    return rows


def report_mapping(report: EvalReport) -> dict:
    """Machine-readable mapping (for YAML/JSON dumps), full precision."""
    return {
        "map50": report.map50,
        "map50_95": report.map50_95,
        "map_per_threshold": {f"{t:.2f}": v for t, v in report.map_per_threshold.items()},
        "classes": [
            {
                "name": row.name,
                "class_id": row.class_id,
                "instances": row.instances,
                "ap50": row.ap50,
                "ap50_95": row.ap50_95,
                "precision": row.metrics.precision,
                "recall": row.metrics.recall,
                "f1": row.metrics.f1,
                "accuracy": row.metrics.accuracy,
                "specificity": row.metrics.specificity,
            }
            for row in report.class_reports
        ],
        "confusion": [[int(v) for v in row] for row in report.confusion.counts],
        "provenance": dict(report.provenance),
    }


# --- Cross-validation summary ----------------------------------------------


def cv_summary(values: Sequence[float]) -> tuple[float, float]:
    """Mean and population standard deviation of per-fold values.

    Population (not sample) deviation: the fold set is treated as the
    complete population of runs being summarized.
    """
    n = len(values)
    if n == 0:
        raise ValueError("no fold values")
    mean = sum(values) / n
    var = sum((v - mean) ** 2 for v in values) / n
    return mean, math.sqrt(var)


def render_cv_table(
    fold_rows: Sequence[Mapping[str, float]],
    metric_names: Sequence[str],
) -> str:
    """Per-fold metric table with a mean +/- std footer row."""
    width = max(10, max(len(m) for m in metric_names) + 2)
    header = f"{'fold':<6}" + "".join(f"{m:>{width}}" for m in metric_names)
    lines = [header, "-" * len(header)]
    for i, row in enumerate(fold_rows):
        lines.append(f"{i:<6}" + "".join(f"{row[m]:>{width}.3f}" for m in metric_names))
    means = []
    stds = []
    for m in metric_names:
        mean, std = cv_summary([row[m] for row in fold_rows])
        means.append(mean)
        stds.append(std)
    lines.append(f"{'mean':<6}" + "".join(f"{v:>{width}.3f}" for v in means))
    lines.append(f"{'std':<6}" + "".join(f"{v:>{width}.3f}" for v in stds))
    return "\n".join(lines) + "\n"


# --- Class-count comparison --------------------------------------------------


def counts_comparison(
    actual: Mapping[str, int],
    reference: Mapping[str, int] = REFERENCE_CLASS_COUNTS,
) -> str:
    """Side-by-side class counts with percentage deviation; informational only."""
    names = list(reference) + [n for n in actual if n not in reference]
    header = f"{'class':<8}{'ours':>8}{'reference':>11}{'deviation':>11}"
    lines = [header, "-" * len(header)]
    for name in names:
        ours = int(actual.get(name, 0))
        ref = reference.get(name)
        if ref is None or ref == 0:
            dev = "-"
        else:
            dev = f"{100.0 * (ours - ref) / ref:+.1f}%"
        lines.append(f"{name:<8}{ours:>8}{(ref if ref is not None else '-'):>11}{dev:>11}")
    total_ours = sum(int(v) for v in actual.values())
    total_ref = sum(int(v) for v in reference.values())
    dev = f"{100.0 * (total_ours - total_ref) / total_ref:+.1f}%" if total_ref else "-"
    lines.append(f"{'total':<8}{total_ours:>8}{total_ref:>11}{dev:>11}")
    return "\n".join(lines) + "\n"
