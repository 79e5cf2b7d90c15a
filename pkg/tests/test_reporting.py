"""Report rendering tests: text tables, CSV round trip, CV summaries."""

import pytest

from ecgdet.boxes import Detection, LabeledBox
from ecgdet.errors import ParseError
from ecgdet.metrics import evaluate
from ecgdet.reporting import (
    REFERENCE_CLASS_COUNTS,
    counts_comparison,
    cv_summary,
    parse_csv_report,
    render_csv,
    render_cv_table,
    render_text,
    report_mapping,
)
from tests.conftest import gt

# Per-fold precision column of a published 10-fold run; the summary row
# must reproduce the published mean 0.959 and deviation 0.008.
FOLD_PRECISION = [0.959, 0.966, 0.965, 0.967, 0.939, 0.962, 0.962, 0.952, 0.953, 0.961]


@pytest.fixture
def report():
    gts = {
        "f1": [gt(0, 0.3, 0.3, 0.2, 0.2), gt(2, 0.7, 0.7, 0.2, 0.2)],
        "f2": [gt(0, 0.5, 0.5, 0.25, 0.25)],
    }
    dets = {
        fid: [Detection(g.class_id, g.box, 0.9) for g in gs] for fid, gs in gts.items()
    }
    return evaluate(dets, gts, provenance={"split": "val", "seed": 17})


def test_render_text_layout(report):
    text = render_text(report)
    lines = text.splitlines()
    assert lines[0] == "mAP@50     1.000"
    assert lines[1] == "mAP@50-95  1.000"
    # one row per class, then the mean row
    names = [ln.split()[0] for ln in lines[5:11]]
    assert names == ["N", "S", "V", "F", "Q", "mean"]
    assert "confusion matrix" in text
    # undefined metrics render as dashes, never zeros
    s_row = lines[6]
    assert " -" in s_row


def test_render_text_deterministic(report):
    assert render_text(report) == render_text(report)


def test_csv_round_trip(report):
    rows = parse_csv_report(render_csv(report))
    assert [r["class"] for r in rows] == ["N", "S", "V", "F", "Q", "mean"]
    n_row = rows[0]
    assert n_row["instances"] == 2
    assert n_row["ap50"] == 1.0
    assert n_row["precision"] == 1.0
    s_row = rows[1]
    assert s_row["ap50"] is None
    mean_row = rows[-1]
    assert mean_row["ap50"] == report.map50
    assert mean_row["ap50_95"] == report.map50_95


def test_csv_full_precision(report):
    # values with long expansions survive the round trip bit-exactly
    third = 1.0 / 3.0
    text = f"class,instances,precision,recall,f1,ap50,ap50_95,accuracy,specificity\nN,3,{third!r},,,,,,\n"
    rows = parse_csv_report(text)
    assert rows[0]["precision"] == third
    assert rows[0]["recall"] is None


@pytest.mark.parametrize(
    "text",
    ["", "bad,header\n", "class,instances,precision,recall,f1,ap50,ap50_95,accuracy,specificity\nN,1\n"],
)
def test_parse_csv_report_malformed(text):
    with pytest.raises(ParseError):
        parse_csv_report(text)


def test_report_mapping_structure(report):
    mapping = report_mapping(report)
    assert mapping["map50"] == 1.0
    assert set(mapping["map_per_threshold"]) == {f"{t:.2f}" for t in (0.5, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95)}
    assert len(mapping["classes"]) == 5
    assert mapping["classes"][0]["name"] == "N"
    assert len(mapping["confusion"]) == 6
    assert mapping["provenance"]["seed"] == 17
    import yaml

    assert yaml.safe_load(yaml.safe_dump(mapping)) == mapping


# ------------------------------------------------------------- CV summary

def test_cv_summary_published_fold_values():
    mean, std = cv_summary(FOLD_PRECISION)
    assert round(mean, 3) == 0.959
    assert round(std, 3) == 0.008


def test_cv_summary_degenerate():
    mean, std = cv_summary([0.5])
    assert (mean, std) == (0.5, 0.0)
    with pytest.raises(ValueError):
        cv_summary([])


def test_render_cv_table():
    rows = [{"precision": p, "recall": p - 0.01} for p in FOLD_PRECISION]
    table = render_cv_table(rows, ["precision", "recall"])
    lines = table.splitlines()
    assert lines[0].split() == ["fold", "precision", "recall"]
    assert len(lines) == 2 + 10 + 2  # header, rule, folds, mean, std
    mean_line = lines[-2].split()
    std_line = lines[-1].split()
    assert mean_line[0] == "mean" and mean_line[1] == "0.959"
    assert std_line[0] == "std" and std_line[1] == "0.008"


# -------------------------------------------------------- count comparison

def test_counts_comparison_table():
    actual = {"N": 6424, "V": 2899, "S": 2225, "Q": 640, "F": 711}
    text = counts_comparison(actual)
    assert "+0.0%" in text
    assert text.splitlines()[-1].split() == ["total", "12899", "12899", "+0.0%"]


def test_counts_comparison_deviation_and_unknowns():
    text = counts_comparison({"N": 3212, "X": 5})
    lines = {ln.split()[0]: ln.split() for ln in text.splitlines()[2:]}
    assert lines["N"][3] == "-50.0%"
    assert lines["V"][1] == "0"
    assert lines["X"][2] == "-"  # no reference for unknown class
    assert REFERENCE_CLASS_COUNTS["N"] == 6424
