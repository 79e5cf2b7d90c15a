"""End-to-end CLI tests: subcommands, exit codes, artifact layout."""

import shutil

import pytest

from ecgdet import cli, synth
from ecgdet.boxes import Detection, read_detections_file, write_detections_file
from ecgdet.export import parse_label_file, read_labels_dir, read_manifest
from ecgdet.splits import read_split_dir


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("corpus")
    synth.write_dataset(root, num_records=2, duration_s=60.0, seed=0)
    return root


@pytest.fixture(scope="module")
def dataset(tmp_path_factory, corpus):
    out = tmp_path_factory.mktemp("artifacts") / "dataset"
    assert cli.main(["build", "--records", str(corpus), "--out", str(out)]) == 0
    return out


def oracle_detections_for(dataset_dir):
    labels = read_labels_dir(dataset_dir / "labels")
    return {
        frame_id: [Detection(lb.class_id, lb.box, 1.0) for lb in boxes]
        for frame_id, boxes in labels.items()
    }


# ----------------------------------------------------------------- ingest

def test_ingest_prints_per_record_counts(corpus, capsys):
    assert cli.main(["ingest", str(corpus)]) == 0
    out = capsys.readouterr().out
    assert "record" in out and "beats" in out
    assert "s00" in out and "s01" in out
    assert "total" in out


def test_ingest_missing_dir(tmp_path, capsys):
    assert cli.main(["ingest", str(tmp_path / "nowhere")]) == 2
    assert "error:" in capsys.readouterr().err


# ------------------------------------------------------------------ build

def test_build_artifacts(dataset):
    manifest = read_manifest(dataset / "dataset.yaml")
    assert manifest["names"] == ["N", "S", "V", "F", "Q"]
    assert (dataset / "run_config.yaml").exists()
    images = sorted(p.name for p in (dataset / "images").iterdir())
    labels = sorted(p.name for p in (dataset / "labels").iterdir())
    assert len(images) == len(labels) > 0
    assert [i.replace(".png", "") for i in images] == [l.replace(".txt", "") for l in labels]
    total_boxes = 0
    for label_file in (dataset / "labels").iterdir():
        boxes = parse_label_file(label_file.read_text())
        total_boxes += len(boxes)
        for lb in boxes:
            b = lb.box
            assert 0.0 <= b.cx <= 1.0 and 0.0 <= b.cy <= 1.0
            assert 0.0 < b.w <= 1.0 and 0.0 < b.h <= 1.0
    assert total_boxes == sum(manifest["counts"].values())


def test_build_deterministic_and_seed_sensitive(tmp_path, capsys):
    corpus = tmp_path / "records"
    synth.write_dataset(corpus, num_records=1, duration_s=30.0, seed=2)
    base = ["build", "--records", str(corpus)]
    assert cli.main(base + ["--out", str(tmp_path / "a")]) == 0
    assert cli.main(base + ["--out", str(tmp_path / "b")]) == 0
    assert cli.main(base + ["--out", str(tmp_path / "c"), "--seed", "9"]) == 0

    a_images = sorted((tmp_path / "a" / "images").iterdir())
    b_images = sorted((tmp_path / "b" / "images").iterdir())
    assert [p.name for p in a_images] == [p.name for p in b_images]
    for pa, pb in zip(a_images, b_images):
        assert pa.read_bytes() == pb.read_bytes()
    assert (tmp_path / "a" / "dataset.yaml").read_bytes() == (
        tmp_path / "b" / "dataset.yaml"
    ).read_bytes()
    for la, lb in zip(
        sorted((tmp_path / "a" / "labels").iterdir()),
        sorted((tmp_path / "b" / "labels").iterdir()),
    ):
        assert la.read_bytes() == lb.read_bytes()

    c_images = sorted((tmp_path / "c" / "images").iterdir())
    assert any(pa.read_bytes() != pc.read_bytes() for pa, pc in zip(a_images, c_images))


def test_build_requires_out(corpus, capsys):
    assert cli.main(["build", "--records", str(corpus)]) == 2
    assert "needs --out" in capsys.readouterr().err


def test_build_missing_dat(tmp_path, corpus, capsys):
    broken = tmp_path / "broken"
    shutil.copytree(corpus, broken)
    (broken / "s01.dat").unlink()
    assert cli.main(["build", "--records", str(broken), "--out", str(tmp_path / "d")]) == 2
    assert not (tmp_path / "d").exists()  # partial outputs cleaned up


# ------------------------------------------------------------------ split

def test_split_holdout(dataset, tmp_path, capsys):
    out = tmp_path / "splits"
    code = cli.main(["split", "--labels", str(dataset / "labels"), "--out", str(out)])
    assert code == 0
    mapping = read_split_dir(out)
    assert set(mapping) == set(read_labels_dir(dataset / "labels"))
    assert set(mapping.values()) <= {"train", "val", "test"}


def test_split_kfold(dataset, tmp_path):
    out = tmp_path / "folds"
    code = cli.main(
        ["split", "--labels", str(dataset / "labels"), "--out", str(out), "--kfold", "--k", "4"]
    )
    assert code == 0
    fold_dirs = sorted(p.name for p in out.iterdir() if p.is_dir())
    assert fold_dirs == ["fold00", "fold01", "fold02", "fold03"]
    val_ids = set()
    for fold_dir in fold_dirs:
        mapping = read_split_dir(out / fold_dir)
        val_ids |= {fid for fid, tag in mapping.items() if tag == "val"}
    assert val_ids == set(read_labels_dir(dataset / "labels"))


def test_split_patient_wise(dataset, tmp_path):
    out = tmp_path / "pw"
    code = cli.main(
        [
            "split",
            "--labels",
            str(dataset / "labels"),
            "--out",
            str(out),
            "--strategy",
            "patient-wise",
        ]
    )
    assert code == 0
    mapping = read_split_dir(out)
    by_record = {}
    for frame_id, tag in mapping.items():
        by_record.setdefault(frame_id.split("-")[0], set()).add(tag)
    assert all(len(tags) == 1 for tags in by_record.values())


def test_split_bad_ratios(dataset, tmp_path, capsys):
    code = cli.main(
        [
            "split",
            "--labels",
            str(dataset / "labels"),
            "--out",
            str(tmp_path / "x"),
            "--ratios",
            "0.5,0.6",
        ]
    )
    assert code == 2
    assert "error:" in capsys.readouterr().err


# ------------------------------------------------------------------- eval

def test_eval_oracle_detections(dataset, tmp_path, capsys):
    detections_path = tmp_path / "detections.txt"
    write_detections_file(detections_path, oracle_detections_for(dataset))
    out = tmp_path / "evalout"
    code = cli.main(
        [
            "eval",
            "--labels",
            str(dataset / "labels"),
            "--detections",
            str(detections_path),
            "--out",
            str(out),
        ]
    )
    assert code == 0
    text = capsys.readouterr().out
    assert "mean" in text
    assert (out / "report.txt").exists()
    assert (out / "report.csv").exists()
    assert (out / "report.yaml").exists()
    assert (out / "run_config.yaml").exists()


def test_eval_empty_detections(dataset, tmp_path, capsys):
    detections_path = tmp_path / "empty.txt"
    detections_path.write_text("")
    assert read_detections_file(detections_path) == {}
    code = cli.main(
        ["eval", "--labels", str(dataset / "labels"), "--detections", str(detections_path)]
    )
    assert code == 0
    assert "0.000" in capsys.readouterr().out


def test_eval_missing_labels(tmp_path, capsys):
    detections_path = tmp_path / "d.txt"
    detections_path.write_text("")
    code = cli.main(
        ["eval", "--labels", str(tmp_path / "absent"), "--detections", str(detections_path)]
    )
    assert code == 2


def test_eval_bad_thresholds(dataset, tmp_path, capsys):
    detections_path = tmp_path / "d.txt"
    detections_path.write_text("")
    code = cli.main(
        [
            "eval",
            "--labels",
            str(dataset / "labels"),
            "--detections",
            str(detections_path),
            "--thresholds",
            "nope",
        ]
    )
    assert code == 2


# --------------------------------------------------------------- simulate

def test_simulate_oracle_session(corpus, tmp_path, capsys):
    out = tmp_path / "sim"
    code = cli.main(
        [
            "simulate",
            "--record",
            str(corpus / "s00"),
            "--detector",
            "oracle",
            "--speed",
            "max",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    text = capsys.readouterr().out
    assert "session s00: 51/51 frames" in text
    assert "session mAP@50 1.000" in text
    assert "overhead_ms" in text
    assert (out / "session.yaml").exists()
    assert (out / "detections.txt").exists()
    parsed = read_detections_file(out / "detections.txt")
    assert len(parsed) == 51


def test_simulate_subprocess_needs_command(corpus, capsys):
    code = cli.main(["simulate", "--record", str(corpus / "s00"), "--detector", "subprocess"])
    assert code == 2
    assert "needs --command" in capsys.readouterr().err


def test_simulate_missing_record(tmp_path, capsys):
    assert cli.main(["simulate", "--record", str(tmp_path / "nope")]) == 2


# ----------------------------------------------------------------- report

def test_report_records(corpus, capsys):
    assert cli.main(["report", "--records", str(corpus)]) == 0
    out = capsys.readouterr().out
    assert "6424" in out  # reference N count shown for comparison
    assert "%" in out


def test_report_labels(dataset, capsys):
    assert cli.main(["report", "--labels", str(dataset / "labels")]) == 0
    assert "instance counts" in capsys.readouterr().out


def test_report_needs_source(capsys):
    assert cli.main(["report"]) == 2


def test_unknown_subcommand_exits_2(capsys):
    with pytest.raises(SystemExit) as exc_info:
        cli.main(["frobnicate"])
    assert exc_info.value.code == 2
