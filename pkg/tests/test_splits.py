"""Split generator tests: holdout sizes, stratification, k-fold, files."""

from collections import Counter

import pytest

from ecgdet.errors import ConfigError, InputError
from ecgdet.splits import (
    HOLDOUT_NAMES,
    HOLDOUT_RATIOS,
    SplitAssignment,
    kfold,
    read_split_dir,
    stratified_holdout,
    write_split_files,
)


def single_class(n, class_id=0, prefix="f"):
    return {f"{prefix}{i:03d}": [class_id] for i in range(n)}


def sizes(assignment):
    return {tag: len(ids) for tag, ids in assignment.partitions().items()}


# --------------------------------------------------------------- holdout

def test_holdout_100_frames_default_ratios():
    a = stratified_holdout(single_class(100), seed=3)
    assert sizes(a) == {"train": 82, "val": 12, "test": 6}
    assert a.strategy == "image-stratified"
    assert a.seed == 3


def test_holdout_defaults_are_paper_protocol():
    assert HOLDOUT_RATIOS == (0.82, 0.12, 0.06)
    assert HOLDOUT_NAMES == ("train", "val", "test")


def test_holdout_covers_all_frames():
    frames = single_class(57)
    a = stratified_holdout(frames, seed=0)
    assert set(a.assignment) == set(frames)
    assert set(a.assignment.values()) <= {"train", "val", "test"}


def test_holdout_deterministic():
    frames = {f"f{i}": [i % 3] for i in range(100)}
    a = stratified_holdout(frames, seed=11)
    b = stratified_holdout(frames, seed=11)
    assert a.assignment == b.assignment


def test_holdout_seed_changes_assignment():
    frames = single_class(100)
    a = stratified_holdout(frames, seed=0)
    b = stratified_holdout(frames, seed=1)
    assert a.assignment != b.assignment


@pytest.mark.parametrize("n", [7, 51, 101, 499])
def test_holdout_sizes_within_one_of_quota(n):
    a = stratified_holdout(single_class(n), seed=n)
    got = sizes(a)
    for tag, ratio in zip(HOLDOUT_NAMES, HOLDOUT_RATIOS):
        assert abs(got.get(tag, 0) - n * ratio) <= 1.0


def test_holdout_two_class_balance():
    # Spec'd invariant: two classes 50/50 stay 50/50 within each partition.
    frames = single_class(50, 0, "a")
    frames.update(single_class(50, 1, "b"))
    for seed in range(5):
        a = stratified_holdout(frames, seed=seed)
        for ids in a.partitions().values():
            counts = Counter(0 if f.startswith("a") else 1 for f in ids)
            assert abs(counts[0] - counts[1]) <= 1


def test_holdout_rare_class_distributed():
    frames = {f"n{i:03d}": [0] for i in range(200)}
    frames.update({f"v{i:03d}": [2] for i in range(10)})
    a = stratified_holdout(frames, seed=2)
    parts = a.partitions()
    rare = {tag: sum(1 for f in ids if f.startswith("v")) for tag, ids in parts.items()}
    # 10 rare frames at 0.82/0.12/0.06 land within one frame of 8.2/1.2/0.6.
    assert abs(rare["train"] - 8.2) <= 1.0
    assert abs(rare.get("val", 0) - 1.2) <= 1.0
    assert abs(rare.get("test", 0) - 0.6) <= 1.0


def test_holdout_multi_class_frames_bucket_by_rarest():
    # One frame holds both a common and a rare class; it buckets with the rare.
    frames = {f"c{i:02d}": [0] for i in range(40)}
    frames["mix"] = [0, 3]
    a = stratified_holdout(frames, seed=0)
    assert a.assignment["mix"] in {"train", "val", "test"}
    assert len(a.assignment) == 41


def test_holdout_classless_frames_still_assigned():
    frames = {"a": [0], "b": [], "c": []}
    a = stratified_holdout(frames, ratios=(0.5, 0.5), partition_names=("x", "y"), seed=0)
    assert set(a.assignment) == {"a", "b", "c"}


@pytest.mark.parametrize(
    "ratios",
    [(), (0.5, 0.6), (0.5, 0.5, 0.5), (1.0,), (0.0, 1.0), (-0.2, 1.2), (0.82, 0.12)],
)
def test_holdout_ratio_validation(ratios):
    with pytest.raises(ConfigError):
        stratified_holdout(single_class(10), ratios=ratios, partition_names=("a",) * len(ratios) or ("a",))


def test_holdout_names_ratio_mismatch():
    with pytest.raises(ConfigError, match="partition names"):
        stratified_holdout(single_class(10), ratios=(0.5, 0.5), partition_names=("only",))


def test_holdout_patient_wise_groups():
    frames = {f"r{r}-{i:04d}": [i % 2] for r in range(6) for i in range(10)}
    groups = {fid: fid.split("-")[0] for fid in frames}
    a = stratified_holdout(frames, seed=4, groups=groups)
    assert a.strategy == "patient-wise"
    by_group = {}
    for fid, tag in a.assignment.items():
        by_group.setdefault(fid.split("-")[0], set()).add(tag)
    assert all(len(tags) == 1 for tags in by_group.values())


def test_partitions_sorted_within_tag():
    a = stratified_holdout(single_class(20), seed=9)
    for ids in a.partitions().values():
        assert ids == sorted(ids)


# ----------------------------------------------------------------- kfold

def test_kfold_ten_equal_parts():
    folds = kfold(single_class(100), k=10, seed=0)
    assert len(folds) == 10
    val_sets = []
    for i, fold in enumerate(folds):
        assert fold.fold == i and fold.k == 10
        val = {fid for fid, tag in fold.assignment.items() if tag == "val"}
        assert len(val) == 10
        assert len(fold.assignment) == 100
        val_sets.append(val)
    union = set().union(*val_sets)
    assert union == set(single_class(100))
    assert sum(len(v) for v in val_sets) == len(union)  # disjoint


def test_kfold_sizes_differ_by_at_most_one():
    folds = kfold(single_class(103), k=10, seed=1)
    val_sizes = sorted(
        sum(1 for tag in f.assignment.values() if tag == "val") for f in folds
    )
    assert val_sizes == [10] * 7 + [11] * 3


def test_kfold_stratified_when_divisible():
    frames = single_class(60, 0, "x")
    frames.update(single_class(30, 1, "y"))
    for fold in kfold(frames, k=10, seed=5):
        val = [fid for fid, tag in fold.assignment.items() if tag == "val"]
        counts = Counter(0 if v.startswith("x") else 1 for v in val)
        assert counts[0] == 6 and counts[1] == 3


def test_kfold_proportions_within_two_points():
    frames = {f"n{i:04d}": [0] for i in range(730)}
    frames.update({f"s{i:04d}": [1] for i in range(190)})
    frames.update({f"v{i:04d}": [2] for i in range(57)})
    total = len(frames)
    global_share = {0: 730 / total, 1: 190 / total, 2: 57 / total}
    for fold in kfold(frames, k=10, seed=7):
        val = [fid for fid, tag in fold.assignment.items() if tag == "val"]
        counts = Counter({0: 0, 1: 0, 2: 0})
        counts.update({"n": 0, "s": 1, "v": 2}[v[0]] for v in val)
        for c, share in global_share.items():
            assert abs(counts[c] / len(val) - share) <= 0.02


def test_kfold_deterministic():
    frames = {f"f{i}": [i % 4] for i in range(53)}
    a = kfold(frames, k=5, seed=2)
    b = kfold(frames, k=5, seed=2)
    assert [f.assignment for f in a] == [f.assignment for f in b]


def test_kfold_groups_never_straddle():
    frames = {f"r{r}-{i:02d}": [0] for r in range(8) for i in range(5)}
    groups = {fid: fid.split("-")[0] for fid in frames}
    for fold in kfold(frames, k=4, seed=0, groups=groups):
        val_groups = {
            fid.split("-")[0] for fid, tag in fold.assignment.items() if tag == "val"
        }
        train_groups = {
            fid.split("-")[0] for fid, tag in fold.assignment.items() if tag == "train"
        }
        assert not (val_groups & train_groups)


def test_kfold_validation():
    with pytest.raises(ConfigError):
        kfold(single_class(10), k=1)
    with pytest.raises(ConfigError):
        kfold(single_class(10), k=11)
    groups = {f"f{i:03d}": "same" for i in range(10)}
    with pytest.raises(ConfigError):
        kfold(single_class(10), k=2, groups=groups)


# ------------------------------------------------------------ split files

def test_write_and_read_split_files(tmp_path):
    a = stratified_holdout(single_class(25), seed=6)
    paths = write_split_files(a, tmp_path)
    assert sorted(p.rsplit("/", 1)[-1] for p in paths) == ["test.txt", "train.txt", "val.txt"]
    mapping = read_split_dir(tmp_path)
    assert mapping == dict(a.assignment)


def test_split_file_format(tmp_path):
    a = SplitAssignment(assignment={"b": "train", "a": "train"}, seed=0, strategy="image-stratified")
    write_split_files(a, tmp_path)
    assert (tmp_path / "train.txt").read_text() == "a\nb\n"


def test_read_split_dir_duplicate_id(tmp_path):
    (tmp_path / "train.txt").write_text("f1\n")
    (tmp_path / "val.txt").write_text("f1\n")
    with pytest.raises(InputError, match="two partitions"):
        read_split_dir(tmp_path)


def test_read_split_dir_missing_or_empty(tmp_path):
    with pytest.raises(InputError):
        read_split_dir(tmp_path / "absent")
    empty = tmp_path / "empty"
    empty.mkdir()
    with pytest.raises(InputError):
        read_split_dir(empty)


def test_read_split_dir_skips_blank_lines(tmp_path):
    (tmp_path / "train.txt").write_text("f1\n\nf2\n  \n")
    assert read_split_dir(tmp_path) == {"f1": "train", "f2": "train"}
