"""Class-balanced dataset splitting: stratified holdout and k-fold CV.

Frames are bucketed by their rarest contained class (rarity measured over
the whole dataset) so minority classes spread evenly. Partition sizes are
allocated by a largest-deficit counter, which keeps every partition within
one frame of its exact quota no matter how many buckets feed it.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Optional, Sequence

import numpy as np

from .errors import ConfigError, InputError

HOLDOUT_RATIOS = (0.82, 0.12, 0.06)
HOLDOUT_NAMES = ("train", "val", "test")


@dataclass(frozen=True)
class SplitAssignment:
    """frame id -> partition tag, plus how the split was made."""

    assignment: Mapping[str, str]
    seed: int
    strategy: str
    fold: Optional[int] = None
    k: Optional[int] = None

    def partitions(self) -> dict[str, list[str]]:
        out: dict[str, list[str]] = {}
        for frame_id in sorted(self.assignment):
            out.setdefault(self.assignment[frame_id], []).append(frame_id)
        return out


def _class_totals(frame_classes: Mapping[str, Sequence[int]]) -> dict[int, int]:
    totals: dict[int, int] = {}
    for classes in frame_classes.values():
        for c in classes:
            totals[c] = totals.get(c, 0) + 1
    return totals


def _bucketed_order(
    frame_classes: Mapping[str, Sequence[int]],
    seed: int,
    groups: Optional[Mapping[str, str]] = None,
) -> list[list[str]]:
    """Units (frames or whole groups) in bucket order, shuffled per bucket.

    Bucket key is the rarest class the unit contains; buckets run rarest
    first. Each returned unit is the list of frame ids assigned together.
    """
    totals = _class_totals(frame_classes)

    unit_frames: dict[str, list[str]] = {}
    unit_classes: dict[str, list[int]] = {}
    for frame_id in frame_classes:
        unit = groups[frame_id] if groups is not None else frame_id
        unit_frames.setdefault(unit, []).append(frame_id)
        unit_classes.setdefault(unit, []).extend(frame_classes[frame_id])

    def bucket_key(unit: str):
        classes = unit_classes[unit]
        if not classes:
            # Classless units sort after every real bucket.
            return (float("inf"), -1)
        return min((totals[c], c) for c in set(classes))

    buckets: dict[tuple, list[str]] = {}
    for unit in sorted(unit_frames):
        buckets.setdefault(bucket_key(unit), []).append(unit)

    rng = np.random.Generator(np.random.PCG64(seed))
    ordered: list[list[str]] = []
    for key in sorted(buckets):
        units = buckets[key]
        perm = rng.permutation(len(units))
        for i in perm:
            ordered.append(sorted(unit_frames[units[i]]))
    return ordered


def _validate_ratios(ratios: Sequence[float]) -> None:
    if not ratios:
        raise ConfigError("ratios must be non-empty")
    for r in ratios:
        if not 0.0 < r < 1.0:
            raise ConfigError(f"each ratio must lie in (0, 1), got {r}")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ConfigError(f"ratios must sum to 1, got {sum(ratios)}")


def stratified_holdout(
    frame_classes: Mapping[str, Sequence[int]],
    ratios: Sequence[float] = HOLDOUT_RATIOS,
    seed: int = 0,
    partition_names: Sequence[str] = HOLDOUT_NAMES,
    groups: Optional[Mapping[str, str]] = None,
) -> SplitAssignment:
    """Deterministic stratified holdout split.

    frame_classes maps each frame id to the class ids it contains. Pass
    groups (frame id -> group id, e.g. record id) for patient-wise
    splitting; grouped frames always land in the same partition.
    """
    _validate_ratios(ratios)
    if len(ratios) != len(partition_names):
        raise ConfigError(
            f"{len(partition_names)} partition names but {len(ratios)} ratios"
        )
    units = _bucketed_order(frame_classes, seed, groups)
    deficits = [0.0] * len(ratios)
    assignment: dict[str, str] = {}
    for unit in units:
        size = len(unit)
        for p, r in enumerate(ratios):
            deficits[p] += size * r
        p_best = max(range(len(ratios)), key=lambda p: (deficits[p], -p))
        deficits[p_best] -= size
        for frame_id in unit:
            assignment[frame_id] = partition_names[p_best]
    strategy = "patient-wise" if groups is not None else "image-stratified"
    return SplitAssignment(assignment=assignment, seed=seed, strategy=strategy)


def kfold(
    frame_classes: Mapping[str, Sequence[int]],
    k: int = 10,
    seed: int = 0,
    groups: Optional[Mapping[str, str]] = None,
) -> list[SplitAssignment]:
    """Stratified k-fold assignments; fold i is validation, the rest train.

    Units are dealt round-robin within each rarest-class bucket, so fold
    sizes differ by at most one and per-bucket membership stays balanced.
    """
    if k < 2:
        raise ConfigError(f"k must be >= 2, got {k}")
    n_units = len(set(groups.values())) if groups is not None else len(frame_classes)
    if k > n_units:
        raise ConfigError(f"k={k} exceeds the {n_units} available units")
    units = _bucketed_order(frame_classes, seed, groups)
    fold_of: dict[str, int] = {}
    for j, unit in enumerate(units):
        for frame_id in unit:
            fold_of[frame_id] = j % k
    strategy = "patient-wise" if groups is not None else "image-stratified"
    out = []
    for i in range(k):
        assignment = {
            frame_id: ("val" if fold == i else "train") for frame_id, fold in fold_of.items()
        }
        out.append(SplitAssignment(assignment=assignment, seed=seed, strategy=strategy, fold=i, k=k))
    return out


def write_split_files(assignment: SplitAssignment, out_dir) -> list[str]:
    """One plain-text id list per partition; returns the written paths."""
    root = Path(out_dir)
    root.mkdir(parents=True, exist_ok=True)
    paths = []
    for tag, frame_ids in assignment.partitions().items():
        path = root / f"{tag}.txt"
        path.write_text("\n".join(frame_ids) + "\n")
        paths.append(str(path))
    return paths


def read_split_dir(directory) -> dict[str, str]:
    """Rebuild a frame id -> partition mapping from split files."""
    root = Path(directory)
    if not root.is_dir():
        raise InputError(f"split directory not found: {root}")
    mapping: dict[str, str] = {}
    for path in sorted(root.glob("*.txt")):
        tag = path.stem
        for line in path.read_text().splitlines():
            frame_id = line.strip()
            if not frame_id:
                continue
            if frame_id in mapping:
                raise InputError(f"frame id {frame_id!r} appears in two partitions")
            mapping[frame_id] = tag
    if not mapping:
        raise InputError(f"no split files under {root}")
    return mapping
