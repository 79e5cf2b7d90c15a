"""YOLO-format dataset export: images, label files, manifest.

Label lines are `class cx cy w h` in fixed 6-decimal normalized
coordinates. The manifest keeps paths relative to its own directory so an
exported dataset is relocatable and byte-stable across runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Optional, Sequence

import yaml

from . import png
from .aami import AAMI_CLASSES
from .boxes import BoundingBox, LabeledBox
from .errors import InputError, ParseError
from .render import LabeledFrame


def format_label_lines(labels: Sequence[LabeledBox]) -> str:
    lines = [
        f"{lb.class_id} {lb.box.cx:.6f} {lb.box.cy:.6f} {lb.box.w:.6f} {lb.box.h:.6f}"
        for lb in labels
    ]
    return "\n".join(lines) + ("\n" if lines else "")


def parse_label_file(text: str) -> list[LabeledBox]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 5:
            raise ParseError(f"expected 5 fields, got {len(parts)}", line=lineno)
        try:
            class_id = int(parts[0])
            cx, cy, w, h = (float(p) for p in parts[1:])
        except ValueError:
            raise ParseError(f"malformed label line: {line!r}", line=lineno) from None
        if class_id < 0:
            raise ParseError(f"negative class id: {class_id}", line=lineno)
        out.append(LabeledBox(class_id, BoundingBox(cx, cy, w, h)))
    return out


def read_labels_dir(directory) -> dict[str, list[LabeledBox]]:
    """Load every label file under a directory (split subdirs included)."""
    root = Path(directory)
    if not root.is_dir():
        raise InputError(f"labels directory not found: {root}")
    out: dict[str, list[LabeledBox]] = {}
    for path in sorted(root.rglob("*.txt")):
        frame_id = path.stem
        if frame_id in out:
            raise InputError(f"duplicate frame id {frame_id!r} under {root}")
        try:
            out[frame_id] = parse_label_file(path.read_text())
        except ParseError as exc:
            raise ParseError(f"{path}: {exc}", line=exc.line) from exc
    return out


@dataclass(frozen=True)
class ExportSummary:
    out_dir: str
    manifest_path: str
    frame_ids: tuple[str, ...]
    class_counts: Mapping[str, int]


def export_yolo(
    frames: Sequence[LabeledFrame],
    out_dir,
    class_names: Sequence[str] = AAMI_CLASSES,
    splits: Optional[Mapping[str, str]] = None,
) -> ExportSummary:
    """Write images/, labels/, and a dataset manifest.

    With a split assignment (frame id -> partition name) images and labels
    land in per-partition subdirectories; otherwise everything is flat.
    Frames are written in frame-id order, and duplicate ids are an error.
    """
    root = Path(out_dir)
    ordered = sorted(frames, key=lambda f: f.frame_id)
    seen: set[str] = set()
    for frame in ordered:
        if frame.frame_id in seen:
            raise InputError(f"duplicate frame id {frame.frame_id!r}")
        seen.add(frame.frame_id)
    if splits is not None:
        missing = [f.frame_id for f in ordered if f.frame_id not in splits]
        if missing:
            raise InputError(f"split assignment missing {len(missing)} frame ids: {missing[:3]}")

    partitions: list[str] = []
    if splits is not None:
        for tag in splits.values():
            if tag not in partitions:
                partitions.append(tag)

    counts = {name: 0 for name in class_names}
    for frame in ordered:
        part = splits[frame.frame_id] if splits is not None else None
        img_dir = root / "images" / part if part else root / "images"
        lbl_dir = root / "labels" / part if part else root / "labels"
        img_dir.mkdir(parents=True, exist_ok=True)
        lbl_dir.mkdir(parents=True, exist_ok=True)
        try:
            (img_dir / f"{frame.frame_id}.png").write_bytes(png.encode(frame.image))
            (lbl_dir / f"{frame.frame_id}.txt").write_text(format_label_lines(frame.labels))
        except OSError as exc:
            raise InputError(f"cannot write frame {frame.frame_id} under {root}: {exc}") from exc
        for lb in frame.labels:
            counts[class_names[lb.class_id]] += 1

    manifest: dict = {
        "path": ".",
        "nc": len(class_names),
        "names": list(class_names),
        "counts": dict(counts),
    }
    if partitions:
        for tag in partitions:
            manifest[tag] = f"images/{tag}"
    else:
        manifest["train"] = "images"
    root.mkdir(parents=True, exist_ok=True)
    manifest_path = root / "dataset.yaml"
    manifest_path.write_text(yaml.safe_dump(manifest, sort_keys=True))
    return ExportSummary(
        out_dir=str(root),
        manifest_path=str(manifest_path),
        frame_ids=tuple(f.frame_id for f in ordered),
        class_counts=counts,
    )


def read_manifest(path) -> dict:
    p = Path(path)
    try:
        data = yaml.safe_load(p.read_text())
    except OSError as exc:
        raise InputError(f"cannot read manifest {p}: {exc}") from exc
    if not isinstance(data, dict) or "names" not in data:
        raise InputError(f"not a dataset manifest: {p}")
    return data
