"""Command-line entry point.

Subcommands: ingest, build, split, eval, simulate, report. Exit codes:
0 success, 1 internal error, 2 bad input or configuration.
"""

from __future__ import annotations

import argparse
import shlex
import shutil
import sys
from pathlib import Path
from typing import Optional, Sequence

import yaml

from . import aami, reporting
from .boxes import read_detections_file, write_detections_file
from .config import RunConfig, load_config, parse_ratios, parse_thresholds
from .errors import ConfigError, EcgDetError, InputError
from .export import export_yolo, read_labels_dir
from .metrics import evaluate
from .render import RenderStyle, augment, render_frame
from .reporting import render_text, report_mapping
from .splits import kfold, stratified_holdout, write_split_files
from .stream import (
    OracleDetector,
    SubprocessDetector,
    WeightsDetector,
    run_session,
)
from .wfdb.loader import read_record, scan_record_ids
from .windows import extract_windows, mapped_beats


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="YAML run-config file")
    parser.add_argument("--seed", type=int, help="global seed override")
    parser.add_argument("--out", help="output directory")


def _resolve_config(args: argparse.Namespace, **overrides) -> RunConfig:
    config = load_config(getattr(args, "config", None))
    overrides.setdefault("seed", getattr(args, "seed", None))
    out = getattr(args, "out", None)
    if out is not None:
        overrides.setdefault("out_dir", out)
    return config.override(**overrides)


def _load_mapping(config: RunConfig):
    if not config.mapping_csv:
        return None
    try:
        text = Path(config.mapping_csv).read_text()
    except OSError as exc:
        raise InputError(f"cannot read mapping csv {config.mapping_csv}: {exc}") from exc
    return aami.parse_mapping_csv(text)


def _record_ids(config: RunConfig) -> list[str]:
    ids = scan_record_ids(config.records_dir)
    if not ids:
        raise InputError(f"no records found under {config.records_dir}")
    if config.apply_exclusion:
        ids = aami.filter_records(ids, config.exclude_records)
    return ids


def _write_resolved(config: RunConfig, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    config.write(out_dir / "run_config.yaml")


def cmd_ingest(args: argparse.Namespace) -> int:
    config = _resolve_config(args, records_dir=args.records_dir)
    if args.no_exclude:
        config = config.override(apply_exclusion=False)
    table = _load_mapping(config)
    totals = {name: 0 for name in aami.AAMI_CLASSES}
    rows = []
    for record_id in _record_ids(config):
        prefix = str(Path(config.records_dir) / record_id)
        record, annotations = read_record(prefix, annotator=config.annotator)
        beats = mapped_beats(annotations, table)
        counts = aami.count_by_class([b.class_id for b in beats])
        for name, count in counts.items():
            totals[name] += count
        rows.append((record_id, record.num_samples, len(beats), counts))
    header = f"{'record':<8}{'samples':>9}{'beats':>7}" + "".join(
        f"{n:>7}" for n in aami.AAMI_CLASSES
    )
    print(header)
    print("-" * len(header))
    for record_id, num_samples, num_beats, counts in rows:
        print(
            f"{record_id:<8}{num_samples:>9}{num_beats:>7}"
            + "".join(f"{counts[n]:>7}" for n in aami.AAMI_CLASSES)
        )
    print(
        f"{'total':<8}{'':>9}{sum(totals.values()):>7}"
        + "".join(f"{totals[n]:>7}" for n in aami.AAMI_CLASSES)
    )
    return 0


def _build_frames(config: RunConfig):
    table = _load_mapping(config)
    style = RenderStyle(
        line_width=config.line_width,
        box_half_width_s=config.box_half_width_s,
        debug_symbols=config.debug_symbols,
    )
    frames = []
    for record_id in _record_ids(config):
        prefix = str(Path(config.records_dir) / record_id)
        record, annotations = read_record(prefix, annotator=config.annotator)
        beats = mapped_beats(annotations, table)
        windows = extract_windows(
            record,
            beats,
            window_s=config.window_s,
            dedup_spacing_s=config.dedup_spacing_s,
            channel=config.channel,
        )
        frames.extend(render_frame(w, style) for w in windows)
    frames.sort(key=lambda f: (f.provenance.record_id, f.provenance.start_sample))
    if config.augment:
        frames = [
            augment(f, config.seed + i, config.grayscale_prob, config.max_rotation_deg)
            for i, f in enumerate(frames)
        ]
    return frames


def cmd_build(args: argparse.Namespace) -> int:
    config = _resolve_config(
        args,
        records_dir=args.records,
        dedup_spacing_s=args.dedup_spacing,
        box_half_width_s=args.box_half_width_s,
        line_width=args.line_width,
        window_s=args.window_s,
    )
    if args.debug_symbols:
        config = config.override(debug_symbols=True)
    if args.no_augment:
        config = config.override(augment=False)
    if args.no_exclude:
        config = config.override(apply_exclusion=False)
    if not config.out_dir:
        raise ConfigError("build needs --out (or out_dir in the config)")
    out = Path(config.out_dir)
    created = not out.exists()
    try:
        frames = _build_frames(config)
        summary = export_yolo(frames, out)
        _write_resolved(config, out)
    except BaseException:
        if created and out.exists():
            shutil.rmtree(out, ignore_errors=True)
        raise
    print(f"wrote {len(summary.frame_ids)} frames to {summary.out_dir}")
    print(reporting.counts_comparison(summary.class_counts))
    return 0


def cmd_split(args: argparse.Namespace) -> int:
    config = _resolve_config(args, k=args.k)
    if args.ratios:
        config = config.override(ratios=parse_ratios(args.ratios))
    if args.strategy:
        config = config.override(strategy=args.strategy)
    if not config.out_dir:
        raise ConfigError("split needs --out (or out_dir in the config)")
    labels = read_labels_dir(args.labels)
    frame_classes = {fid: [lb.class_id for lb in boxes] for fid, boxes in labels.items()}
    groups = None
    if config.strategy == "patient-wise":
        groups = {fid: fid.split("-")[0] for fid in frame_classes}
    elif config.strategy != "image-stratified":
        raise ConfigError(f"unknown strategy {config.strategy!r}")
    out = Path(config.out_dir)
    if args.kfold:
        assignments = kfold(frame_classes, config.k, config.seed, groups)
        for assignment in assignments:
            write_split_files(assignment, out / f"fold{assignment.fold:02d}")
        print(f"wrote {len(assignments)} folds to {out}")
    else:
        assignment = stratified_holdout(frame_classes, config.ratios, config.seed, groups=groups)
        write_split_files(assignment, out)
        sizes = {tag: len(ids) for tag, ids in assignment.partitions().items()}
        print(f"wrote holdout split to {out}: {sizes}")
    _write_resolved(config, out)
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    config = _resolve_config(args, confusion_iou=args.iou, confidence_floor=args.conf)
    if args.thresholds:
        config = config.override(thresholds=parse_thresholds(args.thresholds))
    truths = read_labels_dir(args.labels)
    detections = read_detections_file(args.detections)
    report = evaluate(
        detections,
        truths,
        thresholds=config.thresholds,
        confusion_iou=config.confusion_iou,
        confidence_floor=config.confidence_floor,
        provenance={"labels": str(args.labels), "detections": str(args.detections)},
    )
    print(render_text(report))
    if config.out_dir:
        out = Path(config.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.txt").write_text(render_text(report))
        (out / "report.csv").write_text(reporting.render_csv(report))
        (out / "report.yaml").write_text(yaml.safe_dump(report_mapping(report), sort_keys=True))
        _write_resolved(config, out)
    return 0


def _make_detector(args: argparse.Namespace):
    kind = args.detector
    if kind == "oracle":
        return OracleDetector()
    if kind == "subprocess":
        if not args.command:
            raise ConfigError("subprocess detector needs --command")
        return SubprocessDetector(shlex.split(args.command))
    if kind == "weights":
        if not args.weights:
            raise ConfigError("weights detector needs --weights")
        return WeightsDetector(args.weights)
    raise ConfigError(f"unknown detector {kind!r}")


def cmd_simulate(args: argparse.Namespace) -> int:
    config = _resolve_config(
        args,
        frame_s=args.frame_s,
        hop_s=args.hop_s,
        speed=args.speed,
        post=args.post,
        post_iou=args.post_iou,
    )
    record, annotations = read_record(args.record, annotator=config.annotator)
    table = _load_mapping(config)
    beats = mapped_beats(annotations, table)
    detector = _make_detector(args)
    try:
        session = run_session(
            record,
            beats,
            detector,
            post_processor=config.post,
            speed=config.speed,
            frame_s=config.frame_s,
            hop_s=config.hop_s,
            style=RenderStyle(
                line_width=config.line_width, box_half_width_s=config.box_half_width_s
            ),
            post_iou=config.post_iou,
            soft_sigma=config.soft_sigma,
            score_floor=config.score_floor,
        )
    finally:
        detector.close()

    print(
        f"session {session.record_id}: {session.frames_processed}/{session.frames_emitted} "
        f"frames, {session.frames_failed} failed, {session.frames_dropped} dropped"
    )
    print(f"{'stage':<16}{'mean':>9}{'p50':>9}{'p95':>9}{'p99':>9}  (ms)")
    for name, stats in session.latency_summary.items():
        print(
            f"{name:<16}{stats['mean']:>9.3f}{stats['p50']:>9.3f}"
            f"{stats['p95']:>9.3f}{stats['p99']:>9.3f}"
        )
    if session.eval is not None:
        print(f"session mAP@50 {session.eval.map50:.3f}")
    if config.out_dir:
        out = Path(config.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_detections_file(out / "detections.txt", session.detections_by_frame)
        payload = {
            "record_id": session.record_id,
            "detector": session.detector_name,
            "post_processor": session.post_processor,
            "speed": session.speed,
            "frames_emitted": session.frames_emitted,
            "frames_processed": session.frames_processed,
            "frames_failed": session.frames_failed,
            "frames_dropped": session.frames_dropped,
            "latency_ms": session.latency_summary,
            "eval": report_mapping(session.eval) if session.eval is not None else None,
        }
        (out / "session.yaml").write_text(yaml.safe_dump(payload, sort_keys=True))
        _write_resolved(config, out)
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    if args.labels:
        labels = read_labels_dir(args.labels)
        counts = {name: 0 for name in aami.AAMI_CLASSES}
        for boxes in labels.values():
            for lb in boxes:
                counts[aami.AAMI_CLASSES[lb.class_id]] += 1
        print(f"instance counts over {len(labels)} label files:")
    elif args.records:
        config = config.override(records_dir=args.records)
        if args.no_exclude:
            config = config.override(apply_exclusion=False)
        table = _load_mapping(config)
        counts = {name: 0 for name in aami.AAMI_CLASSES}
        for record_id in _record_ids(config):
            prefix = str(Path(config.records_dir) / record_id)
            _, annotations = read_record(prefix, annotator=config.annotator)
            for beat in mapped_beats(annotations, table):
                counts[aami.AAMI_CLASSES[beat.class_id]] += 1
        print("beat counts after class mapping:")
    else:
        raise ConfigError("report needs --labels or --records")
    print(reporting.counts_comparison(counts))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ecgdet", description="ECG arrhythmia frame-detection toolkit"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse records and print beat counts")
    p.add_argument("records_dir")
    p.add_argument("--no-exclude", action="store_true", help="keep paced records")
    _add_common(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("build", help="build a YOLO detection dataset")
    p.add_argument("--records", required=True, help="record directory")
    p.add_argument("--dedup-spacing", type=float, help="window center spacing (s)")
    p.add_argument("--box-half-width-s", type=float, help="box half time-extent (s)")
    p.add_argument("--line-width", type=int)
    p.add_argument("--window-s", type=float)
    p.add_argument("--debug-symbols", action="store_true")
    p.add_argument("--no-augment", action="store_true")
    p.add_argument("--no-exclude", action="store_true")
    _add_common(p)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("split", help="write holdout or k-fold split lists")
    p.add_argument("--labels", required=True, help="labels directory")
    p.add_argument("--ratios", help="comma-separated holdout ratios")
    p.add_argument("--kfold", action="store_true", help="emit k folds instead of holdout")
    p.add_argument("--k", type=int)
    p.add_argument("--strategy", choices=["image-stratified", "patient-wise"])
    _add_common(p)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("eval", help="score a detections file against labels")
    p.add_argument("--labels", required=True)
    p.add_argument("--detections", required=True)
    p.add_argument("--iou", type=float, help="confusion-matrix IoU threshold")
    p.add_argument("--conf", type=float, help="confusion-matrix confidence floor")
    p.add_argument("--thresholds", help="AP sweep: start:step:stop or comma list")
    _add_common(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("simulate", help="replay a record through a detector")
    p.add_argument("--record", required=True, help="record path prefix")
    p.add_argument("--detector", default="oracle", choices=["oracle", "subprocess", "weights"])
    p.add_argument("--command", help="subprocess detector command line")
    p.add_argument("--weights", help="weights file for the weights detector")
    p.add_argument("--speed", choices=["realtime", "max"])
    p.add_argument("--frame-s", type=float)
    p.add_argument("--hop-s", type=float)
    p.add_argument("--post", choices=["nms", "soft_nms", "none"])
    p.add_argument("--post-iou", type=float)
    _add_common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("report", help="class-count comparison report")
    p.add_argument("--labels", help="labels directory (instance counts)")
    p.add_argument("--records", help="record directory (beat counts)")
    p.add_argument("--no-exclude", action="store_true")
    _add_common(p)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except EcgDetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
