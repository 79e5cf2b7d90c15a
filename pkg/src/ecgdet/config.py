"""Run configuration: one YAML file drives every subcommand.

Flags override file values; each run writes its resolved config next to
its outputs so experiments replay exactly.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Optional

import yaml

from .aami import PACED_RECORD_IDS
from .errors import ConfigError
from .metrics import (
    DEFAULT_CONFIDENCE_FLOOR,
    DEFAULT_CONFUSION_IOU,
    DEFAULT_THRESHOLDS,
)


@dataclass(frozen=True)
class RunConfig:
    # data
    records_dir: str = ""
    out_dir: str = ""
    seed: int = 0
    exclude_records: tuple[str, ...] = tuple(sorted(PACED_RECORD_IDS))
    apply_exclusion: bool = True
    mapping_csv: str = ""
    annotator: str = "atr"
    channel: int = 0
    # windows
    window_s: float = 10.0
    dedup_spacing_s: float = 2.5
    # render
    line_width: int = 2
    box_half_width_s: float = 0.35
    debug_symbols: bool = False
    # augmentation
    augment: bool = True
    grayscale_prob: float = 0.75
    max_rotation_deg: float = 1.0
    # splits
    ratios: tuple[float, ...] = (0.82, 0.12, 0.06)
    k: int = 10
    strategy: str = "image-stratified"
    # evaluation
    thresholds: tuple[float, ...] = DEFAULT_THRESHOLDS
    confusion_iou: float = DEFAULT_CONFUSION_IOU
    confidence_floor: float = DEFAULT_CONFIDENCE_FLOOR
    # streaming
    frame_s: float = 10.0
    hop_s: float = 1.0
    speed: str = "max"
    post: str = "nms"
    post_iou: float = 0.45
    soft_sigma: float = 0.5
    score_floor: float = 0.001

    def to_mapping(self) -> dict:
        data = asdict(self)
        for key, value in data.items():
            if isinstance(value, tuple):
                data[key] = list(value)
        return data

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.to_mapping(), sort_keys=True)

    def write(self, path) -> None:
        Path(path).write_text(self.to_yaml())

    def override(self, **kwargs) -> "RunConfig":
        """Apply non-None overrides (CLI flags beat file values)."""
        updates = {}
        for key, value in kwargs.items():
            if value is None:
                continue
            if isinstance(value, list):
                value = tuple(value)
            updates[key] = value
        return replace(self, **updates) if updates else self


_FIELD_NAMES = {f.name for f in fields(RunConfig)}
_TUPLE_FIELDS = {"exclude_records", "ratios", "thresholds"}


def config_from_mapping(data: dict) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("config root must be a mapping")
    unknown = sorted(set(data) - _FIELD_NAMES)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    kwargs = {}
    for key, value in data.items():
        if key in _TUPLE_FIELDS:
            if not isinstance(value, (list, tuple)):
                raise ConfigError(f"config key {key!r} must be a list")
            value = tuple(str(v) for v in value) if key == "exclude_records" else tuple(
                float(v) for v in value
            )
        kwargs[key] = value
    try:
        return RunConfig(**kwargs)
    except TypeError as exc:
        raise ConfigError(f"bad config value: {exc}") from exc


def load_config(path: Optional[str]) -> RunConfig:
    """Load a YAML config file; None or missing path means pure defaults."""
    if not path:
        return RunConfig()
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {p}: {exc}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML in {p}: {exc}") from exc
    if data is None:
        return RunConfig()
    return config_from_mapping(data)


def parse_ratios(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(","))
    except ValueError:
        raise ConfigError(f"ratios must be comma-separated numbers, got {text!r}") from None


def parse_thresholds(text: str) -> tuple[float, ...]:
    """Accept `a:step:b` sweeps or comma-separated lists."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"threshold sweep must be start:step:stop, got {text!r}")
        try:
            start, step, stop = (float(p) for p in parts)
        except ValueError:
            raise ConfigError(f"bad threshold sweep: {text!r}") from None
        if step <= 0 or stop < start:
            raise ConfigError(f"bad threshold sweep: {text!r}")
        values = []
        t = start
        while t <= stop + 1e-9:
            values.append(round(t, 6))
            t += step
        return tuple(values)
    try:
        return tuple(float(p) for p in text.split(","))
    except ValueError:
        raise ConfigError(f"thresholds must be numbers, got {text!r}") from None
