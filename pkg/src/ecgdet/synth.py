"""Deterministic synthetic ECG-like records for fixtures and demos.

Not physiology: just seeded QRS-shaped pulses with per-symbol morphology,
mild baseline wander, and sensor noise, written through the same record
encoder the parser consumes. A fixed seed always yields identical bytes.
"""

from __future__ import annotations

import argparse
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .wfdb.types import Annotation, ChannelInfo, SignalRecord
from .wfdb.writer import write_record

# Per-symbol pulse morphology: R amplitude (adu), QRS half-width (s),
# S-dip fraction, T-wave fraction.
_MORPHOLOGY = {
    "N": (600.0, 0.030, 0.30, 0.25),
    "L": (650.0, 0.045, 0.35, 0.22),
    "R": (620.0, 0.040, 0.32, 0.22),
    "A": (520.0, 0.025, 0.28, 0.20),
    "a": (500.0, 0.025, 0.28, 0.18),
    "S": (500.0, 0.024, 0.25, 0.18),
    "J": (540.0, 0.028, 0.27, 0.20),
    "V": (950.0, 0.080, 0.55, 0.30),
    "E": (900.0, 0.075, 0.50, 0.28),
    "F": (750.0, 0.055, 0.40, 0.26),
    "/": (420.0, 0.012, 0.10, 0.10),
    "f": (450.0, 0.020, 0.15, 0.12),
    "Q": (400.0, 0.035, 0.20, 0.15),
}
_DEFAULT_MORPHOLOGY = (550.0, 0.030, 0.30, 0.22)

DEFAULT_SYMBOLS = ("N", "V", "A", "S", "F", "/", "L")
DEFAULT_WEIGHTS = (0.70, 0.10, 0.06, 0.03, 0.05, 0.03, 0.03)


def _add_triangle(signal: np.ndarray, center: float, half_width: float, amplitude: float, fs: float) -> None:
    half = half_width * fs
    i0 = max(0, int(np.ceil(center - half)))
    i1 = min(len(signal) - 1, int(np.floor(center + half)))
    if i1 < i0 or half <= 0:
        return
    idx = np.arange(i0, i1 + 1, dtype=np.float64)
    signal[i0 : i1 + 1] += amplitude * (1.0 - np.abs(idx - center) / half)


def _add_beat(signal: np.ndarray, index: int, symbol: str, fs: float) -> None:
    amp, qrs_half, s_frac, t_frac = _MORPHOLOGY.get(symbol, _DEFAULT_MORPHOLOGY)
    _add_triangle(signal, index, qrs_half, amp, fs)
    _add_triangle(signal, index - qrs_half * 1.8 * fs, qrs_half * 0.8, -0.18 * amp, fs)
    _add_triangle(signal, index + qrs_half * 1.8 * fs, qrs_half * 0.9, -s_frac * amp, fs)
    _add_triangle(signal, index + 0.25 * fs, 0.09, t_frac * amp, fs)


def make_beat_plan(
    duration_s: float,
    seed: int = 0,
    symbols: Sequence[str] = DEFAULT_SYMBOLS,
    weights: Sequence[float] = DEFAULT_WEIGHTS,
    rr_range_s: tuple[float, float] = (0.70, 0.95),
) -> list[tuple[float, str]]:
    """Seeded (time_s, symbol) plan with uniform RR jitter."""
    rng = np.random.Generator(np.random.PCG64(seed))
    p = np.asarray(weights, dtype=np.float64)
    p = p / p.sum()
    plan = []
    t = 0.5
    while t < duration_s - 0.5:
        symbol = str(rng.choice(list(symbols), p=p))
        plan.append((t, symbol))
        t += float(rng.uniform(rr_range_s[0], rr_range_s[1]))
    return plan


def make_record(
    record_id: str = "s00",
    duration_s: float = 60.0,
    fs: float = 360.0,
    seed: int = 0,
    beat_plan: Optional[Sequence[tuple[float, str]]] = None,
    channel_names: Sequence[str] = ("MLII",),
    rhythm_marker: bool = True,
) -> tuple[SignalRecord, list[Annotation]]:
    """Build one synthetic record plus its annotation list."""
    n = int(round(duration_s * fs))
    if beat_plan is None:
        beat_plan = make_beat_plan(duration_s, seed=seed)
    rng = np.random.Generator(np.random.PCG64(seed + 0x5EED))

    base = np.zeros(n, dtype=np.float64)
    times = np.arange(n, dtype=np.float64) / fs
    base += 30.0 * np.sin(2.0 * np.pi * 0.33 * times + float(rng.uniform(0.0, 2.0 * np.pi)))
    base += rng.normal(0.0, 6.0, size=n)

    annotations: list[Annotation] = []
    if rhythm_marker:
        annotations.append(Annotation(sample_index=0, symbol="+", is_beat=False, aux="(N"))
    for t, symbol in beat_plan:
        index = int(round(t * fs))
        if not 0 <= index < n:
            continue
        _add_beat(base, index, symbol, fs)
        annotations.append(Annotation(sample_index=index, symbol=symbol, is_beat=True))

    channels = []
    samples = []
    for ci, name in enumerate(channel_names):
        scale = 1.0 - 0.15 * ci
        adu = np.clip(np.round(base * scale), -2048, 2047).astype(np.int16)
        channels.append(ChannelInfo(name=name, adc_gain=200.0, adc_baseline=0))
        samples.append(adu)

    record = SignalRecord(
        record_id=record_id,
        sampling_rate=fs,
        channels=channels,
        samples=samples,
    )
    annotations.sort(key=lambda a: (a.sample_index, not a.is_beat))
    return record, annotations


def write_dataset(
    directory,
    num_records: int = 3,
    duration_s: float = 120.0,
    fs: float = 360.0,
    seed: int = 0,
) -> list[str]:
    """Write a small synthetic corpus; returns the record ids."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    record_ids = []
    for i in range(num_records):
        record_id = f"s{i:02d}"
        record, annotations = make_record(
            record_id=record_id, duration_s=duration_s, fs=fs, seed=seed + i
        )
        write_record(out, record, annotations)
        record_ids.append(record_id)
    return record_ids


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="ecgdet-synth", description="generate synthetic fixture records"
    )
    parser.add_argument("out_dir", help="output directory")
    parser.add_argument("--records", type=int, default=3)
    parser.add_argument("--duration", type=float, default=120.0, help="seconds per record")
    parser.add_argument("--fs", type=float, default=360.0)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)
    ids = write_dataset(args.out_dir, args.records, args.duration, args.fs, args.seed)
    print(f"wrote {len(ids)} records to {args.out_dir}: {' '.join(ids)}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
