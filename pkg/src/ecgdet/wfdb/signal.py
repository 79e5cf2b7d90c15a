"""Format-212 signal codec: two 12-bit two's-complement samples per 3 bytes.

Channels are interleaved sample-by-sample. The encoder exists for tests and
synthetic fixtures; production data flows through the decoder only.
"""

from collections.abc import Sequence

import numpy as np

from .. import _kernels
from ..errors import TruncatedSignal
from .types import ADC_MAX, ADC_MIN


def required_bytes(n_samples: int, n_channels: int) -> int:
    return (n_samples * n_channels * 3 + 1) // 2


def decode_format212(data: bytes, n_samples: int, n_channels: int) -> list[np.ndarray]:
    """Decode packed bytes into one int16 array per channel."""
    if n_samples < 0 or n_channels < 1:
        raise ValueError("n_samples must be >= 0 and n_channels >= 1")
    total = n_samples * n_channels
    need = required_bytes(n_samples, n_channels)
    if len(data) < need:
        raise TruncatedSignal(need, len(data))
    flat = _kernels.unpack_fmt212(data, total)
    return [np.ascontiguousarray(flat[c::n_channels]) for c in range(n_channels)]


def encode_format212(channels: Sequence[np.ndarray]) -> bytes:
    """Pack per-channel sample arrays; inverse of :func:`decode_format212`."""
    if not channels:
        return b""
    n = len(channels[0])
    for i, ch in enumerate(channels):
        if len(ch) != n:
            raise ValueError(f"channel {i} has {len(ch)} samples, expected {n}")
    flat = np.empty(n * len(channels), dtype=np.int64)
    for c, ch in enumerate(channels):
        arr = np.asarray(ch, dtype=np.int64)
        if len(arr) and (arr.min() < ADC_MIN or arr.max() > ADC_MAX):
            raise ValueError(f"channel {c} samples outside [{ADC_MIN}, {ADC_MAX}]")
        flat[c :: len(channels)] = arr
    return _kernels.pack_fmt212(flat)
