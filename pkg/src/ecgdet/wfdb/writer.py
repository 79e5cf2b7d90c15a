"""Record encoder used by tests, fixtures, and the synthetic generator.

Writes `.hea` / `.dat` (format 212) / `.atr` trios that the parsers in this
package — and any conforming WFDB reader — can load back bit-exactly.
"""

from pathlib import Path

import numpy as np

from .annotations import CODE_BY_SYMBOL
from .signal import encode_format212
from .types import Annotation, SignalRecord


def encode_header(record: SignalRecord) -> str:
    lines = [f"{record.record_id} {record.num_channels} {record.sampling_rate:g} {record.num_samples}"]
    for info, samples in zip(record.channels, record.samples):
        checksum = int(np.sum(samples, dtype=np.int64)) & 0xFFFF
        if checksum >= 0x8000:
            checksum -= 0x10000
        init = int(samples[0]) if len(samples) else 0
        lines.append(
            f"{record.record_id}.dat 212 {info.adc_gain:g}({info.adc_baseline})/mV "
            f"{info.adc_resolution} {info.adc_zero} {init} {checksum} 0 {info.name}"
        )
    return "\n".join(lines) + "\n"


def encode_annotations(annotations: list[Annotation]) -> bytes:
    """Encode annotations (strictly ascending sample_index) as an `.atr` stream."""
    out = bytearray()
    prev = 0
    sticky_chan = 0
    sticky_num = 0
    for ann in annotations:
        code = CODE_BY_SYMBOL.get(ann.symbol)
        if code is None:
            raise ValueError(f"no annotation code for symbol {ann.symbol!r}")
        delta = ann.sample_index - prev
        if delta < 0:
            raise ValueError("annotations must be sorted by sample_index")
        prev = ann.sample_index
        if delta > 1023:
            out += (59 << 10).to_bytes(2, "little")
            out += ((delta >> 16) & 0xFFFF).to_bytes(2, "little")
            out += (delta & 0xFFFF).to_bytes(2, "little")
            delta = 0
        out += ((code << 10) | delta).to_bytes(2, "little")
        if ann.subtype:
            out += ((61 << 10) | (ann.subtype & 0xFF)).to_bytes(2, "little")
        if ann.chan != sticky_chan:
            out += ((62 << 10) | (ann.chan & 0xFF)).to_bytes(2, "little")
            sticky_chan = ann.chan
        if ann.num != sticky_num:
            out += ((60 << 10) | (ann.num & 0xFF)).to_bytes(2, "little")
            sticky_num = ann.num
        if ann.aux:
            payload = ann.aux.encode("latin-1")
            if len(payload) > 255:
                raise ValueError("aux string longer than 255 bytes")
            out += ((63 << 10) | len(payload)).to_bytes(2, "little")
            out += payload
            if len(payload) & 1:
                out += b"\x00"
    out += b"\x00\x00"
    return bytes(out)


def write_record(
    directory: str | Path,
    record: SignalRecord,
    annotations: list[Annotation] | None = None,
    annotator: str = "atr",
) -> Path:
    """Write `<id>.hea`, `<id>.dat`, and optionally `<id>.<annotator>`.

    Returns the record path prefix (directory / record_id).
    """
    record.validate()
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    prefix = directory / record.record_id
    prefix.with_suffix(".hea").write_text(encode_header(record))
    prefix.with_suffix(".dat").write_bytes(encode_format212(record.samples))
    if annotations is not None:
        prefix.with_suffix("." + annotator).write_bytes(encode_annotations(annotations))
    return prefix
