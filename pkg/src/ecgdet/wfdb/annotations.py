"""MIT annotation format (`.atr`) parser plus a CSV fallback reader.

Byte layout: little-endian 2-byte words; the top 6 bits hold an annotation
code, the low 10 bits a time delta in samples. Codes 59-63 are escapes
(SKIP, NUM, SUB, CHN, AUX); a zero word terminates the stream. A SKIP's
4-byte signed interval and the following word's own delta both advance the
clock, matching the reference C library.
"""

import csv
import io

from ..errors import OutOfRangeAnnotation, ParseError
from .types import Annotation

_SKIP, _NUM, _SUB, _CHN, _AUX = 59, 60, 61, 62, 63

# Print symbols for annotation codes, as defined by the WFDB library.
SYMBOL_BY_CODE = {
    0: " ", 1: "N", 2: "L", 3: "R", 4: "a", 5: "V", 6: "F", 7: "J", 8: "A",
    9: "S", 10: "E", 11: "j", 12: "/", 13: "Q", 14: "~", 16: "|", 18: "s",
    19: "T", 20: "*", 21: "D", 22: '"', 23: "=", 24: "p", 25: "B", 26: "^",
    27: "t", 28: "+", 29: "u", 30: "?", 31: "!", 32: "[", 33: "]", 34: "e",
    35: "n", 36: "@", 37: "x", 38: "f", 39: "(", 40: ")", 41: "r",
}
CODE_BY_SYMBOL = {sym: code for code, sym in SYMBOL_BY_CODE.items()}

# Codes the WFDB library treats as QRS annotations (isqrs).
BEAT_CODES = frozenset({1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 25, 30, 34, 35, 38, 41})
BEAT_SYMBOLS = frozenset(SYMBOL_BY_CODE[c] for c in BEAT_CODES)


def _symbol_for(code: int) -> str:
    return SYMBOL_BY_CODE.get(code, f"[{code}]")


def _signed8(value: int) -> int:
    return value - 256 if value >= 128 else value


def parse_annotations(
    data: bytes,
    sampling_rate: float,
    num_samples: int | None = None,
) -> list[Annotation]:
    """Parse a `.atr` byte stream into absolute-indexed annotations.

    Non-beat annotations are kept and flagged. When ``num_samples`` is given,
    any index outside [0, num_samples) raises :class:`OutOfRangeAnnotation`.
    """
    if sampling_rate <= 0:
        raise ValueError("sampling_rate must be positive")
    if len(data) % 2:
        raise ParseError("annotation stream has odd byte length")

    out: list[Annotation] = []
    ts = 0
    pending_skip = 0
    sticky_chan = 0
    sticky_num = 0
    pos = 0
    terminated = False
    current: dict | None = None

    def _flush() -> None:
        nonlocal current
        if current is not None:
            out.append(Annotation(**current))
            current = None

    while pos + 2 <= len(data):
        word = data[pos] | (data[pos + 1] << 8)
        pos += 2
        if word == 0:
            terminated = True
            break
        code = word >> 10
        payload = word & 0x3FF

        if code == _SKIP:
            if pos + 4 > len(data):
                raise ParseError("dangling SKIP escape at end of annotation stream")
            interval = (
                (data[pos] << 16)
                | (data[pos + 1] << 24)
                | data[pos + 2]
                | (data[pos + 3] << 8)
            )
            if interval >= 1 << 31:
                interval -= 1 << 32
            pending_skip += interval
            pos += 4
            continue

        if code == _NUM:
            if current is None:
                raise ParseError("NUM escape before any annotation")
            sticky_num = _signed8(word & 0xFF)
            current["num"] = sticky_num
            continue
        if code == _SUB:
            if current is None:
                raise ParseError("SUB escape before any annotation")
            current["subtype"] = _signed8(word & 0xFF)
            continue
        if code == _CHN:
            if current is None:
                raise ParseError("CHN escape before any annotation")
            sticky_chan = word & 0xFF
            current["chan"] = sticky_chan
            continue
        if code == _AUX:
            if current is None:
                raise ParseError("AUX escape before any annotation")
            aux_len = word & 0xFF
            padded = aux_len + (aux_len & 1)
            if pos + padded > len(data):
                raise ParseError("dangling AUX payload at end of annotation stream")
            current["aux"] = data[pos : pos + aux_len].decode("latin-1")
            pos += padded
            continue

        # Plain annotation word.
        _flush()
        ts += pending_skip + payload
        pending_skip = 0
        current = {
            "sample_index": ts,
            "symbol": _symbol_for(code),
            "is_beat": code in BEAT_CODES,
            "chan": sticky_chan,
            "num": sticky_num,
        }

    if pending_skip:
        raise ParseError("dangling SKIP escape with no following annotation")
    if not terminated:
        raise ParseError("annotation stream missing zero terminator")
    _flush()

    for ann in out:
        if ann.sample_index < 0 or (num_samples is not None and ann.sample_index >= num_samples):
            raise OutOfRangeAnnotation(ann.sample_index, num_samples if num_samples is not None else -1)
    return out


CSV_HEADER = ("sample_index", "symbol")


def read_annotations_csv(text: str) -> list[Annotation]:
    """Read the documented CSV fallback: header row, then `sample_index,symbol`."""
    reader = csv.reader(io.StringIO(text))
    rows = list(reader)
    if not rows:
        raise ParseError("empty annotation CSV", line=1)
    header = tuple(cell.strip().lower() for cell in rows[0])
    if header != CSV_HEADER:
        raise ParseError(f"annotation CSV must start with header 'sample_index,symbol', got {rows[0]!r}", line=1)
    out = []
    for line_no, row in enumerate(rows[1:], start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != 2:
            raise ParseError(f"expected 2 fields, got {len(row)}", line=line_no)
        try:
            idx = int(row[0].strip())
        except ValueError:
            raise ParseError(f"sample_index {row[0]!r} is not an integer", line=line_no, column=1) from None
        symbol = row[1].strip()
        if not symbol:
            raise ParseError("empty symbol", line=line_no, column=2)
        out.append(Annotation(sample_index=idx, symbol=symbol, is_beat=symbol in BEAT_SYMBOLS))
    return out


def write_annotations_csv(annotations: list[Annotation]) -> str:
    lines = ["sample_index,symbol"]
    lines += [f"{a.sample_index},{a.symbol}" for a in annotations]
    return "\n".join(lines) + "\n"
