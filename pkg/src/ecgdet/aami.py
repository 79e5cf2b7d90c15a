"""AAMI five-class beat taxonomy and record exclusion policy.

MIT-BIH annotation symbols collapse onto the five AAMI heartbeat classes
(N, S, V, F, Q). Symbols that do not denote a beat (rhythm changes, noise
marks, comments) map to ``None`` and are dropped by downstream stages.
"""

from __future__ import annotations

from typing import Iterable, Mapping, Optional, Sequence

from .errors import ParseError

# Class ids are positional: label files store the integer, reports the name.
AAMI_CLASSES: tuple[str, ...] = ("N", "S", "V", "F", "Q")

NUM_CLASSES = len(AAMI_CLASSES)

# Standard PhysioBank symbol -> AAMI class correspondence, one row per
# beat description: normal + bundle branch blocks + escapes fold into N,
# atrial/supraventricular prematures into S, ventricular into V, fusion
# of ventricular and normal into F, paced/unclassifiable into Q.
AAMI_BY_SYMBOL: Mapping[str, int] = {
    "N": 0,
    "L": 0,
    "R": 0,
    "e": 0,
    "j": 0,
    "A": 1,
    "a": 1,
    "J": 1,
    "S": 1,
    "V": 2,
    "E": 2,
    "F": 3,
    "/": 4,
    "f": 4,
    "Q": 4,
}

# The full 48-record set of the arrhythmia database.
MITBIH_RECORD_IDS: tuple[str, ...] = tuple(
    str(n)
    for n in (
        list(range(100, 110))
        + list(range(111, 120))
        + list(range(121, 125))
        + list(range(200, 204))
        + [205]
        + list(range(207, 211))
        + list(range(212, 216))
        + [217]
        + list(range(219, 224))
        + [228]
        + list(range(230, 235))
    )
)

# Conventional AAMI exclusion: the four paced records.
PACED_RECORD_IDS: frozenset[str] = frozenset({"102", "104", "107", "217"})


def map_symbol(mit_symbol: str, table: Optional[Mapping[str, int]] = None) -> Optional[int]:
    """Map one MIT annotation symbol to an AAMI class id, or None for non-beats.

    Total over all inputs: unknown or non-beat symbols return None rather
    than raising. Pass ``table`` to override the shipped mapping.
    """
    lookup = AAMI_BY_SYMBOL if table is None else table
    return lookup.get(mit_symbol)


def class_name(class_id: int) -> str:
    if not 0 <= class_id < NUM_CLASSES:
        raise ValueError(f"class id out of range: {class_id}")
    return AAMI_CLASSES[class_id]


def class_id_of(name: str) -> int:
    try:
        return AAMI_CLASSES.index(name)
    except ValueError:
        raise ValueError(f"unknown AAMI class name: {name!r}") from None


def filter_records(
    record_ids: Iterable[str | int],
    exclude: Iterable[str | int] = PACED_RECORD_IDS,
) -> list[str]:
    """Drop excluded record ids, preserving input order.

    Ids are compared as strings so integer and text ids interoperate.
    """
    excluded = {str(r) for r in exclude}
    return [str(r) for r in record_ids if str(r) not in excluded]


def parse_mapping_csv(text: str) -> dict[str, int]:
    """Parse a ``symbol,aami_class`` override table.

    The header row is required. The class column accepts either a class
    name (N/S/V/F/Q) or an integer id 0-4.
    """
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty mapping file", line=1)
    header = [part.strip().lower() for part in lines[0].split(",")]
    if header != ["symbol", "aami_class"]:
        raise ParseError("mapping header must be 'symbol,aami_class'", line=1)
    table: dict[str, int] = {}
    for lineno, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line:
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 2:
            raise ParseError("expected two comma-separated fields", line=lineno)
        symbol, cls = parts
        if len(symbol) != 1:
            raise ParseError(f"symbol must be a single character, got {symbol!r}", line=lineno)
        if cls in AAMI_CLASSES:
            cid = AAMI_CLASSES.index(cls)
        else:
            try:
                cid = int(cls)
            except ValueError:
                raise ParseError(f"unknown AAMI class {cls!r}", line=lineno) from None
            if not 0 <= cid < NUM_CLASSES:
                raise ParseError(f"class id out of range: {cid}", line=lineno)
        if symbol in table:
            raise ParseError(f"duplicate symbol {symbol!r}", line=lineno)
        table[symbol] = cid
    return table


def format_mapping_csv(table: Mapping[str, int]) -> str:
    rows = ["symbol,aami_class"]
    for symbol in sorted(table):
        rows.append(f"{symbol},{AAMI_CLASSES[table[symbol]]}")
    return "\n".join(rows) + "\n"


def count_by_class(class_ids: Sequence[Optional[int]]) -> dict[str, int]:
    """Histogram of beat class ids by class name; None entries are skipped."""
    counts = {name: 0 for name in AAMI_CLASSES}
    for cid in class_ids:
        if cid is not None:
            counts[AAMI_CLASSES[cid]] += 1
    return counts
