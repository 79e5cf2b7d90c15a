"""Symbol-to-class mapping and record exclusion tests."""

import pytest

from ecgdet.aami import (
    AAMI_BY_SYMBOL,
    AAMI_CLASSES,
    MITBIH_RECORD_IDS,
    NUM_CLASSES,
    PACED_RECORD_IDS,
    class_id_of,
    class_name,
    count_by_class,
    filter_records,
    format_mapping_csv,
    map_symbol,
    parse_mapping_csv,
)
from ecgdet.errors import ParseError
from ecgdet.wfdb import BEAT_SYMBOLS


def test_class_order():
    assert AAMI_CLASSES == ("N", "S", "V", "F", "Q")
    assert NUM_CLASSES == 5


FULL_TABLE = {
    "N": "N", "L": "N", "R": "N", "e": "N", "j": "N",
    "A": "S", "a": "S", "J": "S", "S": "S",
    "V": "V", "E": "V",
    "F": "F",
    "/": "Q", "f": "Q", "Q": "Q",
}


def test_map_symbol_full_table():
    for symbol, name in FULL_TABLE.items():
        assert map_symbol(symbol) == class_id_of(name), symbol
    assert len(AAMI_BY_SYMBOL) == len(FULL_TABLE)


@pytest.mark.parametrize("symbol", ["+", "~", "|", "\"", "x", "[", "]", "!", "?", ""])
def test_map_symbol_non_beats_return_none(symbol):
    assert map_symbol(symbol) is None


def test_every_mapped_symbol_is_a_beat_symbol():
    # The mapping must stay inside the annotation format's QRS set, except
    # '?' which the format marks as a beat but the taxonomy leaves unmapped.
    assert set(AAMI_BY_SYMBOL) <= BEAT_SYMBOLS
    assert BEAT_SYMBOLS - set(AAMI_BY_SYMBOL) == {"B", "?", "n", "r"}


def test_map_symbol_custom_table():
    table = {"N": 0, "V": 1}
    assert map_symbol("V", table) == 1
    assert map_symbol("A", table) is None


def test_class_name_and_id_round_trip():
    for cid, name in enumerate(AAMI_CLASSES):
        assert class_name(cid) == name
        assert class_id_of(name) == cid
    with pytest.raises(ValueError):
        class_name(5)
    with pytest.raises(ValueError):
        class_id_of("X")


def test_record_list_counts():
    assert len(MITBIH_RECORD_IDS) == 48
    assert len(set(MITBIH_RECORD_IDS)) == 48
    assert PACED_RECORD_IDS == {"102", "104", "107", "217"}
    assert PACED_RECORD_IDS <= set(MITBIH_RECORD_IDS)


def test_filter_records_default_exclusion():
    kept = filter_records(MITBIH_RECORD_IDS)
    assert len(kept) == 44
    assert not set(kept) & PACED_RECORD_IDS
    # order preserved
    assert kept == [r for r in MITBIH_RECORD_IDS if r not in PACED_RECORD_IDS]


def test_filter_records_mixes_int_and_str():
    assert filter_records([100, "102", 104, "219"]) == ["100", "219"]
    assert filter_records(["a", "b"], exclude=["b"]) == ["a"]
    assert filter_records(["102"], exclude=()) == ["102"]


def test_mapping_csv_round_trip():
    text = format_mapping_csv(AAMI_BY_SYMBOL)
    assert parse_mapping_csv(text) == dict(AAMI_BY_SYMBOL)


def test_parse_mapping_csv_accepts_ids_and_names():
    table = parse_mapping_csv("symbol,aami_class\nN,0\nV,V\n\n")
    assert table == {"N": 0, "V": 2}


@pytest.mark.parametrize(
    "text",
    [
        "",
        "bad,header\nN,0\n",
        "symbol,aami_class\nNN,0\n",
        "symbol,aami_class\nN,X\n",
        "symbol,aami_class\nN,5\n",
        "symbol,aami_class\nN,0\nN,1\n",
        "symbol,aami_class\nN,0,extra\n",
    ],
)
def test_parse_mapping_csv_malformed(text):
    with pytest.raises(ParseError):
        parse_mapping_csv(text)


def test_parse_mapping_csv_error_line_number():
    with pytest.raises(ParseError) as exc_info:
        parse_mapping_csv("symbol,aami_class\nN,0\nV,9\n")
    assert exc_info.value.line == 3


def test_count_by_class():
    counts = count_by_class([0, 0, 2, None, 4, 2, None])
    assert counts == {"N": 2, "S": 0, "V": 2, "F": 0, "Q": 1}
