"""WFDB record ingestion: headers, format-212 signals, MIT annotations."""

from .annotations import (
    BEAT_SYMBOLS,
    CODE_BY_SYMBOL,
    SYMBOL_BY_CODE,
    parse_annotations,
    read_annotations_csv,
    write_annotations_csv,
)
from .header import parse_header
from .loader import read_record, read_record_annotations, read_signal_record, scan_record_ids
from .signal import decode_format212, encode_format212, required_bytes
from .types import ADC_MAX, ADC_MIN, Annotation, ChannelInfo, RecordHeader, SignalRecord
from .writer import encode_annotations, encode_header, write_record

__all__ = [
    "ADC_MAX",
    "ADC_MIN",
    "Annotation",
    "BEAT_SYMBOLS",
    "CODE_BY_SYMBOL",
    "ChannelInfo",
    "RecordHeader",
    "SYMBOL_BY_CODE",
    "SignalRecord",
    "decode_format212",
    "encode_annotations",
    "encode_format212",
    "encode_header",
    "parse_annotations",
    "parse_header",
    "read_annotations_csv",
    "read_record",
    "read_record_annotations",
    "read_signal_record",
    "required_bytes",
    "scan_record_ids",
    "write_annotations_csv",
    "write_record",
]
