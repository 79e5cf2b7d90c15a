"""File-level record loading: header + signal + annotations."""

from pathlib import Path

from ..errors import InputError, ParseError
from .annotations import parse_annotations, read_annotations_csv
from .header import parse_header
from .signal import decode_format212
from .types import Annotation, SignalRecord


def read_signal_record(prefix: str | Path) -> SignalRecord:
    """Load `<prefix>.hea` + `<prefix>.dat` into a :class:`SignalRecord`."""
    prefix = Path(prefix)
    hea_path = prefix.with_suffix(".hea")
    if not hea_path.exists():
        raise InputError(f"missing header file: {hea_path}")
    header = parse_header(hea_path.read_text())

    filenames = {ch.filename for ch in header.channels}
    if len(filenames) != 1:
        raise ParseError(f"all channels must share one signal file, got {sorted(filenames)}")
    offsets = {ch.byte_offset for ch in header.channels}
    if len(offsets) != 1:
        raise ParseError("all channels must share one byte offset")

    dat_path = prefix.parent / header.channels[0].filename
    if not dat_path.exists():
        raise InputError(f"missing signal file: {dat_path}")
    data = dat_path.read_bytes()[header.channels[0].byte_offset :]
    samples = decode_format212(data, header.num_samples, header.num_channels)

    return SignalRecord(
        record_id=header.record_id,
        sampling_rate=header.sampling_rate,
        channels=list(header.channels),
        samples=samples,
    )


def read_record_annotations(
    prefix: str | Path,
    sampling_rate: float,
    num_samples: int | None = None,
    annotator: str = "atr",
) -> list[Annotation]:
    """Load `<prefix>.atr`, falling back to the documented `<prefix>.csv`."""
    prefix = Path(prefix)
    atr_path = prefix.with_suffix("." + annotator)
    if atr_path.exists():
        return parse_annotations(atr_path.read_bytes(), sampling_rate, num_samples)
    csv_path = prefix.with_suffix(".csv")
    if csv_path.exists():
        anns = read_annotations_csv(csv_path.read_text())
        if num_samples is not None:
            from ..errors import OutOfRangeAnnotation

            for ann in anns:
                if ann.sample_index < 0 or ann.sample_index >= num_samples:
                    raise OutOfRangeAnnotation(ann.sample_index, num_samples)
        return anns
    raise InputError(f"no annotation file for {prefix} (tried .{annotator} and .csv)")


def read_record(prefix: str | Path, annotator: str = "atr") -> tuple[SignalRecord, list[Annotation]]:
    record = read_signal_record(prefix)
    annotations = read_record_annotations(
        prefix, record.sampling_rate, num_samples=record.num_samples, annotator=annotator
    )
    return record, annotations


def scan_record_ids(directory: str | Path) -> list[str]:
    """Record ids (stem of each `.hea`) found in a directory, sorted."""
    return sorted(p.stem for p in Path(directory).glob("*.hea"))
