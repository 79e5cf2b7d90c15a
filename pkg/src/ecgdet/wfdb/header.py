"""Parser for WFDB text headers (`.hea`).

Only single-segment, format-212 records are in scope. Omitted optional
fields take the defaults from the WFDB header specification: sampling rate
250 Hz, gain 200 adu/mV, ADC resolution 12 bits, ADC zero 0, baseline equal
to ADC zero.
"""

import re

from ..errors import ParseError, UnsupportedFormat
from .types import ChannelInfo, RecordHeader

DEFAULT_SAMPLING_RATE = 250.0
DEFAULT_GAIN = 200.0


def _tokens_with_columns(line: str) -> list[tuple[str, int]]:
    return [(m.group(0), m.start() + 1) for m in re.finditer(r"\S+", line)]


def _content_lines(text: str) -> list[tuple[int, str]]:
    out = []
    for i, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\r")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        out.append((i, line))
    return out


def parse_header(header_text: str) -> RecordHeader:
    """Parse a `.hea` body into a :class:`RecordHeader`."""
    lines = _content_lines(header_text)
    if not lines:
        raise ParseError("empty header", line=1, column=1)

    line_no, record_line = lines[0]
    toks = _tokens_with_columns(record_line)
    if len(toks) < 2:
        raise ParseError("record line needs at least a name and a signal count", line=line_no, column=1)

    name_tok, name_col = toks[0]
    if "/" in name_tok:
        raise UnsupportedFormat(f"multi-segment record {name_tok!r} not supported")
    record_id = name_tok

    nsig_tok, nsig_col = toks[1]
    try:
        num_channels = int(nsig_tok)
    except ValueError:
        raise ParseError(f"signal count {nsig_tok!r} is not an integer", line=line_no, column=nsig_col) from None
    if num_channels < 1:
        raise ParseError(f"signal count must be >= 1, got {num_channels}", line=line_no, column=nsig_col)

    sampling_rate = DEFAULT_SAMPLING_RATE
    if len(toks) > 2:
        fs_tok, fs_col = toks[2]
        fs_text = fs_tok.split("/")[0]  # counter frequency may follow a slash
        try:
            sampling_rate = float(fs_text)
        except ValueError:
            raise ParseError(f"sampling rate {fs_tok!r} is not numeric", line=line_no, column=fs_col) from None
        if sampling_rate <= 0:
            raise ParseError(f"sampling rate must be positive, got {fs_text}", line=line_no, column=fs_col)

    num_samples = 0
    if len(toks) > 3:
        n_tok, n_col = toks[3]
        try:
            num_samples = int(n_tok)
        except ValueError:
            raise ParseError(f"sample count {n_tok!r} is not an integer", line=line_no, column=n_col) from None
        if num_samples < 0:
            raise ParseError(f"sample count must be >= 0, got {num_samples}", line=line_no, column=n_col)

    signal_lines = lines[1 : 1 + num_channels]
    if len(signal_lines) < num_channels:
        raise ParseError(
            f"header declares {num_channels} signals but has {len(signal_lines)} signal lines",
            line=line_no,
        )

    channels = []
    for idx, (sig_line_no, sig_line) in enumerate(signal_lines):
        channels.append(_parse_signal_line(sig_line, sig_line_no, idx))

    return RecordHeader(
        record_id=record_id,
        num_channels=num_channels,
        sampling_rate=sampling_rate,
        num_samples=num_samples,
        channels=tuple(channels),
    )


_FORMAT_RE = re.compile(r"^(\d+)(?:x(\d+))?(?::(\d+))?(?:\+(\d+))?$")


def _parse_signal_line(line: str, line_no: int, index: int) -> ChannelInfo:
    toks = _tokens_with_columns(line)
    if len(toks) < 2:
        raise ParseError("signal line needs a file name and a format", line=line_no, column=1)

    filename = toks[0][0]
    fmt_tok, fmt_col = toks[1]
    m = _FORMAT_RE.match(fmt_tok)
    if not m:
        raise ParseError(f"malformed format field {fmt_tok!r}", line=line_no, column=fmt_col)
    fmt = int(m.group(1))
    if fmt != 212:
        raise UnsupportedFormat(f"storage format {fmt} not supported (only 212)")
    samples_per_frame = int(m.group(2)) if m.group(2) else 1
    if samples_per_frame != 1:
        raise UnsupportedFormat("multi-frequency signals (samples-per-frame > 1) not supported")
    byte_offset = int(m.group(4)) if m.group(4) else 0

    gain = DEFAULT_GAIN
    baseline = None
    adc_zero = 0
    adc_res = 12
    init_value = 0
    checksum = 0

    if len(toks) > 2:
        gain_tok, gain_col = toks[2]
        gm = re.match(r"^(-?[\d.]+)(?:\((-?\d+)\))?(?:/(\S*))?$", gain_tok)
        if not gm:
            raise ParseError(f"malformed gain field {gain_tok!r}", line=line_no, column=gain_col)
        gain = float(gm.group(1))
        if gain == 0:
            gain = DEFAULT_GAIN
        if gm.group(2) is not None:
            baseline = int(gm.group(2))

    def _int_field(pos: int, fallback: int) -> int:
        if len(toks) <= pos:
            return fallback
        tok, col = toks[pos]
        try:
            return int(tok)
        except ValueError:
            raise ParseError(f"expected integer, got {tok!r}", line=line_no, column=col) from None

    adc_res = _int_field(3, adc_res)
    adc_zero = _int_field(4, adc_zero)
    init_value = _int_field(5, init_value)
    checksum = _int_field(6, checksum)
    _int_field(7, 0)  # block size, unused
    name = " ".join(t for t, _ in toks[8:]) if len(toks) > 8 else f"ch{index}"

    if baseline is None:
        baseline = adc_zero

    return ChannelInfo(
        name=name,
        adc_gain=gain,
        adc_baseline=baseline,
        fmt=fmt,
        adc_resolution=adc_res,
        adc_zero=adc_zero,
        initial_value=init_value,
        checksum=checksum,
        filename=filename,
        byte_offset=byte_offset,
    )
