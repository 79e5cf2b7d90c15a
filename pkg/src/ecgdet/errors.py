"""Exception hierarchy shared across the toolkit.

``InputError`` subclasses signal bad user input (CLI exit code 2); anything
else escaping to the CLI is an internal error (exit code 1).
"""


class EcgDetError(Exception):
    """Base class for all toolkit errors."""


class InputError(EcgDetError):
    """Unusable input: malformed files, missing paths, bad configuration."""


class ParseError(InputError):
    """Malformed text or binary content.

    ``line`` and ``column`` are 1-based where they apply (text formats);
    binary formats report byte offsets through ``line=None`` and a message.
    """

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        location = ""
        if line is not None:
            location = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + location)
        self.line = line
        self.column = column


class UnsupportedFormat(InputError):
    """A storage format the toolkit deliberately does not read."""


class TruncatedSignal(InputError):
    """Signal file shorter than the header promises."""

    def __init__(self, expected_bytes: int, actual_bytes: int):
        super().__init__(f"signal file truncated: expected >= {expected_bytes} bytes, got {actual_bytes}")
        self.expected_bytes = expected_bytes
        self.actual_bytes = actual_bytes


class OutOfRangeAnnotation(InputError):
    """Annotation resolved to a sample index outside the record."""

    def __init__(self, sample_index: int, num_samples: int):
        super().__init__(f"annotation at sample {sample_index} outside record of {num_samples} samples")
        self.sample_index = sample_index
        self.num_samples = num_samples


class RecordTooShort(InputError):
    """Record shorter than the requested window length."""


class ConfigError(InputError):
    """Invalid run configuration value."""
