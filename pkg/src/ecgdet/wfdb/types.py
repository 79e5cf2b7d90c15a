"""Value types for parsed records and annotations."""

from dataclasses import dataclass, field

import numpy as np

ADC_MIN = -2048
ADC_MAX = 2047


@dataclass(frozen=True)
class ChannelInfo:
    """Per-channel metadata from a record header."""

    name: str
    adc_gain: float = 200.0  # adu per millivolt
    adc_baseline: int = 0
    fmt: int = 212
    adc_resolution: int = 12
    adc_zero: int = 0
    initial_value: int = 0
    checksum: int = 0
    filename: str = ""
    byte_offset: int = 0


@dataclass(frozen=True)
class RecordHeader:
    record_id: str
    num_channels: int
    sampling_rate: float
    num_samples: int
    channels: tuple[ChannelInfo, ...]


@dataclass
class SignalRecord:
    """One patient's multi-channel sampled ECG plus header metadata."""

    record_id: str
    sampling_rate: float
    channels: list[ChannelInfo]
    samples: list[np.ndarray] = field(default_factory=list)

    @property
    def num_channels(self) -> int:
        return len(self.channels)

    @property
    def num_samples(self) -> int:
        return 0 if not self.samples else int(len(self.samples[0]))

    @property
    def duration_s(self) -> float:
        return self.num_samples / self.sampling_rate

    def to_millivolts(self, channel: int = 0) -> np.ndarray:
        """Optional physical-unit view: (adu - baseline) / gain."""
        info = self.channels[channel]
        return (self.samples[channel].astype(np.float64) - info.adc_baseline) / info.adc_gain

    def validate(self) -> None:
        if self.sampling_rate <= 0:
            raise ValueError(f"sampling_rate must be positive, got {self.sampling_rate}")
        if len(self.samples) != len(self.channels):
            raise ValueError("one sample array required per channel")
        n = self.num_samples
        for i, arr in enumerate(self.samples):
            if len(arr) != n:
                raise ValueError(f"channel {i} has {len(arr)} samples, expected {n}")
            if len(arr) and (arr.min() < ADC_MIN or arr.max() > ADC_MAX):
                raise ValueError(f"channel {i} samples outside 12-bit range [{ADC_MIN}, {ADC_MAX}]")


@dataclass(frozen=True)
class Annotation:
    """One annotation event: beat or non-beat, absolute sample position."""

    sample_index: int
    symbol: str
    is_beat: bool
    subtype: int = 0
    chan: int = 0
    num: int = 0
    aux: str = ""

    def time_s(self, sampling_rate: float) -> float:
        return self.sample_index / sampling_rate
