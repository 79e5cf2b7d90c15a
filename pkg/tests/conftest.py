"""Shared fixtures: small synthetic records and box helpers."""

import numpy as np
import pytest

from ecgdet.boxes import BoundingBox, Detection, LabeledBox
from ecgdet.wfdb import Annotation, ChannelInfo, SignalRecord


def make_record(record_id="t00", fs=360.0, samples=None, num_channels=1):
    """A minimal in-memory record with a deterministic ramp signal."""
    if samples is None:
        n = int(fs * 12)
        base = (np.arange(n, dtype=np.int64) % 400) - 200
        samples = [base.astype(np.int16) + 10 * c for c in range(num_channels)]
    channels = [ChannelInfo(name=f"ch{i}") for i in range(len(samples))]
    return SignalRecord(
        record_id=record_id,
        sampling_rate=fs,
        channels=channels,
        samples=[np.asarray(s, dtype=np.int16) for s in samples],
    )


def beat(index, symbol):
    return Annotation(sample_index=index, symbol=symbol, is_beat=True)


def det(class_id, cx, cy, w, h, conf):
    return Detection(class_id=class_id, box=BoundingBox(cx, cy, w, h), confidence=conf)


def gt(class_id, cx, cy, w, h):
    return LabeledBox(class_id=class_id, box=BoundingBox(cx, cy, w, h))


@pytest.fixture
def ramp_record():
    return make_record()
