"""Synthetic fixture generator tests: validity, determinism, round trip."""

import numpy as np

from ecgdet import synth
from ecgdet.wfdb.loader import read_record, scan_record_ids


def test_make_beat_plan_seeded():
    plan = synth.make_beat_plan(30.0, seed=4)
    again = synth.make_beat_plan(30.0, seed=4)
    assert plan == again
    assert plan != synth.make_beat_plan(30.0, seed=5)
    times = [t for t, _ in plan]
    assert times[0] == 0.5
    assert all(0.5 <= t < 29.5 for t in times)
    rr = np.diff(times)
    assert rr.min() >= 0.70 - 1e-9 and rr.max() <= 0.95 + 1e-9
    assert {s for _, s in plan} <= set(synth.DEFAULT_SYMBOLS)


def test_make_record_shape_and_range():
    record, annotations = synth.make_record(duration_s=20.0, seed=1)
    assert record.num_samples == 7200
    assert record.sampling_rate == 360.0
    signal = record.samples[0]
    assert signal.dtype == np.int16
    assert signal.min() >= -2048 and signal.max() <= 2047
    assert annotations[0].symbol == "+" and not annotations[0].is_beat
    assert annotations[0].aux == "(N"
    beats = [a for a in annotations if a.is_beat]
    assert beats
    assert all(0 <= a.sample_index < 7200 for a in beats)
    indices = [a.sample_index for a in annotations]
    assert indices == sorted(indices)


def test_make_record_deterministic():
    a_rec, a_ann = synth.make_record(duration_s=15.0, seed=9)
    b_rec, b_ann = synth.make_record(duration_s=15.0, seed=9)
    np.testing.assert_array_equal(a_rec.samples[0], b_rec.samples[0])
    assert a_ann == b_ann
    c_rec, _ = synth.make_record(duration_s=15.0, seed=10)
    assert not np.array_equal(a_rec.samples[0], c_rec.samples[0])


def test_make_record_explicit_plan_and_channels():
    plan = [(1.0, "N"), (2.0, "V")]
    record, annotations = synth.make_record(
        duration_s=4.0, beat_plan=plan, channel_names=("MLII", "V5"), rhythm_marker=False
    )
    assert [c.name for c in record.channels] == ["MLII", "V5"]
    assert [(a.sample_index, a.symbol) for a in annotations] == [(360, "N"), (720, "V")]
    # Second channel is an attenuated copy, so the beat peak is smaller there.
    assert abs(int(record.samples[1][720])) < abs(int(record.samples[0][720]))


def test_write_dataset_round_trip(tmp_path):
    ids = synth.write_dataset(tmp_path, num_records=2, duration_s=12.0, seed=3)
    assert ids == ["s00", "s01"]
    assert scan_record_ids(tmp_path) == ids
    for record_id in ids:
        assert (tmp_path / f"{record_id}.hea").exists()
        assert (tmp_path / f"{record_id}.dat").exists()
        assert (tmp_path / f"{record_id}.atr").exists()
    record, annotations = read_record(str(tmp_path / "s00"))
    reference, ref_annotations = synth.make_record("s00", duration_s=12.0, seed=3)
    np.testing.assert_array_equal(record.samples[0], reference.samples[0])
    assert [(a.sample_index, a.symbol) for a in annotations] == [
        (a.sample_index, a.symbol) for a in ref_annotations
    ]


def test_write_dataset_byte_deterministic(tmp_path):
    synth.write_dataset(tmp_path / "a", num_records=1, duration_s=10.0, seed=0)
    synth.write_dataset(tmp_path / "b", num_records=1, duration_s=10.0, seed=0)
    for suffix in (".hea", ".dat", ".atr"):
        assert (tmp_path / "a" / f"s00{suffix}").read_bytes() == (
            tmp_path / "b" / f"s00{suffix}"
        ).read_bytes()


def test_synth_cli(tmp_path, capsys):
    exit_code = synth.main([str(tmp_path / "corpus"), "--records", "1", "--duration", "10"])
    assert exit_code == 0
    assert "wrote 1 records" in capsys.readouterr().out
    assert (tmp_path / "corpus" / "s00.hea").exists()
