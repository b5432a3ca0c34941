import numpy as np
import pytest

from windhybrid.data import (BivariateSeries, DataError, InsufficientSamples, ScalerParams, SplitSpec,
                             chronological_split, fit_minmax, inverse_transform, load_csv, make_supervised,
                             read_columns, reshape_stage2, transform, validate_series, write_csv)
from windhybrid.synth import synthetic_wind

from oracles import enumerate_windows


def _write(tmp_path, text, name="d.csv"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def _series(n=20, cadence=600):
    ts = 1_600_000_000 + cadence * np.arange(n, dtype=np.int64)
    return ts, np.linspace(1, 5, n), np.linspace(0, 50, n)


# --------------------------------------------------------------------- load

def test_load_three_rows(tmp_path):
    p = _write(tmp_path, "timestamp,wind_speed,wind_power\n0,1.0,2.0\n600,1.5,3.0\n1200,2.0,4.5\n")
    s = load_csv(p)
    assert len(s) == 3
    assert s.direction is None
    np.testing.assert_array_equal(s.power, [2.0, 3.0, 4.5])


def test_load_with_direction_and_iso_times(tmp_path):
    p = _write(tmp_path, "timestamp,wind_speed,wind_power,wind_direction\n"
                         "2019-01-01T00:00:00,1,2,10\n2019-01-01T00:10:00Z,1,2,350.5\n")
    s = load_csv(p)
    np.testing.assert_array_equal(s.direction, [10.0, 350.5])
    assert s.timestamps[1] - s.timestamps[0] == 600


def test_out_of_order_timestamps(tmp_path):
    p = _write(tmp_path, "timestamp,wind_speed,wind_power\n0,1,1\n600,1,1\n300,1,1\n")
    with pytest.raises(DataError, match="non-monotonic timestamp at row 3"):
        load_csv(p)


def test_schema_remap(tmp_path):
    p = _write(tmp_path, "t,ws,wp\n0,1,2\n600,3,4\n")
    s = load_csv(p, {"timestamp": "t", "speed": "ws", "power": "wp"})
    np.testing.assert_array_equal(s.speed, [1, 3])


@pytest.mark.parametrize("text,match", [
    ("timestamp,wind_speed\n0,1\n", "missing column 'wind_power'"),
    ("timestamp,wind_speed,wind_power\n", "empty data"),
    ("timestamp,wind_speed,wind_power\n0,1,2\n600,x,2\n1200,1,nan\n", "rows 2, 3"),
])
def test_load_errors(tmp_path, text, match):
    with pytest.raises(DataError, match=match):
        load_csv(_write(tmp_path, text))


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_csv(str(tmp_path / "nope.csv"))


def test_write_read_round_trip(tmp_path):
    s = synthetic_wind(50, seed=3)
    p = str(tmp_path / "s.csv")
    write_csv(s, p)
    back = load_csv(p)
    for name in ("timestamps", "speed", "power", "direction"):
        np.testing.assert_array_equal(getattr(back, name), getattr(s, name))


def test_series_invariants():
    ts, sp, pw = _series(5)
    with pytest.raises(DataError):
        BivariateSeries(ts[:1], sp[:1], pw[:1])
    with pytest.raises(DataError, match="negative"):
        BivariateSeries(ts, -sp, pw)
    with pytest.raises(DataError, match="direction"):
        BivariateSeries(ts, sp, pw, np.full(5, 360.0))
    with pytest.raises(DataError, match="length"):
        BivariateSeries(ts, sp[:4], pw)


# ----------------------------------------------------------------- validate

def test_validate_clean():
    assert validate_series(*_series()) == []


def test_validate_gap():
    ts, sp, pw = _series()
    ts[7:] += 600  # one 20-minute step between rows 6 and 7
    issues = validate_series(ts, sp, pw)
    assert [(i.kind, i.index) for i in issues] == [("gap", 7)]


def test_validate_negative_speed():
    ts, sp, pw = _series()
    sp[5] = -1.0
    issues = validate_series(ts, sp, pw)
    assert [(i.kind, i.index) for i in issues] == [("negative_speed", 5)]


def test_validate_does_not_mutate_and_accepts_series():
    s = synthetic_wind(30)
    before = s.speed.copy()
    assert validate_series(s) == []
    np.testing.assert_array_equal(s.speed, before)
    ts, sp, pw = _series(4)
    issues = validate_series(ts, sp, pw, np.array([0.0, 359.9, 360.0, -1.0]))
    assert [i.index for i in issues if i.kind == "direction_range"] == [2, 3]


def test_read_columns_keeps_bad_ranges(tmp_path):
    p = _write(tmp_path, "timestamp,wind_speed,wind_power\n0,-1,2\n600,1,2\n")
    _, sp, _, _ = read_columns(p)
    assert sp[0] == -1.0
    with pytest.raises(DataError):
        load_csv(p)


# -------------------------------------------------------------------- split

@pytest.mark.parametrize("L,sizes", [(100, (70, 15, 15)), (10, (7, 1, 2))])
def test_split_sizes(L, sizes):
    assert SplitSpec().sizes(L) == sizes


def test_split_too_short():
    with pytest.raises(DataError, match="series too short"):
        SplitSpec().sizes(2)


def test_split_spec_validation():
    with pytest.raises(ValueError):
        SplitSpec(0.5, 0.3, 0.3)
    with pytest.raises(ValueError):
        SplitSpec(0.0, 0.5, 0.5)


@pytest.mark.parametrize("L", range(7, 80))
def test_split_partition(L):
    m = np.arange(L * 2, dtype=float).reshape(L, 2)
    parts = chronological_split(m)
    assert all(len(p) > 0 for p in parts)
    np.testing.assert_array_equal(np.concatenate(parts), m)


def test_split_series():
    s = synthetic_wind(40)
    tr, va, te = chronological_split(s, SplitSpec(0.5, 0.25, 0.25))
    assert (len(tr), len(va), len(te)) == (20, 10, 10)
    assert tr.timestamps[-1] < va.timestamps[0] < te.timestamps[0]


# ------------------------------------------------------------------- scaler

def test_fit_minmax_examples():
    p = fit_minmax(np.array([[2.0, 0.0, -1.0, 5.0], [4.0, 10.0, 1.0, 5.0], [6.0, 5.0, 0.0, 5.0]]))
    np.testing.assert_array_equal(p.data_min, [2, 0, -1, 5])
    np.testing.assert_array_equal(p.data_max, [6, 10, 1, 5])
    np.testing.assert_array_equal(p.degenerate, [False, False, False, True])
    with pytest.raises(DataError):
        fit_minmax(np.empty((0, 2)))


def test_transform_examples():
    p = ScalerParams(np.array([2.0]), np.array([6.0]))
    np.testing.assert_array_equal(transform(p, [[2], [4], [6], [8]]).ravel(), [0, 0.5, 1, 1.5])
    assert inverse_transform(p, [[0.5]])[0, 0] == 4.0
    d = fit_minmax(np.full((3, 1), 5.0))
    assert transform(d, [[123.0]])[0, 0] == 0.0
    assert inverse_transform(d, [[0.0]])[0, 0] == 5.0
    with pytest.raises(ValueError):
        transform(p, np.zeros((2, 2)))


def test_scaler_round_trip_and_range():
    rng = np.random.default_rng(0)
    for _ in range(50):
        seg = rng.normal(rng.uniform(-100, 100), rng.uniform(0.1, 50), size=(rng.integers(2, 60), 3))
        p = fit_minmax(seg)
        t = transform(p, seg)
        assert t.min() >= 0.0 and t.max() <= 1.0
        assert np.max(np.abs(inverse_transform(p, t) - seg)) < 1e-12
        other = rng.normal(0, 100, size=(20, 3))
        assert np.max(np.abs(inverse_transform(p, transform(p, other)) - other)) < 1e-12


# ---------------------------------------------------------------- windowing

def test_make_supervised_examples():
    m = np.arange(10, dtype=float)[:, None]
    d = make_supervised(m, 3, 1)
    assert d.n_samples == 7
    np.testing.assert_array_equal(d.X[0].ravel(), [0, 1, 2])
    assert d.Y[0, 0] == 3
    d = make_supervised(m, 3, 4)
    assert d.n_samples == 4 and d.Y[0, 0] == 6
    with pytest.raises(InsufficientSamples, match="insufficient samples"):
        make_supervised(m[:5], 3, 3)


def test_windowing_matches_enumeration_exhaustive():
    rng = np.random.default_rng(1)
    base = rng.normal(size=(50, 2))
    for L in range(1, 51):
        for n_steps in range(1, 11):
            for h in range(1, 11):
                X, Y, origins = enumerate_windows(base[:L], n_steps, h)
                if not X:
                    with pytest.raises(InsufficientSamples):
                        make_supervised(base[:L], n_steps, h)
                    continue
                d = make_supervised(base[:L], n_steps, h)
                assert d.n_samples == len(X) == L - n_steps - h + 1
                np.testing.assert_array_equal(d.X, np.array(X))
                np.testing.assert_array_equal(d.Y, np.array(Y))
                np.testing.assert_array_equal(d.origin_indices, origins)


def test_window_reconstruction():
    m = np.random.default_rng(2).normal(size=(30, 2))
    d = make_supervised(m, 4, 3)
    np.testing.assert_array_equal(d.X[:, -1, :], m[3:30 - 3])


def test_target_cols_and_offset():
    m = np.arange(30, dtype=float).reshape(10, 3)
    d = make_supervised(m, 2, 1, target_cols=[0, 1], offset=100)
    assert d.X.shape == (8, 2, 3) and d.Y.shape == (8, 2)
    assert d.origin_indices[0] == 102


def test_reshape_stage2():
    pred = np.arange(12, dtype=float).reshape(6, 2)
    truth = pred + 100
    d = reshape_stage2(pred, truth, 2, 1)
    assert d.n_samples == 4
    np.testing.assert_array_equal(d.X[0], pred[0:2])
    np.testing.assert_array_equal(d.Y[0], truth[2])
    with pytest.raises(InsufficientSamples):
        reshape_stage2(pred[:2], truth[:2], 2, 1)
    with pytest.raises(ValueError, match="shape mismatch"):
        reshape_stage2(pred, truth[:5], 2, 1)
    d = reshape_stage2(pred, truth, 1, 2, origin_indices=np.arange(6) + 50)
    np.testing.assert_array_equal(d.origin_indices, [52, 53, 54, 55])
