import math

import numpy as np
import pytest

from windhybrid.metrics import DegenerateTarget, accuracy_percent, r_squared, rmse

from oracles import r2_direct, rmse_direct


def test_rmse_examples():
    assert rmse([[1.0, 2.0]], [[1.0, 2.0]])[0] == 0.0
    comb, per = rmse([[3.0, 4.0]], [[0.0, 0.0]])
    assert abs(comb - math.sqrt(12.5)) < 1e-12
    np.testing.assert_allclose(per, [3, 4])


def test_r2_examples():
    assert r_squared([1.0, 2.0, 3.0], [1.0, 2.0, 4.0])[0] == 0.5
    obs = np.random.default_rng(0).normal(size=(20, 2))
    r2, _ = r_squared(obs, obs)
    assert r2 == 1.0 and accuracy_percent(r2) == 100.0
    r2, per = r_squared(obs, np.tile(obs.mean(axis=0), (20, 1)))
    assert np.max(np.abs(per)) < 1e-15 and abs(r2) < 1e-15


def test_against_direct_formulas():
    rng = np.random.default_rng(1)
    for _ in range(30):
        m, k = int(rng.integers(2, 1001)), int(rng.integers(1, 5))
        obs = rng.normal(size=(m, k)) * rng.uniform(0.1, 10)
        pred = obs + rng.normal(size=(m, k))
        comb, per = rmse(obs, pred)
        c2, p2 = rmse_direct(obs, pred)
        assert abs(comb - c2) < 1e-12 and np.max(np.abs(per - p2)) < 1e-12
        r, rp = r_squared(obs, pred)
        r2, rp2 = r2_direct(obs, pred)
        assert abs(r - r2) < 1e-12 and np.max(np.abs(rp - rp2)) < 1e-12
        assert accuracy_percent(r) == 100 * r


def test_errors():
    with pytest.raises(DegenerateTarget):
        r_squared([[1.0, 2.0], [1.0, 3.0]], [[1.0, 2.0], [1.0, 3.0]])
    with pytest.raises(ValueError, match="shape"):
        rmse(np.zeros((2, 2)), np.zeros((3, 2)))
    with pytest.raises(ValueError):
        rmse(np.zeros((0, 2)), np.zeros((0, 2)))
