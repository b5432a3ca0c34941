"""The numba and numpy kernel paths must agree."""
import numpy as np
import pytest

from windhybrid import kernels
from windhybrid._accel import HAVE_NUMBA, numba_enabled

pytestmark = pytest.mark.skipif(not HAVE_NUMBA, reason="numba not installed")

rng = np.random.default_rng(0)


def test_env_flag(monkeypatch):
    monkeypatch.setenv("WINDHYBRID_NUMBA", "0")
    assert not numba_enabled()
    monkeypatch.setenv("WINDHYBRID_NUMBA", "1")
    assert numba_enabled()


def test_conv_parity():
    x = rng.normal(size=(5, 6, 3))
    k = rng.normal(size=(2, 3, 7))
    b = rng.normal(size=7)
    np.testing.assert_allclose(kernels.conv1d_forward_nb(x, k, b), kernels.conv1d_forward_np(x, k, b),
                               rtol=0, atol=1e-12)
    dout = rng.normal(size=(5, 5, 7))
    for a, e in zip(kernels.conv1d_backward_nb(dout, x, k), kernels.conv1d_backward_np(dout, x, k)):
        np.testing.assert_allclose(a, e, rtol=0, atol=1e-12)


def test_pool_parity_and_ties():
    x = rng.normal(size=(4, 5, 6))
    x[0, :, 0] = 1.0  # full tie: lowest index wins on both paths
    v1, i1 = kernels.global_maxpool_nb(x)
    v2, i2 = kernels.global_maxpool_np(x)
    np.testing.assert_array_equal(v1, v2)
    np.testing.assert_array_equal(i1, i2)
    assert i1[0, 0] == 0
    d = rng.normal(size=(4, 1, 6))
    np.testing.assert_array_equal(kernels.maxpool_scatter_nb(d, i1, 5), kernels.maxpool_scatter_np(d, i2, 5))


def test_windows_parity():
    m = rng.normal(size=(20, 3))
    np.testing.assert_array_equal(kernels.sliding_windows_nb(m, 4, 15), kernels.sliding_windows_np(m, 4, 15))


def test_adam_parity():
    shape = (13, 7)
    g = rng.normal(size=shape)
    states = []
    for fn in (kernels.adam_update_nb, kernels.adam_update_np):
        p, m, v = np.ones(shape), np.full(shape, 0.1), np.full(shape, 0.2)
        fn(p, g, m, v, 1e-3, 0.9, 0.999, 1e-8, 0.1, 0.001)
        states.append((p, m, v))
    for a, e in zip(*states):
        np.testing.assert_allclose(a, e, rtol=1e-14, atol=1e-15)


def test_dispatch_uses_flag(monkeypatch):
    m = rng.normal(size=(10, 2))
    monkeypatch.setenv("WINDHYBRID_NUMBA", "0")
    a = kernels.sliding_windows(m, 3, 8)
    monkeypatch.setenv("WINDHYBRID_NUMBA", "1")
    b = kernels.sliding_windows(m, 3, 8)
    np.testing.assert_array_equal(a, b)
