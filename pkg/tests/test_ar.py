import warnings

import numpy as np
import pytest

from windhybrid.ar import ArModel, RankDeficientWarning, fit_ols, predict, residual_diagnostics
from windhybrid.data import WindowedDataset, make_supervised

from oracles import normal_equations


def _ds(X, Y):
    X = np.asarray(X, dtype=float)
    return WindowedDataset(X, np.asarray(Y, dtype=float), 1, np.arange(len(X)))


def test_scalar_exact_law():
    y = [0.6]
    for _ in range(20):
        y.append(3 * y[-1] - 1)
    d = make_supervised(np.array(y[:12])[:, None], 1, 1)
    m = fit_ols(d)
    assert abs(m.coefficients[0, 0] - 3) < 1e-9 and abs(m.intercept[0] + 1) < 1e-9
    assert np.max(np.abs(predict(m, d.X) - d.Y)) < 1e-9
    assert abs(predict(m, np.array([[[2.0]]]))[0, 0] - 5) < 1e-9


def test_bivariate_recovery():
    rng = np.random.default_rng(0)
    A = np.array([[0.6, -0.3], [0.2, 0.9]])
    c = np.array([0.5, -1.0])
    X = rng.normal(size=(40, 1, 2))
    Y = X[:, 0, :] @ A + c
    m = fit_ols(_ds(X, Y))
    np.testing.assert_allclose(m.coefficients, A, atol=1e-8)
    np.testing.assert_allclose(m.intercept, c, atol=1e-8)


def test_matches_normal_equations():
    rng = np.random.default_rng(1)
    for _ in range(100):
        n_steps, n_feat = int(rng.integers(1, 5)), int(rng.integers(1, 4))
        width = n_steps * n_feat
        n = int(rng.integers(width + 5, 201))
        X = rng.normal(size=(n, n_steps, n_feat))
        Y = rng.normal(size=(n, 2))
        beta = normal_equations(X.reshape(n, -1), Y)
        m = fit_ols(_ds(X, Y))
        np.testing.assert_allclose(m.coefficients, beta[:-1], atol=1e-8)
        np.testing.assert_allclose(m.intercept, beta[-1], atol=1e-8)


def test_residual_orthogonality():
    rng = np.random.default_rng(2)
    X = rng.normal(size=(80, 3, 2))
    Y = rng.normal(size=(80, 2))
    m = fit_ols(_ds(X, Y))
    A = np.hstack([X.reshape(80, -1), np.ones((80, 1))])
    assert np.max(np.abs(A.T @ (Y - predict(m, X)))) < 1e-8


def test_duplicated_column_warns_and_fits():
    rng = np.random.default_rng(3)
    x = rng.normal(size=(30, 1))
    X = np.hstack([x, x])[:, None, :]  # two identical features
    Y = np.hstack([2 * x + 1, -x])
    with pytest.warns(RankDeficientWarning):
        m = fit_ols(_ds(X, Y))
    assert np.max(np.abs(predict(m, X) - Y)) < 1e-8
    np.testing.assert_allclose(m.coefficients[0], m.coefficients[1], atol=1e-10)  # minimum norm splits evenly


def test_full_rank_does_not_warn():
    rng = np.random.default_rng(4)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        fit_ols(_ds(rng.normal(size=(20, 2, 2)), rng.normal(size=(20, 2))))


def test_predict_oracle_and_shape():
    rng = np.random.default_rng(5)
    m = ArModel(rng.normal(size=(6, 2)), rng.normal(size=2), 3, 2)
    X = rng.normal(size=(50, 3, 2))
    ref = np.array([[sum(X[i].ravel()[r] * m.coefficients[r, k] for r in range(6)) + m.intercept[k]
                     for k in range(2)] for i in range(50)])
    assert np.max(np.abs(predict(m, X) - ref)) < 1e-12
    with pytest.raises(ValueError):
        predict(m, rng.normal(size=(5, 2, 2)))
    zero = ArModel(np.zeros((6, 2)), np.array([1.5, -2.0]), 3, 2)
    np.testing.assert_array_equal(predict(zero, X), np.tile([1.5, -2.0], (50, 1)))


def test_predict_linearity():
    rng = np.random.default_rng(6)
    m = ArModel(rng.normal(size=(4, 2)), rng.normal(size=2), 2, 2)
    X1, X2 = rng.normal(size=(10, 2, 2)), rng.normal(size=(10, 2, 2))
    a, b = 1.7, -0.4
    lhs = predict(m, a * X1 + b * X2)
    rhs = a * predict(m, X1) + b * predict(m, X2) - (a + b - 1) * m.intercept
    assert np.max(np.abs(lhs - rhs)) < 1e-10


def test_residual_diagnostics():
    rng = np.random.default_rng(7)
    X = rng.normal(size=(40, 1, 2))
    exact = _ds(X, X[:, 0, :] * 2)
    mean, var = residual_diagnostics(fit_ols(exact), exact)
    assert np.max(np.abs(mean)) < 1e-12 and np.max(var) < 1e-20
    Y = rng.normal(size=(40, 2))
    Y -= Y.mean(axis=0)
    intercept_only = ArModel(np.zeros((2, 2)), np.zeros(2), 1, 2)
    mean, _ = residual_diagnostics(intercept_only, _ds(X, Y))
    assert np.max(np.abs(mean)) < 1e-12
    m = ArModel(rng.normal(size=(2, 2)), rng.normal(size=2), 1, 2)
    r = Y - (X[:, 0, :] @ m.coefficients + m.intercept)
    _, var = residual_diagnostics(m, _ds(X, Y))
    expect = [sum((v - r[:, k].mean()) ** 2 for v in r[:, k]) / len(r) for k in range(2)]
    assert np.max(np.abs(var - expect)) < 1e-10


def test_empty_dataset():
    with pytest.raises(ValueError):
        fit_ols(_ds(np.empty((0, 1, 2)), np.empty((0, 2))))
