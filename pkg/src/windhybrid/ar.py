"""Multi-output linear autoregression fitted by least squares with an intercept."""
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

RANK_TOL = 1e-10


class RankDeficientWarning(UserWarning):
    pass


@dataclass(frozen=True)
class ArModel:
    coefficients: np.ndarray  # [n_steps * n_features, n_outputs]
    intercept: np.ndarray  # [n_outputs]
    n_steps: int
    n_features: int

    def __post_init__(self):
        if self.coefficients.shape[0] != self.n_steps * self.n_features:
            raise ValueError("coefficient rows must equal n_steps * n_features")
        if self.intercept.shape != (self.coefficients.shape[1],):
            raise ValueError("intercept length must match coefficient columns")


def _design(X):
    n = X.shape[0]
    return np.hstack([X.reshape(n, -1), np.ones((n, 1))])


def lstsq_qr(A, Y, rank_tol=RANK_TOL):
    """Solve ``min ||A B - Y||`` column-wise with one shared factorisation.

    Full-rank designs go through a reduced QR; if the smallest singular value
    falls below ``rank_tol`` times the largest, the minimum-norm pseudoinverse
    solution is returned instead and a :class:`RankDeficientWarning` is issued.
    """
    s = np.linalg.svd(A, compute_uv=False)
    if A.shape[0] < A.shape[1] or s[-1] <= rank_tol * s[0]:
        warnings.warn(f"rank-deficient design ({A.shape[1]} columns); using pseudoinverse",
                      RankDeficientWarning, stacklevel=3)
        return np.linalg.pinv(A, rcond=rank_tol) @ Y
    Q, R = np.linalg.qr(A)
    return solve_triangular(R, Q.T @ Y)


def fit_ols(dataset):
    X = np.asarray(dataset.X, dtype=np.float64)
    if X.shape[0] == 0:
        raise ValueError("cannot fit on an empty dataset")
    beta = lstsq_qr(_design(X), np.asarray(dataset.Y, dtype=np.float64))
    return ArModel(np.ascontiguousarray(beta[:-1]), beta[-1].copy(), X.shape[1], X.shape[2])


def predict(model, X):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 3 or X.shape[1:] != (model.n_steps, model.n_features):
        raise ValueError(f"expected windows [n, {model.n_steps}, {model.n_features}], got {X.shape}")
    return X.reshape(X.shape[0], -1) @ model.coefficients + model.intercept


def residual_diagnostics(model, dataset):
    """Per-output residual mean and (population) variance on ``dataset``."""
    r = np.asarray(dataset.Y) - predict(model, dataset.X)
    return r.mean(axis=0), r.var(axis=0)
