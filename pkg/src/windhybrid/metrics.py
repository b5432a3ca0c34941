"""RMSE and coefficient of determination, combined and per output column."""
import numpy as np


class DegenerateTarget(ValueError):
    """Observed column has zero total sum of squares, so R^2 is undefined."""


def _as_2d(a):
    a = np.asarray(a, dtype=np.float64)
    return a[:, None] if a.ndim == 1 else a


def _check(observed, predicted):
    o, p = _as_2d(observed), _as_2d(predicted)
    if o.shape != p.shape:
        raise ValueError(f"shape mismatch: {o.shape} vs {p.shape}")
    if o.shape[0] == 0:
        raise ValueError("need at least one row")
    return o, p


def rmse(observed, predicted):
    """Return ``(combined, per_column)``; combined pools every entry."""
    o, p = _check(observed, predicted)
    sq = (o - p) ** 2
    return float(np.sqrt(sq.mean())), np.sqrt(sq.mean(axis=0))


def r_squared(observed, predicted):
    """Return ``(combined, per_column)`` with ``R^2 = 1 - SSE/SST`` per column.

    The combined value is the unweighted mean of the per-column values.
    """
    o, p = _check(observed, predicted)
    sse = ((o - p) ** 2).sum(axis=0)
    sst = ((o - o.mean(axis=0)) ** 2).sum(axis=0)
    if np.any(sst == 0):
        raise DegenerateTarget("observed column with zero variance")
    per = 1.0 - sse / sst
    return float(per.mean()), per


def accuracy_percent(r2):
    return 100.0 * r2
