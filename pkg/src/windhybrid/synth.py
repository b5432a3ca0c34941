"""Synthetic data: a wind-like bivariate series and a plain linear VAR(1) process."""
import numpy as np

from .data import BivariateSeries

CADENCE_S = 600
START_EPOCH = 1546300800  # 2019-01-01T00:00:00Z


def synthetic_wind(length=1600, seed=7, rated_power=100.0):
    """Mean-reverting wind speed with a daily cycle, a cubic power curve and a wandering direction."""
    rng = np.random.default_rng(seed)
    t = np.arange(length)
    daily = 1.5 * np.sin(2 * np.pi * t / 144.0)
    speed = np.empty(length)
    level = 7.0
    for i in range(length):
        level = 7.0 + 0.97 * (level - 7.0) + 0.45 * rng.standard_normal()
        speed[i] = max(0.0, level + daily[i])
    cut_in, rated, cut_out = 3.0, 12.0, 25.0
    frac = np.clip((speed ** 3 - cut_in ** 3) / (rated ** 3 - cut_in ** 3), 0.0, 1.0)
    frac[speed >= cut_out] = 0.0
    power = np.clip(rated_power * frac + rng.normal(0.0, 0.02 * rated_power, length), 0.0, None)
    direction = np.mod(200.0 + np.cumsum(rng.normal(0.0, 4.0, length)), 360.0)
    ts = START_EPOCH + CADENCE_S * t.astype(np.int64)
    return BivariateSeries(ts, speed, power, direction)


def linear_process(length, A, c, noise_std, seed, burn_in=200):
    """Simulate ``y[t+1] = A y[t] + c + e[t]`` with iid Gaussian ``e``; returns ``[length, k]``."""
    A = np.asarray(A, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    rng = np.random.default_rng(seed)
    k = len(c)
    y = np.linalg.solve(np.eye(k) - A, c)
    out = np.empty((length, k))
    for i in range(burn_in + length):
        y = A @ y + c + noise_std * rng.standard_normal(k)
        if i >= burn_in:
            out[i - burn_in] = y
    return out
