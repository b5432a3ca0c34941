"""Series ingestion, validation, chronological splitting, min-max scaling and windowing."""
import csv
import math
import os
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Optional

import numpy as np

from .kernels import sliding_windows

DEFAULT_SCHEMA = {
    "timestamp": "timestamp",
    "speed": "wind_speed",
    "power": "wind_power",
    "direction": "wind_direction",
}


class DataError(ValueError):
    """Raised for malformed input data or impossible windowing requests."""


class InsufficientSamples(DataError):
    def __init__(self, detail=""):
        msg = "insufficient samples"
        super().__init__(f"{msg}: {detail}" if detail else msg)


@dataclass(frozen=True)
class BivariateSeries:
    timestamps: np.ndarray  # int64 epoch seconds
    speed: np.ndarray
    power: np.ndarray
    direction: Optional[np.ndarray] = None

    def __post_init__(self):
        n = len(self.timestamps)
        if n < 2:
            raise DataError("series needs at least 2 rows")
        for name in ("speed", "power", "direction"):
            arr = getattr(self, name)
            if arr is not None and len(arr) != n:
                raise DataError(f"{name} has length {len(arr)}, expected {n}")
        bad = np.flatnonzero(np.diff(self.timestamps) <= 0)
        if bad.size:
            raise DataError(f"non-monotonic timestamp at index {bad[0] + 1}")
        neg = np.flatnonzero(self.speed < 0)
        if neg.size:
            raise DataError(f"negative wind speed at index {neg[0]}")
        if self.direction is not None:
            out = np.flatnonzero((self.direction < 0) | (self.direction >= 360))
            if out.size:
                raise DataError(f"wind direction outside [0, 360) at index {out[0]}")

    def __len__(self):
        return len(self.timestamps)

    def features(self, include_direction=False):
        """Model feature matrix: columns speed, power (and direction when asked)."""
        cols = [self.speed, self.power]
        if include_direction:
            if self.direction is None:
                raise DataError("direction requested but the series has no direction channel")
            cols.append(self.direction)
        return np.column_stack(cols).astype(np.float64)

    def slice(self, start, stop):
        d = None if self.direction is None else self.direction[start:stop]
        return BivariateSeries(self.timestamps[start:stop], self.speed[start:stop],
                               self.power[start:stop], d)


def _parse_timestamp(text):
    text = text.strip()
    try:
        return int(text)
    except ValueError:
        pass
    dt = datetime.fromisoformat(text.replace("Z", "+00:00"))
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return int(dt.timestamp())


def read_columns(path, schema=None):
    """Parse the mapped CSV columns into arrays without range validation.

    Returns ``(timestamps, speed, power, direction_or_None)``.
    """
    schema = {**DEFAULT_SCHEMA, **(schema or {})}
    if not os.path.exists(path):
        raise FileNotFoundError(f"no such file: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for key in ("timestamp", "speed", "power"):
            if schema[key] not in header:
                raise DataError(f"missing column {schema[key]!r}")
        dir_col = schema.get("direction")
        use_dir = bool(dir_col) and dir_col in header
        ts, sp, pw, dr = [], [], [], []
        bad_rows = []
        for row_no, row in enumerate(reader, start=1):
            try:
                t = _parse_timestamp(row[schema["timestamp"]])
                s = float(row[schema["speed"]])
                p = float(row[schema["power"]])
                d = float(row[dir_col]) if use_dir else None
            except (TypeError, ValueError):
                bad_rows.append(row_no)
                continue
            if not (math.isfinite(s) and math.isfinite(p)):
                bad_rows.append(row_no)
                continue
            ts.append(t)
            sp.append(s)
            pw.append(p)
            if use_dir:
                dr.append(d)
    if bad_rows:
        shown = ", ".join(str(r) for r in bad_rows[:10])
        raise DataError(f"unparseable values in rows {shown}")
    if not ts:
        raise DataError("empty data")
    return (np.asarray(ts, dtype=np.int64), np.asarray(sp, dtype=np.float64),
            np.asarray(pw, dtype=np.float64), np.asarray(dr, dtype=np.float64) if use_dir else None)


def load_csv(path, schema=None):
    """Read a CSV into a :class:`BivariateSeries`.

    ``schema`` maps the logical names ``timestamp``, ``speed``, ``power`` and
    optionally ``direction`` to column headers. Direction is loaded only if its
    mapped column exists. Row numbers in errors count data rows from 1.
    """
    ts, sp, pw, dr = read_columns(path, schema)
    bad = np.flatnonzero(np.diff(ts) <= 0)
    if bad.size:
        raise DataError(f"non-monotonic timestamp at row {bad[0] + 2}")
    return BivariateSeries(ts, sp, pw, dr)


def write_csv(series, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        cols = ["timestamp", "wind_speed", "wind_power"]
        if series.direction is not None:
            cols.append("wind_direction")
        w.writerow(cols)
        for i in range(len(series)):
            row = [int(series.timestamps[i]), repr(float(series.speed[i])), repr(float(series.power[i]))]
            if series.direction is not None:
                row.append(repr(float(series.direction[i])))
            w.writerow(row)


@dataclass(frozen=True)
class Issue:
    kind: str  # "gap" | "negative_speed" | "direction_range"
    index: int
    detail: str


def validate_series(timestamps, speed=None, power=None, direction=None):
    """Report cadence gaps and range violations without raising.

    Accepts raw arrays so that data rejected by :class:`BivariateSeries` can
    still be inspected. Gaps are deviations from the modal timestamp delta,
    reported at the index of the later row.
    """
    if isinstance(timestamps, BivariateSeries):
        s = timestamps
        timestamps, speed, direction = s.timestamps, s.speed, s.direction
    issues = []
    ts = np.asarray(timestamps)
    if len(ts) >= 2:
        deltas = np.diff(ts)
        modal = Counter(deltas.tolist()).most_common(1)[0][0]
        for i in np.flatnonzero(deltas != modal):
            issues.append(Issue("gap", int(i + 1), f"delta {int(deltas[i])}s, expected {modal}s"))
    for i in np.flatnonzero(np.asarray(speed) < 0):
        issues.append(Issue("negative_speed", int(i), f"speed {float(speed[i])}"))
    if direction is not None:
        d = np.asarray(direction)
        for i in np.flatnonzero((d < 0) | (d >= 360)):
            issues.append(Issue("direction_range", int(i), f"direction {float(d[i])}"))
    return issues


def modal_cadence(timestamps):
    deltas = np.diff(np.asarray(timestamps))
    return int(Counter(deltas.tolist()).most_common(1)[0][0])


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.70
    val_fraction: float = 0.15
    test_fraction: float = 0.15

    def __post_init__(self):
        fr = (self.train_fraction, self.val_fraction, self.test_fraction)
        if any(not 0 < f < 1 for f in fr):
            raise ValueError("split fractions must lie in (0, 1)")
        if abs(math.fsum(fr) - 1.0) > 1e-12:
            raise ValueError("split fractions must sum to 1")

    def sizes(self, length):
        n_train = math.floor(length * self.train_fraction + 1e-9)
        n_val = math.floor(length * self.val_fraction + 1e-9)
        n_test = length - n_train - n_val
        if min(n_train, n_val, n_test) < 1:
            raise DataError("series too short")
        return n_train, n_val, n_test


def chronological_split(data, spec=SplitSpec()):
    """Split a series (or a row-major array) into contiguous train/val/test parts."""
    n_train, n_val, _ = spec.sizes(len(data))
    a, b = n_train, n_train + n_val
    if isinstance(data, BivariateSeries):
        return data.slice(0, a), data.slice(a, b), data.slice(b, len(data))
    return data[:a], data[a:b], data[b:]


@dataclass(frozen=True)
class ScalerParams:
    data_min: np.ndarray
    data_max: np.ndarray
    degenerate: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.degenerate is None:
            object.__setattr__(self, "degenerate", self.data_max == self.data_min)

    @property
    def n_features(self):
        return len(self.data_min)

    def select(self, cols):
        return ScalerParams(self.data_min[cols], self.data_max[cols], self.degenerate[cols])


def fit_minmax(segment):
    seg = np.asarray(segment, dtype=np.float64)
    if seg.ndim == 1:
        seg = seg[:, None]
    if seg.shape[0] == 0:
        raise DataError("cannot fit scaler on an empty segment")
    return ScalerParams(seg.min(axis=0), seg.max(axis=0))


def _check_width(params, m):
    if m.shape[-1] != params.n_features:
        raise ValueError(f"expected {params.n_features} columns, got {m.shape[-1]}")


def transform(params, matrix):
    m = np.asarray(matrix, dtype=np.float64)
    _check_width(params, m)
    span = np.where(params.degenerate, 1.0, params.data_max - params.data_min)
    out = (m - params.data_min) / span
    return np.where(params.degenerate, 0.0, out)


def inverse_transform(params, matrix):
    m = np.asarray(matrix, dtype=np.float64)
    _check_width(params, m)
    span = params.data_max - params.data_min
    out = m * span + params.data_min
    return np.where(params.degenerate, params.data_min, out)


@dataclass(frozen=True)
class WindowedDataset:
    X: np.ndarray  # [n_samples, n_steps, n_features]
    Y: np.ndarray  # [n_samples, n_targets]
    horizon: int
    origin_indices: np.ndarray  # source row of each sample's target

    @property
    def n_samples(self):
        return self.X.shape[0]

    @property
    def n_steps(self):
        return self.X.shape[1]


def n_windows(length, n_steps, horizon):
    return length - n_steps - horizon + 1


def make_supervised(matrix, n_steps, horizon, target_cols=None, offset=0):
    """Window ``matrix`` into ``X[i] = rows i..i+n_steps-1`` and ``Y[i] = row i+n_steps-1+horizon``.

    ``target_cols`` restricts the target columns (all columns by default);
    ``offset`` is added to the recorded origin indices so segments can report
    positions in the parent series.
    """
    if n_steps < 1 or horizon < 1:
        raise ValueError("n_steps and horizon must be >= 1")
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim == 1:
        m = m[:, None]
    n = n_windows(len(m), n_steps, horizon)
    if n <= 0:
        raise InsufficientSamples(f"length {len(m)}, n_steps {n_steps}, horizon {horizon}")
    X = sliding_windows(m, n_steps, n)
    first = n_steps - 1 + horizon
    Y = m[first:first + n]
    if target_cols is not None:
        Y = Y[:, target_cols]
    return WindowedDataset(X, np.ascontiguousarray(Y), horizon, np.arange(first, first + n) + offset)


def reshape_stage2(pred1, truth, s2_steps, s2_horizon, origin_indices=None):
    """Window first-stage predictions into a second-stage dataset.

    Inputs are windows of ``pred1``; targets come from ``truth`` at the
    matching rows. ``origin_indices`` (one per pred1 row) are carried through
    so the result still points at source-series rows.
    """
    pred1 = np.asarray(pred1, dtype=np.float64)
    truth = np.asarray(truth, dtype=np.float64)
    if pred1.shape != truth.shape:
        raise ValueError(f"shape mismatch: predictions {pred1.shape} vs truth {truth.shape}")
    if s2_steps < 1 or s2_horizon < 1:
        raise ValueError("s2_steps and s2_horizon must be >= 1")
    n = n_windows(len(pred1), s2_steps, s2_horizon)
    if n <= 0:
        raise InsufficientSamples(f"{len(pred1)} predictions, s2_steps {s2_steps}, horizon {s2_horizon}")
    first = s2_steps - 1 + s2_horizon
    X = sliding_windows(pred1, s2_steps, n)
    origins = np.arange(first, first + n)
    if origin_indices is not None:
        origins = np.asarray(origin_indices)[origins]
    return WindowedDataset(X, np.ascontiguousarray(truth[first:first + n]), s2_horizon, origins)
