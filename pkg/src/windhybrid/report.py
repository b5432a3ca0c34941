"""Report tables (CSV/JSON) and SVG line charts with byte-stable output."""
import csv
import io
import math
import os
from xml.sax.saxutils import escape

from .experiment import MODELS, ExperimentResult, StepReport

CSV_COLUMNS = ("step", "model", "approach", "status", "rows", "rmse_combined", "rmse_speed",
               "rmse_power", "r2_combined", "accuracy_percent")
METRIC_COLUMNS = CSV_COLUMNS[5:]
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def _cell(value):
    if value is None:
        return "--"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_table(result, fmt="csv", path=None, approach=None):
    """Render the result as CSV (optionally one approach's table) or JSON; write to ``path`` if given."""
    if fmt == "json":
        text = result.to_json()
    elif fmt == "csv":
        rows = result.reports if approach is None else result.table(approach)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in rows:
            w.writerow([_cell(getattr(r, c)) for c in CSV_COLUMNS])
        text = buf.getvalue()
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text


def read_report(path):
    """Load a JSON report, or a CSV table written by :func:`emit_table`."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if path.endswith(".json"):
        return ExperimentResult.from_json(text)
    rows = list(csv.DictReader(io.StringIO(text)))
    table = next((int(r["approach"]) for r in rows if r["approach"] not in ("n/a", "--")), 1)
    reports = []
    for r in rows:
        kw = {c: (None if r[c] == "--" else float(r[c])) for c in METRIC_COLUMNS}
        ap = r["approach"] if r["approach"] == "n/a" else int(r["approach"])
        reports.append(StepReport(int(r["step"]), r["model"], ap, table, r["status"], int(r["rows"]), **kw))
    return ExperimentResult({}, 0, reports)


# ------------------------------------------------------------------- svg

W, H = 640, 400
LEFT, RIGHT, TOP, BOTTOM = 70, 170, 40, 50


def _fmt(v):
    return f"{v:.2f}"


def _ticks(lo, hi, n=5):
    if hi == lo:
        return [lo]
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def _panel(x0, y0, w, h, title, x_label, y_label, series, log_x, note=None):
    """SVG elements for one chart box. ``series`` is a list of ``(name, [(x, y), ...])``."""
    out = [f'<text x="{_fmt(x0 + w / 2)}" y="{_fmt(y0 - 14)}" text-anchor="middle" '
           f'font-size="14">{escape(title)}</text>',
           f'<rect x="{_fmt(x0)}" y="{_fmt(y0)}" width="{_fmt(w)}" height="{_fmt(h)}" '
           f'fill="none" stroke="#333"/>']
    pts = [(x, y) for _, s in series for x, y in s]
    if not pts:
        out.append(f'<text x="{_fmt(x0 + w / 2)}" y="{_fmt(y0 + h / 2)}" text-anchor="middle" '
                   f'font-size="16" fill="#888">no data</text>')
        return out
    tx = (lambda v: math.log10(v)) if log_x else (lambda v: float(v))
    xs = [tx(x) for x, _ in pts]
    ys = [y for _, y in pts]
    xlo, xhi = min(xs), max(xs)
    ylo, yhi = min(ys), max(ys)
    if xhi == xlo:
        xlo, xhi = xlo - 0.5, xhi + 0.5
    if yhi == ylo:
        ylo, yhi = ylo - 1.0, yhi + 1.0
    pad = 0.05 * (yhi - ylo)
    ylo, yhi = ylo - pad, yhi + pad

    def px(v):
        return x0 + (tx(v) - xlo) / (xhi - xlo) * w

    def py(v):
        return y0 + h - (v - ylo) / (yhi - ylo) * h

    for v in _ticks(ylo, yhi):
        out.append(f'<text x="{_fmt(x0 - 6)}" y="{_fmt(py(v) + 4)}" text-anchor="end" '
                   f'font-size="10">{v:.3g}</text>')
    xticks = sorted({x for x, _ in pts})
    if len(xticks) > 12:
        xticks = [10 ** v for v in _ticks(xlo, xhi)] if log_x else _ticks(xlo, xhi)
    for v in xticks:
        out.append(f'<text x="{_fmt(px(v))}" y="{_fmt(y0 + h + 14)}" text-anchor="middle" '
                   f'font-size="10">{v:g}</text>')
    out.append(f'<text x="{_fmt(x0 + w / 2)}" y="{_fmt(y0 + h + 32)}" text-anchor="middle" '
               f'font-size="11">{escape(x_label)}</text>')
    out.append(f'<text x="{_fmt(x0 - 50)}" y="{_fmt(y0 + h / 2)}" text-anchor="middle" font-size="11" '
               f'transform="rotate(-90 {_fmt(x0 - 50)} {_fmt(y0 + h / 2)})">{escape(y_label)}</text>')
    for i, (name, s) in enumerate(series):
        color = COLORS[i % len(COLORS)]
        ly = y0 + 12 + 16 * i
        out.append(f'<line x1="{_fmt(x0 + w + 10)}" y1="{_fmt(ly)}" x2="{_fmt(x0 + w + 30)}" '
                   f'y2="{_fmt(ly)}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{_fmt(x0 + w + 34)}" y="{_fmt(ly + 4)}" font-size="11">{escape(name)}</text>')
        if not s:
            continue
        coords = " ".join(f"{_fmt(px(x))},{_fmt(py(y))}" for x, y in s)
        out.append(f'<polyline class="series" data-name="{escape(name)}" points="{coords}" '
                   f'fill="none" stroke="{color}" stroke-width="2"/>')
    if note:
        out.append(f'<text x="{_fmt(x0 + w + 10)}" y="{_fmt(y0 + 20 + 16 * len(series))}" font-size="9" '
                   f'fill="#666">{escape(note)}</text>')
    return out


def _document(width, height, body):
    return ('<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}">\n'
            f'<rect width="{width}" height="{height}" fill="white"/>\n'
            + "\n".join(body) + "\n</svg>\n")


def line_chart(title, x_label, y_label, series, log_x=True, note=None):
    body = _panel(LEFT, TOP, W - LEFT - RIGHT, H - TOP - BOTTOM, title, x_label, y_label, series,
                  log_x, note)
    return _document(W, H, body)


def _series_for(reports, metric, key):
    """Group ok points by ``key(report)``; also list missing steps per group."""
    groups, missing = {}, {}
    for r in reports:
        name = key(r)
        groups.setdefault(name, [])
        value = getattr(r, metric)
        if value is None or not math.isfinite(value):
            missing.setdefault(name, []).append(r.step)
        else:
            groups[name].append((r.step, value))
    series = [(n, sorted(p)) for n, p in groups.items()]
    note = "; ".join(f"{n} missing at {','.join(map(str, s))}" for n, s in missing.items()) or None
    return series, note


def emit_curves(result, out_dir):
    """Write the per-approach RMSE/accuracy charts and the hybrid-by-approach overlays."""
    os.makedirs(out_dir, exist_ok=True)
    charts = {}
    for a in (1, 2):
        rows = sorted(result.table(a), key=lambda r: (MODELS.index(r.model) if r.model in MODELS else 99, r.step))
        for metric, label, fname in (("rmse_combined", "RMSE", "rmse"), ("accuracy_percent", "Accuracy (%)", "accuracy")):
            series, note = _series_for(rows, metric, lambda r: r.model)
            charts[f"{fname}_approach{a}.svg"] = line_chart(
                f"Approach {a}: {label} by step", "step (log scale)", label, series, note=note)
    hyb = sorted((r for r in result.reports if r.model == "CNN_LSTM_AR"), key=lambda r: (r.table, r.step))
    for metric, label, fname in (("rmse_combined", "RMSE", "hybrid_rmse_by_approach"),
                                 ("accuracy_percent", "Accuracy (%)", "hybrid_accuracy_by_approach")):
        series, note = _series_for(hyb, metric, lambda r: f"approach {r.table}")
        charts[f"{fname}.svg"] = line_chart(f"CNN_LSTM_AR {label} by approach", "step (log scale)",
                                            label, series, note=note)
    paths = []
    for name, text in charts.items():
        p = os.path.join(out_dir, name)
        with open(p, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        paths.append(p)
    return paths


def series_plot(timestamps, speed, power, max_points=2000):
    """Raw speed and power traces in two stacked panels (x = hours from the first row)."""
    n = len(timestamps)
    idx = range(0, n, max(1, math.ceil(n / max_points)))
    t0 = int(timestamps[0])
    hours = [(int(timestamps[i]) - t0) / 3600.0 for i in idx]
    speed = [(x, float(speed[i])) for x, i in zip(hours, idx)]
    power = [(x, float(power[i])) for x, i in zip(hours, idx)]
    pw, ph = W - LEFT - RIGHT, 150
    body = _panel(LEFT, TOP, pw, ph, "Wind speed", "", "speed", [("speed", speed)], False)
    body += _panel(LEFT, TOP + ph + 70, pw, ph, "Wind power", "hours", "power", [("power", power)], False)
    return _document(W, TOP + 2 * ph + 120, body)
