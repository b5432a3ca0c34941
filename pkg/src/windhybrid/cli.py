"""Command line: inspect, synth, train, evaluate, plot."""
import argparse
import logging
import os
import sys

import numpy as np

from . import artifact as art
from .config import ConfigError, RunConfig, load_config, _steps
from .data import DataError, modal_cadence, read_columns, validate_series, write_csv
from .experiment import ExperimentResult, TrainedModels, evaluate_models, prepare, train_models
from .hybrid import INSUFFICIENT, OK, StageOneEntry, StageTwoEntry
from .nn.train import LearningCurve
from .report import emit_curves, emit_table, read_report, series_plot
from .synth import synthetic_wind

log = logging.getLogger("windhybrid")


class CommandError(Exception):
    pass


def _resolve_config(args):
    cfg = load_config(args.config) if getattr(args, "config", None) else RunConfig()
    over = {}
    if getattr(args, "seed", None) is not None:
        over["seed"] = args.seed
    if getattr(args, "approach", None):
        over["approach"] = args.approach
    if getattr(args, "steps", None):
        try:
            over["steps"] = _steps(args.steps)
        except ValueError as exc:
            raise ConfigError(f"--steps: {exc}") from None
    if getattr(args, "out", None):
        over["output_dir"] = args.out
    cfg = cfg.with_overrides(**over) if over else cfg
    if cfg.data_path and not os.path.exists(cfg.data_path):
        raise ConfigError(f"data.path: no such file {cfg.data_path}")
    return cfg


# --------------------------------------------------------------- inspect

def cmd_inspect(args):
    schema = load_config(args.config).schema if args.config else None
    ts, speed, power, direction = read_columns(args.path, schema)
    issues = validate_series(ts, speed, power, direction)
    lines = [f"file: {args.path}", f"rows: {len(ts)}"]
    if len(ts) >= 2:
        lines.append(f"cadence: {modal_cadence(ts)} s (modal)")
    channels = [("wind_speed", speed), ("wind_power", power)]
    if direction is not None:
        channels.append(("wind_direction", direction))
    for name, col in channels:
        lines.append(f"{name}: min {col.min():.4g} mean {col.mean():.4g} max {col.max():.4g}")
    gaps = [i for i in issues if i.kind == "gap"]
    lines.append(f"gaps: {len(gaps)}")
    for i in issues:
        lines.append(f"  {i.kind} at row {i.index}: {i.detail}")
    print("\n".join(lines))
    if args.plot:
        out = args.out or "."
        os.makedirs(out, exist_ok=True)
        path = os.path.join(out, "raw_series.svg")
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(series_plot(ts, speed, power))
        print(f"plot: {path}")
    return 0


# ----------------------------------------------------------------- synth

def cmd_synth(args):
    series = synthetic_wind(args.length, args.seed)
    out = args.out or "."
    os.makedirs(out, exist_ok=True)
    path = os.path.join(out, "synthetic.csv")
    write_csv(series, path)
    print(path)
    return 0


# ----------------------------------------------------------------- train

def _artifact_dir(cfg, args=None):
    d = getattr(args, "artifacts", None) if args is not None else None
    return d or os.path.join(cfg.output_dir, "artifacts")


def cmd_train(args):
    cfg = _resolve_config(args)
    prep = prepare(cfg)
    models = train_models(cfg, prep)
    adir = _artifact_dir(cfg)
    cdir = os.path.join(cfg.output_dir, "curves")
    os.makedirs(adir, exist_ok=True)
    os.makedirs(cdir, exist_ok=True)
    snap = cfg.snapshot()
    written = []

    def save(name, a):
        p = os.path.join(adir, name)
        art.save_artifact(p, a)
        written.append(p)

    for h, e in models.stage1.items():
        if e.state is None:
            continue
        save(f"cnn_lstm_step{h}.whb", art.network_artifact(
            e.state, {"step": h, "status": e.status, "config": snap}, prep.scaler))
        with open(os.path.join(cdir, f"learning_curve_step{h}.csv"), "w", encoding="utf-8") as fh:
            fh.write(e.curve.to_csv())
    for h, e in models.ar_baseline.items():
        if e.status == OK:
            save(f"ar_step{h}.whb", art.ar_artifact(e.model, {"step": h, "status": OK, "config": snap}, prep.scaler))
    for a, entries in models.stage2.items():
        if a == 1:
            for h, e in entries.items():
                if e.status == OK:
                    save(f"stage2_approach1_step{h}.whb", art.ar_artifact(
                        e.model, {"kind": "stage2", "approach": 1, "step": h, "status": OK, "config": snap}, prep.scaler))
        else:
            e = next((e for e in entries.values() if e.status == OK), None)
            if e is not None:
                save("stage2_approach2_shared.whb", art.ar_artifact(
                    e.model, {"kind": "stage2", "approach": 2, "step": None, "status": OK,
                              "detail": e.detail, "config": snap}, prep.scaler))
    for p in written:
        print(p)
    return 0


# -------------------------------------------------------------- evaluate

def _load_optional(path):
    return art.load_artifact(path) if os.path.exists(path) else None


def load_models(cfg, adir):
    """Rebuild :class:`TrainedModels` from an artifact directory; absent files stay absent."""
    if not os.path.isdir(adir):
        raise CommandError(f"artifact directory not found: {adir}")
    stage1, base, stage2 = {}, {}, {a: {} for a in cfg.approaches}
    for h in cfg.steps:
        a1 = _load_optional(os.path.join(adir, f"cnn_lstm_step{h}.whb"))
        if a1 is not None:
            stage1[h] = StageOneEntry(h, a1.status, art.to_network_state(a1) if a1.status == OK else None)
        ab = _load_optional(os.path.join(adir, f"ar_step{h}.whb"))
        if ab is not None:
            base[h] = StageTwoEntry(h, OK, art.to_ar_model(ab))
    if 1 in stage2:
        for h in cfg.steps:
            s = _load_optional(os.path.join(adir, f"stage2_approach1_step{h}.whb"))
            if s is not None:
                stage2[1][h] = StageTwoEntry(h, OK, art.to_ar_model(s))
            elif h in stage1 and stage1[h].status == OK:
                stage2[1][h] = StageTwoEntry(h, INSUFFICIENT, detail="no stage-2 artifact")
    if 2 in stage2:
        s = _load_optional(os.path.join(adir, "stage2_approach2_shared.whb"))
        if s is not None:
            shared = art.to_ar_model(s)
            stage2[2] = {h: StageTwoEntry(h, OK, shared) for h in cfg.steps}
    return TrainedModels(stage1, base, stage2)


def cmd_evaluate(args):
    cfg = _resolve_config(args)
    adir = _artifact_dir(cfg, args)
    models = load_models(cfg, adir)
    prep = prepare(cfg)
    reports = evaluate_models(cfg, prep, models)
    curves = {}
    for h in cfg.steps:
        p = os.path.join(cfg.output_dir, "curves", f"learning_curve_step{h}.csv")
        if os.path.exists(p):
            curves[h] = _read_curve(p)
    result = ExperimentResult(cfg.snapshot(), cfg.seed, reports, curves)
    os.makedirs(cfg.output_dir, exist_ok=True)
    paths = [os.path.join(cfg.output_dir, "report.json")]
    emit_table(result, "json", paths[0])
    for a in cfg.approaches:
        p = os.path.join(cfg.output_dir, f"report_approach{a}.csv")
        emit_table(result, "csv", p, approach=a)
        paths.append(p)
    for p in paths:
        print(p)
    return 0


def _read_curve(path):
    c = LearningCurve()
    with open(path, encoding="utf-8") as fh:
        next(fh)
        for line in fh:
            _, a, b = line.strip().split(",")
            c.train_loss.append(float(a))
            c.val_loss.append(float(b))
    if c.val_loss:
        c.best_epoch = int(np.argmin(c.val_loss))
    return c


# ------------------------------------------------------------------ plot

def cmd_plot(args):
    if not os.path.exists(args.report):
        raise CommandError(f"no such report: {args.report}")
    result = read_report(args.report)
    out = args.out or os.path.dirname(os.path.abspath(args.report))
    for p in emit_curves(result, out):
        print(p)
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="windhybrid", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("inspect", help="summarise a CSV dataset")
    s.add_argument("path")
    s.add_argument("--config")
    s.add_argument("--plot", action="store_true", help="write raw_series.svg")
    s.add_argument("--out")
    s.set_defaults(func=cmd_inspect)

    s = sub.add_parser("synth", help="write the bundled synthetic dataset as CSV")
    s.add_argument("--out")
    s.add_argument("--length", type=int, default=RunConfig.synth_length)
    s.add_argument("--seed", type=int, default=RunConfig.synth_seed)
    s.set_defaults(func=cmd_synth)

    for name, func, helptext in (("train", cmd_train, "train all models and save artifacts"),
                                 ("evaluate", cmd_evaluate, "score saved artifacts and write reports")):
        s = sub.add_parser(name, help=helptext)
        s.add_argument("--config")
        s.add_argument("--out")
        s.add_argument("--seed", type=int)
        s.add_argument("--approach", choices=("1", "2", "both"))
        s.add_argument("--steps", help="comma-separated horizon steps")
        if name == "evaluate":
            s.add_argument("--artifacts", help="artifact directory (default OUT/artifacts)")
        s.set_defaults(func=func)

    s = sub.add_parser("plot", help="render SVG charts from a report")
    s.add_argument("report")
    s.add_argument("--out")
    s.set_defaults(func=cmd_plot)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, DataError, CommandError, art.ArtifactError, FileNotFoundError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
