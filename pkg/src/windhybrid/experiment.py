"""Per-step experiment: CNN_LSTM alone, AR alone and the CNN_LSTM_AR hybrid, scored on shared rows."""
import json
import logging
from dataclasses import asdict, dataclass, field
from typing import Optional

from . import ar
from .config import RunConfig, from_snapshot
from .data import (InsufficientSamples, fit_minmax, inverse_transform, load_csv, transform)
from .hybrid import (INSUFFICIENT, OK, HorizonBank, HybridModel, Segments, ShapingApproach,
                     StageTwoEntry, evaluate_alignment, first_hybrid_row, predict_hybrid,
                     step_datasets, train_stage1_bank, train_stage2)
from .metrics import DegenerateTarget, accuracy_percent, r_squared, rmse
from .nn.network import forward
from .nn.train import LearningCurve
from .synth import synthetic_wind

log = logging.getLogger(__name__)

MODELS = ("CNN_LSTM", "AR", "CNN_LSTM_AR")
DEGENERATE = "degenerate_target"
MISSING = "missing_artifact"


@dataclass
class StepReport:
    step: int
    model: str
    approach: object  # 1 | 2 for the hybrid, "n/a" for individual models
    table: int  # approach whose aligned row set was used
    status: str
    rows: int = 0
    rmse_combined: Optional[float] = None
    rmse_speed: Optional[float] = None
    rmse_power: Optional[float] = None
    r2_combined: Optional[float] = None
    accuracy_percent: Optional[float] = None


@dataclass
class ExperimentResult:
    config: dict
    seed: int
    reports: list
    curves: dict = field(default_factory=dict)  # step -> LearningCurve

    def to_json(self):
        doc = {
            "config": self.config,
            "seed": self.seed,
            "reports": [asdict(r) for r in self.reports],
            "curves": {str(k): asdict(c) for k, c in sorted(self.curves.items())},
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text):
        doc = json.loads(text)
        return cls(doc["config"], doc["seed"], [StepReport(**r) for r in doc["reports"]],
                   {int(k): LearningCurve(**c) for k, c in doc.get("curves", {}).items()})

    def table(self, approach):
        return [r for r in self.reports if r.table == approach]


@dataclass
class Prepared:
    series: object
    scaler: object
    target_scaler: object
    segments: Segments


def load_series(cfg):
    if cfg.data_path:
        return load_csv(cfg.data_path, cfg.schema)
    return synthetic_wind(cfg.synth_length, cfg.synth_seed)


def prepare(cfg, series=None):
    """Split chronologically, fit the scaler on the training rows only and scale everything."""
    series = load_series(cfg) if series is None else series
    feats = series.features(cfg.include_direction)
    n_tr, n_va, _ = cfg.split_spec.sizes(len(feats))
    scaler = fit_minmax(feats[:n_tr])
    scaled = transform(scaler, feats)
    a, b = n_tr, n_tr + n_va
    segments = Segments(scaled[:a], scaled[a:b], scaled[b:], (0, a, b), (0, 1))
    return Prepared(series, scaler, scaler.select([0, 1]), segments)


@dataclass
class TrainedModels:
    stage1: dict  # step -> StageOneEntry
    ar_baseline: dict  # step -> StageTwoEntry
    stage2: dict  # approach -> step -> StageTwoEntry


def fit_ar_baselines(prep, lookback, steps):
    out = {}
    for h in steps:
        try:
            sd = step_datasets(prep.segments, lookback, h)
        except InsufficientSamples as exc:
            out[h] = StageTwoEntry(h, INSUFFICIENT, detail=str(exc))
            continue
        out[h] = StageTwoEntry(h, OK, ar.fit_ols(sd.train))
    return out


def fit_second_stages(cfg, prep, stage1):
    spec = cfg.network_spec
    pred1_val = {}
    for h in cfg.steps:
        entry = stage1.get(h)
        if entry is None or entry.status != OK:
            pred1_val[h] = None
            continue
        sd = step_datasets(prep.segments, cfg.lookback, h)
        pred1_val[h] = (forward(spec, entry.state, sd.val.X), sd.val.Y)
    stage2 = {}
    for a in cfg.approaches:
        try:
            stage2[a] = train_stage2(a, pred1_val, cfg.lookback, cfg.steps, cfg.stage2_mode)
        except ValueError:
            stage2[a] = {h: StageTwoEntry(h, INSUFFICIENT, detail="stage 1 unavailable") for h in cfg.steps}
    return stage2


def train_models(cfg, prep):
    stage1 = train_stage1_bank(prep.segments, cfg.network_spec, cfg.train_config, cfg.steps)
    return TrainedModels(stage1, fit_ar_baselines(prep, cfg.lookback, cfg.steps),
                         fit_second_stages(cfg, prep, stage1))


def score(step, model, approach, table, truth, pred):
    rep = StepReport(step, model, approach, table, OK, rows=len(truth))
    comb, per = rmse(truth, pred)
    rep.rmse_combined, rep.rmse_speed, rep.rmse_power = comb, float(per[0]), float(per[1])
    try:
        r2, _ = r_squared(truth, pred)
    except DegenerateTarget:
        rep.status = DEGENERATE
        return rep
    rep.r2_combined = r2
    rep.accuracy_percent = accuracy_percent(r2)
    return rep


def evaluate_models(cfg, prep, models):
    """Score every (approach, step, model) cell after inverse scaling.

    When the hybrid is available the individual models are scored on the
    hybrid's evaluable rows only; otherwise on all of their own test rows.
    """
    spec = cfg.network_spec
    reports = []
    for a in cfg.approaches:
        approach = ShapingApproach(a)
        for h in cfg.steps:
            try:
                sd = step_datasets(prep.segments, cfg.lookback, h)
            except InsufficientSamples:
                for name in MODELS:
                    reports.append(StepReport(h, name, a if name == "CNN_LSTM_AR" else "n/a", a, INSUFFICIENT))
                continue
            scaled = {}
            status = {}
            m1 = models.stage1.get(h)
            if m1 is not None and m1.status == OK:
                scaled["CNN_LSTM"] = forward(spec, m1.state, sd.test.X)
            else:
                status["CNN_LSTM"] = MISSING if m1 is None else m1.status
            base = models.ar_baseline.get(h)
            if base is not None and base.status == OK:
                scaled["AR"] = ar.predict(base.model, sd.test.X)
            else:
                status["AR"] = MISSING if base is None else base.status

            s2 = models.stage2.get(a, {}).get(h)
            first = 0
            if "CNN_LSTM" not in scaled:
                status["CNN_LSTM_AR"] = status["CNN_LSTM"]
            elif s2 is None:
                status["CNN_LSTM_AR"] = MISSING
            elif s2.status != OK:
                status["CNN_LSTM_AR"] = s2.status
            elif evaluate_alignment(h, a, sd.test.n_samples, cfg.lookback) == 0:
                status["CNN_LSTM_AR"] = INSUFFICIENT
            else:
                hm = HybridModel(approach, HorizonBank(tuple(cfg.steps), models.stage1, models.stage2[a]),
                                 prep.scaler, cfg.lookback, cfg.stage2_mode)
                scaled["CNN_LSTM_AR"] = predict_hybrid(hm, h, scaled["CNN_LSTM"], sd.test.Y)
                first = first_hybrid_row(h, a, cfg.lookback)

            truth = inverse_transform(prep.target_scaler, sd.test.Y[first:])
            for name in MODELS:
                ap = a if name == "CNN_LSTM_AR" else "n/a"
                if name not in scaled:
                    reports.append(StepReport(h, name, ap, a, status[name]))
                    continue
                p = scaled[name] if name == "CNN_LSTM_AR" else scaled[name][first:]
                reports.append(score(h, name, ap, a, truth, inverse_transform(prep.target_scaler, p)))
    return reports


def run_experiment(cfg, series=None):
    """Train and evaluate every configured step and approach; deterministic under ``cfg.seed``."""
    if not isinstance(cfg, RunConfig):
        cfg = from_snapshot(cfg)
    prep = prepare(cfg, series)
    models = train_models(cfg, prep)
    reports = evaluate_models(cfg, prep, models)
    curves = {h: e.curve for h, e in models.stage1.items() if e.curve is not None}
    return ExperimentResult(cfg.snapshot(), cfg.seed, reports, curves)


