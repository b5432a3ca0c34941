"""Direct multistep bank of CNN-LSTM models stacked with an autoregressive second stage.

Stage 1 predicts the target ``h`` rows ahead from a window of scaled
observations. Stage 2 windows consecutive stage-1 predictions and regresses
the ground truth a few rows later:

* ``EQUAL_SHAPING`` (approach 1) uses a separate second-stage model per step,
  with target offset ``h``.
* ``ONE_STEP_SECOND_STAGE`` (approach 2) fits one second-stage model with
  target offset 1 and reuses it for every step.

Both use a second-stage lookback equal to the stage-1 lookback.
"""
import enum
import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import ar
from .data import InsufficientSamples, make_supervised, reshape_stage2
from .kernels import sliding_windows
from .nn.train import train

log = logging.getLogger(__name__)

OK = "ok"
INSUFFICIENT = "insufficient_samples"
DIVERGED = "diverged"


class ShapingApproach(enum.IntEnum):
    EQUAL_SHAPING = 1
    ONE_STEP_SECOND_STAGE = 2

    def stage2_offset(self, step):
        return step if self is ShapingApproach.EQUAL_SHAPING else 1


@dataclass(frozen=True)
class Segments:
    """Scaled train/val/test matrices and where each starts in the source series."""
    train: np.ndarray
    val: np.ndarray
    test: np.ndarray
    offsets: tuple = (0, 0, 0)
    target_cols: tuple = (0, 1)


@dataclass(frozen=True)
class StepData:
    step: int
    train: object
    val: object
    test: object


def step_datasets(segments, lookback, step):
    """Window all three segments for one horizon; raises ``InsufficientSamples``."""
    tc = list(segments.target_cols)
    parts = [make_supervised(m, lookback, step, tc, off)
             for m, off in zip((segments.train, segments.val, segments.test), segments.offsets)]
    return StepData(step, *parts)


@dataclass
class StageOneEntry:
    step: int
    status: str
    state: Optional[object] = None
    curve: Optional[object] = None
    detail: str = ""


@dataclass
class StageTwoEntry:
    step: int
    status: str
    model: Optional[ar.ArModel] = None
    detail: str = ""


def train_stage1_bank(segments, spec, cfg, steps, seeds=None):
    """Train one independent network per horizon step.

    The seed for step ``h`` is ``cfg.seed + h`` unless ``seeds`` maps it
    explicitly. Steps whose segments are too short are recorded with status
    ``insufficient_samples`` and the rest are unaffected.
    """
    bank = {}
    for h in steps:
        try:
            sd = step_datasets(segments, spec.input_steps, h)
        except InsufficientSamples as exc:
            bank[h] = StageOneEntry(h, INSUFFICIENT, detail=str(exc))
            continue
        seed = (seeds or {}).get(h, cfg.seed + h)
        res = train(spec, sd.train, sd.val, cfg, seed=seed)
        log.info("stage 1 step %d: %s after %d epochs", h, res.status, len(res.curve.val_loss))
        bank[h] = StageOneEntry(h, res.status, res.state, res.curve)
    return bank


def _fit_stage2(pred, truth, lookback, offset, mode):
    targets = truth - pred if mode == "residual" else truth
    return ar.fit_ols(reshape_stage2(pred, targets, lookback, offset))


def train_stage2(approach, pred1_val, lookback, steps=None, mode="replace"):
    """Fit the second stage from validation-segment stage-1 predictions.

    ``pred1_val`` maps step -> ``(predictions, truth)`` (scaled, aligned row
    for row) or to ``None`` when that step has no usable stage-1 model.
    Approach 2 fits its single model on the smallest available step.
    """
    approach = ShapingApproach(approach)
    steps = sorted(pred1_val) if steps is None else list(steps)
    if not any(pred1_val.get(h) is not None for h in steps):
        raise ValueError("no validation predictions to fit the second stage")
    out = {}
    if approach is ShapingApproach.EQUAL_SHAPING:
        for h in steps:
            pair = pred1_val.get(h)
            if pair is None:
                out[h] = StageTwoEntry(h, INSUFFICIENT, detail="stage 1 unavailable")
                continue
            try:
                out[h] = StageTwoEntry(h, OK, _fit_stage2(pair[0], pair[1], lookback, h, mode))
            except InsufficientSamples as exc:
                out[h] = StageTwoEntry(h, INSUFFICIENT, detail=str(exc))
        return out

    shared = None
    for h in steps:
        pair = pred1_val.get(h)
        if pair is None:
            continue
        try:
            shared = StageTwoEntry(0, OK, _fit_stage2(pair[0], pair[1], lookback, 1, mode),
                                   detail=f"fitted on step {h}")
            break
        except InsufficientSamples:
            continue
    for h in steps:
        if shared is None:
            out[h] = StageTwoEntry(h, INSUFFICIENT, detail="no step could fit the shared model")
        else:
            out[h] = StageTwoEntry(h, OK, shared.model, shared.detail)
    return out


@dataclass
class HorizonBank:
    steps: tuple
    stage1: dict
    stage2: dict = field(default_factory=dict)

    def shared_stage2(self):
        models = {id(e.model): e.model for e in self.stage2.values() if e.model is not None}
        return list(models.values())


@dataclass
class HybridModel:
    approach: ShapingApproach
    bank: HorizonBank
    scaler: object
    lookback: int
    stage2_mode: str = "replace"  # "replace" | "residual"

    @property
    def stage2_lookback(self):
        return self.lookback

    def stage2_offset(self, step):
        return ShapingApproach(self.approach).stage2_offset(step)


def evaluate_alignment(step, approach, n_rows, lookback):
    """Number of stage-1 prediction rows the hybrid can score (0 when unavailable)."""
    offset = ShapingApproach(approach).stage2_offset(step)
    return max(0, n_rows - lookback - offset + 1)


def first_hybrid_row(step, approach, lookback):
    return lookback - 1 + ShapingApproach(approach).stage2_offset(step)


def predict_hybrid(model, step, pred1_test, truth_test=None):
    """Final predictions for stage-1 rows ``first_hybrid_row(...)`` onward.

    In ``replace`` mode the second-stage output is the prediction; in
    ``residual`` mode it is added to the stage-1 forecast of the same row.
    """
    entry = model.bank.stage2.get(step)
    if entry is None or entry.status != OK:
        raise KeyError(f"step {step} unavailable in the bank")
    pred1_test = np.asarray(pred1_test, dtype=np.float64)
    if truth_test is not None and np.shape(truth_test) != pred1_test.shape:
        raise ValueError("stage-1 predictions and truth must have the same shape")
    offset = model.stage2_offset(step)
    n = evaluate_alignment(step, model.approach, len(pred1_test), model.lookback)
    if n == 0:
        raise InsufficientSamples(f"{len(pred1_test)} test predictions for step {step}")
    X = sliding_windows(pred1_test, model.lookback, n)
    out = ar.predict(entry.model, X)
    if model.stage2_mode == "residual":
        first = model.lookback - 1 + offset
        out = out + pred1_test[first:first + n]
    return out
