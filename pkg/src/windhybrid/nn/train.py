"""Mini-batch training with Adam (or plain gradient descent) and validation early stopping."""
import logging
from dataclasses import dataclass, field

import numpy as np

from .. import kernels

from .network import PARAM_ORDER, init_state, loss_and_grads, forward
from .layers import mse_loss

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainConfig:
    max_epochs: int = 100
    batch_size: int = 32
    learning_rate: float = 1e-3
    optimizer: str = "adam"  # "adam" | "sgd"
    patience: int = 10
    seed: int = 42

    def __post_init__(self):
        if self.max_epochs < 0:
            raise ValueError("max_epochs must be >= 0")
        if self.batch_size < 1 or self.patience < 1 or not self.learning_rate > 0:
            raise ValueError("batch_size, patience and learning_rate must be positive")
        if self.max_epochs and self.patience > self.max_epochs:
            raise ValueError("patience must not exceed max_epochs")
        if self.optimizer not in ("adam", "sgd"):
            raise ValueError(f"unknown optimizer {self.optimizer!r}")


@dataclass
class LearningCurve:
    train_loss: list = field(default_factory=list)
    val_loss: list = field(default_factory=list)
    best_epoch: int = -1  # 0-based; -1 when no epoch ran

    def to_csv(self):
        lines = ["epoch,train_loss,val_loss"]
        for e, (a, b) in enumerate(zip(self.train_loss, self.val_loss)):
            lines.append(f"{e},{a!r},{b!r}")
        return "\n".join(lines) + "\n"


@dataclass
class TrainResult:
    state: object
    curve: LearningCurve
    status: str  # "ok" | "diverged"


class Adam:
    def __init__(self, params, lr, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr, self.b1, self.b2, self.eps = lr, beta1, beta2, eps
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}
        self.t = 0

    def step(self, params, grads):
        self.t += 1
        c1 = 1.0 - self.b1 ** self.t
        c2 = 1.0 - self.b2 ** self.t
        for k in PARAM_ORDER:
            kernels.adam_update(params[k], grads[k], self.m[k], self.v[k],
                                self.lr, self.b1, self.b2, self.eps, c1, c2)


class SGD:
    def __init__(self, params, lr):
        self.lr = lr

    def step(self, params, grads):
        for k in PARAM_ORDER:
            params[k] -= self.lr * grads[k]


def train(spec, dataset, val, cfg=TrainConfig(), seed=None):
    """Fit the network on ``dataset`` and keep the weights from the best validation epoch.

    Training stops after ``cfg.patience`` epochs without validation
    improvement. A non-finite loss or parameter aborts with status
    ``"diverged"`` and returns the best state seen so far.
    """
    seed = cfg.seed if seed is None else int(seed)
    if dataset.n_samples == 0 or val.n_samples == 0:
        raise ValueError("training and validation datasets must be nonempty")
    state = init_state(spec, seed)
    curve = LearningCurve()
    if cfg.max_epochs == 0:
        return TrainResult(state, curve, "ok")

    rng = np.random.default_rng([seed, 1])
    params = state.params
    opt = Adam(params, cfg.learning_rate) if cfg.optimizer == "adam" else SGD(params, cfg.learning_rate)
    X, Y = dataset.X, dataset.Y
    n = len(X)
    best = state.copy()
    best_val = np.inf
    since_best = 0
    status = "ok"
    for epoch in range(cfg.max_epochs):
        perm = rng.permutation(n)
        total = 0.0
        for start in range(0, n, cfg.batch_size):
            idx = perm[start:start + cfg.batch_size]
            loss, grads = loss_and_grads(spec, params, X[idx], Y[idx])
            if not np.isfinite(loss):
                status = "diverged"
                break
            opt.step(params, grads)
            total += loss * len(idx)
        if status == "ok" and not state.is_finite():
            status = "diverged"
        if status == "diverged":
            log.warning("training diverged at epoch %d (seed %d)", epoch, seed)
            break
        val_loss = mse_loss(forward(spec, state, val.X), val.Y)[0]
        curve.train_loss.append(total / n)
        curve.val_loss.append(val_loss)
        if not np.isfinite(val_loss):
            status = "diverged"
            break
        if val_loss < best_val:
            best_val, best, since_best = val_loss, state.copy(), 0
            curve.best_epoch = epoch
        else:
            since_best += 1
            if since_best >= cfg.patience:
                break
    best.status = status
    return TrainResult(best, curve, status)
