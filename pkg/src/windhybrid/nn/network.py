"""The CNN-LSTM stack: conv -> global max pool -> flatten -> LSTM -> dense(ReLU) -> dense."""
from dataclasses import dataclass, field

import numpy as np

from . import layers

PARAM_ORDER = (
    "conv.kernel", "conv.bias",
    "lstm.Wx", "lstm.Wh", "lstm.b",
    "dense1.W", "dense1.b",
    "dense2.W", "dense2.b",
)


@dataclass(frozen=True)
class NetworkSpec:
    input_steps: int = 4
    input_features: int = 2
    conv_filters: int = 350
    conv_kernel: int = 2
    lstm_units: int = 350
    dense_hidden: int = 300
    output_features: int = 2

    def __post_init__(self):
        for name, v in vars(self).items():
            if int(v) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.conv_kernel > self.input_steps:
            raise ValueError("conv_kernel must not exceed input_steps")

    def param_shapes(self):
        F, U, D = self.conv_filters, self.lstm_units, self.dense_hidden
        return {
            "conv.kernel": (self.conv_kernel, self.input_features, F),
            "conv.bias": (F,),
            "lstm.Wx": (F, 4 * U),
            "lstm.Wh": (U, 4 * U),
            "lstm.b": (4 * U,),
            "dense1.W": (U, D),
            "dense1.b": (D,),
            "dense2.W": (D, self.output_features),
            "dense2.b": (self.output_features,),
        }


@dataclass
class NetworkState:
    params: dict
    seed: int = 0
    status: str = field(default="ok")

    @property
    def manifest(self):
        return [(k, tuple(self.params[k].shape)) for k in PARAM_ORDER]

    def copy(self):
        return NetworkState({k: v.copy() for k, v in self.params.items()}, self.seed, self.status)

    def is_finite(self):
        return all(np.all(np.isfinite(v)) for v in self.params.values())


def init_state(spec, seed):
    """Seeded uniform initialisation; LSTM forget-gate bias starts at 1."""
    rng = np.random.default_rng([int(seed), 0])
    shapes = spec.param_shapes()
    p = {}

    def fan_in_uniform(shape, fan_in):
        lim = np.sqrt(3.0 / fan_in)
        return rng.uniform(-lim, lim, size=shape)

    p["conv.kernel"] = fan_in_uniform(shapes["conv.kernel"], spec.conv_kernel * spec.input_features)
    p["conv.bias"] = np.zeros(shapes["conv.bias"])
    U = spec.lstm_units
    lim = 1.0 / np.sqrt(U)
    p["lstm.Wx"] = rng.uniform(-lim, lim, size=shapes["lstm.Wx"])
    p["lstm.Wh"] = rng.uniform(-lim, lim, size=shapes["lstm.Wh"])
    b = np.zeros(4 * U)
    b[U:2 * U] = 1.0
    p["lstm.b"] = b
    p["dense1.W"] = fan_in_uniform(shapes["dense1.W"], U)
    p["dense1.b"] = np.zeros(shapes["dense1.b"])
    p["dense2.W"] = fan_in_uniform(shapes["dense2.W"], spec.dense_hidden)
    p["dense2.b"] = np.zeros(shapes["dense2.b"])
    return NetworkState({k: p[k] for k in PARAM_ORDER}, int(seed))


def _check_input(spec, X):
    if X.ndim != 3 or X.shape[1:] != (spec.input_steps, spec.input_features):
        raise ValueError(f"expected input [n, {spec.input_steps}, {spec.input_features}], got {X.shape}")


def _forward(spec, params, X):
    conv, c_conv = layers.conv1d_forward(X, params["conv.kernel"], params["conv.bias"])
    pooled, c_pool = layers.global_maxpool_forward(conv)
    # each window is one subsequence: the LSTM sees a length-1 sequence of pooled features
    h, c_lstm = layers.lstm_forward(pooled, params["lstm.Wx"], params["lstm.Wh"], params["lstm.b"])
    d1, c_d1 = layers.dense_forward(h, params["dense1.W"], params["dense1.b"], relu=True)
    out, c_d2 = layers.dense_forward(d1, params["dense2.W"], params["dense2.b"])
    return out, (c_conv, c_pool, c_lstm, c_d1, c_d2)


def forward(spec, state, X, batch_size=4096):
    X = np.asarray(X, dtype=np.float64)
    _check_input(spec, X)
    if len(X) <= batch_size:
        return _forward(spec, state.params, X)[0]
    parts = [_forward(spec, state.params, X[i:i + batch_size])[0] for i in range(0, len(X), batch_size)]
    return np.concatenate(parts)


def backward(dout, caches):
    c_conv, c_pool, c_lstm, c_d1, c_d2 = caches
    g = {}
    dd1, g["dense2.W"], g["dense2.b"] = layers.dense_backward(dout, c_d2)
    dh, g["dense1.W"], g["dense1.b"] = layers.dense_backward(dd1, c_d1)
    dpool, g["lstm.Wx"], g["lstm.Wh"], g["lstm.b"] = layers.lstm_backward(dh, c_lstm)
    dconv = layers.maxpool_backward(dpool, c_pool)
    _, g["conv.kernel"], g["conv.bias"] = layers.conv1d_backward(dconv, c_conv)
    return g


def loss_and_grads(spec, params, X, Y):
    out, caches = _forward(spec, params, X)
    loss, dout = layers.mse_loss(out, Y)
    return loss, backward(dout, caches)


def loss_only(spec, params, X, Y):
    out, _ = _forward(spec, params, X)
    return layers.mse_loss(out, Y)[0]


@dataclass(frozen=True)
class GradCheckReport:
    max_rel_error: float
    worst_param: str
    worst_index: tuple


def relative_error(analytic, numeric, floor=1e-8):
    return abs(analytic - numeric) / max(abs(analytic), abs(numeric), floor)


def grad_check(spec, state, X, Y, epsilon=1e-5, max_entries=None, seed=0, floor=1e-8):
    """Compare analytic gradients of the MSE loss with central differences.

    ``max_entries`` caps how many entries per parameter tensor are probed
    (sampled with ``seed``); ``None`` probes every entry.
    """
    X = np.asarray(X, dtype=np.float64)
    _check_input(spec, X)
    params = {k: v.copy() for k, v in state.params.items()}
    _, grads = loss_and_grads(spec, params, X, Y)
    rng = np.random.default_rng(seed)
    worst = (0.0, PARAM_ORDER[0], ())
    for name in PARAM_ORDER:
        p = params[name]
        flat = p.reshape(-1)
        idx = np.arange(flat.size)
        if max_entries is not None and flat.size > max_entries:
            idx = np.sort(rng.choice(flat.size, size=max_entries, replace=False))
        for k in idx:
            orig = flat[k]
            flat[k] = orig + epsilon
            lp = loss_only(spec, params, X, Y)
            flat[k] = orig - epsilon
            lm = loss_only(spec, params, X, Y)
            flat[k] = orig
            num = (lp - lm) / (2 * epsilon)
            err = relative_error(grads[name].reshape(-1)[k], num, floor)
            if err > worst[0]:
                worst = (err, name, np.unravel_index(k, p.shape))
    return GradCheckReport(float(worst[0]), worst[1], tuple(int(i) for i in worst[2]))
