"""Layer forward/backward pairs. Each forward returns ``(output, cache)``."""
import numpy as np

from .. import kernels


def conv1d_forward(x, kernel, bias):
    """Valid, stride-1 cross-correlation: ``out[b,t,f] = bias[f] + sum_{j,c} x[b,t+j,c] kernel[j,c,f]``."""
    if x.ndim != 3 or kernel.ndim != 3 or x.shape[2] != kernel.shape[1]:
        raise ValueError(f"conv1d shape mismatch: input {x.shape}, kernel {kernel.shape}")
    if kernel.shape[0] > x.shape[1]:
        raise ValueError(f"kernel size {kernel.shape[0]} exceeds {x.shape[1]} steps")
    x = np.ascontiguousarray(x, dtype=np.float64)
    out = kernels.conv1d_forward(x, kernel, bias)
    return out, (x, kernel)


def conv1d_backward(dout, cache):
    x, kernel = cache
    if dout.shape != (x.shape[0], x.shape[1] - kernel.shape[0] + 1, kernel.shape[2]):
        raise ValueError(f"upstream gradient shape {dout.shape} does not match forward output")
    return kernels.conv1d_backward(np.ascontiguousarray(dout), x, kernel)


def global_maxpool_forward(x):
    """Max over the step axis, ``[batch, steps, f] -> [batch, 1, f]``; ties go to the lowest index."""
    if x.ndim != 3 or x.shape[1] < 1:
        raise ValueError(f"maxpool expects [batch, steps>=1, filters], got {x.shape}")
    vals, idx = kernels.global_maxpool(np.ascontiguousarray(x))
    return vals, (idx, x.shape[1])


def maxpool_backward(dout, cache):
    idx, steps = cache
    return kernels.maxpool_scatter(dout, idx, steps)


def _sigmoid(z):
    # split branches keep exp() from overflowing
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def lstm_forward(x, Wx, Wh, b):
    """Run an LSTM over ``x`` [batch, time, in] from zero state; return the last hidden state.

    Gate blocks in the packed weights are ordered input, forget, output, candidate.
    """
    n, T, n_in = x.shape
    U = Wh.shape[0]
    if Wx.shape != (n_in, 4 * U) or Wh.shape != (U, 4 * U) or b.shape != (4 * U,):
        raise ValueError(f"lstm shape mismatch: x {x.shape}, Wx {Wx.shape}, Wh {Wh.shape}, b {b.shape}")
    h = np.zeros((n, U))
    c = np.zeros((n, U))
    steps = []
    for t in range(T):
        z = x[:, t, :] @ Wx + b
        if t > 0:  # h is exactly zero at t == 0
            z += h @ Wh
        i = _sigmoid(z[:, :U])
        f = _sigmoid(z[:, U:2 * U])
        o = _sigmoid(z[:, 2 * U:3 * U])
        g = np.tanh(z[:, 3 * U:])
        c_prev, h_prev = c, h
        c = f * c_prev + i * g
        tc = np.tanh(c)
        h = o * tc
        steps.append((h_prev, c_prev, i, f, o, g, tc))
    return h, (x, Wx, Wh, steps)


def lstm_backward(dh_last, cache):
    """Backpropagation through time. Returns ``(dx, dWx, dWh, db)``."""
    x, Wx, Wh, steps = cache
    n, T, _ = x.shape
    U = Wh.shape[0]
    if dh_last.shape != (n, U):
        raise ValueError(f"upstream gradient shape {dh_last.shape}, expected {(n, U)}")
    dx = np.zeros_like(x)
    dWx = np.zeros_like(Wx)
    dWh = np.zeros_like(Wh)
    db = np.zeros(4 * U)
    dh = dh_last
    dc = np.zeros((n, U))
    dz = np.empty((n, 4 * U))
    for t in range(T - 1, -1, -1):
        h_prev, c_prev, i, f, o, g, tc = steps[t]
        dc = dc + dh * o * (1.0 - tc * tc)
        dz[:, :U] = dc * g * i * (1.0 - i)
        dz[:, U:2 * U] = dc * c_prev * f * (1.0 - f)
        dz[:, 2 * U:3 * U] = dh * tc * o * (1.0 - o)
        dz[:, 3 * U:] = dc * i * (1.0 - g * g)
        dWx += x[:, t, :].T @ dz
        db += dz.sum(axis=0)
        dx[:, t, :] = dz @ Wx.T
        if t > 0:
            dWh += h_prev.T @ dz
            dh = dz @ Wh.T
        dc = dc * f
    return dx, dWx, dWh, db


def dense_forward(x, W, b, relu=False):
    if x.shape[-1] != W.shape[0] or b.shape != (W.shape[1],):
        raise ValueError(f"dense shape mismatch: x {x.shape}, W {W.shape}, b {b.shape}")
    pre = x @ W + b
    out = np.maximum(pre, 0.0) if relu else pre
    return out, (x, W, pre if relu else None)


def dense_backward(dout, cache):
    """Returns ``(dx, dW, db)``; the ReLU gate passes gradient only where the pre-activation is positive."""
    x, W, pre = cache
    if pre is not None:
        dout = dout * (pre > 0)
    return dout @ W.T, x.T @ dout, dout.sum(axis=0)


def mse_loss(pred, target):
    """Mean squared error over all entries and its gradient ``2(pred - target) / (batch * out)``."""
    if pred.shape != target.shape:
        raise ValueError(f"shape mismatch: {pred.shape} vs {target.shape}")
    diff = pred - target
    return float(np.mean(diff * diff)), 2.0 * diff / diff.size
