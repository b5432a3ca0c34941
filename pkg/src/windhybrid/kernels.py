"""Inner-loop kernels with a numba path and a pure-numpy path.

Every public kernel dispatches on :func:`windhybrid._accel.numba_enabled` at
call time, so ``WINDHYBRID_NUMBA=0`` can be flipped per process (or per test
through ``monkeypatch``). Both paths compute the same contraction; the numba
loops accumulate in a fixed order so results are deterministic per path.
"""
import numpy as np

from ._accel import njit, numba_enabled

# ---------------------------------------------------------------- conv1d


def conv1d_forward_np(x, kernel, bias):
    k = kernel.shape[0]
    t_out = x.shape[1] - k + 1
    out = np.empty((x.shape[0], t_out, kernel.shape[2]))
    out[...] = bias
    for j in range(k):
        out += x[:, j:j + t_out, :] @ kernel[j]
    return out


def conv1d_backward_np(dout, x, kernel):
    k = kernel.shape[0]
    t_out = dout.shape[1]
    dx = np.zeros_like(x)
    dk = np.empty_like(kernel)
    for j in range(k):
        dk[j] = np.tensordot(x[:, j:j + t_out, :], dout, axes=([0, 1], [0, 1]))
        dx[:, j:j + t_out, :] += dout @ kernel[j].T
    db = dout.sum(axis=(0, 1))
    return dx, dk, db


@njit
def conv1d_forward_nb(x, kernel, bias):
    n, steps, n_in = x.shape
    k, _, n_f = kernel.shape
    t_out = steps - k + 1
    out = np.empty((n, t_out, n_f))
    for b in range(n):
        for t in range(t_out):
            for f in range(n_f):
                out[b, t, f] = bias[f]
            # filter axis innermost keeps kernel and output reads contiguous
            for j in range(k):
                for c in range(n_in):
                    xv = x[b, t + j, c]
                    for f in range(n_f):
                        out[b, t, f] += xv * kernel[j, c, f]
    return out


@njit(fastmath=True)
def conv1d_backward_nb(dout, x, kernel):
    n, steps, n_in = x.shape
    k, _, n_f = kernel.shape
    t_out = dout.shape[1]
    dx = np.zeros((n, steps, n_in))
    dk = np.zeros((k, n_in, n_f))
    db = np.zeros(n_f)
    for b in range(n):
        for t in range(t_out):
            for f in range(n_f):
                db[f] += dout[b, t, f]
            for j in range(k):
                for c in range(n_in):
                    xv = x[b, t + j, c]
                    acc = 0.0
                    for f in range(n_f):
                        g = dout[b, t, f]
                        dk[j, c, f] += xv * g
                        acc += kernel[j, c, f] * g
                    dx[b, t + j, c] += acc
    return dx, dk, db


def conv1d_forward(x, kernel, bias):
    if numba_enabled():
        return conv1d_forward_nb(x, kernel, bias)
    return conv1d_forward_np(x, kernel, bias)


def conv1d_backward(dout, x, kernel):
    if numba_enabled():
        return conv1d_backward_nb(dout, x, kernel)
    return conv1d_backward_np(dout, x, kernel)


# ------------------------------------------------------- global max pool


def global_maxpool_np(x):
    # np.argmax returns the first occurrence -> lowest-index tie rule
    idx = np.argmax(x, axis=1)
    vals = np.take_along_axis(x, idx[:, None, :], axis=1)
    return vals, idx


def maxpool_scatter_np(dout, idx, steps):
    n, n_f = idx.shape
    dx = np.zeros((n, steps, n_f))
    np.put_along_axis(dx, idx[:, None, :], dout.reshape(n, 1, n_f), axis=1)
    return dx


@njit
def global_maxpool_nb(x):
    n, steps, n_f = x.shape
    vals = np.empty((n, 1, n_f))
    idx = np.zeros((n, n_f), dtype=np.int64)
    for b in range(n):
        for f in range(n_f):
            best = x[b, 0, f]
            arg = 0
            for t in range(1, steps):
                if x[b, t, f] > best:
                    best = x[b, t, f]
                    arg = t
            vals[b, 0, f] = best
            idx[b, f] = arg
    return vals, idx


@njit
def maxpool_scatter_nb(dout, idx, steps):
    n, n_f = idx.shape
    dx = np.zeros((n, steps, n_f))
    for b in range(n):
        for f in range(n_f):
            dx[b, idx[b, f], f] = dout[b, 0, f]
    return dx


def global_maxpool(x):
    if numba_enabled():
        return global_maxpool_nb(x)
    return global_maxpool_np(x)


def maxpool_scatter(dout, idx, steps):
    dout = np.ascontiguousarray(dout.reshape(idx.shape[0], 1, idx.shape[1]))
    if numba_enabled():
        return maxpool_scatter_nb(dout, idx, steps)
    return maxpool_scatter_np(dout, idx, steps)


# --------------------------------------------------------------- windows


def sliding_windows_np(matrix, n_steps, n_samples):
    view = np.lib.stride_tricks.sliding_window_view(matrix, n_steps, axis=0)
    # view is [L - n_steps + 1, n_features, n_steps]
    return np.ascontiguousarray(view[:n_samples].transpose(0, 2, 1))


@njit
def sliding_windows_nb(matrix, n_steps, n_samples):
    n_f = matrix.shape[1]
    out = np.empty((n_samples, n_steps, n_f))
    for i in range(n_samples):
        for j in range(n_steps):
            for c in range(n_f):
                out[i, j, c] = matrix[i + j, c]
    return out


def sliding_windows(matrix, n_steps, n_samples):
    """Stack ``n_samples`` consecutive ``n_steps``-row windows of ``matrix``."""
    matrix = np.ascontiguousarray(matrix, dtype=np.float64)
    if numba_enabled():
        return sliding_windows_nb(matrix, n_steps, n_samples)
    return sliding_windows_np(matrix, n_steps, n_samples)


# ------------------------------------------------------------ adam update


def adam_update_np(p, g, m, v, lr, b1, b2, eps, c1, c2):
    m *= b1
    m += (1.0 - b1) * g
    v *= b2
    v += (1.0 - b2) * (g * g)
    p -= lr * (m / c1) / (np.sqrt(v / c2) + eps)


# fastmath lets the loop vectorise; still deterministic run to run on one machine
@njit(fastmath=True)
def adam_update_nb(p, g, m, v, lr, b1, b2, eps, c1, c2):
    pf = p.reshape(-1)
    gf = g.reshape(-1)
    mf = m.reshape(-1)
    vf = v.reshape(-1)
    for i in range(pf.size):
        gi = gf[i]
        mi = b1 * mf[i] + (1.0 - b1) * gi
        vi = b2 * vf[i] + (1.0 - b2) * (gi * gi)
        mf[i] = mi
        vf[i] = vi
        pf[i] -= lr * (mi / c1) / (np.sqrt(vi / c2) + eps)


def adam_update(p, g, m, v, lr, b1, b2, eps, c1, c2):
    """In-place Adam moment and parameter update for one contiguous tensor."""
    if numba_enabled():
        adam_update_nb(p, np.ascontiguousarray(g), m, v, lr, b1, b2, eps, c1, c2)
    else:
        adam_update_np(p, g, m, v, lr, b1, b2, eps, c1, c2)
