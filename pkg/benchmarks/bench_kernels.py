"""Time the numba kernels against their numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat 20]

Shapes follow a default training batch (64 windows of 4 steps, 350 filters).
Each kernel is run once before timing so numba compilation is excluded.
"""
import argparse
import timeit

import numpy as np

from windhybrid import kernels


def cases(rng):
    x = rng.normal(size=(64, 4, 2))
    k = rng.normal(size=(2, 2, 350))
    b = rng.normal(size=350)
    conv = rng.normal(size=(64, 3, 350))
    _, idx = kernels.global_maxpool_np(conv)
    dpool = rng.normal(size=(64, 1, 350))
    series = rng.normal(size=(50_000, 2))
    p = rng.normal(size=(350, 1400))
    g = rng.normal(size=p.shape)
    m, v = np.zeros_like(p), np.zeros_like(p)
    adam_args = (1e-3, 0.9, 0.999, 1e-7, 0.1, 0.001)
    return [
        ("conv1d_forward", lambda f: f(x, k, b), kernels.conv1d_forward_np, kernels.conv1d_forward_nb),
        ("conv1d_backward", lambda f: f(conv, x, k), kernels.conv1d_backward_np, kernels.conv1d_backward_nb),
        ("global_maxpool", lambda f: f(conv), kernels.global_maxpool_np, kernels.global_maxpool_nb),
        ("maxpool_scatter", lambda f: f(dpool, idx, 3), kernels.maxpool_scatter_np, kernels.maxpool_scatter_nb),
        ("sliding_windows", lambda f: f(series, 4, 50_000 - 4), kernels.sliding_windows_np,
         kernels.sliding_windows_nb),
        ("adam_update", lambda f: f(p.copy(), g, m.copy(), v.copy(), *adam_args), kernels.adam_update_np,
         kernels.adam_update_nb),
    ]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(0)
    print(f"{'kernel':<18}{'numpy ms':>10}{'numba ms':>10}{'speedup':>9}")
    for name, call, f_np, f_nb in cases(rng):
        call(f_nb)  # compile
        t_np = min(timeit.repeat(lambda: call(f_np), number=1, repeat=args.repeat)) * 1e3
        t_nb = min(timeit.repeat(lambda: call(f_nb), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:<18}{t_np:>10.3f}{t_nb:>10.3f}{t_np / t_nb:>8.1f}x")


if __name__ == "__main__":
    main()
