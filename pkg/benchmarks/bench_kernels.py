"""Time the numba and numpy versions of each hot kernel on the same inputs.

    python3 benchmarks/bench_kernels.py [--repeat 5]

The numba variants are warmed up once so compile time is excluded.
"""
import argparse
import math
import timeit

import numpy as np

from picklab import _kernels
from picklab._accel import HAVE_NUMBA


def cases(rng):
    # diagonal series with k!-block weights on a 60x60 Gram of radius-0.9 points
    z = 0.9 * np.sqrt(rng.random(60)) * np.exp(2j * np.pi * rng.random(60))
    u = np.outer(z, z.conj()).ravel()
    log_a = np.array([math.lgamma(math.isqrt(n) + 1) for n in range(4096)])
    series = (np.log(np.abs(u)), np.angle(u), u == 0, log_a, 1e-15)

    a = rng.normal(size=(40, 40)) + 1j * rng.normal(size=(40, 40))
    b = rng.normal(size=(40, 40)) + 1j * rng.normal(size=(40, 40))

    F = rng.normal(size=(10_000, 13)) + 1j * rng.normal(size=(10_000, 13))
    G = rng.normal(size=(10_000, 13)) + 1j * rng.normal(size=(10_000, 13))
    w = 0.3 ** np.arange(25) + 0j
    return {
        "series_sum (3600 entries)": ("series_sum", series),
        "conv2d (40x40 * 40x40)": ("conv2d", (a, b)),
        "hankel_defects (10^4 pairs, N=12)": ("hankel_defects", (F, G, w)),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    print(f"{'kernel':36s} {'numpy ms':>10s} {'numba ms':>10s} {'speedup':>8s}")
    for label, (name, inputs) in cases(rng).items():
        fns = {"numpy": getattr(_kernels, f"{name}_numpy")}
        if HAVE_NUMBA:
            fns["numba"] = getattr(_kernels, f"{name}_numba")
        times = {}
        outs = {}
        for key, fn in fns.items():
            outs[key] = fn(*inputs)
            t = timeit.repeat(lambda: fn(*inputs), number=1, repeat=args.repeat)
            times[key] = 1e3 * min(t)
        if "numba" in outs:
            x, y = outs["numpy"], outs["numba"]
            x, y = (x[0], y[0]) if isinstance(x, tuple) else (x, y)
            assert np.allclose(x, y, rtol=1e-10, atol=1e-12), f"{name}: backends disagree"
            nb = times["numba"]
            print(f"{label:36s} {times['numpy']:10.3f} {nb:10.3f} {times['numpy'] / nb:7.1f}x")
        else:
            print(f"{label:36s} {times['numpy']:10.3f} {'n/a':>10s} {'':>8s}")


if __name__ == "__main__":
    main()
