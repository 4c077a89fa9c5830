"""Compare the numba and pure-numpy variants of every hot kernel.

    python3 benchmarks/bench_kernels.py [--repeat N]

Numba variants are called once before timing so compilation (or the cache
load) is excluded. Prints one row per kernel with the best-of-N time of each
backend and the speed-up. The library routes large Gram products to the
numpy (BLAS) variant even when numba is enabled.
"""
import argparse
import timeit

import numpy as np

from kreinkit import kernels
from kreinkit._jit import HAVE_NUMBA


def cases(rng):
    centers = rng.standard_normal((64, 3)) * 4.0
    points = rng.standard_normal((4000, 3)) * 4.0
    amps = rng.standard_normal(64) + 1j * rng.standard_normal(64)
    sqrt_z = np.full(64, np.sqrt(1.5 + 0.5j))
    sqrt_lams = np.sqrt(np.linspace(1e-3, 400.0, 1024)).astype(complex)
    vecs = rng.standard_normal((8, 4096)) + 1j * rng.standard_normal((8, 4096))
    weights = rng.standard_normal(4096) + 1j * rng.standard_normal(4096)
    return {
        "green_matrix (64 centres)": ("green_matrix", (centers, np.sqrt(2j))),
        "field_eval (4000 pts x 64 terms)": ("field_eval", (points, centers, sqrt_z, amps, 1e-14)),
        "point_gamma_scan (1024 x 64 x 64)": ("point_gamma_scan", (centers, sqrt_lams, np.sqrt(1j))),
        "weighted_gram (2 x 64)": ("weighted_gram", (vecs[:2, :64].copy(), weights[:64].copy())),
        "weighted_gram (8 x 4096)": ("weighted_gram", (vecs, weights)),
    }


def best(fn, args, repeat):
    return min(timeit.repeat(lambda: fn(*args), number=1, repeat=repeat))


def main():
    p = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args()
    rng = np.random.default_rng(0)
    print(f"{'kernel':36s} {'numpy [ms]':>11s} {'numba [ms]':>11s} {'speed-up':>9s}")
    for label, (name, a) in cases(rng).items():
        t_np = best(getattr(kernels, f"{name}_numpy"), a, args.repeat)
        if HAVE_NUMBA:
            fn = getattr(kernels, f"{name}_numba")
            fn(*a)  # compile / load cache
            t_nb = best(fn, a, args.repeat)
            print(f"{label:36s} {1e3 * t_np:11.3f} {1e3 * t_nb:11.3f} {t_np / t_nb:8.1f}x")
        else:
            print(f"{label:36s} {1e3 * t_np:11.3f} {'n/a':>11s} {'':>9s}")


if __name__ == "__main__":
    main()
