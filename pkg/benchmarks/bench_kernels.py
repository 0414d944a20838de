"""Time the numba kernels against their numpy twins.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--steps 100000] [--points 1000000]

With numba missing or PHASEGEOM_DISABLE_NUMBA=1 only the numpy column is shown.
"""

import argparse
import timeit

import numpy as np

from phasegeom import _kernels
from phasegeom._accel import HAS_NUMBA


def cases(steps: int, points: int):
    rng = np.random.default_rng(0)
    a, b = rng.uniform(-2.0, 2.0, (2, points))
    t = np.linspace(0.0, 2.0 * np.pi, 256, endpoint=False)
    c, s = np.cos(t), np.sin(t)
    support = np.ones_like(t)
    dt = np.full(steps, 1e-3)
    pend = np.array([1.0, 0.0])
    return {
        f"rk4_catalog ({steps} steps)": ("rk4_catalog", (_kernels.PENDULUM, pend, 1.0, 1.0, 0.0, dt)),
        f"count_in_quadratic ({points} pts)": ("count_in_quadratic", (a, b, 0.7, 0.2, 1.3, 1.5)),
        f"count_in_support ({points // 10} pts x 256)": (
            "count_in_support",
            (a[: points // 10], b[: points // 10], c, s, support),
        ),
    }


def best(func, args, repeat: int) -> float:
    return min(timeit.repeat(lambda: func(*args), number=1, repeat=repeat))


def same(x, y) -> bool:
    if isinstance(x, tuple):
        return all(same(u, v) for u, v in zip(x, y))
    return bool(np.allclose(x, y, rtol=0, atol=1e-12))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--steps", type=int, default=100_000)
    ap.add_argument("--points", type=int, default=1_000_000)
    args = ap.parse_args()

    print(f"numba active: {HAS_NUMBA}")
    print(f"{'kernel':<42s} {'numpy [s]':>11s} {'numba [s]':>11s} {'speedup':>8s} {'agree':>6s}")
    for label, (name, kargs) in cases(args.steps, args.points).items():
        np_func = getattr(_kernels, f"{name}_numpy")
        with np.errstate(all="ignore"):
            t_np = best(np_func, kargs, args.repeat)
        if HAS_NUMBA:
            nb_func = getattr(_kernels, f"{name}_numba")
            nb_func(*kargs)  # compile outside the timing
            t_nb = best(nb_func, kargs, args.repeat)
            ok = same(np_func(*kargs), nb_func(*kargs))
            print(f"{label:<42s} {t_np:11.4f} {t_nb:11.4f} {t_np / t_nb:7.1f}x {str(ok):>6s}")
        else:
            print(f"{label:<42s} {t_np:11.4f} {'-':>11s} {'-':>8s} {'-':>6s}")


if __name__ == "__main__":
    main()
