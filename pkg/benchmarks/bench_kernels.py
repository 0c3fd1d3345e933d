"""Numba vs numpy kernels, plus the end-to-end bootstrap and season simulation.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--quick]

Each timing is the best of --repeat runs after one warm-up call (which also
triggers numba compilation). Outputs of the two backends are cross-checked
before timing.
"""
import argparse
import time

import numpy as np

from skillscore import kernels
from skillscore._accel import HAVE_NUMBA
from skillscore.bootstrap import BootstrapPlan, bootstrap_ols
from skillscore.simulate import GameModel, SimConfig, simulate_season


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(quick):
    rng = np.random.default_rng(0)
    n = 2000 if quick else 20000
    X = np.column_stack([np.ones(n), rng.normal(size=n), rng.uniform(0, 10, (n, 2))])
    y = X @ [0.1, 0.5, 0.05, -0.02] + rng.normal(size=n)
    idx = rng.integers(0, n, size=(64 if quick else 256, n))
    t = rng.normal(2, 3, size=(200_000, 3))
    x = kernels.get_backend("numpy").transform(t, 2.0, 5.0)
    w = np.array([2 / 7, 4 / 7, 1 / 7])
    m = 100_000 if quick else 1_000_000
    sa, sb, eps, coin = rng.normal(size=m), rng.normal(size=m), rng.normal(size=m), rng.random(m)
    return {
        f"ols_batch {idx.shape[0]}x{n}x4": lambda k: k.ols_batch(X, y, idx),
        "transform 200000x3": lambda k: k.transform(t, 2.0, 5.0),
        "weighted_scores 200000x3": lambda k: k.weighted_scores(x, w),
        f"round_outcomes {m}": lambda k: k.round_outcomes(sa, sb, eps, coin, 1.0, 1.0),
    }


def check(name, a, b):
    a = a if isinstance(a, tuple) else (a,)
    b = b if isinstance(b, tuple) else (b,)
    for u, v in zip(a, b):
        if u.dtype == bool:
            assert np.array_equal(u, v), name
        else:
            np.testing.assert_allclose(u, v, rtol=1e-9, atol=1e-12, equal_nan=True,
                                       err_msg=name)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--quick", action="store_true", help="smaller inputs")
    args = ap.parse_args()

    np_k = kernels.get_backend("numpy")
    nb_k = kernels.get_backend("numba") if HAVE_NUMBA else None
    if nb_k is None:
        print("numba not installed: timing the numpy kernels only")

    print(f"{'kernel':<34}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}")
    for name, fn in cases(args.quick).items():
        t_np = best_of(lambda: fn(np_k), args.repeat)
        if nb_k is not None:
            check(name, fn(np_k), fn(nb_k))
            t_nb = best_of(lambda: fn(nb_k), args.repeat)
            print(f"{name:<34}{t_np * 1e3:>12.2f}{t_nb * 1e3:>12.2f}{t_np / t_nb:>9.1f}x")
        else:
            print(f"{name:<34}{t_np * 1e3:>12.2f}{'-':>12}{'-':>10}")

    rng = np.random.default_rng(1)
    n = 2000
    X = np.column_stack([np.ones(n), rng.normal(size=(n, 3))])
    y = X @ [0.1, 0.5, 0.2, -0.1] + rng.normal(size=n)
    plan = BootstrapPlan(B=200 if args.quick else 1000, master_seed=0)
    cfg = SimConfig(players=500 if args.quick else 2000, games=100, seed=0)
    model = GameModel(skill_weight=2.0, learn=2.0, tau=100.0, noise=0.5)
    print()
    print(f"{'pipeline stage':<34}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}")
    stages = {
        f"bootstrap B={plan.B}, n={n}": lambda k: bootstrap_ols(X, y, plan, backend=k),
        f"season {cfg.players}x{cfg.games}": lambda k: simulate_season(cfg, model, backend=k),
    }
    for name, fn in stages.items():
        t_np = best_of(lambda: fn(np_k), max(1, args.repeat // 2))
        if nb_k is not None:
            t_nb = best_of(lambda: fn(nb_k), max(1, args.repeat // 2))
            print(f"{name:<34}{t_np * 1e3:>12.1f}{t_nb * 1e3:>12.1f}{t_np / t_nb:>9.1f}x")
        else:
            print(f"{name:<34}{t_np * 1e3:>12.1f}{'-':>12}{'-':>10}")


if __name__ == "__main__":
    main()
