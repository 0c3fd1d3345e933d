"""Paired bootstrap of the win-rate regression.

Replicate ``l`` draws its row indices from a Philox stream keyed by
``SeedSequence(master_seed, spawn_key=(l,))``. A replicate's randomness
therefore depends only on ``(master_seed, l)``, so any split of the
replicates across threads gives bit-identical results.
"""
from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DegenerateDataError, DomainError, InputError, InsufficientDataError
from .ingest import DESIGN_NAMES, Dataset
from .statmath import InferenceOptions, fit_ols, normal_quantile, t_statistics

MAX_FAILURE_FRACTION = 0.10
_BLOCK = 256


@dataclass(frozen=True)
class BootstrapPlan:
    B: int = 1000
    master_seed: int = 0
    alpha: float = 0.05

    def __post_init__(self):
        if self.B < 1:
            raise InputError("bootstrap replicate count must be at least 1")
        if not (0.0 < self.alpha < 1.0):
            raise InputError("alpha must lie strictly between 0 and 1")
        if not (0 <= self.master_seed < 2**64):
            raise InputError("master_seed must be a 64-bit unsigned integer")


def replicate_rng(master_seed: int, replicate: int) -> np.random.Generator:
    ss = np.random.SeedSequence(master_seed, spawn_key=(replicate,))
    return np.random.Generator(np.random.Philox(ss))


def resample_rows(n: int, rng: np.random.Generator) -> np.ndarray:
    """n row indices drawn uniformly with replacement from ``0..n-1``."""
    if n < 1:
        raise InputError("cannot resample from zero rows")
    return rng.integers(0, n, size=n)


def bootstrap_variance(replicates) -> np.ndarray:
    """(1/B) * sum((b - mean)^2) per column.

    The mean is taken relative to the first replicate, so a column of
    identical replicates has variance exactly 0.
    """
    r = np.asarray(replicates, dtype=float)
    shift = r[:1]
    d = r - shift
    mean_d = d.mean(axis=0)
    return np.mean((d - mean_d) ** 2, axis=0)


def bootstrap_mean(replicates) -> np.ndarray:
    r = np.asarray(replicates, dtype=float)
    shift = r[:1]
    return (shift + (r - shift).mean(axis=0)).reshape(r.shape[1:])


def normal_ci(estimate: float, variance: float, alpha: float = 0.05) -> tuple[float, float]:
    if variance < 0:
        raise DomainError("variance must be nonnegative")
    half = normal_quantile(1.0 - alpha / 2.0) * math.sqrt(variance)
    return estimate - half, estimate + half


def percentile_ci(replicates, alpha: float = 0.05) -> tuple[float, float]:
    """Empirical (alpha/2, 1 - alpha/2) quantiles, linear interpolation (type 7)."""
    r = np.asarray(replicates, dtype=float).ravel()
    if r.size < 2:
        raise InputError("percentile interval needs at least 2 replicates")
    lo, hi = np.quantile(r, [alpha / 2.0, 1.0 - alpha / 2.0])
    return float(lo), float(hi)


def relative_slope(replicate_slopes, baseline: float) -> np.ndarray:
    """Replicate slopes divided by the mean first-half win rate."""
    if not baseline > 0:
        raise DomainError(f"baseline win rate must be positive, got {baseline!r}")
    return np.asarray(replicate_slopes, dtype=float) / baseline


@dataclass
class BootstrapResult:
    names: list[str]
    estimate: np.ndarray
    coef: np.ndarray
    t: np.ndarray
    replicate_ids: np.ndarray
    mean: np.ndarray
    var: np.ndarray
    normal_ci: np.ndarray
    percentile_ci: np.ndarray
    failures: int
    B: int
    master_seed: int
    alpha: float
    r2: np.ndarray

    @property
    def n_ok(self) -> int:
        return self.coef.shape[0]

    def summary(self) -> list[dict]:
        rows = []
        for j, name in enumerate(self.names):
            rows.append({
                "variable": name,
                "estimate": float(self.estimate[j]),
                "bootstrap_mean": float(self.mean[j]),
                "bootstrap_variance": float(self.var[j]),
                "normal_ci": [float(v) for v in self.normal_ci[j]],
                "percentile_ci": [float(v) for v in self.percentile_ci[j]],
                "t_median": float(np.median(self.t[:, j])),
            })
        return rows

    def to_dict(self) -> dict:
        return {
            "B": self.B,
            "master_seed": self.master_seed,
            "alpha": self.alpha,
            "failures": self.failures,
            "replicates_ok": self.n_ok,
            "coefficients": self.summary(),
        }

    def write_replicates_csv(self, path) -> None:
        k = len(self.names)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["replicate"] + [f"coef_{j}" for j in range(k)]
                       + [f"t_{j}" for j in range(k)])
            for i, rid in enumerate(self.replicate_ids):
                w.writerow([int(rid)] + [repr(float(v)) for v in self.coef[i]]
                           + [repr(float(v)) for v in self.t[i]])


def read_replicates_csv(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Replicate ids, coefficient matrix and t-statistic matrix from CSV."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, [])
        if not header or header[0] != "replicate":
            raise InputError(f"{path}:1: not a replicate file")
        k = (len(header) - 1) // 2
        expect = ["replicate"] + [f"coef_{j}" for j in range(k)] + [f"t_{j}" for j in range(k)]
        if header != expect:
            raise InputError(f"{path}:1: expected header {','.join(expect)}")
        ids, coef, t = [], [], []
        for lineno, rec in enumerate(reader, start=2):
            if not rec:
                continue
            try:
                vals = [float(v) for v in rec[1:]]
                ids.append(int(rec[0]))
            except ValueError:
                raise InputError(f"{path}:{lineno}: non-numeric replicate record") from None
            coef.append(vals[:k])
            t.append(vals[k:])
    return np.array(ids, dtype=np.int64), np.array(coef).reshape(-1, k), np.array(t).reshape(-1, k)


def _run_block(X, y, master_seed, start, stop, backend):
    n = X.shape[0]
    idx = np.empty((stop - start, n), dtype=np.int64)
    for i, rep in enumerate(range(start, stop)):
        idx[i] = resample_rows(n, replicate_rng(master_seed, rep))
    return backend.ols_batch(X, y, idx)


def bootstrap_ols(X, y, plan: BootstrapPlan, names=None, opts: InferenceOptions | None = None,
                  n_jobs: int = 1, backend=None) -> BootstrapResult:
    """Paired bootstrap of an arbitrary OLS design.

    Each replicate records its own coefficients and its own t-statistics.
    Rank-deficient resamples count as failures and are dropped; more than
    10% failures raises DegenerateDataError.
    """
    X = np.ascontiguousarray(X, dtype=float)
    y = np.ascontiguousarray(y, dtype=float)
    n, k = X.shape
    names = list(names) if names is not None else [f"x{j}" for j in range(k)]
    if n < k + 1:
        raise InsufficientDataError(f"bootstrap needs at least k+1={k + 1} rows, got {n}")
    backend = backend or kernels
    full = fit_ols(X, y, names, opts)

    blocks = [(s, min(plan.B, s + _BLOCK)) for s in range(0, plan.B, _BLOCK)]
    if n_jobs > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            parts = list(pool.map(
                lambda se: _run_block(X, y, plan.master_seed, se[0], se[1], backend), blocks))
    else:
        parts = [_run_block(X, y, plan.master_seed, s, e, backend) for s, e in blocks]

    coef = np.concatenate([p[0] for p in parts])
    se = np.concatenate([p[1] for p in parts])
    r2 = np.concatenate([p[2] for p in parts])
    ok = np.concatenate([p[3] for p in parts])
    failures = int((~ok).sum())
    if failures > MAX_FAILURE_FRACTION * plan.B:
        raise DegenerateDataError(
            f"{failures} of {plan.B} bootstrap resamples were rank deficient")
    if failures == plan.B:
        raise DegenerateDataError("every bootstrap resample was rank deficient")

    coef, se, r2 = coef[ok], se[ok], r2[ok]
    tstat = t_statistics(coef, se)
    mean = bootstrap_mean(coef)
    var = bootstrap_variance(coef)
    ncis = np.array([normal_ci(float(full.coef[j]), float(var[j]), plan.alpha)
                     for j in range(k)])
    if coef.shape[0] >= 2:
        pcis = np.array([percentile_ci(coef[:, j], plan.alpha) for j in range(k)])
    else:
        pcis = np.column_stack([coef[0], coef[0]])
    return BootstrapResult(names=names, estimate=full.coef, coef=coef, t=tstat,
                           replicate_ids=np.flatnonzero(ok), mean=mean, var=var,
                           normal_ci=ncis, percentile_ci=pcis, failures=failures,
                           B=plan.B, master_seed=plan.master_seed, alpha=plan.alpha, r2=r2)


def bootstrap_regression(dataset: Dataset, plan: BootstrapPlan,
                         opts: InferenceOptions | None = None, n_jobs: int = 1,
                         backend=None) -> BootstrapResult:
    X, y = dataset.design()
    return bootstrap_ols(X, y, plan, DESIGN_NAMES, opts, n_jobs=n_jobs, backend=backend)
