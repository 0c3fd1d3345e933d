"""Special functions and ordinary least squares with classical inference.

Scalar special functions are written against :mod:`math` only so the same
formulas can be reused inside numba kernels.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError, InsufficientDataError, SingularDesignError

SQRT2 = math.sqrt(2.0)
SQRT2PI = math.sqrt(2.0 * math.pi)

# A column is collinear when its orthogonalized norm drops below this
# fraction of its original norm.
RANK_TOL = 1e-10

# Acklam's rational approximation, relative error ~1.15e-9 before refinement.
_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)
_P_LOW = 0.02425


def normal_cdf(z: float) -> float:
    """Standard normal distribution function."""
    return 0.5 * math.erfc(-z / SQRT2)


def normal_sf(z: float) -> float:
    """Upper tail ``1 - normal_cdf(z)`` without cancellation."""
    return 0.5 * math.erfc(z / SQRT2)


def normal_pdf(z: float) -> float:
    return math.exp(-0.5 * z * z) / SQRT2PI


def _probit_lower(p: float) -> float:
    # valid for 0 < p <= 0.5
    if p < _P_LOW:
        q = math.sqrt(-2.0 * math.log(p))
        x = ((((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5])
             / ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0))
    else:
        q = p - 0.5
        r = q * q
        x = ((((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q
             / (((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0))
    # Halley steps on the lower tail, where normal_cdf keeps full relative precision.
    for _ in range(2):
        err = normal_cdf(x) - p
        u = err * SQRT2PI * math.exp(0.5 * x * x)
        x = x - u / (1.0 + 0.5 * x * u)
    return x


def probit(p: float) -> float:
    """Standard normal quantile function.

    Raises DomainError unless ``0 < p < 1``. For ``p > 1/2`` the quantile is
    computed as ``-probit(1 - p)``; ``1 - p`` is exact there, so the upper
    tail loses no precision.
    """
    p = float(p)
    if not (0.0 < p < 1.0):
        raise DomainError(f"probit requires 0 < p < 1, got {p!r}")
    if p > 0.5:
        return -_probit_lower(1.0 - p)
    return _probit_lower(p)


def probit_array(p) -> np.ndarray:
    arr = np.asarray(p, dtype=float)
    return np.array([probit(v) for v in arr.ravel()]).reshape(arr.shape)


def normal_quantile(level: float) -> float:
    """Alias used for confidence multipliers, e.g. ``normal_quantile(0.975)``."""
    return probit(level)


def _betacf(a: float, b: float, x: float) -> float:
    # Modified Lentz evaluation of the incomplete beta continued fraction.
    tiny = 1e-300
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, 1000):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return h


def betainc_regularized(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function I_x(a, b)."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    log_front = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                 + a * math.log(x) + b * math.log1p(-x))
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def student_t_two_sided_p(t: float, df: float) -> float:
    """P(|T| > |t|) for Student's t with ``df`` degrees of freedom."""
    if not df >= 1:
        raise DomainError(f"degrees of freedom must be >= 1, got {df!r}")
    if math.isnan(t):
        return math.nan
    if math.isinf(t):
        return 0.0
    x = df / (df + t * t)
    return min(1.0, betainc_regularized(0.5 * df, 0.5, x))


def normal_two_sided_p(t: float) -> float:
    if math.isnan(t):
        return math.nan
    return 2.0 * normal_sf(abs(t))


@dataclass(frozen=True)
class InferenceOptions:
    """Reference distribution for coefficient p-values: ``"t"`` or ``"normal"``."""

    reference: str = "t"

    def __post_init__(self):
        if self.reference not in ("t", "normal"):
            raise ValueError(f"unknown reference distribution {self.reference!r}")


@dataclass
class RegressionFit:
    names: list[str]
    coef: np.ndarray
    se: np.ndarray
    t: np.ndarray
    p: np.ndarray
    r2: float
    n: int
    k: int
    rss: float
    sigma2: float
    residuals: np.ndarray = field(repr=False)
    fitted: np.ndarray = field(repr=False)
    reference: str = "t"

    @property
    def df_resid(self) -> int:
        return self.n - self.k

    def table(self) -> list[dict]:
        """Rows in the usual Variable / Estimate / Std. Error / t / p layout."""
        return [
            {"variable": name, "estimate": float(c), "std_error": float(s),
             "t": float(t), "p": float(p)}
            for name, c, s, t, p in zip(self.names, self.coef, self.se, self.t, self.p)
        ]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "r2": float(self.r2),
            "sigma2": float(self.sigma2),
            "reference": self.reference,
            "coefficients": self.table(),
        }


def t_statistics(coef: np.ndarray, se: np.ndarray) -> np.ndarray:
    """coef / se, with 0/0 mapped to nan and c/0 to a signed infinity."""
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.asarray(coef, dtype=float) / np.asarray(se, dtype=float)


def p_values(t: np.ndarray, df: int, reference: str = "t") -> np.ndarray:
    if reference == "t":
        return np.array([student_t_two_sided_p(float(v), df) for v in t])
    return np.array([normal_two_sided_p(float(v)) for v in t])


def fit_ols(X, y, names: Sequence[str] | None = None,
            opts: InferenceOptions | None = None) -> RegressionFit:
    """Least squares via Householder QR with classical standard errors.

    ``X`` is expected to carry the intercept as its first column. R^2 is
    ``1 - RSS/TSS`` and is reported as 0 for a constant response.
    """
    opts = opts or InferenceOptions()
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    if X.ndim != 2:
        raise ValueError("design matrix must be two-dimensional")
    n, k = X.shape
    if y.shape[0] != n:
        raise ValueError(f"response has {y.shape[0]} rows, design has {n}")
    if names is None:
        names = [f"x{j}" for j in range(k)]
    names = list(names)
    if n <= k:
        raise InsufficientDataError(f"need more rows than columns (n={n}, k={k})")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise DomainError("design and response must be finite")

    q, r = np.linalg.qr(X, mode="reduced")
    col_norms = np.linalg.norm(X, axis=0)
    diag = np.abs(np.diag(r))
    for j in range(k):
        if col_norms[j] == 0.0 or diag[j] < RANK_TOL * col_norms[j]:
            raise SingularDesignError(
                f"design is rank deficient: column {j} ({names[j]!r}) is collinear "
                f"with the preceding columns", column=names[j])

    qty = q.T @ y
    coef = _solve_upper(r, qty)
    fitted = X @ coef
    resid = y - fitted
    rss = float(resid @ resid)
    df = n - k
    sigma2 = rss / df
    r_inv = _solve_upper(r, np.eye(k))
    se = np.sqrt(sigma2 * np.sum(r_inv * r_inv, axis=1))
    t = t_statistics(coef, se)
    p = p_values(t, df, opts.reference)
    centered = y - y.mean()
    tss = float(centered @ centered)
    r2 = 0.0 if tss == 0.0 else min(1.0, max(0.0, 1.0 - rss / tss))
    return RegressionFit(names=names, coef=coef, se=se, t=t, p=p, r2=r2, n=n, k=k,
                         rss=rss, sigma2=sigma2, residuals=resid, fitted=fitted,
                         reference=opts.reference)


def _solve_upper(r: np.ndarray, b: np.ndarray) -> np.ndarray:
    k = r.shape[0]
    x = np.array(b, dtype=float, copy=True)
    for i in range(k - 1, -1, -1):
        x[i] = (x[i] - r[i, i + 1:] @ x[i + 1:]) / r[i, i]
    return x
