"""Skill scores from regression t-statistics.

Each of the three scored t-statistics (first-half performance, first-half
experience, second-half experience) is squashed into [0, 1] by a piecewise
linear map with knots at 0, a and b, then the three values are combined
with convex weights.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import kernels
from .errors import DomainError, InputError

QUANTILE_LEVELS = (0.10, 0.50, 0.90)


@dataclass(frozen=True)
class TransformSpec:
    a: float = 2.0
    b: float = 5.0

    def __post_init__(self):
        if not (0.0 < self.a < self.b) or not math.isfinite(self.b):
            raise InputError(f"transform cutoffs need 0 < a < b, got ({self.a}, {self.b})")

    @property
    def is_convex(self) -> bool:
        """Convex on [0, b]: the upper slope 1/(2(b-a)) exceeds the lower 1/(2a)."""
        return self.b < 2.0 * self.a

    @property
    def is_concave(self) -> bool:
        return self.b > 2.0 * self.a

    def __call__(self, t):
        return transform_t(t, self)

    def label(self) -> str:
        return f"({self.a:g},{self.b:g})"


@dataclass(frozen=True)
class WeightSpec:
    """Weights on performance, first-half experience and second-half experience."""

    perf: float = 2.0 / 7.0
    prev_exp: float = 4.0 / 7.0
    curr_exp: float = 1.0 / 7.0

    def __post_init__(self):
        w = self.as_array()
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise InputError(f"weights must be nonnegative, got {tuple(w)}")
        if abs(w.sum() - 1.0) > 1e-12:
            raise InputError(f"weights must sum to 1, got {w.sum():.15g}")

    def as_array(self) -> np.ndarray:
        return np.array([self.perf, self.prev_exp, self.curr_exp], dtype=float)

    @classmethod
    def normalized(cls, perf: float, prev_exp: float, curr_exp: float) -> "WeightSpec":
        """Build from raw weights, rescaling (with a warning) when they do not sum to 1."""
        total = perf + prev_exp + curr_exp
        if total <= 0:
            raise InputError("weights must have a positive sum")
        if abs(total - 1.0) > 1e-12:
            warnings.warn(f"weights ({perf}, {prev_exp}, {curr_exp}) sum to {total:g}; "
                          f"normalizing to 1", stacklevel=2)
            return cls(perf / total, prev_exp / total, curr_exp / total)
        return cls(perf, prev_exp, 1.0 - perf - prev_exp)

    @classmethod
    def family(cls, a: float) -> "WeightSpec":
        """The one-parameter family (a/2, a, 1 - 3a/2)."""
        if not (0.0 <= a <= 2.0 / 3.0):
            raise InputError(f"family parameter must lie in [0, 2/3], got {a}")
        return cls(a / 2.0, a, 1.0 - 1.5 * a)

    def label(self) -> str:
        return f"({self.perf:.4g},{self.prev_exp:.4g},{self.curr_exp:.4g})"


DEFAULT_TRANSFORMS = (
    TransformSpec(2.0, 5.0),
    TransformSpec(1.5, 4.5),
    TransformSpec(1.5, 5.5),
    TransformSpec(2.5, 4.5),
    TransformSpec(2.5, 5.5),
)
DEFAULT_WEIGHTS = tuple(WeightSpec.family(a) for a in (0.50, 0.53, 0.57, 0.60))
BASE_WEIGHTS = WeightSpec()


def transform_t(t: float, spec: TransformSpec) -> float:
    """Piecewise-linear map of a t-statistic into [0, 1].

    0 below 0, t/(2a) up to a, (t + b - 2a)/(2(b - a)) up to b, 1 above b.
    """
    if math.isnan(t):
        raise DomainError("cannot transform a nan t-statistic")
    if t < 0.0:
        return 0.0
    if t <= spec.a:
        return t / (2.0 * spec.a)
    if t <= spec.b:
        return (t + (spec.b - 2.0 * spec.a)) / (2.0 * (spec.b - spec.a))
    return 1.0


def transform_array(t, spec: TransformSpec, backend=None) -> np.ndarray:
    arr = np.ascontiguousarray(t, dtype=float)
    if np.isnan(arr).any():
        raise DomainError("cannot transform nan t-statistics")
    return (backend or kernels).transform(arr, spec.a, spec.b)


def skill_score(x1: float, x2: float, x3: float, w: WeightSpec | None = None) -> float:
    w = w or BASE_WEIGHTS
    for x in (x1, x2, x3):
        if not (0.0 <= x <= 1.0):
            raise DomainError(f"scaled values must lie in [0, 1], got {x!r}")
    s = w.perf * x1 + w.prev_exp * x2 + w.curr_exp * x3
    return min(1.0, max(0.0, s))


def point_score(t1: float, t2: float, t3: float, spec: TransformSpec | None = None,
                w: WeightSpec | None = None) -> float:
    spec = spec or TransformSpec()
    return skill_score(transform_t(t1, spec), transform_t(t2, spec), transform_t(t3, spec), w)


@dataclass(frozen=True)
class QuantileSummary:
    q10: float
    q50: float
    q90: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.q10, self.q50, self.q90)


@dataclass
class ScoreDistribution:
    label: str
    transform: TransformSpec
    weights: WeightSpec
    scores: np.ndarray

    def summary(self) -> QuantileSummary:
        return quantile_summary(self)


def score_distribution(t_replicates, spec: TransformSpec, w: WeightSpec,
                       label: str = "", backend=None) -> ScoreDistribution:
    """Score every replicate (t1, t2, t3) triple."""
    t = np.atleast_2d(np.asarray(t_replicates, dtype=float))
    if t.size == 0:
        raise InputError("no replicate t-statistics to score")
    if t.shape[1] != 3:
        raise InputError(f"expected (t1, t2, t3) triples, got width {t.shape[1]}")
    backend = backend or kernels
    x = transform_array(t, spec, backend)
    s = np.clip(backend.weighted_scores(np.ascontiguousarray(x), w.as_array()), 0.0, 1.0)
    return ScoreDistribution(label, spec, w, s)


def quantile_summary(dist) -> QuantileSummary:
    scores = dist.scores if isinstance(dist, ScoreDistribution) else np.asarray(dist, float)
    if scores.size == 0:
        raise InputError("cannot summarize an empty score distribution")
    q = np.quantile(scores, QUANTILE_LEVELS)
    return QuantileSummary(float(q[0]), float(q[1]), float(q[2]))


def scored_t(t_matrix) -> np.ndarray:
    """The (t1, t2, t3) columns of a full (intercept, probit_w1, e1, e2) t matrix."""
    t = np.atleast_2d(np.asarray(t_matrix, dtype=float))
    if t.shape[1] != 4:
        raise InputError("expected t-statistics for (intercept, probit_w1, e1, e2)")
    return t[:, 1:4]


@dataclass
class GridCell:
    weights: WeightSpec
    transform: TransformSpec
    summary: QuantileSummary

    def to_dict(self) -> dict:
        return {
            "weights": [self.weights.perf, self.weights.prev_exp, self.weights.curr_exp],
            "cutoffs": [self.transform.a, self.transform.b],
            "q10": self.summary.q10,
            "q50": self.summary.q50,
            "q90": self.summary.q90,
        }


def grid_scores(t_replicates, transforms: Sequence[TransformSpec] = DEFAULT_TRANSFORMS,
                weights: Sequence[WeightSpec] = DEFAULT_WEIGHTS, backend=None) -> list[GridCell]:
    """Quantile summary for every (weights, cutoffs) pair, weights-major."""
    if not transforms or not weights:
        raise InputError("transform and weight grids must be non-empty")
    for i, spec in enumerate(transforms):
        if not isinstance(spec, TransformSpec):
            raise InputError(f"transform grid entry {i} is not a TransformSpec: {spec!r}")
    for i, w in enumerate(weights):
        if not isinstance(w, WeightSpec):
            raise InputError(f"weight grid entry {i} is not a WeightSpec: {w!r}")
    cells = []
    for w in weights:
        for spec in transforms:
            dist = score_distribution(t_replicates, spec, w, backend=backend)
            cells.append(GridCell(w, spec, quantile_summary(dist)))
    return cells


def histogram(scores, bins: int = 50, lo: float = 0.0, hi: float = 1.0) -> list[tuple[float, float, int]]:
    counts, edges = np.histogram(np.asarray(scores, dtype=float), bins=bins, range=(lo, hi))
    return [(float(edges[i]), float(edges[i + 1]), int(counts[i])) for i in range(bins)]


# ------------------------------------------------------------- comparison


@dataclass
class Comparison:
    labels: list[str]
    matrix: list[list[str]]
    tiers: list[list[str]] | None
    total_order: list[str] | None

    def verdict(self, a: str, b: str) -> str:
        return self.matrix[self.labels.index(a)][self.labels.index(b)]

    def to_dict(self) -> dict:
        return {"labels": self.labels, "matrix": self.matrix, "tiers": self.tiers,
                "total_order": self.total_order}


def dominates(a: QuantileSummary, b: QuantileSummary) -> bool:
    return a.q10 > b.q90


def compare_games(summaries: Mapping[str, QuantileSummary]) -> Comparison:
    """Interval partial order: A > B iff q10(A) > q90(B).

    ``matrix[i][j]`` is ``">"``, ``"<"`` or ``"~"`` (incomparable). ``tiers``
    lists groups from least to most skilled when incomparability is
    transitive; ``total_order`` is set only when every pair is comparable.
    """
    labels = list(summaries)
    if len(labels) < 2:
        raise InputError("comparison needs at least two games")
    return _order_from_matrix(labels, _verdict_matrix(labels, summaries))


def _verdict_matrix(labels, summaries):
    m = []
    for a in labels:
        row = []
        for b in labels:
            if dominates(summaries[a], summaries[b]):
                row.append(">")
            elif dominates(summaries[b], summaries[a]):
                row.append("<")
            else:
                row.append("~")
        m.append(row)
    return m


def _order_from_matrix(labels, matrix) -> Comparison:
    n = len(labels)
    wins = [sum(1 for j in range(n) if matrix[i][j] == ">") for i in range(n)]
    order = sorted(range(n), key=lambda i: (wins[i], labels[i]))
    tiers: list[list[int]] = []
    for i in order:
        if tiers and all(matrix[i][j] == "~" for j in tiers[-1]):
            tiers[-1].append(i)
        else:
            tiers.append([i])
    consistent = all(
        matrix[i][j] == ("~" if ti == tj else ("<" if ti < tj else ">"))
        for ti, tier_i in enumerate(tiers) for i in tier_i
        for tj, tier_j in enumerate(tiers) for j in tier_j if i != j
    )
    tier_labels = [[labels[i] for i in t] for t in tiers] if consistent else None
    total = None
    if consistent and all(len(t) == 1 for t in tiers):
        total = [t[0] for t in tier_labels]
    return Comparison(labels, matrix, tier_labels, total)


def consensus(comparisons: Sequence[Comparison]) -> Comparison:
    """Pairwise verdicts shared by every comparison; disagreements become ``~``."""
    if not comparisons:
        raise InputError("no comparisons to combine")
    labels = comparisons[0].labels
    n = len(labels)
    matrix = [[comparisons[0].matrix[i][j] for j in range(n)] for i in range(n)]
    for c in comparisons[1:]:
        if c.labels != labels:
            raise InputError("comparisons cover different games")
        for i in range(n):
            for j in range(n):
                if c.matrix[i][j] != matrix[i][j]:
                    matrix[i][j] = "~"
    return _order_from_matrix(labels, matrix)
