"""Quantify the skill component of games from player-level win data."""

__version__ = "0.1.0"

from .bootstrap import BootstrapPlan, BootstrapResult, bootstrap_ols, bootstrap_regression
from .errors import SkillScoreError
from .ingest import ClampPolicy, Dataset, GameLogRow, PlayerHalves, build_dataset, split_halves
from .kernels import BACKEND
from .scoring import (
    DEFAULT_TRANSFORMS,
    DEFAULT_WEIGHTS,
    QuantileSummary,
    TransformSpec,
    WeightSpec,
    compare_games,
    grid_scores,
    point_score,
    quantile_summary,
    score_distribution,
)
from .simulate import GameModel, SimConfig, simulate_season
from .statmath import InferenceOptions, RegressionFit, fit_ols, normal_cdf, probit

__all__ = [
    "BACKEND",
    "BootstrapPlan",
    "BootstrapResult",
    "ClampPolicy",
    "DEFAULT_TRANSFORMS",
    "DEFAULT_WEIGHTS",
    "Dataset",
    "GameLogRow",
    "GameModel",
    "InferenceOptions",
    "PlayerHalves",
    "QuantileSummary",
    "RegressionFit",
    "SimConfig",
    "SkillScoreError",
    "TransformSpec",
    "WeightSpec",
    "bootstrap_ols",
    "bootstrap_regression",
    "build_dataset",
    "compare_games",
    "fit_ols",
    "grid_scores",
    "normal_cdf",
    "point_score",
    "probit",
    "quantile_summary",
    "score_distribution",
    "simulate_season",
    "split_halves",
]
