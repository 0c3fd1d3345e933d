"""Synthetic game logs from a latent skill model.

A player's realized skill is innate skill plus a saturating learning term,
``s = h + learn * (1 - exp(-games_played / tau))``. Player A beats B with
probability ``Phi(skill_weight * (s_A - s_B) / noise)``, drawn as the sign of
``skill_weight * (s_A - s_B) + noise * eps`` with standard normal ``eps``.

A season has two periods, in the way the regression data has two halves.
Each player's game count in each period is drawn independently, so first-
and second-half experience vary across players rather than being locked
together by a fixed total. Pairings are drawn round by round among the
players who still owe games in the current period.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import InputError
from .ingest import GameLogRow


@dataclass
class SimPlayer:
    id: str
    h: float
    games_played: int = 0


@dataclass(frozen=True)
class GameModel:
    skill_weight: float = 1.0
    learn: float = 0.0
    tau: float = 50.0
    noise: float = 1.0

    def __post_init__(self):
        for name in ("skill_weight", "learn", "tau", "noise"):
            v = getattr(self, name)
            if not (v >= 0 and math.isfinite(v)):
                raise InputError(f"{name} must be finite and nonnegative, got {v!r}")


@dataclass(frozen=True)
class SimConfig:
    players: int = 100
    games: int = 100
    skill_mean: float = 0.0
    skill_sd: float = 1.0
    games_spread: float = 0.5
    seed: int = 0
    pairing: str = "uniform"

    def __post_init__(self):
        if self.players < 2:
            raise InputError("a season needs at least two players")
        if self.games < 1:
            raise InputError("games per player must be at least 1")
        if not (0.0 <= self.games_spread < 1.0):
            raise InputError("games_spread must lie in [0, 1)")
        if self.skill_sd < 0:
            raise InputError("skill_sd must be nonnegative")
        if self.pairing not in ("uniform", "skill"):
            raise InputError(f"unknown pairing scheme {self.pairing!r}")


@dataclass
class SeasonLog:
    rows: list[GameLogRow]
    boundaries: dict[str, int]
    innate: dict[str, float] = field(default_factory=dict)


def _learning(games, model: GameModel):
    games = np.asarray(games, dtype=float)
    if model.tau == 0.0:
        return np.where(games > 0, model.learn, 0.0)
    return model.learn * -np.expm1(-games / model.tau)


def realized_skill(p: SimPlayer, model: GameModel) -> float:
    return float(p.h + _learning(p.games_played, model))


def realized_skill_array(h, games, model: GameModel) -> np.ndarray:
    return np.asarray(h, dtype=float) + _learning(games, model)


def win_probability(sa: float, sb: float, model: GameModel) -> float:
    from .statmath import normal_cdf

    if model.skill_weight == 0.0 or sa == sb:
        return 0.5
    if model.noise == 0.0:
        return 1.0 if sa > sb else 0.0
    return normal_cdf(model.skill_weight * (sa - sb) / model.noise)


def play_match(pa: SimPlayer, pb: SimPlayer, model: GameModel,
               rng: np.random.Generator) -> SimPlayer:
    """Play one game, bump both experience counters and return the winner."""
    if pa is pb or pa.id == pb.id:
        raise InputError("a player cannot play against themself")
    sa, sb = realized_skill(pa, model), realized_skill(pb, model)
    eps = rng.standard_normal(1)
    coin = rng.random(1)
    a_wins = bool(kernels.round_outcomes(np.array([sa]), np.array([sb]), eps, coin,
                                         model.skill_weight, model.noise)[0])
    pa.games_played += 1
    pb.games_played += 1
    return pa if a_wins else pb


def _period_counts(cfg: SimConfig, rng: np.random.Generator) -> np.ndarray:
    half = cfg.games / 2.0
    if cfg.games_spread == 0.0:
        first = math.ceil(half)
        return np.tile([first, cfg.games - first], (cfg.players, 1))
    lo = max(1, int(round(half * (1.0 - cfg.games_spread))))
    hi = max(lo, int(round(half * (1.0 + cfg.games_spread))))
    return rng.integers(lo, hi + 1, size=(cfg.players, 2))


def simulate_season(config: SimConfig, model: GameModel, backend=None) -> SeasonLog:
    """Simulate a two-period season; deterministic given ``config.seed``."""
    backend = backend or kernels
    rng = np.random.default_rng(config.seed)
    n = config.players
    ids = [f"p{i:05d}" for i in range(n)]
    h = rng.normal(config.skill_mean, config.skill_sd, size=n)
    counts = _period_counts(config, rng)
    games = np.zeros(n, dtype=np.int64)
    boundary = np.zeros(n, dtype=np.int64)

    chunks_player, chunks_index, chunks_outcome = [], [], []
    for period in range(2):
        remaining = counts[:, period].astype(np.int64).copy()
        while True:
            needers = np.flatnonzero(remaining > 0)
            if needers.size == 0:
                break
            if needers.size == 1:
                others = np.delete(np.arange(n), needers[0])
                a = needers
                b = rng.choice(others, size=1)
            else:
                perm = rng.permutation(needers)
                if config.pairing == "skill":
                    cur = realized_skill_array(h[perm], games[perm], model)
                    perm = perm[np.argsort(-cur, kind="stable")]
                if perm.size % 2:
                    # the player owing the fewest games sits this round out
                    sit = int(np.argmin(remaining[perm]))
                    perm = np.delete(perm, sit)
                a, b = perm[0::2], perm[1::2]
            sa = realized_skill_array(h[a], games[a], model)
            sb = realized_skill_array(h[b], games[b], model)
            eps = rng.standard_normal(a.size)
            coin = rng.random(a.size)
            a_wins = np.asarray(backend.round_outcomes(sa, sb, eps, coin,
                                                       model.skill_weight, model.noise))
            chunks_player += [a, b]
            chunks_index += [games[a].copy(), games[b].copy()]
            chunks_outcome += [a_wins.astype(np.int8), (~a_wins).astype(np.int8)]
            games[a] += 1
            games[b] += 1
            remaining[a] -= 1
            remaining[b] -= 1
        if period == 0:
            boundary[:] = games

    player = np.concatenate(chunks_player)
    gidx = np.concatenate(chunks_index)
    outcome = np.concatenate(chunks_outcome)
    order = np.lexsort((gidx, player))
    rows = [GameLogRow(ids[p], int(g), int(o))
            for p, g, o in zip(player[order], gidx[order], outcome[order])]
    return SeasonLog(rows=rows,
                     boundaries={ids[i]: int(boundary[i]) for i in range(n)},
                     innate={ids[i]: float(h[i]) for i in range(n)})
