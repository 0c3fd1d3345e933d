"""Game logs and per-player half splits.

A game log is a sequence of ``(player_id, game_index, outcome[, rating_after])``
rows. Each player's history is cut into two halves; the win proportion of
each half and an experience summary of each half feed the regression.

``game_index`` is read as the number of games the player had completed
before that game, so in count mode the experience milestones are
``m0 = first index``, ``m1 = last index of half 1 + 1`` and
``m2 = last index of half 2 + 1``.
"""
from __future__ import annotations

import csv
import math
from collections import defaultdict
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DomainError, InputError, ParseError
from .statmath import probit_array

DESIGN_NAMES = ("intercept", "probit_w1", "e1", "e2")
GAMELOG_HEADER = ("player_id", "game_index", "outcome")
HALVES_HEADER = ("player_id", "w1", "w2", "e1", "e2", "n1", "n2")


@dataclass(frozen=True)
class GameLogRow:
    player_id: str
    game_index: int
    outcome: int
    rating_after: float | None = None


@dataclass(frozen=True)
class ClampPolicy:
    """How a win proportion of exactly 0 or 1 is pulled into (0, 1).

    ``half``: (wins + 0.5) / (n + 1). ``epsilon``: clip to
    [1/(2n), 1 - 1/(2n)]. Proportions already strictly inside (0, 1) are
    left alone under both modes.
    """

    mode: str = "half"

    def __post_init__(self):
        if self.mode not in ("half", "epsilon"):
            raise ValueError(f"unknown clamp mode {self.mode!r}")

    def apply(self, wins: int, n: int) -> float:
        if n <= 0:
            raise InputError("cannot form a win proportion from zero games")
        if 0 < wins < n:
            return wins / n
        if self.mode == "half":
            return (wins + 0.5) / (n + 1)
        eps = 1.0 / (2 * n)
        w = wins / n
        if w <= 0.0:
            return eps
        return 1.0 - eps


@dataclass(frozen=True)
class PlayerHalves:
    player_id: str
    w1: float
    w2: float
    e1: float
    e2: float
    n1: int
    n2: int
    milestones: tuple = ()


@dataclass
class Dataset:
    players: list[PlayerHalves]
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        seen = set()
        for p in self.players:
            if p.player_id in seen:
                raise InputError(f"duplicate player_id {p.player_id!r}")
            seen.add(p.player_id)

    def __len__(self):
        return len(self.players)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(p, name) for p in self.players], dtype=float)

    def design(self) -> tuple[np.ndarray, np.ndarray]:
        """Design matrix ``[1, probit(w1), e1, e2]`` and response ``probit(w2)``."""
        if not self.players:
            raise InputError("dataset is empty")
        w1 = self.column("w1")
        w2 = self.column("w2")
        X = np.column_stack([np.ones(len(self)), probit_array(w1),
                             self.column("e1"), self.column("e2")])
        return X, probit_array(w2)

    def rescaled(self, lo: float, hi: float) -> "Dataset":
        """Copy with e1 and e2 each mapped affinely onto [lo, hi]."""
        e1 = rescale_to_range(self.column("e1"), lo, hi)
        e2 = rescale_to_range(self.column("e2"), lo, hi)
        players = [replace(p, e1=float(a), e2=float(b))
                   for p, a, b in zip(self.players, e1, e2)]
        prov = dict(self.provenance, rescale=[lo, hi])
        return Dataset(players, prov)

    def filter_min_games(self, min_games: int) -> "Dataset":
        kept = [p for p in self.players if p.n1 >= min_games and p.n2 >= min_games]
        prov = dict(self.provenance, min_games=min_games,
                    players_rejected=len(self.players) - len(kept))
        return Dataset(kept, prov)

    def mean_first_half_win_rate(self) -> float:
        return float(self.column("w1").mean())


def compute_experience(milestones: Sequence[float], mode: str = "count") -> tuple[float, float]:
    """Experience of each half from its milestones.

    count: (m0, m1, m2) -> ((m0 + m1)/2, (m2 - m1)/2)
    rating: (m0, m1, m2, m3) -> ((m0 + m1)/2, (m2 + m3)/2 - m1)
    """
    m = [float(v) for v in milestones]
    if not all(math.isfinite(v) for v in m):
        raise InputError("experience milestones must be finite")
    if mode == "count":
        if len(m) != 3:
            raise InputError(f"count mode needs 3 milestones, got {len(m)}")
        m0, m1, m2 = m
        if not (m0 <= m1 <= m2):
            raise InputError(f"count milestones must be nondecreasing, got {m}")
        return (m0 + m1) / 2.0, (m2 - m1) / 2.0
    if mode == "rating":
        if len(m) != 4:
            raise InputError(f"rating mode needs 4 milestones, got {len(m)}")
        m0, m1, m2, m3 = m
        return (m0 + m1) / 2.0, (m2 + m3) / 2.0 - m1
    raise InputError(f"unknown experience mode {mode!r}")


def rescale_to_range(values, lo: float, hi: float) -> np.ndarray:
    """Affine map of [min(values), max(values)] onto [lo, hi]."""
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise InputError("cannot rescale an empty sequence")
    vmin, vmax = float(v.min()), float(v.max())
    if vmax == vmin:
        raise DomainError("cannot rescale a constant sequence: no affine map exists")
    # divide first: (hi - lo) / span overflows when span is subnormal
    out = lo + ((v - vmin) / (vmax - vmin)) * (hi - lo)
    # pin the endpoints against rounding
    out[v == vmin] = lo
    out[v == vmax] = hi
    return out


def split_halves(rows: Sequence[GameLogRow], min_games: int = 1,
                 policy: ClampPolicy | None = None, mode: str = "count",
                 boundary: int | None = None) -> PlayerHalves | None:
    """Split one player's sorted history into two halves.

    Without ``boundary`` the first ceil(n/2) games form half 1. With it,
    half 1 holds the games whose ``game_index`` is below ``boundary``.
    Returns None when either half has fewer than ``min_games`` games.
    """
    policy = policy or ClampPolicy()
    if not rows:
        raise InputError("empty game history")
    if min_games < 1:
        raise InputError("min_games must be at least 1")
    pid = rows[0].player_id
    prev = -1
    for r in rows:
        if r.player_id != pid:
            raise InputError(f"rows mix players {pid!r} and {r.player_id!r}")
        if r.outcome not in (0, 1):
            raise ParseError(f"player {pid!r}: outcome must be 0 or 1, got {r.outcome!r}")
        if r.game_index < 0 or r.game_index <= prev:
            raise InputError(f"player {pid!r}: game_index must be nonnegative and "
                             f"strictly increasing (saw {r.game_index} after {prev})")
        prev = r.game_index

    n = len(rows)
    if boundary is None:
        cut = (n + 1) // 2
    else:
        cut = sum(1 for r in rows if r.game_index < boundary)
    first, second = rows[:cut], rows[cut:]
    if len(first) < min_games or len(second) < min_games:
        return None

    wins1 = sum(r.outcome for r in first)
    wins2 = sum(r.outcome for r in second)
    if mode == "count":
        ms = (first[0].game_index, first[-1].game_index + 1, second[-1].game_index + 1)
    elif mode == "rating":
        picks = (first[0], first[-1], second[0], second[-1])
        if any(r.rating_after is None for r in picks):
            raise InputError(f"player {pid!r}: rating mode needs rating_after values")
        ms = tuple(float(r.rating_after) for r in picks)
    else:
        raise InputError(f"unknown experience mode {mode!r}")
    e1, e2 = compute_experience(ms, mode)
    return PlayerHalves(player_id=pid, w1=policy.apply(wins1, len(first)),
                        w2=policy.apply(wins2, len(second)), e1=e1, e2=e2,
                        n1=len(first), n2=len(second), milestones=tuple(ms))


def group_rows(rows: Iterable[GameLogRow]) -> dict[str, list[GameLogRow]]:
    grouped: dict[str, list[GameLogRow]] = defaultdict(list)
    for r in rows:
        grouped[r.player_id].append(r)
    for lst in grouped.values():
        lst.sort(key=lambda r: r.game_index)
    return dict(grouped)


def build_dataset(rows: Iterable[GameLogRow], min_games: int = 1,
                  policy: ClampPolicy | None = None, mode: str = "count",
                  boundaries: Mapping[str, int] | None = None,
                  source: str | None = None) -> Dataset:
    policy = policy or ClampPolicy()
    grouped = group_rows(rows)
    players = []
    rejected = 0
    for pid in sorted(grouped):
        bound = None if boundaries is None else boundaries.get(pid)
        if boundaries is not None and bound is None:
            raise InputError(f"no split boundary supplied for player {pid!r}")
        ph = split_halves(grouped[pid], min_games, policy, mode, bound)
        if ph is None:
            rejected += 1
        else:
            players.append(ph)
    prov = {
        "source": source,
        "format": "gamelog",
        "experience": mode,
        "clamp": policy.mode,
        "min_games": min_games,
        "split": "boundary" if boundaries is not None else "halves",
        "players_seen": len(grouped),
        "players_rejected": rejected,
    }
    return Dataset(players, prov)


def experience_quantile_table(dataset: Dataset, groups: int = 4) -> list[dict]:
    """Mean win rates per experience quantile group (report statistic only)."""
    games = dataset.column("n1") + dataset.column("n2")
    if len(games) == 0:
        return []
    edges = np.quantile(games, np.linspace(0.0, 1.0, groups + 1))
    labels = np.clip(np.searchsorted(edges, games, side="right") - 1, 0, groups - 1)
    out = []
    for g in range(groups):
        mask = labels == g
        if not mask.any():
            continue
        out.append({
            "group": g,
            "games_lo": float(edges[g]),
            "games_hi": float(edges[g + 1]),
            "players": int(mask.sum()),
            "mean_w1": float(dataset.column("w1")[mask].mean()),
            "mean_w2": float(dataset.column("w2")[mask].mean()),
        })
    return out


# ---------------------------------------------------------------- CSV I/O


def _open_rows(path):
    fh = open(path, newline="", encoding="utf-8")
    return fh, csv.reader(fh)


def read_gamelog_csv(path) -> list[GameLogRow]:
    fh, reader = _open_rows(path)
    with fh:
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        if tuple(header[:3]) != GAMELOG_HEADER or len(header) > 4 or (
                len(header) == 4 and header[3] != "rating_after"):
            raise ParseError(f"{path}:1: expected header "
                             f"player_id,game_index,outcome[,rating_after], got {','.join(header)}")
        has_rating = len(header) == 4
        rows = []
        for lineno, rec in enumerate(reader, start=2):
            if not rec or all(not c.strip() for c in rec):
                continue
            if len(rec) != len(header):
                raise ParseError(f"{path}:{lineno}: expected {len(header)} fields, got {len(rec)}")
            pid, gi, out = rec[0].strip(), rec[1].strip(), rec[2].strip()
            if out not in ("0", "1"):
                raise ParseError(f"{path}:{lineno}: outcome must be 0 or 1, got {out!r}")
            try:
                gidx = int(gi)
            except ValueError:
                raise ParseError(f"{path}:{lineno}: bad game_index {gi!r}") from None
            if gidx < 0:
                raise ParseError(f"{path}:{lineno}: game_index must be nonnegative")
            rating = None
            if has_rating and rec[3].strip():
                try:
                    rating = float(rec[3])
                except ValueError:
                    raise ParseError(f"{path}:{lineno}: bad rating_after {rec[3]!r}") from None
            rows.append(GameLogRow(pid, gidx, int(out), rating))
    return rows


def write_gamelog_csv(path, rows: Iterable[GameLogRow]) -> None:
    rows = list(rows)
    has_rating = any(r.rating_after is not None for r in rows)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(GAMELOG_HEADER + (("rating_after",) if has_rating else ()))
        for r in rows:
            rec = [r.player_id, r.game_index, r.outcome]
            if has_rating:
                rec.append("" if r.rating_after is None else repr(r.rating_after))
            w.writerow(rec)


def read_boundaries_csv(path) -> dict[str, int]:
    fh, reader = _open_rows(path)
    with fh:
        header = [h.strip() for h in next(reader, [])]
        if header != ["player_id", "boundary"]:
            raise ParseError(f"{path}:1: expected header player_id,boundary")
        out = {}
        for lineno, rec in enumerate(reader, start=2):
            if not rec:
                continue
            try:
                out[rec[0].strip()] = int(rec[1])
            except (ValueError, IndexError):
                raise ParseError(f"{path}:{lineno}: bad boundary record {rec!r}") from None
    return out


def write_boundaries_csv(path, boundaries: Mapping[str, int]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["player_id", "boundary"])
        for pid, b in boundaries.items():
            w.writerow([pid, b])


def read_halves_csv(path) -> Dataset:
    fh, reader = _open_rows(path)
    with fh:
        header = tuple(h.strip() for h in next(reader, []))
        if header != HALVES_HEADER:
            raise ParseError(f"{path}:1: expected header {','.join(HALVES_HEADER)}")
        players = []
        seen = set()
        for lineno, rec in enumerate(reader, start=2):
            if not rec or all(not c.strip() for c in rec):
                continue
            if len(rec) != len(HALVES_HEADER):
                raise ParseError(f"{path}:{lineno}: expected 7 fields, got {len(rec)}")
            pid = rec[0].strip()
            try:
                w1, w2, e1, e2 = (float(v) for v in rec[1:5])
                n1, n2 = int(rec[5]), int(rec[6])
            except ValueError:
                raise ParseError(f"{path}:{lineno}: non-numeric field in {rec!r}") from None
            if not (0.0 < w1 < 1.0 and 0.0 < w2 < 1.0):
                raise ParseError(f"{path}:{lineno}: w1 and w2 must lie strictly in (0, 1)")
            if not (math.isfinite(e1) and math.isfinite(e2)):
                raise ParseError(f"{path}:{lineno}: e1 and e2 must be finite")
            if n1 < 1 or n2 < 1:
                raise ParseError(f"{path}:{lineno}: n1 and n2 must be positive")
            if pid in seen:
                raise ParseError(f"{path}:{lineno}: duplicate player_id {pid!r}")
            seen.add(pid)
            players.append(PlayerHalves(pid, w1, w2, e1, e2, n1, n2))
    return Dataset(players, {"source": str(path), "format": "halves"})


def write_halves(fh, dataset: Dataset) -> None:
    w = csv.writer(fh)
    w.writerow(HALVES_HEADER)
    for p in dataset.players:
        w.writerow([p.player_id, repr(p.w1), repr(p.w2), repr(p.e1), repr(p.e2), p.n1, p.n2])


def write_halves_csv(path, dataset: Dataset) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        write_halves(fh, dataset)
