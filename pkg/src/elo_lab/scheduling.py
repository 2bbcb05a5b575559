"""Round-robin schedules, uniform random matchups and schedule autocorrelation.

Randomness always comes from an explicit ``numpy.random.Generator``. Integer
seeds are turned into generators with ``numpy.random.default_rng(seed)``
(PCG64), and shuffles use ``Generator.permutation``, so a given seed yields
the same schedule on every platform numpy supports.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np

from .core_model import MatchRecord


def _check_M(M):
    if int(M) != M or M < 2:
        raise ValueError(f"M must be an integer >= 2, got {M!r}")


def as_rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


@dataclass
class Schedule:
    """Ordered games stored column-wise. ``outcome`` is None for an unplayed schedule."""

    M: int
    home: np.ndarray
    away: np.ndarray
    outcome: Optional[np.ndarray] = field(default=None)

    def __post_init__(self):
        _check_M(self.M)
        self.home = np.asarray(self.home, dtype=np.int64).reshape(-1)
        self.away = np.asarray(self.away, dtype=np.int64).reshape(-1)
        if self.home.shape != self.away.shape:
            raise ValueError("home and away must have the same length")
        if self.home.size:
            if np.any(self.home == self.away):
                k = int(np.argmax(self.home == self.away))
                raise ValueError(f"game {k} has home == away")
            lo = min(self.home.min(), self.away.min())
            hi = max(self.home.max(), self.away.max())
            if lo < 0 or hi >= self.M:
                raise ValueError(f"team index out of range for M={self.M}")
        if self.outcome is not None:
            self.outcome = np.asarray(self.outcome, dtype=np.int64).reshape(-1)
            if self.outcome.shape != self.home.shape:
                raise ValueError("outcome length does not match the schedule")
            if not np.all((self.outcome == 0) | (self.outcome == 1)):
                raise ValueError("outcomes must be 0 or 1")

    def __len__(self) -> int:
        return int(self.home.size)

    def __iter__(self) -> Iterator[MatchRecord]:
        for k in range(len(self)):
            yield self[k]

    def __getitem__(self, k: int) -> MatchRecord:
        y = None if self.outcome is None else int(self.outcome[k])
        return MatchRecord(int(self.home[k]), int(self.away[k]), y, k)

    @classmethod
    def from_matches(cls, matches, M: int) -> "Schedule":
        matches = list(matches)
        home = [m.home for m in matches]
        away = [m.away for m in matches]
        ys = [m.outcome for m in matches]
        if all(y is None for y in ys):
            outcome = None
        elif any(y is None for y in ys):
            raise ValueError("either all or none of the matches must carry outcomes")
        else:
            outcome = ys
        return cls(M, home, away, outcome)

    def with_outcomes(self, y) -> "Schedule":
        return Schedule(self.M, self.home, self.away, y)

    def is_complete_double_round_robin(self) -> bool:
        M = self.M
        if len(self) != M * (M - 1):
            return False
        seen = np.zeros((M, M), dtype=bool)
        seen[self.home, self.away] = True
        return int(seen.sum()) == M * (M - 1)


def all_ordered_pairs(M: int) -> tuple[np.ndarray, np.ndarray]:
    _check_M(M)
    i, j = np.nonzero(~np.eye(M, dtype=bool))
    return i, j


def build_double_round_robin(M: int, seed=None) -> Schedule:
    """Every ordered (home, away) pair exactly once, in a seeded uniform random order."""
    i, j = all_ordered_pairs(M)
    order = as_rng(seed).permutation(i.size)
    return Schedule(M, i[order], j[order])


def sample_uniform_match(M: int, rng) -> MatchRecord:
    """Home uniform over teams, away uniform over the remaining M - 1 teams."""
    _check_M(M)
    rng = as_rng(rng)
    i = int(rng.integers(M))
    j = int(rng.integers(M - 1))
    return MatchRecord(i, j + (j >= i))


def sample_uniform_schedule(M: int, K: int, rng) -> Schedule:
    """K independent draws of :func:`sample_uniform_match`, vectorised."""
    _check_M(M)
    rng = as_rng(rng)
    i = rng.integers(M, size=K)
    j = rng.integers(M - 1, size=K)
    return Schedule(M, i, j + (j >= i))


def schedule_vector(match: MatchRecord, M: int) -> np.ndarray:
    match.check(M)
    x = np.zeros(M)
    x[match.home] = 1.0
    x[match.away] = -1.0
    return x


def theoretical_autocorrelation(M: int) -> np.ndarray:
    """E[x x^T] under uniform scheduling: 2/(M-1) * (I - 11^T / M)."""
    _check_M(M)
    return 2.0 / (M - 1) * (np.eye(M) - np.full((M, M), 1.0 / M))


def empirical_autocorrelation(schedule: Schedule) -> np.ndarray:
    """Average of x_k x_k^T over the games of ``schedule``."""
    K = len(schedule)
    if K == 0:
        raise ValueError("schedule is empty")
    M = schedule.M
    counts = np.zeros((M, M))
    np.add.at(counts, (schedule.home, schedule.away), 1.0)
    sym = counts + counts.T
    R = np.diag(sym.sum(axis=1)) - sym
    return R / K
