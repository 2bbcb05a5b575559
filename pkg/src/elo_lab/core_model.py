"""Bradley-Terry win probabilities, logistic primitives and the per-game log loss.

Skills are plain 1-D float arrays in logit units. Team indices are 0-based.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

# Probabilities are kept this far from {0, 1} before taking logs.
PROB_CLAMP = 1e-15


@dataclass(frozen=True)
class ScenarioParams:
    """Tournament context: team count, true-skill variance, home advantage, scale."""

    M: int
    v: float
    eta: float = 0.0
    s: float = 1.0

    def __post_init__(self):
        if int(self.M) != self.M or self.M < 2:
            raise ValueError(f"M must be an integer >= 2, got {self.M!r}")
        if not math.isfinite(self.v) or self.v < 0:
            raise ValueError(f"v must be finite and >= 0, got {self.v!r}")
        if not math.isfinite(self.eta):
            raise ValueError(f"eta must be finite, got {self.eta!r}")
        if not math.isfinite(self.s) or self.s <= 0:
            raise ValueError(f"s must be > 0, got {self.s!r}")


@dataclass(frozen=True)
class MatchRecord:
    home: int
    away: int
    outcome: Optional[int] = None
    index: int = 0

    def __post_init__(self):
        if self.home == self.away:
            raise ValueError(f"home and away must differ, got {self.home} twice")
        if self.home < 0 or self.away < 0:
            raise ValueError("team indices must be non-negative")
        if self.outcome is not None and self.outcome not in (0, 1):
            raise ValueError(f"outcome must be 0 or 1, got {self.outcome!r}")

    def check(self, M: int) -> None:
        if not (0 <= self.home < M and 0 <= self.away < M):
            raise ValueError(f"match ({self.home}, {self.away}) out of range for M={M}")

    def with_outcome(self, y: int) -> "MatchRecord":
        return MatchRecord(self.home, self.away, int(y), self.index)


def _finite(z):
    if not np.all(np.isfinite(z)):
        raise ValueError("input must be finite")


def logistic(z):
    """1 / (1 + exp(-z)), evaluated without overflow. Accepts scalars or arrays."""
    _finite(z)
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out[()] if out.ndim == 0 else out


def logistic_pdf(z):
    """Density of the standard logistic distribution, sigma(z) * sigma(-z)."""
    _finite(z)
    return logistic(z) * logistic(-np.asarray(z, dtype=float))


def scale_to_base10(s: float) -> float:
    """Convert a natural-log skill scale into the equivalent base-10 scale."""
    if not s > 0:
        raise ValueError(f"scale must be > 0, got {s!r}")
    return s * math.log(10.0)


def base10_sigmoid(z, s_prime: float):
    return 1.0 / (1.0 + 10.0 ** (-np.asarray(z, dtype=float) / s_prime))


def win_probability(theta, match: MatchRecord, eta: float = 0.0, s: float = 1.0) -> float:
    """Probability that the home team of ``match`` wins under skills ``theta``."""
    theta = np.asarray(theta, dtype=float)
    match.check(theta.size)
    if not s > 0:
        raise ValueError(f"scale must be > 0, got {s!r}")
    return float(logistic((theta[match.home] - theta[match.away]) / s + eta))


def match_loss(theta, match: MatchRecord, eta: float = 0.0) -> float:
    """Negative log-likelihood of the observed outcome of ``match``."""
    if match.outcome is None:
        raise ValueError("match has no outcome")
    theta = np.asarray(theta, dtype=float)
    match.check(theta.size)
    z = theta[match.home] - theta[match.away] + eta
    # same as clamping the probability to [PROB_CLAMP, 1 - PROB_CLAMP]
    return min(float(log_loss(z, match.outcome)), -math.log(PROB_CLAMP))


def log_loss(z, y):
    """Vectorised log loss of outcomes ``y`` given logits ``z`` (home win prob sigma(z))."""
    z = np.asarray(z, dtype=float)
    y = np.asarray(y, dtype=float)
    # -log sigma(z) = logaddexp(0, -z)
    return y * np.logaddexp(0.0, -z) + (1.0 - y) * np.logaddexp(0.0, z)
