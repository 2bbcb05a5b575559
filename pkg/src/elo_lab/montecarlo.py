"""Monte-Carlo ensembles of synthetic tournaments for checking the closed-form model.

Run ``r`` of an ensemble with seed ``s`` draws all of its randomness from
``numpy.random.default_rng([s, r])``, in this order: true skills (unless fixed),
the schedule, then one uniform per game for the outcomes. Runs are simulated
in fixed chunks of ``CHUNK`` runs and the chunk partial sums are reduced in
chunk order, so the result is bitwise identical for any thread count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core_model import MatchRecord, ScenarioParams, log_loss, logistic, logistic_pdf
from .scheduling import all_ordered_pairs, as_rng
from .theory import TheoryCurves

CHUNK = 64
SCHEDULERS = ("uniform", "double-round-robin")
ENGINES = ("exact", "linearized")


def draw_true_skills(scenario: ScenarioParams, rng) -> np.ndarray:
    """M independent N(0, v) skills."""
    rng = as_rng(rng)
    return rng.normal(0.0, math.sqrt(scenario.v), scenario.M)


def simulate_outcome(theta_star, match: MatchRecord, eta: float, rng) -> int:
    theta_star = np.asarray(theta_star, dtype=float)
    match.check(theta_star.size)
    p = logistic(theta_star[match.home] - theta_star[match.away] + eta)
    return int(as_rng(rng).random() < p)


@dataclass(frozen=True)
class EnsembleConfig:
    scenario: ScenarioParams
    beta: float
    K: int
    runs: int
    seed: int = 0
    scheduler: str = "uniform"
    engine: str = "exact"
    theta_star: Optional[tuple] = None  # fixed true skills shared by every run

    def __post_init__(self):
        if not (math.isfinite(self.beta) and self.beta > 0):
            raise ValueError(f"beta must be > 0, got {self.beta!r}")
        if int(self.K) != self.K or self.K < 0:
            raise ValueError(f"K must be a non-negative integer, got {self.K!r}")
        if int(self.runs) != self.runs or self.runs < 1:
            raise ValueError(f"runs must be >= 1, got {self.runs!r}")
        if self.scheduler not in SCHEDULERS:
            raise ValueError(f"scheduler must be one of {SCHEDULERS}, got {self.scheduler!r}")
        if self.engine not in ENGINES:
            raise ValueError(f"engine must be one of {ENGINES}, got {self.engine!r}")
        if self.theta_star is not None:
            ts = tuple(float(t) for t in self.theta_star)
            if len(ts) != self.scenario.M:
                raise ValueError("theta_star length does not match M")
            object.__setattr__(self, "theta_star", ts)


@dataclass
class EnsembleStats:
    k_grid: np.ndarray
    empirical_msd: np.ndarray           # (K + 1,)
    empirical_mean_loss: np.ndarray     # (K,), predict-then-update loss
    empirical_mean_skill: np.ndarray    # (M, K + 1)
    empirical_skill_sq: np.ndarray = field(repr=False, default=None)  # (M, K + 1) second moment
    run_count: int = 0
    seed: int = 0
    mean_true_sq_norm: float = math.nan

    def skill_std(self) -> np.ndarray:
        """Across-run standard deviation (ddof=1) of each team's skill at each k."""
        n = self.run_count
        if n < 2:
            raise ValueError("need at least two runs")
        var = (self.empirical_skill_sq - self.empirical_mean_skill ** 2) * n / (n - 1)
        return np.sqrt(np.maximum(var, 0.0))


def _run_rng(seed, r):
    return np.random.default_rng([int(seed), int(r)])


def _draw_run(cfg: EnsembleConfig, r: int):
    rng = _run_rng(cfg.seed, r)
    M, K = cfg.scenario.M, cfg.K
    if cfg.theta_star is None:
        ts = draw_true_skills(cfg.scenario, rng)
    else:
        ts = np.array(cfg.theta_star)
    if cfg.scheduler == "uniform":
        i = rng.integers(M, size=K)
        j = rng.integers(M - 1, size=K)
        j = j + (j >= i)
    else:
        pi, pj = all_ordered_pairs(M)
        n_cycles = -(-K // pi.size) if K else 0
        order = np.concatenate([rng.permutation(pi.size) for _ in range(n_cycles)] or [np.zeros(0, int)])
        i, j = pi[order[:K]], pj[order[:K]]
    u = rng.random(K)
    return ts, i, j, u


def _simulate_chunk(cfg: EnsembleConfig, runs: range):
    M, K = cfg.scenario.M, cfg.K
    eta, beta = cfg.scenario.eta, cfg.beta
    draws = [_draw_run(cfg, r) for r in runs]
    R = len(draws)
    ts = np.stack([d[0] for d in draws])
    home = np.stack([d[1] for d in draws]).reshape(R, K)
    away = np.stack([d[2] for d in draws]).reshape(R, K)
    u = np.stack([d[3] for d in draws]).reshape(R, K)
    rows = np.arange(R)

    theta = np.zeros((R, M))
    msd = np.zeros(K + 1)
    loss = np.zeros(K)
    skill = np.zeros((K + 1, M))
    skill_sq = np.zeros((K + 1, M))
    msd[0] = ((theta - ts) ** 2).sum()
    true_sq = (ts ** 2).sum()
    for k in range(K):
        i, j = home[:, k], away[:, k]
        z_star = ts[rows, i] - ts[rows, j] + eta
        y = (u[:, k] < logistic(z_star)).astype(float)
        z = theta[rows, i] - theta[rows, j] + eta
        loss[k] = log_loss(z, y).sum()
        if cfg.engine == "exact":
            step = beta * (y - logistic(z))
        else:
            step = beta * ((y - logistic(z_star)) - logistic_pdf(z_star) * (z - z_star))
        theta[rows, i] += step
        theta[rows, j] -= step
        msd[k + 1] = ((theta - ts) ** 2).sum()
        skill[k + 1] = theta.sum(axis=0)
        skill_sq[k + 1] = (theta ** 2).sum(axis=0)
    return msd, loss, skill, skill_sq, true_sq


def default_threads() -> int:
    env = os.environ.get("ELO_LAB_THREADS")
    if env:
        n = int(env)
        if n < 1:
            raise ValueError("ELO_LAB_THREADS must be >= 1")
        return n
    return os.cpu_count() or 1


def run_ensemble(config: EnsembleConfig, threads: Optional[int] = None) -> EnsembleStats:
    """Simulate ``config.runs`` independent seasons from theta_0 = 0 and average them."""
    chunks = [range(s, min(s + CHUNK, config.runs)) for s in range(0, config.runs, CHUNK)]
    threads = min(threads or default_threads(), len(chunks))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda c: _simulate_chunk(config, c), chunks))
    else:
        parts = [_simulate_chunk(config, c) for c in chunks]

    msd, loss, skill, skill_sq, true_sq = parts[0]
    msd, loss, skill, skill_sq = msd.copy(), loss.copy(), skill.copy(), skill_sq.copy()
    for p in parts[1:]:
        msd += p[0]
        loss += p[1]
        skill += p[2]
        skill_sq += p[3]
        true_sq += p[4]
    n = config.runs
    return EnsembleStats(
        k_grid=np.arange(config.K + 1),
        empirical_msd=msd / n,
        empirical_mean_loss=loss / n,
        empirical_mean_skill=(skill / n).T.copy(),
        empirical_skill_sq=(skill_sq / n).T.copy(),
        run_count=n,
        seed=config.seed,
        mean_true_sq_norm=float(true_sq / n),
    )


@dataclass
class CurveDeviation:
    name: str
    max_rel: float
    mean_rel: float
    exceed_k: np.ndarray  # k values where the relative deviation exceeds the tolerance
    rel: np.ndarray = field(repr=False, default=None)

    @property
    def exceed_range(self):
        if self.exceed_k.size == 0:
            return None
        return int(self.exceed_k.min()), int(self.exceed_k.max())


@dataclass
class ComparisonReport:
    tolerance: float
    k_min: int
    curves: dict

    def passed(self) -> bool:
        return all(c.exceed_k.size == 0 for c in self.curves.values())

    def as_dict(self) -> dict:
        out = {"tolerance": self.tolerance, "k_min": self.k_min, "curves": {}}
        for name, c in self.curves.items():
            out["curves"][name] = {
                "max_rel": c.max_rel,
                "mean_rel": c.mean_rel,
                "exceed_range": c.exceed_range,
                "exceed_count": int(c.exceed_k.size),
            }
        return out


def _deviation(name, emp, theo, ks, tol):
    rel = np.abs(emp - theo) / np.abs(theo)
    return CurveDeviation(name, float(rel.max()) if rel.size else 0.0,
                          float(rel.mean()) if rel.size else 0.0, ks[rel > tol], rel)


def compare_to_theory(stats: EnsembleStats, curves: TheoryCurves, tolerance: float = 0.1,
                      k_min: int = 0) -> ComparisonReport:
    """Relative deviation of the empirical MSD and mean loss from the model, for k >= k_min."""
    if stats.k_grid.shape != curves.k_grid.shape or np.any(stats.k_grid != curves.k_grid):
        raise ValueError("k grids of the ensemble and the theory curves differ")
    k = stats.k_grid
    sel = k >= k_min
    sel_loss = sel[:-1]
    return ComparisonReport(
        tolerance=tolerance,
        k_min=k_min,
        curves={
            "msd": _deviation("msd", stats.empirical_msd[sel], curves.msd[sel], k[sel], tolerance),
            "mean_loss": _deviation("mean_loss", stats.empirical_mean_loss[sel_loss],
                                    curves.mean_loss[:-1][sel_loss], k[:-1][sel_loss], tolerance),
        },
    )
