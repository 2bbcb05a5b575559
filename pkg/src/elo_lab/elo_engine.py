"""Elo stochastic-gradient recursion, its quadratic approximation, and batch ML fitting."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core_model import MatchRecord, log_loss, logistic, logistic_pdf
from .scheduling import Schedule


def _check_beta(beta):
    if not (math.isfinite(beta) and beta > 0):
        raise ValueError(f"step size must be > 0, got {beta!r}")


def _gain(theta, match: MatchRecord, eta):
    if match.outcome is None:
        raise ValueError("match has no outcome")
    match.check(theta.size)
    return match.outcome - float(logistic(theta[match.home] - theta[match.away] + eta))


def elo_update(theta, match: MatchRecord, beta: float, eta: float = 0.0) -> np.ndarray:
    """One Elo step: theta + beta * (y - sigma(x^T theta + eta)) * x. Returns a new array."""
    _check_beta(beta)
    theta = np.array(theta, dtype=float)
    g = beta * _gain(theta, match, eta)
    theta[match.home] += g
    theta[match.away] -= g
    return theta


def linearized_update(theta, theta_star, match: MatchRecord, beta: float,
                      eta: float = 0.0) -> np.ndarray:
    """One step of the recursion obtained from the quadratic expansion of the loss at theta_star.

    theta' = theta - beta * h * x x^T (theta - theta_star) + beta * g * x, with
    g = y - sigma(x^T theta_star + eta) and h = logistic_pdf(x^T theta_star + eta).
    """
    _check_beta(beta)
    theta = np.array(theta, dtype=float)
    theta_star = np.asarray(theta_star, dtype=float)
    if theta_star.shape != theta.shape:
        raise ValueError("theta and theta_star differ in length")
    i, j = match.home, match.away
    g = _gain(theta_star, match, eta)
    h = float(logistic_pdf(theta_star[i] - theta_star[j] + eta))
    err = (theta[i] - theta_star[i]) - (theta[j] - theta_star[j])
    step = beta * (g - h * err)
    theta[i] += step
    theta[j] -= step
    return theta


@dataclass
class RatingTrajectory:
    skills_by_step: np.ndarray  # (K + 1, M), row 0 is the initialisation
    per_step_loss: np.ndarray   # (K,), loss of game k under the skills before its update

    @property
    def final(self) -> np.ndarray:
        return self.skills_by_step[-1]


def _as_schedule(games, M) -> Schedule:
    if isinstance(games, Schedule):
        if games.M != M:
            raise ValueError(f"schedule has M={games.M} but theta0 has {M} entries")
        sched = games
    else:
        games = list(games)
        for g in games:
            g.check(M)
        sched = Schedule.from_matches(games, M) if games else Schedule(M, [], [], [])
    if sched.outcome is None:
        if len(sched):
            raise ValueError("games must carry outcomes")
        sched = sched.with_outcomes(np.zeros(0, dtype=np.int64))
    return sched


def run_rating(theta0, games, beta: float, eta: float = 0.0) -> RatingTrajectory:
    """Apply :func:`elo_update` game by game (predict, record loss, then update)."""
    _check_beta(beta)
    theta = np.array(theta0, dtype=float)
    M = theta.size
    sched = _as_schedule(games, M)
    K = len(sched)
    out = np.empty((K + 1, M))
    out[0] = theta
    losses = np.empty(K)
    for k in range(K):
        i, j, y = sched.home[k], sched.away[k], sched.outcome[k]
        z = theta[i] - theta[j] + eta
        losses[k] = log_loss(z, y)
        g = beta * (y - float(logistic(z)))
        theta[i] += g
        theta[j] -= g
        out[k + 1] = theta
    return RatingTrajectory(out, losses)


def run_linearized(theta0, theta_star, games, beta: float, eta: float = 0.0) -> RatingTrajectory:
    """Same bookkeeping as :func:`run_rating` but stepping with :func:`linearized_update`.

    The recorded loss is the actual log loss at the current skills.
    """
    _check_beta(beta)
    theta = np.array(theta0, dtype=float)
    M = theta.size
    sched = _as_schedule(games, M)
    out = np.empty((len(sched) + 1, M))
    out[0] = theta
    losses = np.empty(len(sched))
    for k, match in enumerate(sched):
        losses[k] = log_loss(theta[match.home] - theta[match.away] + eta, match.outcome)
        theta = linearized_update(theta, theta_star, match, beta, eta)
        out[k + 1] = theta
    return RatingTrajectory(out, losses)


def sample_variance(theta_hat) -> float:
    theta_hat = np.asarray(theta_hat, dtype=float)
    if theta_hat.size < 2:
        raise ValueError("need at least two skills")
    return float(np.var(theta_hat, ddof=1))


@dataclass(frozen=True)
class FitConfig:
    step: float = 0.005
    max_epochs: int = 2000
    tol: float = 1e-6
    fit_eta: bool = True
    eta: float = 0.0  # starting value, or the fixed value when fit_eta is False
    record_objective: bool = False


@dataclass
class EstimationResult:
    theta_hat: np.ndarray
    eta_hat: float
    v_hat: float
    epochs_used: int
    final_objective: float
    converged: bool
    objective_history: np.ndarray | None = None


def total_loss(schedule: Schedule, theta, eta: float) -> float:
    theta = np.asarray(theta, dtype=float)
    z = theta[schedule.home] - theta[schedule.away] + eta
    return float(log_loss(z, schedule.outcome).sum())


def fit_batch_ml(dataset, M: int, config: FitConfig = FitConfig()) -> EstimationResult:
    """Maximum-likelihood skills (and home advantage) by repeated SG passes over the data.

    Games are visited in data order every epoch. Fitting stops once no parameter
    moved by more than ``config.tol`` over a whole epoch, or after
    ``config.max_epochs`` epochs; in the latter case ``converged`` is False, which
    is the expected outcome for separable data (e.g. an unbeaten team).
    """
    sched = _as_schedule(dataset, M)
    if len(sched) == 0:
        raise ValueError("dataset is empty")
    played = np.zeros(M, dtype=bool)
    played[sched.home] = True
    played[sched.away] = True
    if not played.all():
        missing = np.flatnonzero(~played).tolist()
        raise ValueError(f"teams {missing} never play")
    _check_beta(config.step)

    games = list(zip(sched.home.tolist(), sched.away.tolist(), sched.outcome.tolist()))
    step = config.step
    fit_eta = config.fit_eta
    theta = [0.0] * M
    eta = float(config.eta)
    exp = math.exp
    history = []
    converged = False
    epochs = 0
    if config.record_objective:
        history.append(total_loss(sched, theta, eta))
    for epochs in range(1, config.max_epochs + 1):
        before = theta[:]
        eta_before = eta
        for i, j, y in games:
            z = theta[i] - theta[j] + eta
            if z >= 0:
                p = 1.0 / (1.0 + exp(-z))
            else:
                ez = exp(z)
                p = ez / (1.0 + ez)
            g = step * (y - p)
            theta[i] += g
            theta[j] -= g
            if fit_eta:
                eta += g
        if config.record_objective:
            history.append(total_loss(sched, theta, eta))
        change = max(abs(a - b) for a, b in zip(theta, before))
        change = max(change, abs(eta - eta_before))
        if change < config.tol:
            converged = True
            break

    theta_hat = np.array(theta)
    theta_hat -= theta_hat.mean()
    return EstimationResult(
        theta_hat=theta_hat,
        eta_hat=eta,
        v_hat=sample_variance(theta_hat),
        epochs_used=epochs,
        final_objective=total_loss(sched, theta_hat, eta),
        converged=converged,
        objective_history=np.array(history) if config.record_objective else None,
    )
