"""Closed-form stochastic model of Elo rating convergence.

Everything here is a deterministic function of the scenario (M, v, eta) and the
step size beta. Expectations over the Gaussian true-skill prior use the
Laplace closed forms below; numerical quadrature is only used in the tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core_model import ScenarioParams, logistic_pdf

LN2 = math.log(2.0)


class StabilityError(ValueError):
    """The step size is outside the region where the mean-square recursion converges."""


@dataclass(frozen=True)
class LaplaceIdentity:
    """Value at zero and curvature width ``-f(0)/f''(0)`` of a bell-shaped integrand."""

    f_at_zero: float
    v_f: float

    def __post_init__(self):
        if not (self.f_at_zero > 0 and self.v_f > 0):
            raise ValueError("f_at_zero and v_f must both be positive")


LOGISTIC_PDF = LaplaceIdentity(0.25, 2.0)
LOGISTIC_PDF_SQUARED = LaplaceIdentity(1.0 / 16.0, 1.0)
BINARY_ENTROPY = LaplaceIdentity(LN2, 4.0 * LN2)


def _check_v(v):
    if not (math.isfinite(v) and v >= 0):
        raise ValueError(f"v must be finite and >= 0, got {v!r}")


def laplace_expectation(identity: LaplaceIdentity, eta: float, v: float) -> float:
    """Approximate E[f(z)] for z ~ N(eta, 2v)."""
    _check_v(v)
    width = 2.0 * v + identity.v_f
    return identity.f_at_zero * math.sqrt(identity.v_f / width) * math.exp(-eta * eta / (2.0 * width))


def h_bar(v: float, eta: float = 0.0) -> float:
    """Mean curvature of the per-game loss at the true skills."""
    _check_v(v)
    return 0.25 / math.sqrt(v + 1.0) * math.exp(-eta * eta / (4.0 * (v + 1.0)))


def h2_bar(v: float, eta: float = 0.0) -> float:
    """Mean squared curvature of the per-game loss at the true skills."""
    _check_v(v)
    return math.sqrt(1.0 / (2.0 * v + 1.0)) / 16.0 * math.exp(-eta * eta / (2.0 * (2.0 * v + 1.0)))


def ell_min(v: float, eta: float = 0.0) -> float:
    """Mean loss attained by the true skills, a floor for any rating."""
    _check_v(v)
    return LN2 * math.sqrt(2.0 * LN2 / (v + 2.0 * LN2)) * math.exp(-eta * eta / (4.0 * v + 8.0 * LN2))


def v_threshold() -> float:
    """Skill variance where the small-v and large-v asymptotes of ell_min cross."""
    return 2.0 * LN2


def ell_min_large_v_asymptote(v: float) -> float:
    return LN2 * math.sqrt(2.0 * LN2 / v)


@dataclass(frozen=True)
class ConvergenceRates:
    alpha1: float
    alpha2: float
    tau1: float         # (M-1) / (2 beta h_bar)
    tau2: float         # (M-1) / (4 beta (h_bar - beta h2_bar)), inf when not positive
    tau1_exact: float   # -1/ln(alpha1), nan unless 0 < alpha1 < 1
    tau2_exact: float
    stable: bool        # both alphas inside (-1, 1)


def _exact_tau(alpha):
    return -1.0 / math.log(alpha) if 0.0 < alpha < 1.0 else math.nan


def _check_beta(beta):
    if not (math.isfinite(beta) and beta > 0):
        raise ValueError(f"step size must be > 0, got {beta!r}")


def convergence_rates(beta: float, scenario: ScenarioParams) -> ConvergenceRates:
    _check_beta(beta)
    M = scenario.M
    h = h_bar(scenario.v, scenario.eta)
    h2 = h2_bar(scenario.v, scenario.eta)
    alpha1 = 1.0 - 2.0 * beta * h / (M - 1)
    alpha2 = 1.0 - 4.0 / (M - 1) * beta * (h - beta * h2)
    tau1 = (M - 1) / (2.0 * beta * h)
    denom = 4.0 * beta * (h - beta * h2)
    tau2 = (M - 1) / denom if denom > 0 else math.inf
    return ConvergenceRates(
        alpha1=alpha1,
        alpha2=alpha2,
        tau1=tau1,
        tau2=tau2,
        tau1_exact=_exact_tau(alpha1),
        tau2_exact=_exact_tau(alpha2),
        stable=abs(alpha1) < 1.0 and abs(alpha2) < 1.0,
    )


def games_to_convergence(beta: float, scenario: ScenarioParams, multiple: float = 3.0) -> float:
    """Number of games for the mean skill error to decay by exp(-multiple)."""
    if not multiple > 0:
        raise ValueError("multiple must be positive")
    rates = convergence_rates(beta, scenario)
    if not 0.0 < rates.alpha1 < 1.0:
        raise StabilityError(
            f"alpha1 = {rates.alpha1:.6g} is not in (0, 1); beta = {beta} is too large "
            f"for M={scenario.M}, v={scenario.v}, eta={scenario.eta}"
        )
    return multiple * rates.tau1


def stability_limit(scenario: ScenarioParams) -> float:
    """Largest step size keeping h_bar - beta * h2_bar positive."""
    return h_bar(scenario.v, scenario.eta) / h2_bar(scenario.v, scenario.eta)


def _check_stable(beta, scenario):
    _check_beta(beta)
    limit = stability_limit(scenario)
    if beta >= limit:
        raise StabilityError(
            f"beta = {beta} is at or above the stability limit h_bar/h2_bar = {limit:.6g} "
            f"(M={scenario.M}, v={scenario.v}, eta={scenario.eta}); the steady-state MSD diverges"
        )


def msd_initial(scenario: ScenarioParams) -> float:
    return scenario.M * scenario.v


def msd_steady_state(beta: float, scenario: ScenarioParams) -> float:
    _check_stable(beta, scenario)
    h = h_bar(scenario.v, scenario.eta)
    h2 = h2_bar(scenario.v, scenario.eta)
    return beta * h * (scenario.M - 1) / (2.0 * (h - beta * h2))


def msd_at(k, beta, scenario: ScenarioParams):
    """Mean-square deviation after ``k`` games; vectorised over ``k`` or ``beta`` (not both)."""
    M, v, eta = scenario.M, scenario.v, scenario.eta
    h = h_bar(v, eta)
    h2 = h2_bar(v, eta)
    beta = np.asarray(beta, dtype=float)
    alpha2 = 1.0 - 4.0 / (M - 1) * beta * (h - beta * h2)
    d_inf = beta * h * (M - 1) / (2.0 * (h - beta * h2))
    d0 = M * v
    out = np.power(alpha2, np.asarray(k, dtype=float)) * (d0 - d_inf) + d_inf
    return out[()] if np.ndim(out) == 0 else out


@dataclass
class TheoryCurves:
    k_grid: np.ndarray
    mean_skill_factor: np.ndarray  # 1 - alpha1**k
    msd: np.ndarray
    bias_sq: np.ndarray
    total_variance: np.ndarray
    excess_loss: np.ndarray
    mean_loss: np.ndarray
    d0: float
    d_inf: float
    ell_min: float

    def as_columns(self) -> dict:
        return {
            "k": self.k_grid,
            "mean_skill_factor": self.mean_skill_factor,
            "msd": self.msd,
            "bias_sq": self.bias_sq,
            "total_variance": self.total_variance,
            "excess_loss": self.excess_loss,
            "mean_loss": self.mean_loss,
        }


def theory_trajectory(beta: float, scenario: ScenarioParams, K: int) -> TheoryCurves:
    """All model curves over games k = 0..K."""
    if int(K) != K or K < 0:
        raise ValueError(f"K must be a non-negative integer, got {K!r}")
    _check_stable(beta, scenario)
    M, v, eta = scenario.M, scenario.v, scenario.eta
    rates = convergence_rates(beta, scenario)
    h = h_bar(v, eta)
    k = np.arange(K + 1)
    d0 = msd_initial(scenario)
    d_inf = msd_steady_state(beta, scenario)
    a1k = rates.alpha1 ** k
    a2k = rates.alpha2 ** k
    msd = a2k * (d0 - d_inf) + d_inf
    bias = a1k * a1k * d0
    # written as msd - bias so the decomposition is exact in floating point
    variance = msd - bias
    lmin = ell_min(v, eta)
    excess = h / (M - 1) * msd
    return TheoryCurves(
        k_grid=k,
        mean_skill_factor=1.0 - a1k,
        msd=msd,
        bias_sq=bias,
        total_variance=variance,
        excess_loss=excess,
        mean_loss=lmin + excess,
        d0=d0,
        d_inf=d_inf,
        ell_min=lmin,
    )


def total_variance_closed_form(k, beta, scenario: ScenarioParams):
    """(alpha2^k - alpha1^(2k)) d0 + (1 - alpha2^k) d_inf, the textbook form."""
    rates = convergence_rates(beta, scenario)
    k = np.asarray(k, dtype=float)
    d0 = msd_initial(scenario)
    d_inf = msd_steady_state(beta, scenario)
    a2k = rates.alpha2 ** k
    return (a2k - rates.alpha1 ** (2 * k)) * d0 + (1.0 - a2k) * d_inf


def _curvature_ratio(scenario):
    return h2_bar(scenario.v, scenario.eta) / h_bar(scenario.v, scenario.eta)


def _variance_term(scenario):
    if not scenario.v > 0:
        raise ValueError("v must be > 0 for step-size design formulas")
    return (1.0 - 1.0 / scenario.M) / (2.0 * scenario.v)


def improvement_upper_bound(scenario: ScenarioParams) -> float:
    """Largest beta for which the steady-state MSD stays below its initial value M v."""
    return 1.0 / (_variance_term(scenario) + _curvature_ratio(scenario))


def small_v_rule_of_thumb(v: float) -> float:
    return 2.0 * v


def _check_k(k):
    if not (math.isfinite(k) and k >= 1):
        raise ValueError(f"k must be >= 1, got {k!r}")


def optimal_beta_approx(k: float, scenario: ScenarioParams) -> float:
    """Approximate minimiser of the MSD after k games (h2_bar in the k-dependent term).

    k may be fractional, e.g. a quarter of a season.
    """
    _check_k(k)
    base = _variance_term(scenario) + _curvature_ratio(scenario)
    k_term = 2.0 * h2_bar(scenario.v, scenario.eta) * (k - 1) / (scenario.M - 1)
    return 0.5 / (base + k_term)


def optimal_beta_naive_taylor(k: float, scenario: ScenarioParams) -> float:
    """Second-order Taylor minimiser in beta around 0; uses h_bar in the k-dependent term."""
    _check_k(k)
    base = _variance_term(scenario) + _curvature_ratio(scenario)
    k_term = 2.0 * h_bar(scenario.v, scenario.eta) * (k - 1) / (scenario.M - 1)
    return 0.5 / (base + k_term)


def optimal_beta_exact_k1(scenario: ScenarioParams) -> float:
    """Exact minimiser of the MSD after a single game."""
    return 0.5 / (_variance_term(scenario) + _curvature_ratio(scenario))


_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_minimize(f, lo: float, hi: float, xtol: float = 1e-9, max_iter: int = 500):
    """Minimise a unimodal ``f`` on [lo, hi] until the bracket is narrower than ``xtol``.

    Returns (x_min, f_min, iterations).
    """
    if not lo < hi:
        raise ValueError(f"empty bracket [{lo}, {hi}]")
    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    it = 0
    while b - a > xtol and it < max_iter:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
        it += 1
    x = 0.5 * (a + b)
    return x, f(x), it


class NumericalError(RuntimeError):
    pass


def optimal_beta_numeric(k: float, scenario: ScenarioParams, rtol: float = 1e-8) -> float:
    """Step size minimising the model MSD after k games, by golden-section search on log(beta)."""
    _check_k(k)
    if not scenario.v > 0:
        raise ValueError("v must be > 0 for step-size design formulas")
    lo = math.log(1e-6)
    hi = math.log(0.999 * stability_limit(scenario))
    if not hi > lo:
        raise NumericalError(f"search bracket collapsed: [{math.exp(lo)}, {math.exp(hi)}]")

    def objective(log_beta):
        return float(msd_at(k, math.exp(log_beta), scenario))

    # an absolute width in log(beta) is a relative width in beta
    x, _, it = golden_section_minimize(objective, lo, hi, xtol=rtol)
    if it == 0:
        raise NumericalError("golden-section search did not iterate")
    if not math.isfinite(x):
        raise NumericalError("golden-section search returned a non-finite point")
    return math.exp(x)


def fisher_information(theta_star, eta: float = 0.0) -> np.ndarray:
    """Expected per-game Hessian of the loss at ``theta_star`` under uniform scheduling."""
    theta_star = np.asarray(theta_star, dtype=float)
    M = theta_star.size
    if M < 2:
        raise ValueError("need at least two teams")
    diff = theta_star[:, None] - theta_star[None, :]
    Hp = (logistic_pdf(diff + eta) + logistic_pdf(-diff + eta)) / (M * (M - 1))
    np.fill_diagonal(Hp, 0.0)
    return np.diag(Hp.sum(axis=1)) - Hp
