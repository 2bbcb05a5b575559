"""Figure-data emitters behind ``elo-lab reproduce``.

Each target takes ``(out_dir, seed, data, threads)`` and returns the list of
files it wrote plus a dict of resolved parameters for the manifest. Example
targets run on synthetic seasons drawn at the bundled per-season parameters unless
``data`` (parsed seasons) is supplied. With real data the fitted skills stand in
for the unknown true skills.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .core_model import ScenarioParams
from .data_io import (
    cross_season_average,
    generate_synthetic_season,
    load_table1,
    tail_mean,
    write_curves,
)
from .elo_engine import FitConfig, fit_batch_ml, run_rating
from .theory import (
    convergence_rates,
    h_bar,
    ell_min,
    ell_min_large_v_asymptote,
    improvement_upper_bound,
    msd_at,
    optimal_beta_approx,
    optimal_beta_exact_k1,
    optimal_beta_naive_taylor,
    optimal_beta_numeric,
    small_v_rule_of_thumb,
    stability_limit,
    theory_trajectory,
    v_threshold,
)

EXAMPLE1_BETAS = (0.1, 0.87, 2.49)
EXAMPLE3_SEASONS = ("2009", "2015", "2017", "2018")
REFERENCE = ScenarioParams(15, 3.0, 0.0)


def tuned_beta(method: str, k: float, scenario: ScenarioParams) -> float:
    if method == "approx":
        return optimal_beta_approx(k, scenario)
    if method == "numeric":
        return optimal_beta_numeric(k, scenario)
    if method == "naive":
        return optimal_beta_naive_taylor(k, scenario)
    if method == "k1":
        return optimal_beta_exact_k1(scenario)
    raise ValueError(f"unknown method {method!r}")


def _json(path: Path, obj) -> Path:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def time_constants(out, seed=None, data=None, threads=None):
    sc = REFERENCE
    betas = np.logspace(-2, math.log10(0.99 * stability_limit(sc)), 200)
    rates = [convergence_rates(b, sc) for b in betas]
    f = write_curves(out / "time_constants.csv", {
        "beta": betas,
        "tau1": [r.tau1 for r in rates],
        "tau2": [r.tau2 for r in rates],
        "tau1_exact": [r.tau1_exact for r in rates],
        "tau2_exact": [r.tau2_exact for r in rates],
    })
    return [f], {"M": sc.M, "v": sc.v, "eta": sc.eta}


def loss_min(out, seed=None, data=None, threads=None):
    v = np.logspace(-2, 2, 201)
    cols = {"v": v}
    etas = (0.0, 0.5, 1.0)
    for eta in etas:
        cols[f"ell_min_eta{eta:g}"] = [ell_min(x, eta) for x in v]
        cols[f"small_v_asymptote_eta{eta:g}"] = np.full(v.size, ell_min(0.0, eta))
    cols["large_v_asymptote"] = [ell_min_large_v_asymptote(x) for x in v]
    f1 = write_curves(out / "loss_min.csv", cols)
    f2 = _json(out / "loss_min_markers.json", {"v_th": v_threshold()})
    return [f1, f2], {"etas": list(etas), "v_range": [1e-2, 1e2]}


def excess_loss(out, seed=None, data=None, threads=None):
    sc = REFERENCE
    betas = np.logspace(-2, math.log10(0.99 * stability_limit(sc)), 200)
    cols = {"beta": betas}
    ks = (50, 100, 200)
    h = h_bar(sc.v, sc.eta)
    for k in ks:
        cols[f"excess_k{k}"] = h / (sc.M - 1) * msd_at(k, betas, sc)
    cols["excess_steady"] = [h / (sc.M - 1) * msd_at(math.inf, b, sc) for b in betas]
    f = write_curves(out / "excess_loss.csv", cols)
    return [f], {"M": sc.M, "v": sc.v, "eta": sc.eta, "k": list(ks) + ["inf"]}


def improvement(out, seed=None, data=None, threads=None):
    v = np.logspace(-2, 2, 201)
    cols = {"v": v}
    etas = (0.0, 0.5, 1.0)
    for eta in etas:
        cols[f"bound_eta{eta:g}"] = [improvement_upper_bound(ScenarioParams(15, x, eta)) for x in v]
    cols["small_v_rule"] = [small_v_rule_of_thumb(x) for x in v]
    f = write_curves(out / "improvement.csv", cols)
    return [f], {"M": 15, "etas": list(etas)}


def optimal_beta(out, seed=None, data=None, threads=None):
    ks = np.unique(np.round(np.logspace(0, math.log10(400), 60))).astype(int)
    cols = {"k": ks}
    vs = (0.1, 0.5, 1.0, 3.0, 10.0)
    for v in vs:
        sc = ScenarioParams(15, v, 0.0)
        cols[f"approx_v{v:g}"] = [optimal_beta_approx(k, sc) for k in ks]
        cols[f"numeric_v{v:g}"] = [optimal_beta_numeric(k, sc) for k in ks]
    f = write_curves(out / "optimal_beta.csv", cols)
    return [f], {"M": 15, "eta": 0.0, "v": list(vs)}


def appendix_b(out, seed=None, data=None, threads=None):
    sc = REFERENCE
    ks = np.arange(1, 201)
    naive = np.array([optimal_beta_naive_taylor(k, sc) for k in ks])
    approx = np.array([optimal_beta_approx(k, sc) for k in ks])
    numeric = np.array([optimal_beta_numeric(k, sc) for k in ks])
    f1 = write_curves(out / "appendix_b.csv", {
        "k": ks, "naive": naive, "corrected": approx, "numeric": numeric,
        "naive_rel_dev": np.abs(naive - numeric) / numeric,
        "corrected_rel_dev": np.abs(approx - numeric) / numeric,
    })
    f2 = _json(out / "appendix_b_markers.json", {"exact_k1": optimal_beta_exact_k1(sc)})
    return [f1, f2], {"M": sc.M, "v": sc.v, "eta": sc.eta}


# -- example targets ---------------------------------------------------------

def _seasons(seed, data):
    """(season_id, dataset, scenario, reference skills) for every season."""
    out = []
    if data is None:
        for idx, row in enumerate(load_table1()):
            ds = generate_synthetic_season(row.scenario(), row.season, seed=[seed, idx])
            out.append((row.season, ds, row.scenario(), ds.true_skills))
    else:
        for ds in data:
            fit = fit_batch_ml(ds.schedule, ds.M, FitConfig())
            sc = ScenarioParams(ds.M, fit.v_hat, fit.eta_hat)
            out.append((ds.season_id, ds, sc, fit.theta_hat))
    return out


def _season_curves(ds, sc, ref, beta):
    traj = run_rating(np.zeros(ds.M), ds.schedule, beta, sc.eta)
    msd = ((traj.skills_by_step - ref) ** 2).sum(axis=1)
    theory = theory_trajectory(beta, sc, ds.K)
    return traj, msd, theory


def _source(data):
    return "user data" if data is not None else "synthetic seasons at bundled per-season parameters"


def example1(out, seed=42, data=None, threads=None):
    seasons = _seasons(seed, data)
    msd_cols, loss_cols = {}, {}
    n = min(ds.K for _, ds, _, _ in seasons)
    for beta in EXAMPLE1_BETAS:
        emp_msd, th_msd, emp_loss, th_loss = [], [], [], []
        for _, ds, sc, ref in seasons:
            traj, msd, theory = _season_curves(ds, sc, ref, beta)
            emp_msd.append(msd)
            th_msd.append(theory.msd)
            emp_loss.append(traj.per_step_loss)
            th_loss.append(theory.mean_loss[:-1])
        msd_cols[f"empirical_beta{beta:g}"] = cross_season_average(emp_msd)
        msd_cols[f"theory_beta{beta:g}"] = cross_season_average(th_msd)
        loss_cols[f"empirical_beta{beta:g}"] = cross_season_average(emp_loss)
        loss_cols[f"theory_beta{beta:g}"] = cross_season_average(th_loss)
    f1 = write_curves(out / "example1_msd.csv", {"k": np.arange(n + 1), **msd_cols})
    f2 = write_curves(out / "example1_loss.csv", {"k": np.arange(n), **loss_cols})
    return [f1, f2], {"betas": list(EXAMPLE1_BETAS), "truncated_K": n,
                      "seasons": [s[0] for s in seasons], "source": _source(data)}


def example2(out, seed=42, data=None, threads=None):
    seasons = _seasons(seed, data)
    limit = min(stability_limit(sc) for _, _, sc, _ in seasons)
    betas = np.logspace(-2, math.log10(min(4.0, 0.99 * limit)), 40)
    cols = {k: [] for k in ("beta", "empirical_msd", "theory_msd", "empirical_loss", "theory_loss")}
    for beta in betas:
        runs = [_season_curves(ds, sc, ref, beta) for _, ds, sc, ref in seasons]
        cols["beta"].append(beta)
        cols["empirical_msd"].append(tail_mean(cross_season_average([r[1] for r in runs])))
        cols["theory_msd"].append(tail_mean(cross_season_average([r[2].msd for r in runs])))
        cols["empirical_loss"].append(tail_mean(cross_season_average([r[0].per_step_loss for r in runs])))
        cols["theory_loss"].append(tail_mean(cross_season_average([r[2].mean_loss[:-1] for r in runs])))
    f1 = write_curves(out / "example2_sweep.csv", cols)
    markers = {
        "mean_improvement_bound": float(np.mean([improvement_upper_bound(sc) for _, _, sc, _ in seasons])),
        "mean_optimal_beta_quarter_season": float(np.mean(
            [optimal_beta_approx(ds.K / 4, sc) for _, ds, sc, _ in seasons])),
    }
    f2 = _json(out / "example2_markers.json", markers)
    return [f1, f2], {"beta_range": [float(betas[0]), float(betas[-1])], "tail_points": 10,
                      "seasons": [s[0] for s in seasons], "source": _source(data)}


def example3(out, seed=42, data=None, threads=None):
    seasons = _seasons(seed, data)
    if data is None:
        seasons = [s for s in seasons if s[0] in EXAMPLE3_SEASONS]
    files, betas = [], {}
    for sid, ds, sc, ref in seasons:
        beta = optimal_beta_approx(ds.K / 4, sc)
        betas[sid] = beta
        traj, msd, theory = _season_curves(ds, sc, ref, beta)
        # four teams spread across the skill range
        order = np.argsort(ref)
        picks = order[np.linspace(0, ds.M - 1, 4).round().astype(int)]
        cols = {"k": theory.k_grid, "empirical_msd": msd, "theory_msd": theory.msd}
        for m in picks:
            name = ds.team_names[m]
            cols[f"{name}_rating"] = traj.skills_by_step[:, m]
            cols[f"{name}_theory_mean"] = theory.mean_skill_factor * ref[m]
        files.append(write_curves(out / f"example3_{sid}.csv", cols))
    return files, {"beta_per_season": betas, "k_for_beta": "K/4", "source": _source(data)}


TARGETS = {
    "time-constants": time_constants,
    "loss-min": loss_min,
    "excess-loss": excess_loss,
    "improvement": improvement,
    "optimal-beta": optimal_beta,
    "appendix-b": appendix_b,
    "example1": example1,
    "example2": example2,
    "example3": example3,
}
