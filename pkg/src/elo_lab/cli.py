"""Command-line entry point: ``elo-lab {theory,simulate,estimate,tune,reproduce}``.

Exit codes: 0 success, 2 usage or validation error, 1 runtime/numerical failure.
Every command that writes files also writes ``manifest.json`` listing the
resolved parameters and a SHA-256 of every output file.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .core_model import ScenarioParams
from .data_io import (
    ParseError,
    format_summary_table,
    load_table1,
    read_season_csv,
    summarize_season,
    write_curves,
)
from .elo_engine import FitConfig
from .montecarlo import EnsembleConfig, compare_to_theory, run_ensemble
from .theory import (
    NumericalError,
    StabilityError,
    convergence_rates,
    ell_min,
    h2_bar,
    h_bar,
    improvement_upper_bound,
    small_v_rule_of_thumb,
    theory_trajectory,
    v_threshold,
)
from . import reproduce as repro

TUNE_METHODS = ("approx", "numeric", "naive", "k1")


class UsageError(ValueError):
    pass


def _int(text):
    x = float(text)
    if not math.isfinite(x) or x != int(x):
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    return int(x)


def _positive(text):
    x = float(text)
    if not (math.isfinite(x) and x > 0):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return x


def _nonneg(text):
    x = float(text)
    if not (math.isfinite(x) and x >= 0):
        raise argparse.ArgumentTypeError(f"expected a non-negative number, got {text!r}")
    return x


def _add_scenario(p):
    p.add_argument("--M", type=_int, required=True, help="number of teams")
    p.add_argument("--v", type=_nonneg, required=True, help="true-skill variance")
    p.add_argument("--eta", type=float, default=0.0, help="home-field advantage (logit units)")


def _scenario(args) -> ScenarioParams:
    return ScenarioParams(args.M, args.v, args.eta)


def write_manifest(out_dir: Path, command: str, params: dict, files: list, seed=None) -> Path:
    entries = []
    for f in files:
        f = Path(f)
        entries.append({"path": f.name, "sha256": hashlib.sha256(f.read_bytes()).hexdigest()})
    manifest = {
        "command": command,
        "parameters": params,
        "seed": seed,
        "tool_version": __version__,
        "files": entries,
    }
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def _scalar_block(beta, scenario, K=None):
    rates = convergence_rates(beta, scenario)
    curves = theory_trajectory(beta, scenario, K or 0)
    out = {
        "h_bar": h_bar(scenario.v, scenario.eta),
        "h2_bar": h2_bar(scenario.v, scenario.eta),
        "ell_min": ell_min(scenario.v, scenario.eta),
        "alpha1": rates.alpha1,
        "alpha2": rates.alpha2,
        "tau1": rates.tau1,
        "tau2": rates.tau2,
        "tau1_exact": rates.tau1_exact,
        "tau2_exact": rates.tau2_exact,
        "d0": curves.d0,
        "d_inf": curves.d_inf,
        "v_th": v_threshold(),
    }
    if scenario.v > 0:
        out["improvement_bound"] = improvement_upper_bound(scenario)
        out["small_v_rule"] = small_v_rule_of_thumb(scenario.v)
    else:
        out["improvement_bound"] = None
        out["small_v_rule"] = 0.0
    return out


def _fmt_scalars(block):
    return "\n".join(f"{k} = {'n/a' if v is None else format(v, '.9g')}" for k, v in block.items())


def cmd_theory(args) -> int:
    scenario = _scenario(args)
    curves = theory_trajectory(args.beta, scenario, args.K)
    scalars = _scalar_block(args.beta, scenario, args.K)
    print(_fmt_scalars(scalars))
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        files = [
            write_curves(out / f"theory_curves.{args.format}", curves.as_columns()),
            out / "scalars.json",
        ]
        files[1].write_text(json.dumps(scalars, indent=2) + "\n", encoding="utf-8")
        write_manifest(out, "theory", vars_clean(args), files)
    return 0


def cmd_simulate(args) -> int:
    scenario = _scenario(args)
    curves = theory_trajectory(args.beta, scenario, args.K)
    cfg = EnsembleConfig(scenario, args.beta, args.K, args.runs, args.seed,
                         args.scheduler, args.engine)
    stats = run_ensemble(cfg, threads=args.threads)
    report = compare_to_theory(stats, curves, args.tolerance, args.k_min)
    summary = report.as_dict()
    for name, c in summary["curves"].items():
        rng = c["exceed_range"]
        print(f"{name}: max_rel={c['max_rel']:.4g} mean_rel={c['mean_rel']:.4g} "
              f"exceeds {args.tolerance:g} at {c['exceed_count']} k values"
              + (f" (k in [{rng[0]}, {rng[1]}])" if rng else ""))
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        loss_emp = np.append(stats.empirical_mean_loss, np.nan)
        cols = {
            "k": stats.k_grid,
            "empirical_msd": stats.empirical_msd,
            "theory_msd": curves.msd,
            "empirical_mean_loss": loss_emp,
            "theory_mean_loss": curves.mean_loss,
        }
        f1 = write_curves(out / f"simulate_curves.{args.format}", cols)
        f2 = out / "report.json"
        f2.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        write_manifest(out, "simulate", vars_clean(args), [f1, f2], seed=args.seed)
    return 0


def cmd_estimate(args) -> int:
    datasets = read_season_csv(args.input)
    cfg = FitConfig(step=args.step, max_epochs=args.max_epochs, tol=args.tol)
    summaries = [summarize_season(ds, cfg) for ds in datasets]
    table = format_summary_table(summaries)
    sys.stdout.write(table)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        rows = sorted(summaries, key=lambda s: s.season_id)
        lines = ["season,M,K,eta_hat,v_hat,converged"]
        lines += [f"{s.season_id},{s.M},{s.K},{s.eta_hat:.9g},{s.v_hat:.9g},{int(s.converged)}" for s in rows]
        f1 = out / "summary.csv"
        f1.write_text("\n".join(lines) + "\n", encoding="utf-8")
        f2 = out / "summary.txt"
        f2.write_text(table, encoding="utf-8")
        write_manifest(out, "estimate", vars_clean(args), [f1, f2])
    return 0


def cmd_tune(args) -> int:
    if args.table1:
        rows = load_table1()
        betas, bounds = [], []
        for r in rows:
            k = args.k_fraction * r.K if args.k is None else args.k
            b = repro.tuned_beta(args.method, k, r.scenario())
            betas.append(b)
            bounds.append(improvement_upper_bound(r.scenario()))
            print(f"{r.season}: k={k:g} beta={b:.6g} bound={bounds[-1]:.6g}")
        print(f"mean beta = {np.mean(betas):.6g}")
        print(f"mean bound = {np.mean(bounds):.6g}")
        return 0
    if args.M is None or args.v is None or args.k is None:
        raise UsageError("--M, --v and --k are required unless --table1 is given")
    scenario = ScenarioParams(args.M, args.v, args.eta)
    beta = repro.tuned_beta(args.method, args.k, scenario)
    print(f"beta = {beta:.6g}")
    print(f"bound = {improvement_upper_bound(scenario):.6g}")
    return 0


def cmd_reproduce(args) -> int:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    data = read_season_csv(args.data) if args.data else None
    files, params = repro.TARGETS[args.target](out, seed=args.seed, data=data,
                                              threads=args.threads)
    params = {"target": args.target, "seed": args.seed,
              "data": str(args.data) if args.data else None, **params}
    write_manifest(out, f"reproduce {args.target}", params, files, seed=args.seed)
    for f in files:
        print(Path(f).name)
    return 0


def vars_clean(args) -> dict:
    return {k: v for k, v in vars(args).items() if k != "func"}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="elo-lab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("theory", help="closed-form model curves and scalars")
    _add_scenario(t)
    t.add_argument("--beta", type=_positive, required=True)
    t.add_argument("--K", type=_int, required=True)
    t.add_argument("--out", help="output directory")
    t.add_argument("--format", choices=("csv", "json"), default="csv")
    t.set_defaults(func=cmd_theory)

    s = sub.add_parser("simulate", help="Monte-Carlo ensemble against the model")
    _add_scenario(s)
    s.add_argument("--beta", type=_positive, required=True)
    s.add_argument("--K", type=_int, required=True)
    s.add_argument("--runs", type=_int, default=1000)
    s.add_argument("--seed", type=_int, default=0)
    s.add_argument("--scheduler", choices=("uniform", "double-round-robin"), default="uniform")
    s.add_argument("--engine", choices=("exact", "linearized"), default="exact")
    s.add_argument("--tolerance", type=_positive, default=0.1)
    s.add_argument("--k-min", type=_int, default=0)
    s.add_argument("--threads", type=_int, default=None)
    s.add_argument("--out", help="output directory")
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.set_defaults(func=cmd_simulate)

    e = sub.add_parser("estimate", help="per-season eta_hat and v_hat from a results CSV")
    e.add_argument("--input", required=True)
    e.add_argument("--step", type=_positive, default=FitConfig.step)
    e.add_argument("--max-epochs", type=_int, default=FitConfig.max_epochs)
    e.add_argument("--tol", type=_positive, default=FitConfig.tol)
    e.add_argument("--out", help="output directory")
    e.set_defaults(func=cmd_estimate)

    u = sub.add_parser("tune", help="step-size design")
    u.add_argument("--M", type=_int)
    u.add_argument("--v", type=_positive)
    u.add_argument("--eta", type=float, default=0.0)
    u.add_argument("--k", type=_positive)
    u.add_argument("--method", choices=TUNE_METHODS, default="approx")
    u.add_argument("--table1", action="store_true",
                   help="sweep the bundled ten-season summary table")
    u.add_argument("--k-fraction", type=_positive, default=0.25,
                   help="with --table1 and no --k, use k = fraction * K per season")
    u.set_defaults(func=cmd_tune)

    r = sub.add_parser("reproduce", help="emit the data behind a figure")
    r.add_argument("target", choices=sorted(repro.TARGETS))
    r.add_argument("--seed", type=_int, default=42)
    r.add_argument("--out-dir", required=True)
    r.add_argument("--data", help="season CSV to use instead of synthetic seasons")
    r.add_argument("--threads", type=_int, default=None)
    r.set_defaults(func=cmd_reproduce)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, StabilityError, ParseError, ValueError) as exc:
        print(f"elo-lab {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, ArithmeticError, RuntimeError) as exc:
        print(f"elo-lab {args.command}: failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
