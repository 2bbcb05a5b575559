"""Checking the model against simulated seasons.

The model is built on a linearisation around the true skills, so it is most
trustworthy when skills are close together (small v). Compare the two leagues.
Run with:  python demos/03_simulation_check.py
"""
# %%
from elo_lab import (EnsembleConfig, ScenarioParams, compare_to_theory, run_ensemble,
                     theory_trajectory)

for v in (0.1, 3.0):
    sc = ScenarioParams(15, v)
    beta, K = 0.2, 400
    stats = run_ensemble(EnsembleConfig(sc, beta, K, runs=500, seed=1))
    rep = compare_to_theory(stats, theory_trajectory(beta, sc, K), tolerance=0.1)
    msd, loss = rep.curves["msd"], rep.curves["mean_loss"]
    print(f"v={v}: MSD max dev {msd.max_rel:.1%}, loss max dev {loss.max_rel:.1%}")
    for k in (0, 100, 400):
        print(f"   k={k:3d} simulated {stats.empirical_msd[k]:7.3f}  model "
              f"{theory_trajectory(beta, sc, K).msd[k]:7.3f}")

# %% the same, through the command line:
#   elo-lab simulate --M 15 --v 3 --beta 0.2 --K 400 --runs 500 --out sim/
