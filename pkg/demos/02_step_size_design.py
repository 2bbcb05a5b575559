"""Choosing the Elo step size for a horizon of k games.

Run with:  python demos/02_step_size_design.py
"""
# %%
import numpy as np

from elo_lab import (ScenarioParams, load_table1, optimal_beta_approx,
                     optimal_beta_naive_taylor, optimal_beta_numeric)

# %% closed-form approximation vs direct minimisation of the model MSD
for v in (0.1, 1.0, 10.0):
    sc = ScenarioParams(15, v)
    row = [f"{optimal_beta_approx(k, sc):.3f}/{optimal_beta_numeric(k, sc):.3f}" for k in (1, 10, 100, 400)]
    print(f"v={v:<4}", "  ".join(row))

# %% the plain second-order expansion in beta is far too conservative
sc = ScenarioParams(15, 3.0)
print("k=50 naive", round(optimal_beta_naive_taylor(50, sc), 4),
      "corrected", round(optimal_beta_approx(50, sc), 4),
      "numeric", round(optimal_beta_numeric(50, sc), 4))

# %% a quarter-season step size for each of ten published seasons
rows = load_table1()
betas = np.array([optimal_beta_approx(r.K / 4, r.scenario()) for r in rows])
for r, b in zip(rows, betas):
    print(r.season, r.M, r.K, f"{b:.3f}")
print("average", betas.mean().round(3))
