"""How fast do Elo ratings settle, and where do they settle?

Closed-form model for a 15-team league with skill variance 3.
Run with:  python demos/01_convergence_model.py
"""
# %%
from elo_lab import (ScenarioParams, convergence_rates, improvement_upper_bound,
                     stability_limit, theory_trajectory)

league = ScenarioParams(M=15, v=3.0, eta=0.0)

# %% time constants shrink as the step grows, until the variance term takes over
for beta in (0.05, 0.1, 0.5, 1.0, 2.0):
    r = convergence_rates(beta, league)
    print(f"beta={beta:<5} tau1={r.tau1:8.1f} tau2={r.tau2:8.1f}")

# %% MSD over one double round-robin (210 games)
curves = theory_trajectory(0.87, league, 210)
for k in (0, 30, 60, 105, 210):
    print(f"k={k:3d} msd={curves.msd[k]:6.2f} bias^2={curves.bias_sq[k]:6.2f} "
          f"variance={curves.total_variance[k]:5.2f} loss={curves.mean_loss[k]:.4f}")
print("steady state:", round(curves.d_inf, 3), "  initial:", curves.d0)

# %% steps above this bound end up worse than never rating at all
print("improvement bound:", round(improvement_upper_bound(league), 4))
print("stability limit:  ", round(stability_limit(league), 4))
