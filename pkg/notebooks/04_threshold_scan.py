# %% [markdown]
# # Loss threshold of the hybrid MBQC lattice
#
# Logical error rates for d = 3 and 5 over loss.  The threshold is the largest
# loss at which the larger code does significantly better.  Trial counts are
# kept small so this runs in about a minute.

# %%
import numpy as np

from hybridcat.montecarlo import estimate_threshold, fit_crossing

# %%
grid = list(np.round(np.linspace(2e-3, 6e-3, 9), 5))
est = estimate_threshold("HA", 2.93, grid, (3, 5), n_trials=50_000, seed=1, patience=None)
print("eta      p_L(3)     p_L(5)")
for pt in est.points:
    print(f"{pt.eta:.5f}  {pt.estimates[3].p_L:.3e}  {pt.estimates[5].p_L:.3e}")
print("ordering-rule threshold", est.eta_th)
x, s = fit_crossing(est)
print(f"fitted crossing {x:.5f} +- {s:.5f}")
