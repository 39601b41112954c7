# %% [markdown]
# # Circuit-based comparison: concatenated Steane code
#
# Telecorrection rounds are simulated level by level; a point is accepted
# when the worst error rate keeps decreasing.

# %%
from hybridcat.steane import level0_rates, run_levels, threshold_curve

# %%
v = run_levels(level0_rates("HA", 2.9, 1e-3), levels=3, n_trials=100_000, seed=0)
for k, r in enumerate(v.rate_trajectory):
    print(f"level {k}: x={r.x_unloc:.2e} z={r.z_unloc:.2e} loc={r.loc:.2e}")
print("accepted", v.accepted)

# %%
etas = [0.0005 * k for k in range(1, 9)]
for scheme, alphas in (("HA", (2.5, 2.9, 3.2)), ("SDR", (2.9, 3.2, 3.5))):
    boundary, _ = threshold_curve(scheme, alphas, etas, 3, 50_000, seed=0)
    print(scheme, boundary)
