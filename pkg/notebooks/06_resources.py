# %% [markdown]
# # Resource overhead
#
# Expected H-coh pairs per offline state, and the total count for a target
# logical error rate at a low-loss operating point.

# %%
from hybridcat.resources import generation_costs, lattice_sites, overhead_estimate

# %%
for beta in (0.8, 1.0, 1.5, 3.0):
    c = generation_costs(beta)
    print(f"beta={beta}: p_alpha={c.p_alpha:.4f} C3={c.cost_c3:.2f} "
          f"phi_H={c.cost_phi_H:.2f} phi_CZ={c.cost_phi_CZ:.2f}")

# %% [markdown]
# An illustrative `p_L` table near alpha = 2.93, eta = 1e-4.  d = 4 sits
# close to 1e-6 there, so a fresh `hybridcat resources` run (1e7 trials per
# distance) may pick d = 4 or d = 5.

# %%
table = {3: 1.6e-5, 4: 8e-7, 5: 3e-7}
for conv in ("bulk", "lattice"):
    r = overhead_estimate(1e-6, table, convention=conv)
    print(conv, r)
print("sites per d:", {d: lattice_sites(d) for d in (3, 4, 5)})
