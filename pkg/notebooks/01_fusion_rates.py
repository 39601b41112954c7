# %% [markdown]
# # Cat-code Bell measurements
#
# Closed-form error rates of the two cat Bell-measurement circuits (HA and
# SDR), checked against brute-force Fock-space simulation.

# %%
import numpy as np

from hybridcat.analytics import classify_ha, classify_sdr, cv_rates
from hybridcat.fock_oracle import estimate_fusion_stats

# %% [markdown]
# Letter-ambiguity rate `p_x` and ambiguous-outcome rate `p_loc` over amplitude.

# %%
alphas = np.linspace(0.5, 3.0, 6)
print("scheme alpha  parity  p_x        p_loc")
for scheme in ("HA", "SDR"):
    for a in alphas:
        for par in ("EE", "EO", "OO"):
            r = cv_rates(scheme, a, par)
            print(f"{scheme:>6} {a:5.2f}  {par}      {r.p_x:.3e}  {r.p_loc:.4f}")

# %% [markdown]
# The oracle propagates the four product inputs through the optical network
# and tallies every detector pattern.

# %%
for scheme in ("HA", "SDR"):
    st = estimate_fusion_stats(scheme, 1.0, "OO")
    ref = cv_rates(scheme, 1.0, "OO")
    print(scheme, "oracle", st.p_x, st.p_loc, st.p_z_oo)
    print(scheme, "closed", ref.p_x, ref.p_loc, ref.p_z_oo)

# %% [markdown]
# A few detector patterns and their classification.

# %%
for pat in [(2, 2), (0, 4), (3, 3), (1, 3)]:
    print("HA ", pat, classify_ha(*pat))
for pat in [(0, 3, 0, 5), (0, 2, 0, 2), (4, 0, 0, 0), (2, 2, 0, 0)]:
    print("SDR", pat, classify_sdr(*pat))
