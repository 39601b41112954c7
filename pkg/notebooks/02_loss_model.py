# %% [markdown]
# # Photon loss and per-fusion error rates
#
# Loss dephases the cat code and shrinks its amplitude.  The per-fusion rates
# `P_X`, `P_Z(unloc)` and `P_Z(loc)` follow from the parity-sector weights.

# %%
import numpy as np

from hybridcat.fock_oracle import loss_branch_weights
from hybridcat.loss_model import fusion_error_rates, loss_coefficients

# %% [markdown]
# Parity-sector weights from Kraus evolution versus the closed form.

# %%
for a, eta in [(1.0, 0.01), (2.0, 0.05), (3.0, 0.001)]:
    w = loss_branch_weights(a, eta)
    c = loss_coefficients(a, eta)
    print(f"alpha={a} eta={eta}: even {w[0] + w[2]:.10f} vs {c.w_even:.10f}, "
          f"odd {w[1] + w[3]:.10f} vs {c.w_odd:.10f}")

# %% [markdown]
# Error-rate trade-off at a fixed loss rate: larger amplitudes suppress
# letter ambiguity but dephase faster.

# %%
eta = 2e-3
print("alpha  P_X        P_Z(unloc)  P_Z(loc)")
for a in np.linspace(1.5, 3.5, 9):
    r = fusion_error_rates("HA", a, eta)
    print(f"{a:5.2f}  {r.p_x_total:.3e}  {r.p_z_unloc:.3e}   {r.p_z_loc:.3e}")
