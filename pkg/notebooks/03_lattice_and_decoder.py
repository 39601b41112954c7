# %% [markdown]
# # RHG lattice and matching decoder
#
# Primal faces carry Z errors; cells detect them.  A minimum-weight matching
# pairs defects and the residual's parity on one boundary flags a logical
# error.

# %%
import numpy as np

from hybridcat.decoder import brute_force_match, build_decoding_graph, correction_weight, decode
from hybridcat.loss_model import fusion_error_rates
from hybridcat.rhg_lattice import (assign_error_rates, build_lattice, contribution_table,
                                   logical_error, sample_and_measure)

# %%
for d in (2, 3, 5):
    lat = build_lattice(d)
    print(f"d={d}: {lat.n_cells} cells, {lat.n_qubits} primal qubits, {len(lat.edges)} edges")

# %% [markdown]
# Each qubit collects four Z-type and six X-type fusion errors.

# %%
lat = build_lattice(3)
t = contribution_table(lat)
print("Z contributions", np.unique(t.n_z), "X contributions", np.unique(t.n_x))
asg = assign_error_rates(lat, fusion_error_rates("HA", 2.93, 0.004))
print("per-qubit q_Z", asg.q_z[0])

# %% [markdown]
# One sampled round: errors, syndrome, correction and logical check.

# %%
rng = np.random.default_rng(1)
g = build_decoding_graph(lat, asg)
flips, syn = sample_and_measure(lat, asg, rng)
corr = decode(g, syn)
print("errors", flips.sum(), "defects", syn.sum(), "correction", corr.sum(),
      "logical", logical_error(lat, flips ^ corr))
if syn.sum() <= 10:
    print("matching weight", correction_weight(g, corr), "brute force",
          brute_force_match(g, syn).weight)
