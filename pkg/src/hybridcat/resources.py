"""Expected unit-resource costs of offline states and total overhead.

The unit resource is one H-coh pair.  Coherent-state Bell measurements
on ancillas of amplitude ``beta`` fail with ``p_alpha = exp(-2 beta^2)``
and are repeated until success.

Lattice counting
----------------
Each RHG unit cell holds 3 face and 3 edge sites once shared sites are
counted once (6 faces / 2 + 12 edges / 4), so a distance-``d`` block has
``6 d^3`` star sites (``convention="bulk"``).  Each site is charged one
three-qubit micro-cluster cost.  ``convention="lattice"`` instead counts the
faces and edges of the simulated open-boundary lattice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

__all__ = [
    "ResourceCosts",
    "OverheadReport",
    "OverheadError",
    "generation_costs",
    "lattice_sites",
    "overhead_estimate",
]


class OverheadError(ValueError):
    """Raised when no tabulated distance reaches the target."""


@dataclass(frozen=True)
class ResourceCosts:
    beta: float
    p_alpha: float
    cost_hcat_pair: float
    cost_triple: float
    cost_c3: float
    cost_phi_H: float
    cost_phi_CZ: float

    def as_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass(frozen=True)
class OverheadReport:
    target_p_L: float
    chosen_d: int
    n_sites: int
    n_unit_resources: float
    convention: str

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def generation_costs(beta: float = 1.0) -> ResourceCosts:
    """Expected H-coh pairs consumed per offline state."""
    if not (beta > 0 and math.isfinite(beta)):
        raise ValueError("beta must be positive")
    p = math.exp(-2.0 * beta * beta)
    s = 1.0 - p
    return ResourceCosts(beta, p, 8.0, 18.0, 54.0 / s ** 2, 36.0 / s, 92.0 / s ** 3)


def lattice_sites(d: int, convention: str = "bulk") -> int:
    if convention == "bulk":
        return 6 * d ** 3
    if convention == "lattice":
        from .rhg_lattice import build_lattice
        lat = build_lattice(d)
        return lat.n_qubits + len(lat.edges)
    raise ValueError(f"unknown counting convention {convention!r}")


def overhead_estimate(target_p_L: float, p_L_table: Mapping[int, float], beta: float = 1.0,
                      convention: str = "bulk") -> OverheadReport:
    """Smallest tabulated distance reaching ``target_p_L`` and its cost."""
    if not p_L_table:
        raise OverheadError("empty p_L table")
    ok = sorted(int(d) for d, p in p_L_table.items() if p <= target_p_L)
    if not ok:
        d_max = max(p_L_table)
        raise OverheadError(
            f"no distance reaches p_L <= {target_p_L:g}; largest d={d_max} gives "
            f"{p_L_table[d_max]:.3g}, extend the table by extrapolating in d")
    d = ok[0]
    n = lattice_sites(d, convention)
    return OverheadReport(float(target_p_L), d, n, n * generation_costs(beta).cost_c3,
                          convention)
