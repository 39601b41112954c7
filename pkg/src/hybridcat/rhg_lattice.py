"""RHG lattice geometry, per-qubit Z-error assignment, sampling and syndromes.

Geometry uses doubled integer coordinates.  Primal cell ``(i, j, k)`` with
``0 <= i, j, k < d`` is centred at ``(2i+1, 2j+1, 2k+1)``; primal qubits sit on
cell faces (two odd coordinates) and dual qubits on cell edges (one odd
coordinate).  Axes are ``(x, y, t)``.

Boundary convention
-------------------
* x-normal faces exist on every plane ``x = 0..d``; those on ``x = 0`` and
  ``x = d`` belong to a single cell and form the two primal boundaries.
* y- and t-normal faces exist only between cells, so error chains cannot end
  on those sides.

This gives ``3 d^3 - d^2`` primal qubits and a minimal logical chain of
``d + 1`` faces.  The logical class of a syndrome-free residual is the parity
of its faces on the ``x = 0`` plane.

Error propagation
-----------------
Every face and edge hosts a five-qubit star built by two step-1 fusions; each
star has two Hadamard-configured leaves and two plain leaves.  A face with
normal ``n`` carries its H leaves toward the edges parallel to
``next(n)`` (``x -> y -> t -> x``).  A step-2 fusion between an H leaf and a
plain leaf sends its Z error to the H-leaf owner and its X error to the
plain-leaf owner.  A step-1 Z error hits the star's own data qubit; a step-1
X error hits the two neighbours reached through one H leaf and one plain
leaf of that star.  Located losses act as extra fusion Z errors.  Every primal
qubit then collects:

=========================  =====  ================
source                     count  rate
=========================  =====  ================
step-1 fusion, own star    2      P_Z
step-2 fusion, H side      2      P_Z
step-2 fusion, plain side  2      P_X
step-1 X of edge stars     4      P_X
=========================  =====  ================

with ``P_Z`` the XOR of ``P_Z(unloc)`` and ``P_Z(loc)``.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.sparse as sp

from .loss_model import FusionErrorRates

__all__ = [
    "Lattice",
    "ErrorAssignment",
    "ContributionTable",
    "SyndromeError",
    "build_lattice",
    "contribution_table",
    "assign_error_rates",
    "xor_combine",
    "syndrome",
    "sample_errors",
    "sample_and_measure",
    "logical_error",
    "logical_errors",
    "lattice_to_json",
]

_NEXT = (1, 2, 0)
_PREV = (2, 0, 1)


class SyndromeError(ValueError):
    """Raised when a residual that should be syndrome-free is not."""


@dataclass
class Lattice:
    """Primal sector of an RHG lattice with distance ``d``.

    Attributes
    ----------
    coords : (n_qubits, 3) int array
        Doubled coordinates of primal (face) qubits.
    normal : (n_qubits,) int array
        Axis of each face normal.
    cell_coords : (n_cells, 3) int array
        Doubled coordinates of cell centres.
    cell_faces : (n_cells, 6) int array
        Face qubit ids per cell, ``-1`` where a boundary face is absent.
    qubit_cells : (n_qubits, 2) int array
        Cells sharing each face, ``-1`` for the missing side at a boundary.
    boundary : (n_qubits,) int array
        ``0`` / ``1`` for faces on the low / high x-boundary, else ``-1``.
    edges : (n_edges, 3) int array
        Doubled coordinates of dual (edge) qubits that bound a primal face.
    """

    d: int
    coords: np.ndarray
    normal: np.ndarray
    cell_coords: np.ndarray
    cell_faces: np.ndarray
    qubit_cells: np.ndarray
    boundary: np.ndarray
    edges: np.ndarray
    check_matrix: sp.csr_matrix = field(repr=False)

    @property
    def n_qubits(self) -> int:
        return len(self.coords)

    @property
    def n_cells(self) -> int:
        return len(self.cell_coords)

    @property
    def logical_mask(self) -> np.ndarray:
        return self.boundary == 0


@dataclass(frozen=True)
class ErrorAssignment:
    q_z: np.ndarray
    warning: bool = False

    def __post_init__(self):
        if np.any(self.q_z < 0) or np.any(self.q_z > 1):
            raise ValueError("q_Z outside [0, 1]")


@dataclass(frozen=True)
class ContributionTable:
    """Per-qubit counts of contributing fusion events by source."""

    step1_z: np.ndarray
    step2_z: np.ndarray
    step2_x: np.ndarray
    step1_x: np.ndarray

    @property
    def n_z(self) -> np.ndarray:
        return self.step1_z + self.step2_z

    @property
    def n_x(self) -> np.ndarray:
        return self.step2_x + self.step1_x


def build_lattice(d: int) -> Lattice:
    """Build the primal lattice of ``d x d x d`` cells."""
    if int(d) != d or d < 2:
        raise ValueError("d must be an integer >= 2")
    d = int(d)
    coords, normal = [], []
    for ax in range(3):
        lo = 0 if ax == 0 else 1
        hi = d if ax == 0 else d - 1
        others = [a for a in range(3) if a != ax]
        for p in range(lo, hi + 1):
            for u in range(d):
                for v in range(d):
                    c = [0, 0, 0]
                    c[ax] = 2 * p
                    c[others[0]] = 2 * u + 1
                    c[others[1]] = 2 * v + 1
                    coords.append(c)
                    normal.append(ax)
    coords = np.array(coords, dtype=np.int64)
    normal = np.array(normal, dtype=np.int64)
    index = {tuple(c): i for i, c in enumerate(coords)}

    g = np.arange(d)
    ci, cj, ck = np.meshgrid(g, g, g, indexing="ij")
    cell_coords = np.stack([2 * ci + 1, 2 * cj + 1, 2 * ck + 1], -1).reshape(-1, 3)
    cell_index = {tuple(c): i for i, c in enumerate(cell_coords)}
    cell_faces = -np.ones((len(cell_coords), 6), dtype=np.int64)
    for ci_, c in enumerate(cell_coords):
        for ax in range(3):
            for s, sgn in enumerate((-1, 1)):
                f = c.copy()
                f[ax] += sgn
                cell_faces[ci_, 2 * ax + s] = index.get(tuple(f), -1)

    qubit_cells = -np.ones((len(coords), 2), dtype=np.int64)
    for q, c in enumerate(coords):
        ax = normal[q]
        for s, sgn in enumerate((-1, 1)):
            cc = c.copy()
            cc[ax] += sgn
            qubit_cells[q, s] = cell_index.get(tuple(cc), -1)
    boundary = np.full(len(coords), -1, dtype=np.int64)
    boundary[(normal == 0) & (coords[:, 0] == 0)] = 0
    boundary[(normal == 0) & (coords[:, 0] == 2 * d)] = 1

    edge_set = set()
    for c, ax in zip(coords, normal):
        for other in range(3):
            if other == ax:
                continue
            for sgn in (-1, 1):
                e = c.copy()
                e[other] += sgn
                edge_set.add(tuple(e))
    edges = np.array(sorted(edge_set), dtype=np.int64)

    rows, cols = [], []
    for q in range(len(coords)):
        for c in qubit_cells[q]:
            if c >= 0:
                rows.append(q)
                cols.append(c)
    h = sp.csr_matrix((np.ones(len(rows), dtype=np.uint8), (rows, cols)),
                      shape=(len(coords), len(cell_coords)))
    return Lattice(d, coords, normal, cell_coords, cell_faces, qubit_cells,
                   boundary, edges, h)


def _edge_axis(e: np.ndarray) -> int:
    return int(np.flatnonzero(e % 2 == 1)[0])


def contribution_table(lattice: Lattice) -> ContributionTable:
    """Enumerate every fusion event that can leave a Z on a primal qubit."""
    n = lattice.n_qubits
    index = {tuple(c): i for i, c in enumerate(lattice.coords)}
    s1z = np.full(n, 2, dtype=np.int64)  # two step-1 fusions per star
    s2z = np.zeros(n, dtype=np.int64)
    s2x = np.zeros(n, dtype=np.int64)
    s1x = np.zeros(n, dtype=np.int64)
    for e in lattice.edges:
        a = _edge_axis(e)
        h_leaves, p_leaves = [], []  # faces reached through H / plain leaves of e
        for other in range(3):
            if other == a:
                continue
            for sgn in (-1, 1):
                f = e.copy()
                f[other] += sgn
                q = index.get(tuple(f))
                if q is None:
                    continue
                nrm = int(lattice.normal[q])
                if _NEXT[nrm] == a:
                    # face holds the H leaf toward e
                    s2z[q] += 1
                    p_leaves.append(q)
                else:
                    s2x[q] += 1
                    h_leaves.append(q)
        # step-1 fusion k of e reaches H leaf k and plain leaf k
        for k in range(2):
            if k < len(h_leaves):
                s1x[h_leaves[k]] += 1
            if k < len(p_leaves):
                s1x[p_leaves[k]] += 1
    return ContributionTable(s1z, s2z, s2x, s1x)


def xor_combine(*probs) -> np.ndarray:
    """Probability of an odd number of independent events."""
    out = np.zeros_like(np.asarray(probs[0], dtype=float))
    for p in probs:
        p = np.asarray(p, dtype=float)
        out = out * (1.0 - p) + p * (1.0 - out)
    return out


def _xor_power(p: float, k: np.ndarray) -> np.ndarray:
    """XOR of ``k`` independent events of probability ``p``."""
    return 0.5 * (1.0 - (1.0 - 2.0 * p) ** np.asarray(k, dtype=float))


def assign_error_rates(lattice: Lattice, rates: FusionErrorRates,
                       table: Optional[ContributionTable] = None) -> ErrorAssignment:
    """Per-qubit Z-error probability from per-fusion error rates."""
    if table is None:
        table = contribution_table(lattice)
    pz = _xor_power(rates.p_z_unloc, table.n_z)
    pl = _xor_power(rates.p_z_loc, table.n_z)
    px = _xor_power(rates.p_x_total, table.n_x)
    q = xor_combine(pz, pl, px)
    warn = bool(np.any(q > 0.5))
    if warn:
        warnings.warn("combined q_Z exceeds 1/2; matching weights become non-positive")
    return ErrorAssignment(q, warn)


# ----------------------------------------------------------------------------
# Sampling and syndromes
# ----------------------------------------------------------------------------

def syndrome(lattice: Lattice, flips: np.ndarray) -> np.ndarray:
    """Cell parities for one flip vector or a batch ``(shots, n_qubits)``."""
    f = np.asarray(flips, dtype=np.uint8)
    if f.ndim == 1:
        return (lattice.check_matrix.T @ f.astype(np.int32)) % 2 == 1
    return ((lattice.check_matrix.T @ f.T.astype(np.int32)).T % 2) == 1


def sample_errors(assignment: ErrorAssignment, shots: int,
                  rng: np.random.Generator) -> np.ndarray:
    """Independent Z flips, shape ``(shots, n_qubits)``."""
    return rng.random((shots, len(assignment.q_z))) < assignment.q_z


def sample_and_measure(lattice: Lattice, assignment: ErrorAssignment,
                       rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Sample one error configuration and its defect set."""
    flips = sample_errors(assignment, 1, rng)[0]
    return flips, syndrome(lattice, flips)


def logical_errors(lattice: Lattice, residual: np.ndarray, check: bool = True) -> np.ndarray:
    """Batch form of :func:`logical_error`."""
    r = np.atleast_2d(np.asarray(residual, dtype=bool))
    if check and syndrome(lattice, r).any():
        raise SyndromeError("residual error has a nonempty syndrome")
    return (r[:, lattice.logical_mask].sum(axis=1) % 2) == 1


def logical_error(lattice: Lattice, residual: np.ndarray) -> bool:
    """True iff a syndrome-free residual links the two x-boundaries an odd
    number of times."""
    return bool(logical_errors(lattice, residual)[0])


def lattice_to_json(lattice: Lattice, assignment: Optional[ErrorAssignment] = None) -> str:
    data = {
        "d": lattice.d,
        "qubits": [{"id": i, "coord": c.tolist(), "normal": int(n), "cells": qc.tolist(),
                    **({"q_z": float(assignment.q_z[i])} if assignment is not None else {})}
                   for i, (c, n, qc) in enumerate(zip(lattice.coords, lattice.normal,
                                                      lattice.qubit_cells))],
        "cells": [{"id": i, "coord": c.tolist(), "faces": f.tolist()}
                  for i, (c, f) in enumerate(zip(lattice.cell_coords, lattice.cell_faces))],
    }
    return json.dumps(data)
