"""Weighted minimum-weight perfect matching decoder for the primal lattice.

Cells are graph nodes and each face qubit is an edge between its two cells,
or between its cell and a single virtual boundary node on the x-boundaries.
Edge weights are ``log((1 - q) / q)``.  Production decoding is delegated to
PyMatching (exact blossom matching); :func:`brute_force_match` is an
exhaustive oracle for small defect sets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np
import pymatching
import scipy.sparse as sp
from scipy.sparse.csgraph import dijkstra

from .rhg_lattice import ErrorAssignment, Lattice

__all__ = [
    "WEIGHT_CAP",
    "DecodingError",
    "DecodingGraph",
    "Matching",
    "qubit_weights",
    "build_decoding_graph",
    "decode",
    "decode_batch",
    "correction_weight",
    "defect_distances",
    "brute_force_match",
]

_Q_FLOOR = 1e-12
WEIGHT_CAP = math.log((1.0 - _Q_FLOOR) / _Q_FLOOR)


class DecodingError(RuntimeError):
    """Raised for infeasible or invalid decoding requests."""


@dataclass
class DecodingGraph:
    lattice: Lattice
    weights: np.ndarray
    graph: sp.csr_matrix = field(repr=False)
    matcher: pymatching.Matching = field(repr=False)

    @property
    def boundary_node(self) -> int:
        return self.lattice.n_cells


@dataclass(frozen=True)
class Matching:
    """Pairs of defect cells; a partner of ``-1`` means the boundary."""

    pairs: tuple
    weight: float


def qubit_weights(q_z: np.ndarray) -> np.ndarray:
    q = np.asarray(q_z, dtype=float)
    if np.any(q >= 0.5):
        raise DecodingError("q_Z >= 1/2 gives non-positive matching weights")
    q = np.clip(q, _Q_FLOOR, None)
    return np.minimum(np.log((1.0 - q) / q), WEIGHT_CAP)


def build_decoding_graph(lattice: Lattice, assignment: ErrorAssignment) -> DecodingGraph:
    """Weighted syndrome graph with one virtual boundary node."""
    w = qubit_weights(assignment.q_z)
    qc = lattice.qubit_cells
    b = lattice.n_cells
    u = np.where(qc[:, 0] >= 0, qc[:, 0], b)
    v = np.where(qc[:, 1] >= 0, qc[:, 1], b)
    n = b + 1
    g = sp.coo_matrix((np.concatenate([w, w]), (np.concatenate([u, v]), np.concatenate([v, u]))),
                      shape=(n, n)).tocsr()
    m = pymatching.Matching.from_check_matrix(lattice.check_matrix.T.tocsc(), weights=w)
    return DecodingGraph(lattice, w, g, m)


def decode(graph: DecodingGraph, syndrome: np.ndarray) -> np.ndarray:
    """Minimum-weight correction (boolean per qubit) for one syndrome."""
    s = np.asarray(syndrome, dtype=np.uint8)
    if s.shape != (graph.lattice.n_cells,):
        raise DecodingError("syndrome length does not match the lattice")
    if not s.any():
        return np.zeros(graph.lattice.n_qubits, dtype=bool)
    return graph.matcher.decode(s).astype(bool)


def decode_batch(graph: DecodingGraph, syndromes: np.ndarray) -> np.ndarray:
    """Corrections for a batch of syndromes, shape ``(shots, n_qubits)``."""
    s = np.asarray(syndromes, dtype=np.uint8)
    if s.ndim != 2 or s.shape[1] != graph.lattice.n_cells:
        raise DecodingError("syndrome batch has the wrong shape")
    return graph.matcher.decode_batch(s).astype(bool)


def correction_weight(graph: DecodingGraph, correction: np.ndarray) -> float:
    return float(graph.weights[np.asarray(correction, dtype=bool)].sum())


def defect_distances(graph: DecodingGraph, defects) -> tuple[np.ndarray, np.ndarray]:
    """Shortest-path distances among defects and from each to the boundary."""
    defects = np.asarray(defects, dtype=np.int64)
    if len(defects) == 0:
        return np.zeros((0, 0)), np.zeros(0)
    dist = dijkstra(graph.graph, directed=False, indices=defects)
    return dist[:, defects], dist[:, graph.boundary_node]


def brute_force_match(graph: DecodingGraph, syndrome_or_defects, max_defects: int = 10) -> Matching:
    """Exact minimum-weight matching by exhaustive enumeration.

    Every defect is paired with another defect or with the boundary; all
    such assignments are enumerated (memoised over the remaining set).
    """
    arr = np.asarray(syndrome_or_defects)
    if arr.dtype == bool or (arr.ndim == 1 and len(arr) == graph.lattice.n_cells
                             and set(np.unique(arr)) <= {0, 1}):
        defects = np.flatnonzero(arr)
    else:
        defects = arr.astype(np.int64)
    k = len(defects)
    if k > max_defects:
        raise DecodingError(f"brute force refuses {k} > {max_defects} defects")
    if k == 0:
        return Matching((), 0.0)
    dd, db = defect_distances(graph, defects)
    if not np.isfinite(db).all() and k % 2 == 1:
        raise DecodingError("odd defect count with no reachable boundary")

    @lru_cache(maxsize=None)
    def best(mask: int) -> tuple[float, tuple]:
        if mask == 0:
            return 0.0, ()
        i = (mask & -mask).bit_length() - 1
        rest = mask & ~(1 << i)
        w0, p0 = best(rest)
        cand = (db[i] + w0, ((i, -1),) + p0)
        j_mask = rest
        while j_mask:
            j = (j_mask & -j_mask).bit_length() - 1
            j_mask &= j_mask - 1
            w1, p1 = best(rest & ~(1 << j))
            if dd[i, j] + w1 < cand[0]:
                cand = (dd[i, j] + w1, ((i, j),) + p1)
        return cand

    w, pairs = best((1 << k) - 1)
    if not math.isfinite(w):
        raise DecodingError("no perfect matching exists")
    named = tuple((int(defects[i]), int(defects[j]) if j >= 0 else -1) for i, j in pairs)
    return Matching(named, float(w))
