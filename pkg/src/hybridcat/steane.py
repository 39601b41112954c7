"""Concatenated Steane-code telecorrection with the hybrid gate error model.

One round teleports a data block ``D`` into a fresh block ``B`` through an
encoded Bell pair ``(A, B)``, using only ``|+>`` preparation, CZ, H and X
measurement::

    A, B : prep |+>  -- CZ(A,B) -- H(B)                       -> B (output)
    A    :                        -- H(A) -- CZ(D,A) -- meas X
    D    :                                  CZ(D,A) -- meas X

Error locations per physical qubit:

* preparation (memory): Z with rate ``z``
* every CZ teleportation: Z on each output with rate ``z``
* every H teleportation: X on the output with rate ``x``
* located events: rate ``loc`` on the data-side CZ; ancilla-side located
  events are postselected away

X-measurement outcomes of D and A are decoded as words of the [7,4] Hamming
code (erased positions ignored); a flip of A's logical outcome is a logical X
on B, a flip of D's a logical Z.  The output block is then decoded ideally.
A round whose erasures leave the logical outcome undetermined is counted as
located at the next level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Optional, Sequence

import numpy as np

from .analytics import Scheme
from .loss_model import fusion_error_rates

__all__ = [
    "LevelRates",
    "AcceptanceVerdict",
    "CurvePoint",
    "level0_rates",
    "propagate",
    "simulate_level",
    "run_levels",
    "threshold_curve",
]

N = 7
_BITS = 1 << np.arange(N, dtype=np.uint8)
_POP = np.array([bin(i).count("1") for i in range(128)], dtype=np.uint8)
# columns of the Hamming parity check are the binary codes of positions 1..7
_HCOLS = np.arange(1, N + 1)


def _syndrome(mask: np.ndarray) -> np.ndarray:
    s = np.zeros_like(mask, dtype=np.int64)
    for i in range(N):
        s ^= np.where(mask & (1 << i), _HCOLS[i], 0)
    return s


_CODEWORDS = np.array([m for m in range(128) if _syndrome(np.array(m)) == 0], dtype=np.uint8)


def _lookup_table() -> np.ndarray:
    """Logical flip after single-error correction of a 7-bit error mask."""
    m = np.arange(128)
    s = _syndrome(m)
    corr = np.where(s > 0, 1 << (np.maximum(s, 1) - 1), 0)
    return (_POP[m ^ corr] % 2).astype(np.uint8)


def _measure_table() -> np.ndarray:
    """Decoded outcome of a flipped X-measurement word given an erasure mask.

    Entry ``[word, erasures]`` is 0 (correct), 1 (logical flip) or 2
    (closest codewords of both parities, flagged).
    """
    t = np.zeros((128, 128), dtype=np.uint8)
    for w, e in product(range(128), range(128)):
        keep = ~e & 0x7F
        dist = _POP[(_CODEWORDS ^ w) & keep]
        best = _CODEWORDS[dist == dist.min()]
        par = set(int(p) for p in _POP[best] % 2)
        t[w, e] = 2 if len(par) == 2 else par.pop()
    return t


_LOOKUP = _lookup_table()
_MEASURE = _measure_table()


@dataclass(frozen=True)
class LevelRates:
    x_unloc: float
    z_unloc: float
    loc: float

    def __post_init__(self):
        for v in (self.x_unloc, self.z_unloc, self.loc):
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"rate {v!r} outside [0, 1]")

    @property
    def worst(self) -> float:
        return max(self.x_unloc, self.z_unloc, self.loc)


@dataclass
class AcceptanceVerdict:
    accepted: bool
    rate_trajectory: list


@dataclass(frozen=True)
class CurvePoint:
    alpha: float
    eta: float
    accepted: bool
    trajectory: tuple


def level0_rates(scheme, alpha: float, eta: float) -> LevelRates:
    """Physical rates of the teleported gates from the fusion model.

    ``x`` is the fusion Z rate (H teleportation), ``z`` the fusion Z rate
    plus memory dephasing from loss, and ``loc`` the flagged letter
    ambiguity plus detected DV loss.
    """
    r = fusion_error_rates(scheme, alpha, eta)
    x = r.p_z_unloc
    z = r.p_z_unloc + r.p_z_loc
    loc = min(1.0, r.p_x_total + 2.0 * r.p_z_loc)
    return LevelRates(x, z, loc)


def _bern(rng: np.random.Generator, p: float, n: int) -> np.ndarray:
    if p <= 0.0:
        return np.zeros(n, dtype=np.uint8)
    b = rng.random((n, N)) < p
    return (b * _BITS).sum(axis=1).astype(np.uint8)


def propagate(z_prep_a, z_prep_b, z_cz_ab_a, z_cz_ab_b, x_h_b, x_h_a,
              z_cz_da_d, z_cz_da_a, erase_d, erase_a, flip_d_erased, flip_a_erased):
    """Push 7-bit error masks through one round.

    Returns ``(logical_x, logical_z, flagged)`` arrays.
    """
    xa = np.zeros_like(z_prep_a)
    za = z_prep_a ^ z_cz_ab_a
    zb = z_prep_b ^ z_cz_ab_b
    # H on B, then on A, swaps X and Z before the teleportation X error
    xb = zb ^ x_h_b
    zb = np.zeros_like(zb)
    xa, za = za ^ x_h_a, xa
    # CZ(D,A): X on A propagates to Z on D
    zd = xa ^ z_cz_da_d
    za = za ^ z_cz_da_a
    wd = (zd & ~erase_d) | (flip_d_erased & erase_d)
    wa = (za & ~erase_a) | (flip_a_erased & erase_a)
    md = _MEASURE[wd, erase_d]
    ma = _MEASURE[wa, erase_a]
    flagged = (md == 2) | (ma == 2)
    lx = (_LOOKUP[xb] ^ (ma == 1)).astype(bool)
    lz = (_LOOKUP[zb] ^ (md == 1)).astype(bool)
    return lx, lz, flagged


def simulate_level(rates: LevelRates, n_trials: int, seed: int) -> LevelRates:
    """Monte Carlo of one telecorrection round at the given physical rates."""
    if rates.worst >= 0.5:
        import warnings
        warnings.warn("input rates >= 1/2; result still computed")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), 0x57EA])))
    n = int(n_trials)
    x, z, l = rates.x_unloc, rates.z_unloc, rates.loc
    draws = [_bern(rng, z, n), _bern(rng, z, n), _bern(rng, z, n), _bern(rng, z, n),
             _bern(rng, x, n), _bern(rng, x, n), _bern(rng, z, n), _bern(rng, z, n),
             _bern(rng, l, n), _bern(rng, l, n), _bern(rng, 0.5, n), _bern(rng, 0.5, n)]
    lx, lz, fl = propagate(*draws)
    ok = ~fl
    return LevelRates(float(np.mean(lx & ok)), float(np.mean(lz & ok)), float(np.mean(fl)))


def run_levels(start: LevelRates, levels: int = 3, n_trials: int = 200_000,
               seed: int = 0) -> AcceptanceVerdict:
    """Recurse ``levels`` rounds; accept iff the worst rate keeps decreasing."""
    traj = [start]
    for k in range(levels):
        traj.append(simulate_level(traj[-1], n_trials, seed * 1009 + k))
    worst = [t.worst for t in traj]
    ok = all(b < a or (a == 0.0 and b == 0.0) for a, b in zip(worst, worst[1:]))
    return AcceptanceVerdict(ok, traj)


def threshold_curve(scheme, alpha_grid: Sequence[float], eta_grid: Sequence[float],
                    levels: int = 3, n_trials: int = 200_000, seed: int = 0
                    ) -> tuple[dict, list]:
    """Acceptance map over ``(alpha, eta)`` and its boundary.

    Returns ``(boundary, points)``: ``boundary[alpha]`` is the largest
    accepted ``eta`` below the first rejected one (``None`` if the lowest
    grid value is rejected).
    """
    scheme = Scheme.parse(scheme).value
    eta_grid = sorted(float(e) for e in eta_grid)
    boundary, points = {}, []
    for a in alpha_grid:
        best = None
        for i, eta in enumerate(eta_grid):
            v = run_levels(level0_rates(scheme, float(a), eta), levels, n_trials,
                           seed + 7919 * i)
            points.append(CurvePoint(float(a), eta, v.accepted, tuple(v.rate_trajectory)))
            if not v.accepted:
                break
            best = eta
        boundary[float(a)] = best
    return boundary, points
