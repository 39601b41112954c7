"""Brute-force truncated Fock-space simulation of the cat Bell measurements.

States are dense complex arrays with one axis per optical mode.  Linear
optics is applied block by block in the two-mode photon-number subspaces,
where the Fock representation of a 2x2 mode unitary ``u`` is
``expm(i * G_n)`` with ``G = sum_jk H_jk a_j^dag a_k`` and ``u = expm(i H)``.
A coherent product input ``|beta>`` is mapped to ``|u beta>``.

Photon loss uses the Kraus branches

    K_l |n> = sqrt(C(n, l)) eta^(l/2) (1 - eta)^((n - l)/2) |n - l>,

one branch per number of lost photons ``l``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.linalg import expm, logm
from scipy.special import gammaln

from .analytics import (
    CVOutcome, Letter, Parity, ParityFlag, Scheme,
    classify_ha, classify_sdr, cat_normalizations,
)

__all__ = [
    "TruncationError",
    "FockVector",
    "MixedEnsemble",
    "FusionStats",
    "make_cat",
    "make_coherent",
    "tensor",
    "apply_mode_unitary",
    "apply_beamsplitter",
    "apply_phase",
    "apply_loss",
    "loss_branch_weights",
    "run_circuit",
    "estimate_fusion_stats",
    "min_cat_cutoff",
]


class TruncationError(RuntimeError):
    """Raised when probability mass beyond the photon cutoff is too large."""


@dataclass
class FockVector:
    """Truncated multimode state; axis ``k`` holds photon numbers of mode ``k``."""

    amplitudes: np.ndarray
    leakage: float = 0.0

    @property
    def modes(self) -> int:
        return self.amplitudes.ndim

    @property
    def cutoff(self) -> int:
        return self.amplitudes.shape[0] - 1

    def norm2(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass
class MixedEnsemble:
    """Kraus-branch decomposition; ``branches[l]`` is ``(weight, state)``."""

    branches: list = field(default_factory=list)
    discarded: float = 0.0

    def weights(self) -> np.ndarray:
        return np.array([w for w, _ in self.branches])


def min_cat_cutoff(alpha: float) -> int:
    return int(math.ceil(alpha * alpha + 6 * alpha + 10))


def _coherent_column(beta: complex, cutoff: int) -> np.ndarray:
    n = np.arange(cutoff + 1)
    mag = abs(beta)
    if mag == 0:
        v = np.zeros(cutoff + 1, dtype=complex)
        v[0] = 1.0
        return v
    lv = -0.5 * mag * mag + n * math.log(mag) - 0.5 * gammaln(n + 1)
    return np.exp(lv) * np.exp(1j * n * np.angle(beta))


def make_coherent(beta: complex, cutoff: int) -> FockVector:
    v = _coherent_column(beta, cutoff)
    return FockVector(v, max(0.0, 1.0 - float(np.sum(np.abs(v) ** 2))))


def make_cat(alpha: float, phase_class: str = "real", parity: str = "even",
             cutoff: Optional[int] = None, tol: float = 1e-10) -> FockVector:
    """Normalized cat state ``N (|u> +- |-u>)`` with ``u = alpha`` or ``i alpha``.

    Raises
    ------
    TruncationError
        If the norm outside the cutoff exceeds ``tol``.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if cutoff is None:
        cutoff = min_cat_cutoff(alpha)
    u = alpha if phase_class in ("real", "real-axis") else 1j * alpha
    odd = parity in ("odd", 1, "-")
    nrm = cat_normalizations(alpha)
    n = np.arange(cutoff + 1)
    col = _coherent_column(u, cutoff)
    # |u> + s|-u> has amplitude col_n (1 + s (-1)^n)
    keep = (n % 2 == 1) if odd else (n % 2 == 0)
    v = np.where(keep, 2.0 * col, 0.0) * (nrm.N_minus if odd else nrm.N_plus)
    leak = max(0.0, 1.0 - float(np.sum(np.abs(v) ** 2)))
    if leak > tol:
        raise TruncationError(f"cat truncation leakage {leak:.3e} at cutoff {cutoff}")
    return FockVector(v, leak)


def tensor(*states: FockVector) -> FockVector:
    """Tensor product; all factors are padded to a common cutoff."""
    dim = max(s.amplitudes.shape[0] for s in states)
    out = np.ones((), dtype=complex)
    leak = 0.0
    for s in states:
        a = s.amplitudes
        pad = [(0, dim - n) for n in a.shape]
        out = np.multiply.outer(out, np.pad(a, pad))
        leak += s.leakage
    return FockVector(out, leak)


# ----------------------------------------------------------------------------
# Linear optics
# ----------------------------------------------------------------------------

@lru_cache(maxsize=256)
def _block_unitary(h_key: tuple, n: int) -> np.ndarray:
    """Fock-space matrix of ``expm(i G)`` on the two-mode block of total ``n``.

    Basis index ``k`` is ``|k, n-k>`` (``k`` photons in the first mode).
    """
    h = np.array(h_key, dtype=complex).reshape(2, 2)
    k = np.arange(n + 1)
    g = np.diag(h[0, 0] * k + h[1, 1] * (n - k))
    # a_0^dag a_1 : |k, n-k> -> sqrt(k+1) sqrt(n-k) |k+1, n-k-1>
    off = np.sqrt((k[:-1] + 1) * (n - k[:-1]))
    g = g + np.diag(h[0, 1] * off, -1) + np.diag(h[1, 0] * off, 1)
    return expm(1j * g)


def _generator(u: np.ndarray) -> tuple:
    u = np.asarray(u, dtype=complex)
    if not np.allclose(u.conj().T @ u, np.eye(2), atol=1e-12):
        raise ValueError("mode transformation must be unitary")
    h = -1j * logm(u)
    h = 0.5 * (h + h.conj().T)
    return tuple(np.round(h.ravel(), 15))


def apply_mode_unitary(state: FockVector, modes: tuple[int, int], u) -> FockVector:
    """Apply the linear-optics map ``beta_out = u @ beta_in`` on two modes."""
    p, q = modes
    if p == q or not (0 <= p < state.modes and 0 <= q < state.modes):
        raise ValueError(f"invalid mode pair {modes}")
    h_key = _generator(u)
    a = np.moveaxis(state.amplitudes, (p, q), (0, 1))
    dim = a.shape[0]
    shp = a.shape
    a = a.reshape(dim, dim, -1)
    out = np.zeros_like(a)
    before = float(np.sum(np.abs(a) ** 2))
    for n in range(2 * dim - 1):
        k_lo, k_hi = max(0, n - dim + 1), min(n, dim - 1)
        ks = np.arange(k_lo, k_hi + 1)
        block = a[ks, n - ks, :]
        if not block.any():
            continue
        m = _block_unitary(h_key, n)[np.ix_(ks, ks)]
        out[ks, n - ks, :] = m @ block
    after = float(np.sum(np.abs(out) ** 2))
    out = np.moveaxis(out.reshape(shp), (0, 1), (p, q))
    return FockVector(out, state.leakage + max(0.0, before - after))


def apply_beamsplitter(state: FockVector, modes: tuple[int, int],
                       transmissivity: float = 0.5) -> FockVector:
    """Real beamsplitter ``(a, c) -> (t a + r c, r a - t c)``.

    With ``t = r = 1/sqrt(2)`` this is the 50/50 map ``((a+c)/sqrt2, (a-c)/sqrt2)``.
    """
    if not 0.0 < transmissivity < 1.0:
        raise ValueError("transmissivity must lie in (0, 1)")
    t, r = math.sqrt(transmissivity), math.sqrt(1.0 - transmissivity)
    return apply_mode_unitary(state, modes, np.array([[t, r], [r, -t]]))


def apply_phase(state: FockVector, mode: int, phi: float) -> FockVector:
    """Phase shifter ``beta -> exp(i phi) beta`` on one mode."""
    n = np.arange(state.amplitudes.shape[mode])
    shape = [1] * state.modes
    shape[mode] = -1
    return FockVector(state.amplitudes * np.exp(1j * phi * n).reshape(shape),
                      state.leakage)


def run_circuit(scheme, state: FockVector) -> FockVector:
    """Run the HA or SDR network on a two-mode input ``(A, C)``.

    The SDR network appends two vacuum ancillas and returns modes ordered
    ``(A, C, A', C')``:

    * 50/50 splitters on ``(A, anc1)`` and ``(C, anc2)``;
    * 50/50 splitter on the two transmitted arms, giving ``A`` and ``C``;
    * symmetric splitter ``[[1, i], [i, 1]]/sqrt2`` on the reflected arms,
      then a common ``pi/4`` phase, giving ``C'`` and ``A'``.
    """
    scheme = Scheme.parse(scheme)
    if state.modes != 2:
        raise ValueError("circuit input must have two modes")
    if scheme is Scheme.HA:
        return apply_beamsplitter(state, (0, 1))
    dim = state.amplitudes.shape[0]
    vac = np.zeros(dim, dtype=complex)
    vac[0] = 1.0
    s = FockVector(np.multiply.outer(np.multiply.outer(state.amplitudes, vac), vac),
                   state.leakage)
    s = apply_beamsplitter(s, (0, 2))
    s = apply_beamsplitter(s, (1, 3))
    s = apply_beamsplitter(s, (0, 1))
    s = apply_mode_unitary(s, (2, 3), np.array([[1, 1j], [1j, 1]]) / math.sqrt(2))
    s = apply_phase(apply_phase(s, 2, math.pi / 4), 3, math.pi / 4)
    amps = np.swapaxes(s.amplitudes, 2, 3)
    return FockVector(amps, s.leakage)


# ----------------------------------------------------------------------------
# Loss
# ----------------------------------------------------------------------------

def apply_loss(state: FockVector, mode: int, eta: float,
               max_kraus: Optional[int] = None, tol: float = 1e-10) -> MixedEnsemble:
    """Split ``state`` into photon-loss branches on ``mode``.

    Branch weights are ``||K_l psi||^2`` (absolute, so sub-normalized inputs
    keep their weight); branch states are normalized.

    Raises
    ------
    TruncationError
        If the weight of branches beyond ``max_kraus`` exceeds ``tol``.
    """
    if not 0.0 <= eta < 1.0:
        raise ValueError("eta must lie in [0, 1)")
    total = state.norm2()
    if eta == 0.0:
        return MixedEnsemble([(total, FockVector(state.amplitudes / math.sqrt(total),
                                                 state.leakage))])
    dim = state.amplitudes.shape[mode]
    if max_kraus is None:
        max_kraus = dim - 1
    a = np.moveaxis(state.amplitudes, mode, 0)
    n = np.arange(dim)
    branches = []
    kept = 0.0
    for l in range(min(max_kraus, dim - 1) + 1):
        m = n[l:]
        logc = 0.5 * (gammaln(m + 1) - gammaln(l + 1) - gammaln(m - l + 1))
        coef = np.exp(logc + 0.5 * l * math.log(eta) + 0.5 * (m - l) * math.log1p(-eta))
        b = np.zeros_like(a)
        b[: dim - l] = a[l:] * coef.reshape((-1,) + (1,) * (a.ndim - 1))
        w = float(np.sum(np.abs(b) ** 2))
        kept += w
        if w > 0:
            branches.append((w, FockVector(np.moveaxis(b, 0, mode) / math.sqrt(w),
                                           state.leakage)))
        else:
            branches.append((0.0, FockVector(np.moveaxis(b, 0, mode), state.leakage)))
    discarded = max(0.0, total - kept)
    if discarded > tol:
        raise TruncationError(f"discarded Kraus weight {discarded:.3e} exceeds {tol:g}")
    return MixedEnsemble(branches, discarded)


def loss_branch_weights(alpha: float, eta: float, cutoff: Optional[int] = None) -> np.ndarray:
    """Weights of losing ``l = 0, 1, 2, 3 (mod 4)`` photons from ``|C_alpha^+>``."""
    cat = make_cat(alpha, "real", "even", cutoff)
    ens = apply_loss(cat, 0, eta)
    out = np.zeros(4)
    for l, (w, _) in enumerate(ens.branches):
        out[l % 4] += w
    return out


# ----------------------------------------------------------------------------
# Fusion statistics
# ----------------------------------------------------------------------------

@dataclass
class FusionStats:
    p_x: float
    p_loc: float
    p_z_oo: Optional[float]
    leakage: float
    pattern_table: list = field(default_factory=list)


_CLASSES = {Letter.PHI: [(1, 1), (1j, 1j)], Letter.PSI: [(1, 1j), (1j, 1)]}


def _input_branches(alpha, axis, odd, eta, cutoff):
    cat = make_cat(alpha, "real" if axis == 1 else "imag", "odd" if odd else "even",
                   cutoff, tol=1.0)
    if eta == 0.0:
        return [(1.0, cat)]
    return [(w, s) for w, s in apply_loss(cat, 0, eta).branches if w > 0]


def _auto_cutoff(alpha: float, scheme: Scheme) -> int:
    # total photon cap for two cats: Poisson(2 alpha^2) tail well below 1e-13
    mean = 2 * alpha * alpha
    return int(math.ceil(mean + 9.0 * math.sqrt(mean) + 14))


def estimate_fusion_stats(scheme, alpha: float, parity, eta: float = 0.0,
                          cutoff: Optional[int] = None, table_floor: float = 1e-12,
                          max_leakage: float = 1e-8) -> FusionStats:
    """Exact detector statistics of a cat Bell measurement on product inputs.

    Runs the chosen circuit on each of the four basis-product inputs of the
    requested parity (both mode orders for ``EO``), applies loss to the
    inputs when ``eta > 0``, classifies every pattern and tallies:

    * ``p_loc``: probability of an ambiguous-letter outcome;
    * ``p_x``: probability that the reported letter is wrong (ties count 1/2);
    * ``p_z_oo``: for ``OO`` inputs, probability that the odd-odd parity is
      not detected.

    ``cutoff`` caps the total photon number in the simulation.
    """
    scheme = Scheme.parse(scheme)
    parity = Parity.parse(parity)
    if cutoff is None:
        cutoff = _auto_cutoff(alpha, scheme)
    orders = [parity.mode_parities()]
    if parity is Parity.EO:
        orders.append((1, 0))
    weight_per_input = 1.0 / (4 * len(orders))

    probs = {Letter.PHI: None, Letter.PSI: None}
    leakage = 0.0
    for letter, axes_list in _CLASSES.items():
        acc = None
        for pa, pc in orders:
            for ax_a, ax_c in axes_list:
                for wa, sa in _input_branches(alpha, ax_a, pa, eta, cutoff):
                    for wc, sc in _input_branches(alpha, ax_c, pc, eta, cutoff):
                        st = tensor(sa, sc)
                        # enforce the total photon cap
                        tot = np.add.outer(np.arange(cutoff + 1), np.arange(cutoff + 1))
                        before = st.norm2()
                        st.amplitudes[tot > cutoff] = 0.0
                        w = wa * wc * weight_per_input
                        leakage += w * (before - st.norm2() + st.leakage)
                        out = run_circuit(scheme, st)
                        leakage += w * out.leakage
                        p = w * out.probabilities()
                        acc = p if acc is None else acc + p
        probs[letter] = acc
    total = probs[Letter.PHI] + probs[Letter.PSI]
    leakage = max(leakage, 1.0 - float(total.sum()))
    if leakage > max_leakage:
        raise TruncationError(f"oracle leakage {leakage:.3e} at cutoff {cutoff}")

    classify = classify_ha if scheme is Scheme.HA else classify_sdr
    idx = np.argwhere(total > 1e-18)
    p_x = p_loc = p_det = 0.0
    table = []
    for pat in map(tuple, idx):
        pt = float(total[pat])
        oc: CVOutcome = classify(*(int(v) for v in pat))
        if oc.letter is Letter.AMBIGUOUS:
            p_loc += pt
            if oc.lean is None:
                p_x += 0.5 * pt
            else:
                wrong = Letter.PSI if oc.lean is Letter.PHI else Letter.PHI
                p_x += float(probs[wrong][pat])
        else:
            wrong = Letter.PSI if oc.letter is Letter.PHI else Letter.PHI
            p_x += float(probs[wrong][pat])
        if oc.parity_flag is ParityFlag.ODD_ODD_DETECTED:
            p_det += pt
        if pt >= table_floor:
            table.append((tuple(int(v) for v in pat), pt, oc))
    p_z = 1.0 - p_det if parity is Parity.OO else None
    return FusionStats(p_x, p_loc, p_z, leakage, table)
