"""Closed-form cat-state quantities and Bell-measurement classification.

Two linear-optics Bell measurements on cat-code qubits are supported:

* ``HA``: one 50/50 beamsplitter and two photon-number-resolving (PNR)
  detectors.
* ``SDR``: four beamsplitters, a phase shifter, two vacuum ancillas and four
  PNR detectors.

Error rates are averaged over the uniform mixture of the four basis-product
inputs ``|C_u^p>|C_v^q>`` with ``u, v`` in ``{alpha, i*alpha}`` and fixed
photon-number parities ``p, q``.  Inputs on the same phase axis belong to the
``Phi`` letter class, inputs on different axes to the ``Psi`` class.
"""

from __future__ import annotations

import enum
import math
from functools import lru_cache
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.special import gammaln

__all__ = [
    "Scheme",
    "Parity",
    "Letter",
    "Sign",
    "ParityFlag",
    "DVTag",
    "CVOutcome",
    "HybridOutcome",
    "CVRateTable",
    "Normalizations",
    "DomainError",
    "ConvergenceError",
    "cat_normalizations",
    "cv_rates",
    "classify_ha",
    "classify_sdr",
    "classify_dv",
    "classify_hybrid",
    "ha_output_map",
    "sdr_output_map",
    "sdr_px_enumerated",
]


class DomainError(ValueError):
    """Raised for inputs outside an operation's domain."""


class ConvergenceError(RuntimeError):
    """Raised when a truncated pattern sum fails to converge."""


class Scheme(str, enum.Enum):
    HA = "HA"
    SDR = "SDR"

    @classmethod
    def parse(cls, value) -> "Scheme":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).upper())
        except ValueError:
            raise DomainError(f"unknown scheme {value!r}") from None


class Parity(str, enum.Enum):
    EE = "EE"
    EO = "EO"
    OO = "OO"

    @classmethod
    def parse(cls, value) -> "Parity":
        if isinstance(value, cls):
            return value
        v = str(value).upper()
        if v == "OE":
            return cls.EO
        try:
            return cls(v)
        except ValueError:
            raise DomainError(f"unknown parity {value!r}") from None

    def mode_parities(self) -> tuple[int, int]:
        """Per-mode parity bits (0 even, 1 odd)."""
        return {"EE": (0, 0), "EO": (0, 1), "OO": (1, 1)}[self.value]


class Letter(str, enum.Enum):
    PSI = "Psi"
    PHI = "Phi"
    AMBIGUOUS = "Ambiguous"


class Sign(str, enum.Enum):
    PLUS = "+"
    MINUS = "-"

    def flipped(self) -> "Sign":
        return Sign.MINUS if self is Sign.PLUS else Sign.PLUS


class ParityFlag(str, enum.Enum):
    EVEN_EVEN = "even-even"
    SINGLE_LOSS = "single-loss"
    ODD_ODD_DETECTED = "odd-odd-detected"
    ODD_ODD_UNDETECTED = "odd-odd-undetected"


class DVTag(str, enum.Enum):
    SUCCESS_PSI_PLUS = "SuccessPsiPlus"
    SUCCESS_PSI_MINUS = "SuccessPsiMinus"
    FAIL_LETTER_PHI = "FailLetterPhi"
    LOSS_DETECTED = "LossDetected"


@dataclass(frozen=True)
class CVOutcome:
    """Result of a cat-code Bell measurement.

    ``lean`` is the letter chosen when ``letter`` is ``AMBIGUOUS``; ``None``
    marks an exact tie that must be broken by a random draw.
    """

    letter: Letter
    sign: Sign
    parity_flag: ParityFlag
    ambiguity_x_rate: float = 0.0
    lean: Optional[Letter] = None

    def __post_init__(self):
        if self.letter is not Letter.AMBIGUOUS and self.ambiguity_x_rate != 0.0:
            raise DomainError("x rate must vanish for an unambiguous letter")
        if not 0.0 <= self.ambiguity_x_rate <= 0.5:
            raise DomainError("ambiguity x rate outside [0, 1/2]")

    def guess(self, rng: Optional[np.random.Generator] = None) -> Letter:
        """Letter reported downstream; ties are broken with ``rng``."""
        if self.letter is not Letter.AMBIGUOUS:
            return self.letter
        if self.lean is not None:
            return self.lean
        if rng is None:
            raise DomainError("tie-break requires an rng")
        return Letter.PSI if rng.random() < 0.5 else Letter.PHI


@dataclass(frozen=True)
class HybridOutcome:
    letter: Letter
    sign: Sign
    x_error_rate: float
    parity_flag: ParityFlag
    dv_loss: bool = False

    def __post_init__(self):
        if not 0.0 <= self.x_error_rate <= 0.5:
            raise DomainError("x error rate outside [0, 1/2]")


@dataclass(frozen=True)
class CVRateTable:
    p_x: float
    p_loc: float
    p_z_oo: Optional[float] = None


@dataclass(frozen=True)
class Normalizations:
    N_plus: float
    N_minus: float
    N_Bell_plus: float
    N_Bell_minus: float


def _check_alpha(alpha: float) -> float:
    a = float(alpha)
    if not math.isfinite(a) or a <= 0.0:
        raise DomainError(f"alpha must be positive and finite, got {alpha!r}")
    return a


# ----------------------------------------------------------------------------
# Normalizations
# ----------------------------------------------------------------------------

def cat_normalizations(alpha: float) -> Normalizations:
    """Normalization constants of cat states and cat Bell states."""
    a2 = _check_alpha(alpha) ** 2
    e = math.exp(-2.0 * a2)
    n_plus = 1.0 / math.sqrt(2.0 * (1.0 + e))
    n_minus = 1.0 / math.sqrt(2.0 * (1.0 - e))
    # cosh(a2) / sqrt(2 (cosh^2 +- cos^2)); divide through by cosh for large a2
    c = math.cos(a2)
    r = c / math.cosh(a2) if a2 < 700 else 0.0
    nb_plus = 1.0 / math.sqrt(2.0 * (1.0 + r * r))
    nb_minus = 1.0 / math.sqrt(2.0 * (1.0 - r * r))
    return Normalizations(n_plus, n_minus, nb_plus, nb_minus)


# ----------------------------------------------------------------------------
# Closed-form rates
# ----------------------------------------------------------------------------

def _ha_px(x: float, parity: Parity) -> float:
    # x = alpha**2
    if parity is Parity.EE:
        # 1/2 sech^2 x (cosh x + cos x - 1)
        if x > 350:
            return 0.0
        return 0.5 * (math.cosh(x) + math.cos(x) - 1.0) / math.cosh(x) ** 2
    if parity is Parity.EO:
        return 0.5 / math.cosh(x) if x < 700 else 0.0
    # 1/2 csch^2 x (cosh x - cos x), half-angle form avoids cancellation
    if x > 350:
        return 0.0
    s = math.sinh(x)
    num = 2.0 * math.sinh(x / 2) ** 2 + 2.0 * math.sin(x / 2) ** 2
    return 0.5 * num / (s * s)


def _sdr_ploc(x: float, parity: Parity) -> float:
    if parity is Parity.EE:
        if x > 350:
            return 0.0
        return (math.cosh(1.5 * x) - 0.5 * math.cosh(x) + math.cos(x / 2) - 0.5) / math.cosh(x) ** 2
    if parity is Parity.EO:
        if x > 350:
            return 0.0
        return (2.0 * math.sinh(1.5 * x) - math.sinh(x)) / math.sinh(2.0 * x)
    if x > 350:
        return 0.0
    return (math.cosh(1.5 * x) - 0.5 * math.cosh(x) - math.cos(x / 2) + 0.5) / math.sinh(x) ** 2


def _sdr_det_oo(x: float) -> float:
    """Probability that an odd-odd input is flagged as such (SDR)."""
    if x > 350:
        return 0.0
    s2 = math.sinh(x) ** 2
    printed = (0.5 * math.cosh(2 * x) - math.cosh(x) + 2 * math.cosh(x / 2)
               - 2 * math.cos(x / 2) + 0.5) / s2
    return 0.5 * (1.0 - printed)


def cv_rates(scheme, alpha: float, parity) -> CVRateTable:
    """Per-parity misidentification and location rates of a cat Bell measurement.

    Parameters
    ----------
    scheme : Scheme or str
        ``"HA"`` or ``"SDR"``.
    alpha : float
        Cat amplitude.
    parity : Parity or str
        Input parity tag ``EE``, ``EO`` or ``OO``.

    Returns
    -------
    CVRateTable
        ``p_x`` is the letter-misidentification probability, ``p_loc`` the
        probability that the outcome is flagged ambiguous, and ``p_z_oo``
        (OO only) the probability that an odd-odd input is not recognised,
        which leaves a sign error.
    """
    return _cv_rates_cached(Scheme.parse(scheme), _check_alpha(alpha), Parity.parse(parity))


@lru_cache(maxsize=4096)
def _cv_rates_cached(scheme: Scheme, alpha: float, parity: Parity) -> CVRateTable:
    x = alpha * alpha
    if scheme is Scheme.HA:
        px = _ha_px(x, parity)
        pz = 0.5 + px if parity is Parity.OO else None
        return CVRateTable(px, 0.5 + px, pz)
    ploc = _sdr_ploc(x, parity)
    px = sdr_px_enumerated(alpha, parity, ploc)
    pz = 1.0 - _sdr_det_oo(x) if parity is Parity.OO else None
    return CVRateTable(px, ploc, pz)


# ----------------------------------------------------------------------------
# Coherent amplitude maps
# ----------------------------------------------------------------------------

_R2 = math.sqrt(2.0)
_SDR_U = np.array([
    [0.5, 0.5],
    [0.5, -0.5],
    [(-1 + 1j) / (2 * _R2), (1 + 1j) / (2 * _R2)],
    [(1 + 1j) / (2 * _R2), (-1 + 1j) / (2 * _R2)],
])
_HA_U = np.array([[1.0, 1.0], [1.0, -1.0]]) / _R2


def ha_output_map(a_in: complex, c_in: complex) -> np.ndarray:
    """Coherent amplitudes (A, C) after the HA beamsplitter."""
    return _HA_U @ np.array([a_in, c_in], dtype=complex)


def sdr_output_map(a_in: complex, c_in: complex) -> np.ndarray:
    """Coherent amplitudes (A, C, A', C') after the SDR network."""
    return _SDR_U @ np.array([a_in, c_in], dtype=complex)


def _product_terms(alpha: float, parity: Parity, axes: tuple[complex, complex]):
    """Coherent-product expansion of one normalized basis-product input."""
    pa, pc = parity.mode_parities()
    norm = cat_normalizations(alpha)
    na = norm.N_minus if pa else norm.N_plus
    nc = norm.N_minus if pc else norm.N_plus
    terms = []
    for sa in (1, -1):
        for sc in (1, -1):
            coef = na * nc * (sa if pa else 1) * (sc if pc else 1)
            terms.append((coef, sdr_output_map(sa * alpha * axes[0], sc * alpha * axes[1])))
    return terms


def _mode_vectors(beta: np.ndarray, kmax: int) -> np.ndarray:
    """Fock amplitudes <n|beta> for n < kmax, one row per amplitude."""
    n = np.arange(kmax)
    beta = np.asarray(beta, dtype=complex)[:, None]
    mag = np.abs(beta)
    logmag = np.log(np.where(mag > 0, mag, 1.0))
    lv = -0.5 * mag ** 2 + n * logmag - 0.5 * gammaln(n + 1)
    out = np.exp(lv) * np.exp(1j * n * np.angle(beta))
    # vacuum amplitude has only the n = 0 component
    return np.where((mag == 0) & (n > 0), 0.0, out)


def sdr_px_enumerated(alpha: float, parity, p_loc: Optional[float] = None,
                      tol: float = 1e-12, max_photons: Optional[int] = None) -> float:
    """SDR letter-misidentification probability by pattern enumeration.

    Only ambiguous patterns (a vacuum in ``{A, C}`` and a vacuum in
    ``{A', C'}``) can carry a wrong letter, so the sum runs over four 2D
    slices of the detector space.  The slice cap grows until the enumerated
    mass matches ``p_loc`` within ``tol``.

    Raises
    ------
    ConvergenceError
        If the cap exceeds ``max_photons`` (default ``10 alpha^2 + 40``)
        before convergence.
    """
    parity = Parity.parse(parity)
    alpha = _check_alpha(alpha)
    x = alpha * alpha
    if p_loc is None:
        p_loc = _sdr_ploc(x, parity)
    cap = int(10 * x + 40) if max_photons is None else int(max_photons)
    classes = {Letter.PHI: [(1, 1), (1j, 1j)], Letter.PSI: [(1, 1j), (1j, 1)]}
    k = max(8, int(2 * x + 8 * math.sqrt(x) + 8))
    while True:
        k = min(k, cap)
        grid = np.arange(k)
        i, j = np.meshgrid(grid, grid, indexing="ij")
        i, j = i.ravel(), j.ravel()
        z = np.zeros_like(i)
        # zero in {A,C} and zero in {A',C'}
        pats = np.concatenate([
            np.stack([z, i, z, j], 1), np.stack([z, i, j, z], 1),
            np.stack([i, z, z, j], 1), np.stack([i, z, j, z], 1),
        ])
        pats = np.unique(pats, axis=0)
        probs = {}
        for letter, axes_list in classes.items():
            tot = np.zeros(len(pats))
            for axes in axes_list:
                terms = _product_terms(alpha, parity, axes)
                amp = np.zeros(len(pats), dtype=complex)
                for coef, betas in terms:
                    v = np.full(len(pats), coef, dtype=complex)
                    for m in range(4):
                        v *= _mode_vectors(betas[m:m + 1], k)[0][pats[:, m]]
                    amp += v
                tot += 0.25 * np.abs(amp) ** 2
            probs[letter] = tot
        mass = probs[Letter.PHI].sum() + probs[Letter.PSI].sum()
        if abs(p_loc - mass) < tol:
            break
        if k >= cap:
            raise ConvergenceError(
                f"SDR enumeration residual {p_loc - mass:.3e} at photon cap {cap}")
        k = int(k * 1.5) + 1
    w_psi = np.exp2(-(pats[:, 0] + pats[:, 1]).astype(float))
    w_phi = np.exp2(-(pats[:, 2] + pats[:, 3]).astype(float))
    err = np.where(w_psi > w_phi, probs[Letter.PHI],
                   np.where(w_phi > w_psi, probs[Letter.PSI],
                            0.5 * (probs[Letter.PHI] + probs[Letter.PSI])))
    return float(err.sum())


# ----------------------------------------------------------------------------
# Classification
# ----------------------------------------------------------------------------

def _sign_from_total(n: int) -> tuple[Sign, bool]:
    """Sign from the total count N and whether N is odd (single loss)."""
    if n % 2 == 0:
        return (Sign.PLUS if n % 4 == 0 else Sign.MINUS), False
    return (Sign.PLUS if n % 4 == 3 else Sign.MINUS), True


def _check_counts(counts: Sequence[int]) -> None:
    for c in counts:
        if int(c) != c or c < 0:
            raise DomainError(f"counts must be nonnegative integers, got {counts!r}")


def classify_ha(n_A: int, n_C: int) -> CVOutcome:
    """Classify an HA detector pattern.

    Both detectors clicking identifies ``Psi``.  A silent detector leaves the
    letter ambiguous with a ``Phi`` lean; its x rate is the likelihood ratio
    ``1 / (1 + 2**N)`` of the two coherent-state hypotheses.  A detected
    odd-odd input (``n_C = n_A + 2 mod 4``) has its sign corrected, since the
    total-count rule reports the wrong sign for every odd-odd input.
    """
    _check_counts((n_A, n_C))
    n = n_A + n_C
    sign, odd = _sign_from_total(n)
    flag = ParityFlag.SINGLE_LOSS if odd else ParityFlag.EVEN_EVEN
    if n_A > 0 and n_C > 0:
        if not odd and (n_C - n_A) % 4 == 2:
            return CVOutcome(Letter.PSI, sign.flipped(), ParityFlag.ODD_ODD_DETECTED)
        return CVOutcome(Letter.PSI, sign, flag)
    x_rate = 1.0 / (1.0 + 2.0 ** n)
    return CVOutcome(Letter.AMBIGUOUS, sign, flag, x_rate, Letter.PHI)


def classify_sdr(n_A: int, n_C: int, n_Ap: int, n_Cp: int) -> CVOutcome:
    """Classify an SDR detector pattern.

    A vacuum in ``{A', C'}`` points to ``Psi`` and a vacuum in ``{A, C}`` to
    ``Phi``.  With vacua on both sides the letter with the larger weight
    (``2**-(n_A+n_C)`` for ``Psi``, ``2**-(n_A'+n_C')`` for ``Phi``) is taken and
    the smaller normalized weight is the x rate; equal weights give 1/2 and
    no lean.
    """
    _check_counts((n_A, n_C, n_Ap, n_Cp))
    n = n_A + n_C + n_Ap + n_Cp
    sign, odd = _sign_from_total(n)
    flag = ParityFlag.SINGLE_LOSS if odd else ParityFlag.EVEN_EVEN
    zero_1 = n_A == 0 or n_C == 0
    zero_2 = n_Ap == 0 or n_Cp == 0
    if not odd:
        oo = (n_A > 0 and n_C > 0 and n_Ap == 0 and n_Cp == 0 and (n_A - n_C) % 4 == 2) or \
             (n_Ap > 0 and n_Cp > 0 and n_A == 0 and n_C == 0 and (n_Ap - n_Cp) % 4 == 2)
        if oo:
            sign, flag = sign.flipped(), ParityFlag.ODD_ODD_DETECTED
    if zero_2 and not zero_1:
        return CVOutcome(Letter.PSI, sign, flag)
    if zero_1 and not zero_2:
        return CVOutcome(Letter.PHI, sign, flag)
    if not zero_1 and not zero_2:
        # unreachable for ideal inputs; report maximal ignorance
        return CVOutcome(Letter.AMBIGUOUS, sign, flag, 0.5, None)
    s1, s2 = n_A + n_C, n_Ap + n_Cp
    if s1 == s2:
        return CVOutcome(Letter.AMBIGUOUS, sign, flag, 0.5, None)
    # weight ratio of the minority letter, 1 / (1 + 2**|s1 - s2|)
    x_rate = 1.0 / (1.0 + 2.0 ** abs(s1 - s2))
    lean = Letter.PSI if s1 < s2 else Letter.PHI
    return CVOutcome(Letter.AMBIGUOUS, sign, flag, x_rate, lean)


def classify_dv(click_pattern: Sequence[int]) -> DVTag:
    """Classify a type-II fusion click pattern.

    ``click_pattern`` holds counts ``(H1, V1, H2, V2)`` of the polarization
    detectors behind the two output ports.  One photon per port succeeds:
    orthogonal polarizations give ``Psi+`` and parallel ones ``Psi-``.  Two
    photons in one port fail but reveal the ``Phi`` letter.
    """
    if len(click_pattern) != 4:
        raise DomainError("expected four detector counts (H1, V1, H2, V2)")
    _check_counts(click_pattern)
    h1, v1, h2, v2 = (int(c) for c in click_pattern)
    total = h1 + v1 + h2 + v2
    if total > 2:
        raise DomainError(f"type-II pattern carries {total} photons, at most 2 allowed")
    if total < 2:
        return DVTag.LOSS_DETECTED
    if h1 + v1 == 1:
        return DVTag.SUCCESS_PSI_PLUS if (h1 and v2) or (v1 and h2) else DVTag.SUCCESS_PSI_MINUS
    return DVTag.FAIL_LETTER_PHI


def classify_hybrid(cv: CVOutcome, dv: DVTag,
                    rng: Optional[np.random.Generator] = None) -> HybridOutcome:
    """Combine the CV and DV results into a hybrid Bell outcome.

    The hybrid letter is the CV letter.  The hybrid sign equals the CV sign
    when the DV letter is ``Phi`` and is flipped when it is ``Psi``.  An
    ambiguous CV letter is resolved by a successful DV measurement: DV sign
    ``-`` means ``Psi`` and ``+`` means ``Phi``.
    """
    dv = DVTag(dv)
    loss = dv is DVTag.LOSS_DETECTED
    dv_success = dv in (DVTag.SUCCESS_PSI_PLUS, DVTag.SUCCESS_PSI_MINUS)
    sign = cv.sign.flipped() if dv_success else cv.sign
    if cv.letter is not Letter.AMBIGUOUS:
        return HybridOutcome(cv.letter, sign, 0.0, cv.parity_flag, loss)
    if dv_success:
        letter = Letter.PSI if dv is DVTag.SUCCESS_PSI_MINUS else Letter.PHI
        return HybridOutcome(letter, sign, 0.0, cv.parity_flag, loss)
    return HybridOutcome(cv.guess(rng), sign, cv.ambiguity_x_rate, cv.parity_flag, loss)
