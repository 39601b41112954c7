"""Photon-loss coefficients of a hybrid qubit and per-fusion error rates.

With ``x = eta alpha^2`` and ``alpha' = sqrt(1 - eta) alpha`` the loss channel
maps ``|C_alpha^+>`` into branches that lost ``l (mod 4)`` photons, with
weights

    A0 = cosh(a'^2) (cosh x + cos x) / (2 cosh a^2)
    A1 = sinh(a'^2) (sinh x + sin x) / (2 cosh a^2)
    A2 = cosh(a'^2) (cosh x - cos x) / (2 cosh a^2)
    A3 = sinh(a'^2) (sinh x - sin x) / (2 cosh a^2)

and ``B0 = cosh(a'^2) cosh x / (2 cosh a^2)``, ``B1 = sinh(a'^2) sinh x /
(2 cosh a^2)``.  Even and odd parity probabilities are ``A0 + A2`` and
``A1 + A3``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analytics import DomainError, Parity, Scheme, cv_rates, _check_alpha

__all__ = [
    "LossCoefficients",
    "FusionErrorRates",
    "loss_coefficients",
    "parity_weights",
    "noisy_px",
    "fusion_error_rates",
]


@dataclass(frozen=True)
class LossCoefficients:
    A: tuple[float, float, float, float]
    B: tuple[float, float]
    alpha_prime: float

    @property
    def w_even(self) -> float:
        return self.A[0] + self.A[2]

    @property
    def w_odd(self) -> float:
        return self.A[1] + self.A[3]


@dataclass(frozen=True)
class FusionErrorRates:
    p_x_total: float
    p_z_unloc: float
    p_z_loc: float

    def __post_init__(self):
        for v in (self.p_x_total, self.p_z_unloc, self.p_z_loc):
            if not 0.0 <= v <= 1.0:
                raise DomainError(f"rate {v!r} outside [0, 1]")

    @property
    def p_z_total(self) -> float:
        return self.p_z_unloc + self.p_z_loc

    @classmethod
    def zero(cls) -> "FusionErrorRates":
        return cls(0.0, 0.0, 0.0)


def _check_eta(eta: float) -> float:
    e = float(eta)
    if not math.isfinite(e) or not 0.0 <= e < 1.0:
        raise DomainError(f"eta must lie in [0, 1), got {eta!r}")
    return e


def _ratio(f_num, a_num: float, a_den: float) -> float:
    """``f(a_num) / cosh(a_den)`` for f in {cosh, sinh}, overflow safe."""
    # f(t) = (e^t +- e^-t)/2; divide by e^{a_den} before combining
    sgn = 1.0 if f_num == "cosh" else -1.0
    num = math.exp(a_num - a_den) + sgn * math.exp(-a_num - a_den)
    den = 1.0 + math.exp(-2.0 * a_den)
    return num / den


def loss_coefficients(alpha: float, eta: float) -> LossCoefficients:
    """Loss-branch coefficients ``A0..A3``, ``B0``, ``B1`` and ``alpha'``."""
    a = _check_alpha(alpha)
    e = _check_eta(eta)
    a2 = a * a
    ap2 = (1.0 - e) * a2
    x = e * a2
    # cosh(a'^2) cosh(x) / cosh(a^2) etc. evaluated as ratios of exponentials
    ch_ap = _ratio("cosh", ap2, a2)
    sh_ap = _ratio("sinh", ap2, a2)
    chx, shx = math.cosh(x), math.sinh(x)
    cx, sx = math.cos(x), math.sin(x)
    A0 = 0.5 * ch_ap * (chx + cx)
    A1 = 0.5 * sh_ap * (shx + sx)
    A2 = 0.5 * ch_ap * (chx - cx)
    A3 = 0.5 * sh_ap * (shx - sx)
    B0 = 0.5 * ch_ap * chx
    B1 = 0.5 * sh_ap * shx
    return LossCoefficients((A0, A1, A2, A3), (B0, B1), math.sqrt(ap2))


def parity_weights(alpha: float, eta: float) -> dict[Parity, float]:
    """Input-parity weights of two independently lossy cat modes."""
    c = loss_coefficients(alpha, eta)
    we, wo = c.w_even, c.w_odd
    return {Parity.EE: we * we, Parity.EO: 2.0 * we * wo, Parity.OO: wo * wo}


def noisy_px(scheme, alpha: float, eta: float) -> float:
    """Letter-misidentification rate ``p_X'`` for lossy inputs at ``alpha'``."""
    scheme = Scheme.parse(scheme)
    c = loss_coefficients(alpha, eta)
    w = parity_weights(alpha, eta)
    total = 0.0
    for par, wt in w.items():
        if wt > 0.0:
            total += wt * cv_rates(scheme, c.alpha_prime, par).p_x
    return total


def fusion_error_rates(scheme, alpha: float, eta: float) -> FusionErrorRates:
    """Per-fusion error rates of hybrid fusion under photon loss.

    * ``P_X = (1-eta)^2 p_X'/2 + (2 eta - eta^2) p_X'``: the DV half halves
      the CV ambiguity only when both DV photons survive.
    * ``P_Z(unloc) = (1-eta)^2 [2 (A0+A1)(A2+A3) + (A1-A3)^2 p_Z|OO(alpha')]``.
    * ``P_Z(loc) = (1 - (1-eta)^2) / 2``.
    """
    scheme = Scheme.parse(scheme)
    e = _check_eta(eta)
    c = loss_coefficients(alpha, e)
    A0, A1, A2, A3 = c.A
    surv = (1.0 - e) ** 2
    pxp = noisy_px(scheme, alpha, e)
    p_x = surv * pxp / 2.0 + (2.0 * e - e * e) * pxp
    pz_oo = cv_rates(scheme, c.alpha_prime, Parity.OO).p_z_oo
    p_zu = surv * (2.0 * (A0 + A1) * (A2 + A3) + (A1 - A3) ** 2 * pz_oo)
    p_zl = 0.5 * (1.0 - surv)
    return FusionErrorRates(float(np.clip(p_x, 0, 1)), float(np.clip(p_zu, 0, 1)), p_zl)
