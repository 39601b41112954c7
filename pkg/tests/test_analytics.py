import math

import numpy as np
import pytest

from hybridcat.analytics import (DVTag, DomainError, Letter, Parity, ParityFlag, Scheme, Sign,
                                 CVOutcome, cat_normalizations, classify_dv, classify_ha,
                                 classify_hybrid, classify_sdr, cv_rates, sdr_px_enumerated)


def test_normalizations():
    n = cat_normalizations(1.0)
    assert n.N_plus == pytest.approx(1 / math.sqrt(2 * (1 + math.exp(-2))), abs=1e-12)
    big = cat_normalizations(6.0)
    assert big.N_plus == pytest.approx(1 / math.sqrt(2), abs=1e-12)
    assert big.N_minus == pytest.approx(1 / math.sqrt(2), abs=1e-12)


@pytest.mark.parametrize("alpha", [0.0, -1.0, float("nan"), float("inf")])
def test_bad_alpha(alpha):
    with pytest.raises(DomainError):
        cv_rates("HA", alpha, "EE")


def test_ha_closed_forms():
    x = 1.0
    ee = cv_rates("HA", 1.0, "EE")
    # cosh + cos form, verified against the Fock oracle
    assert ee.p_x == pytest.approx(0.5 / math.cosh(x) ** 2 * (math.cosh(x) + math.cos(x) - 1), abs=1e-12)
    assert ee.p_loc == pytest.approx(0.5 + ee.p_x, abs=1e-12)
    eo = cv_rates("HA", 1.0, "EO")
    assert eo.p_x == pytest.approx(0.5 / math.cosh(x), abs=1e-12)
    oo = cv_rates("HA", 1.0, "OO")
    assert oo.p_x == pytest.approx(0.5 / math.sinh(x) ** 2 * (math.cosh(x) - math.cos(x)), abs=1e-12)
    assert oo.p_z_oo == pytest.approx(0.5 + oo.p_x, abs=1e-12)
    assert ee.p_z_oo is None and eo.p_z_oo is None


def test_sdr_closed_forms():
    x = 4.0
    ee = cv_rates("SDR", 2.0, "EE")
    ref = (math.cosh(1.5 * x) - 0.5 * math.cosh(x) + math.cos(x / 2) - 0.5) / math.cosh(x) ** 2
    assert ee.p_loc == pytest.approx(ref, abs=1e-9)
    eo = cv_rates("SDR", 1.0, "EO")
    assert eo.p_loc == pytest.approx(0.8501451309994529, abs=1e-12)


@pytest.mark.parametrize("scheme", ["HA", "SDR"])
@pytest.mark.parametrize("parity", ["EE", "EO", "OO"])
def test_px_decreasing(scheme, parity):
    a = np.linspace(0.5, 4.0, 36)
    p = [cv_rates(scheme, x, parity).p_x for x in a]
    assert np.all(np.diff(p) < 0)
    assert p[-1] < 1e-3
    assert all(0 <= v <= 0.5 for v in p)


def test_sdr_px_enumeration_converges():
    r = cv_rates("SDR", 1.5, "EE")
    assert sdr_px_enumerated(1.5, "EE") == pytest.approx(r.p_x, abs=1e-12)


def test_parse():
    assert Scheme.parse("ha") is Scheme.HA
    assert Parity.parse("oe") is Parity.EO
    with pytest.raises(ValueError):
        Scheme.parse("xx")


def test_classify_ha_examples():
    o = classify_ha(2, 2)
    assert (o.letter, o.sign, o.parity_flag) == (Letter.PSI, Sign.PLUS, ParityFlag.EVEN_EVEN)
    o = classify_ha(0, 0)
    assert o.letter is Letter.AMBIGUOUS and o.sign is Sign.PLUS
    o = classify_ha(3, 3)
    assert (o.letter, o.sign, o.parity_flag) == (Letter.PSI, Sign.MINUS, ParityFlag.EVEN_EVEN)
    o = classify_ha(1, 3)
    assert o.parity_flag is ParityFlag.ODD_ODD_DETECTED and o.sign is Sign.MINUS
    o = classify_ha(0, 3)
    assert o.parity_flag is ParityFlag.SINGLE_LOSS
    assert o.ambiguity_x_rate == pytest.approx(1 / 9)


def test_classify_sdr_examples():
    o = classify_sdr(0, 3, 0, 5)
    assert o.letter is Letter.AMBIGUOUS and o.lean is Letter.PSI
    assert o.ambiguity_x_rate == pytest.approx(0.2)
    o = classify_sdr(0, 2, 0, 2)
    assert o.ambiguity_x_rate == 0.5 and o.lean is None
    o = classify_sdr(4, 0, 0, 0)
    assert o.guess() is Letter.PHI and o.sign is Sign.PLUS
    assert classify_sdr(2, 2, 0, 1).letter is Letter.PSI
    assert classify_sdr(0, 1, 3, 1).letter is Letter.PHI


@pytest.mark.parametrize("counts", [(-1, 0), (1.5, 0)])
def test_classify_bad_counts(counts):
    with pytest.raises(DomainError):
        classify_ha(*counts)


def test_classify_dv():
    assert classify_dv((1, 0, 0, 1)) is DVTag.SUCCESS_PSI_PLUS
    assert classify_dv((0, 1, 1, 0)) is DVTag.SUCCESS_PSI_PLUS
    assert classify_dv((1, 0, 1, 0)) is DVTag.SUCCESS_PSI_MINUS
    assert classify_dv((1, 0, 0, 0)) is DVTag.LOSS_DETECTED
    assert classify_dv((1, 1, 0, 0)) is DVTag.FAIL_LETTER_PHI
    with pytest.raises(DomainError):
        classify_dv((2, 1, 0, 0))


def test_classify_hybrid():
    psi_minus = CVOutcome(Letter.PSI, Sign.MINUS, ParityFlag.EVEN_EVEN)
    h = classify_hybrid(psi_minus, DVTag.FAIL_LETTER_PHI)
    assert (h.letter, h.sign, h.x_error_rate) == (Letter.PSI, Sign.MINUS, 0.0)
    amb = CVOutcome(Letter.AMBIGUOUS, Sign.PLUS, ParityFlag.EVEN_EVEN, 0.2, Letter.PSI)
    h = classify_hybrid(amb, DVTag.SUCCESS_PSI_PLUS)
    assert h.letter is Letter.PHI and h.x_error_rate == 0.0
    h = classify_hybrid(CVOutcome(Letter.PSI, Sign.PLUS, ParityFlag.EVEN_EVEN),
                        DVTag.SUCCESS_PSI_MINUS)
    assert h.x_error_rate == 0.0 and h.sign is Sign.MINUS
    h = classify_hybrid(amb, DVTag.LOSS_DETECTED)
    assert h.dv_loss and h.x_error_rate == 0.2
    tie = CVOutcome(Letter.AMBIGUOUS, Sign.PLUS, ParityFlag.EVEN_EVEN, 0.5, None)
    with pytest.raises(DomainError):
        classify_hybrid(tie, DVTag.FAIL_LETTER_PHI)
    h = classify_hybrid(tie, DVTag.FAIL_LETTER_PHI, np.random.default_rng(0))
    assert h.letter in (Letter.PSI, Letter.PHI)
