import math

import numpy as np
import pytest

from hybridcat.analytics import cv_rates
from hybridcat.fock_oracle import (TruncationError, apply_beamsplitter, apply_loss, estimate_fusion_stats,
                                   loss_branch_weights, make_cat, make_coherent, tensor)
from hybridcat.loss_model import loss_coefficients


def test_cat_support_and_norm():
    c = make_cat(1.0, "real", "even", 30)
    assert abs(c.amplitudes[1]) == 0.0
    assert c.norm2() == pytest.approx(1.0, abs=1e-12)
    # vacuum amplitude 2 N+ exp(-1/2)
    n_plus = 1 / math.sqrt(2 * (1 + math.exp(-2)))
    assert c.amplitudes[0].real == pytest.approx(2 * n_plus * math.exp(-0.5), abs=1e-12)


def test_cat_overlap_real_imag():
    a, b = make_cat(1.0, "real", "even", 40), make_cat(1.0, "imag", "even", 40)
    ov = np.vdot(a.amplitudes, b.amplitudes)
    # <C_a|C_ia> for even cats: 2 N+^2 (e^{-a^2} ... ) reduces to cos(a^2)/cosh(a^2) scaling
    n_plus = 1 / math.sqrt(2 * (1 + math.exp(-2)))
    ref = 4 * n_plus ** 2 * math.exp(-1) * math.cos(1.0)
    assert ov.real == pytest.approx(ref, abs=1e-10)


def test_truncation_error():
    with pytest.raises(TruncationError):
        make_cat(3.0, cutoff=5)


def test_beamsplitter_coherent_and_single_photon():
    a = 1.2
    st = tensor(make_coherent(a, 30), make_coherent(a, 30))
    out = apply_beamsplitter(st, (0, 1))
    ref = np.multiply.outer(make_coherent(math.sqrt(2) * a, 30).amplitudes,
                            make_coherent(0.0, 30).amplitudes)
    assert abs(np.vdot(ref, out.amplitudes)) ** 2 > 1 - 1e-9
    one = np.zeros((3, 3), complex)
    one[1, 0] = 1.0
    from hybridcat.fock_oracle import FockVector
    out = apply_beamsplitter(FockVector(one, 0.0), (0, 1)).amplitudes
    assert abs(out[1, 0]) == pytest.approx(1 / math.sqrt(2), abs=1e-12)
    assert abs(out[0, 1]) == pytest.approx(1 / math.sqrt(2), abs=1e-12)
    assert out.real.sum() ** 0 and np.sum(abs(out) ** 2) == pytest.approx(1.0, abs=1e-12)


def test_loss_on_coherent_state():
    eta = 0.1
    ens = apply_loss(make_coherent(1.5, 40), 0, eta)
    ref = make_coherent(math.sqrt(1 - eta) * 1.5, 40).amplitudes
    fid = sum(w * abs(np.vdot(ref, s.amplitudes)) ** 2 for w, s in ens.branches)
    assert fid > 1 - 1e-9
    assert len(apply_loss(make_coherent(1.5, 40), 0, 0.0).branches) == 1


@pytest.mark.parametrize("alpha,eta", [(1.0, 0.01), (2.0, 0.05), (3.0, 0.001)])
def test_loss_branch_weights_match(alpha, eta):
    w = loss_branch_weights(alpha, eta)
    c = loss_coefficients(alpha, eta)
    assert w[0] + w[2] == pytest.approx(c.w_even, abs=1e-8)
    assert w[1] + w[3] == pytest.approx(c.w_odd, abs=1e-8)


@pytest.mark.parametrize("scheme", ["HA", "SDR"])
@pytest.mark.parametrize("parity", ["EE", "EO", "OO"])
def test_oracle_matches_closed_forms(scheme, parity):
    got = estimate_fusion_stats(scheme, 1.0, parity)
    ref = cv_rates(scheme, 1.0, parity)
    assert got.p_x == pytest.approx(ref.p_x, abs=1e-6)
    assert got.p_loc == pytest.approx(ref.p_loc, abs=1e-6)
    if parity == "OO":
        assert got.p_z_oo == pytest.approx(ref.p_z_oo, abs=1e-6)


def test_ha_even_even_conserves_parity():
    st = estimate_fusion_stats("HA", 1.5, "EE")
    for (na, nc), p, _ in st.pattern_table:
        if na > 0 and nc > 0 and (na + nc) % 2 == 1:
            assert p < 1e-12
