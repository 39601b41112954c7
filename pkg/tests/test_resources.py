import math

import pytest

from hybridcat.resources import OverheadError, generation_costs, lattice_sites, overhead_estimate


def test_formulas():
    c = generation_costs(1.0)
    s = 1 - math.exp(-2)
    assert c.p_alpha == pytest.approx(0.1353352832366127)
    assert (c.cost_hcat_pair, c.cost_triple) == (8.0, 18.0)
    assert c.cost_c3 == 54 / s ** 2 and c.cost_phi_H == 36 / s and c.cost_phi_CZ == 92 / s ** 3
    assert c.cost_c3 == pytest.approx(72.23, abs=0.01)
    assert c.cost_phi_CZ == pytest.approx(142.3, abs=0.05)
    big = generation_costs(10.0)
    assert (big.cost_c3, big.cost_phi_H, big.cost_phi_CZ) == pytest.approx((54, 36, 92))


def test_monotone_in_beta():
    a, b = generation_costs(0.8), generation_costs(1.2)
    assert a.cost_c3 > b.cost_c3 and a.cost_phi_CZ > b.cost_phi_CZ
    with pytest.raises(ValueError):
        generation_costs(0.0)


def test_overhead():
    table = {3: 1.6e-5, 4: 8e-7, 5: 3e-7}
    r = overhead_estimate(1e-6, table)
    assert r.chosen_d == 4 and r.n_sites == 384
    assert r.n_unit_resources == pytest.approx(384 * generation_costs(1).cost_c3)
    assert overhead_estimate(1.0, table).chosen_d == 3
    with pytest.raises(OverheadError):
        overhead_estimate(1e-9, table)
    assert lattice_sites(3, "lattice") == 72 + 132
    assert lattice_sites(4) / lattice_sites(2) == 8
