import numpy as np
import pytest

from hybridcat.steane import (N, LevelRates, _LOOKUP, _MEASURE, level0_rates, propagate, run_levels,
                              simulate_level)


def test_single_error_correction():
    for i in range(N):
        assert _LOOKUP[1 << i] == 0
    assert _LOOKUP[0] == 0
    # every weight-2 error is miscorrected to a logical flip
    assert all(_LOOKUP[(1 << i) | (1 << j)] == 1 for i in range(N) for j in range(i + 1, N))
    for i in range(N):
        assert _MEASURE[1 << i, 0] == 0


def test_single_fault_anywhere_is_harmless():
    z = np.zeros(1, np.uint8)
    for slot in range(8):
        for i in range(N):
            masks = [z.copy() for _ in range(12)]
            masks[slot] = np.array([1 << i], np.uint8)
            lx, lz, fl = propagate(*masks)
            assert not lx[0] and not lz[0] and not fl[0]


def test_zero_rates():
    r = simulate_level(LevelRates(0, 0, 0), 1000, 0)
    assert (r.x_unloc, r.z_unloc, r.loc) == (0, 0, 0)


def test_accepted_point_decreases():
    start = level0_rates("HA", 2.9, 0.001)
    v = run_levels(start, 3, 100_000, 1)
    assert v.accepted and len(v.rate_trajectory) == 4
    assert v.rate_trajectory[1].worst < start.worst


def test_eta_zero_accepted():
    for a in (2.0, 2.5, 3.0):
        assert run_levels(level0_rates("HA", a, 0.0), 3, 50_000, 2).accepted


def test_rates_validated():
    with pytest.raises(ValueError):
        LevelRates(1.5, 0, 0)
