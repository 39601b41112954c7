import math

import numpy as np
import pytest

from hybridcat.decoder import (DecodingError, brute_force_match, build_decoding_graph, correction_weight,
                               decode, defect_distances, qubit_weights)
from hybridcat.rhg_lattice import ErrorAssignment, build_lattice, syndrome


def test_weights():
    assert qubit_weights(np.array([0.01]))[0] == pytest.approx(math.log(99))
    assert 0 < qubit_weights(np.array([0.5 - 1e-9]))[0] < 1e-7
    with pytest.raises(DecodingError):
        qubit_weights(np.array([0.5]))


def test_trivial_and_pair():
    lat = build_lattice(3)
    g = build_decoding_graph(lat, ErrorAssignment(np.full(lat.n_qubits, 0.01)))
    assert not decode(g, np.zeros(lat.n_cells, np.uint8)).any()
    q = np.flatnonzero(lat.boundary < 0)[5]
    f = np.zeros(lat.n_qubits, bool)
    f[q] = True
    corr = decode(g, syndrome(lat, f))
    assert np.array_equal(corr, f)
    with pytest.raises(DecodingError):
        decode(g, np.zeros(3, np.uint8))


def test_shortest_path_against_enumeration():
    lat = build_lattice(3)
    rng = np.random.default_rng(5)
    q = rng.uniform(0.001, 0.2, lat.n_qubits)
    g = build_decoding_graph(lat, ErrorAssignment(q))
    # Bellman-Ford relaxation as an independent shortest-path computation
    n = lat.n_cells + 1
    dist = np.full(n, np.inf)
    dist[0] = 0.0
    qc = np.where(lat.qubit_cells >= 0, lat.qubit_cells, lat.n_cells)
    for _ in range(n):
        for (u, v), w in zip(qc, g.weights):
            dist[v] = min(dist[v], dist[u] + w)
            dist[u] = min(dist[u], dist[v] + w)
    dd, db = defect_distances(g, [0, lat.n_cells - 1])
    assert dd[0, 1] == pytest.approx(dist[lat.n_cells - 1])
    assert db[0] == pytest.approx(dist[lat.n_cells])


def test_brute_force_small_cases():
    lat = build_lattice(3)
    g = build_decoding_graph(lat, ErrorAssignment(np.full(lat.n_qubits, 0.05)))
    assert brute_force_match(g, np.zeros(lat.n_cells, bool)).weight == 0.0
    dd, db = defect_distances(g, [3, 4])
    m = brute_force_match(g, np.array([3, 4]))
    assert m.weight == pytest.approx(min(dd[0, 1], db[0] + db[1]))
    with pytest.raises(DecodingError):
        brute_force_match(g, np.arange(12), max_defects=10)


def test_decode_matches_brute_force():
    rng = np.random.default_rng(11)
    for d in (3, 4):
        lat = build_lattice(d)
        for _ in range(40):
            q = rng.uniform(0.005, 0.3, lat.n_qubits)
            g = build_decoding_graph(lat, ErrorAssignment(q))
            k = int(rng.integers(1, 9))
            s = np.zeros(lat.n_cells, np.uint8)
            s[rng.choice(lat.n_cells, k, replace=False)] = 1
            corr = decode(g, s)
            assert np.array_equal(syndrome(lat, corr), s.astype(bool))
            assert correction_weight(g, corr) == pytest.approx(brute_force_match(g, s).weight,
                                                               rel=1e-9, abs=1e-9)
