import math
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from spikyball import InvalidArgument
from spikyball.generators import (_unrank_pairs, add_pendants, barabasi_albert, block_labels, erdos_renyi,
                                  erdos_renyi_p, stochastic_block_model)


@given(st.integers(2, 40))
def test_unrank_pairs_matches_enumeration(n):
    pairs = list(combinations(range(n), 2))
    u, v = _unrank_pairs(np.arange(len(pairs)), n)
    assert list(zip(u.tolist(), v.tolist())) == pairs


@pytest.mark.parametrize("seed", [0, 1, 99])
def test_er_forced_complete(seed):
    g = erdos_renyi(4, 6, seed)
    assert g.degree_histogram() == {3: 4}


def test_er_mean_degree_exact():
    g = erdos_renyi(1000, 5000, 3)
    assert g.edge_count == 5000
    assert g.degrees().mean() == 10.0


def test_er_poisson_degrees():
    deg = erdos_renyi(50000, 250000, 0).degrees()
    cdf, term = 0.0, math.exp(-10.0)
    gap = 0.0
    for k in range(int(deg.max()) + 1):
        cdf += term
        term *= 10.0 / (k + 1)
        gap = max(gap, abs(np.mean(deg <= k) - cdf))
    assert gap <= 0.02


def test_er_p_wrapper():
    g = erdos_renyi_p(100, 0.1, 0)
    assert g.edge_count == round(0.1 * 100 * 99 / 2)


def test_er_errors():
    with pytest.raises(InvalidArgument):
        erdos_renyi(4, 7)
    with pytest.raises(InvalidArgument):
        erdos_renyi_p(10, 1.5)


def test_ba_seed_clique_and_min_degree():
    g = barabasi_albert(4, 3, 0)
    assert g.degree_histogram() == {3: 4}
    g = barabasi_albert(2000, 4, 5)
    assert g.degrees().min() >= 4
    assert g.edge_count == 4 * 5 // 2 + 4 * (2000 - 5)


def test_ba_power_law_slope():
    h = barabasi_albert(50000, 5, 0).degree_histogram()
    d = np.array([k for k in h if 10 <= k <= 100])
    slope = np.polyfit(np.log(d), np.log([h[k] for k in d]), 1)[0]
    assert -3.4 <= slope <= -2.6


def test_ba_deterministic():
    a, b = barabasi_albert(500, 3, 7), barabasi_albert(500, 3, 7)
    assert list(a.edges()) == list(b.edges())


def test_sbm_two_triangles():
    g = stochastic_block_model([3, 3], 1.0, 0.0, 0)
    assert g.edge_count == 6
    assert sorted(g.neighbor_ids(0).tolist()) == [1, 2]
    assert sorted(g.neighbor_ids(4).tolist()) == [3, 5]


def test_sbm_matches_er_edge_count_when_flat():
    counts = [stochastic_block_model([50, 50], 0.1, 0.1, s).edge_count for s in range(30)]
    expected = 0.1 * 100 * 99 / 2
    assert abs(np.mean(counts) - expected) < 3 * math.sqrt(expected * 0.9 / 30) + 1


def test_sbm_block_structure():
    sizes = [500] * 10
    g = stochastic_block_model(sizes, 0.05, 0.001, 0)
    assert g.node_count == 5000
    lab = block_labels(sizes)
    inside = sum(lab[e.source] == lab[e.target] for e in g.edges())
    assert inside / g.edge_count > 0.8


def test_sbm_errors():
    with pytest.raises(InvalidArgument):
        stochastic_block_model([3, 3], 0.1, 0.2)


def test_add_pendants():
    g = erdos_renyi(50, 200, 0)
    h = add_pendants(g, 10, 1)
    assert h.node_count == 60 and h.edge_count == 210
    assert all(h.degree(v) == 1 for v in range(50, 60))
    assert all(h.neighbor_ids(v)[0] < 50 for v in range(50, 60))
