from collections import Counter

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from conftest import random_graph, small_graphs, star
from spikyball import (DegenerateDistributionError, EdgeRecord, FireballBudget, FixedNodes, Graph,
                       GraphSource, InMemorySource, InvalidArgument, MaxLayers, NodeRatio, SamplerConfig,
                       SourceFeature, TargetFeature, TargetNodes, preset, spikyball)
from spikyball.sampler import (_draw_order, edge_probabilities, filter_edges, layer_budget, layer_state,
                               sample_edges)

E = EdgeRecord


def state_for(e_out, layer=None, sampled=None):
    layer = layer or {e.source for e in e_out}
    return layer_state(0, layer, sampled or set(layer), e_out)


def to_nx(g):
    h = nx.Graph()
    h.add_nodes_from(range(g.node_count))
    h.add_weighted_edges_from(g.edges())
    return h


def bfs_ball(g, seeds, k):
    h = to_nx(g)
    ball = set()
    for s in seeds:
        ball |= set(nx.single_source_shortest_path_length(h, s, cutoff=k))
    return ball


# -- filter / probabilities / budget ---------------------------------------

def test_filter_edges_examples():
    edges = [E(0, 1), E(0, 2)]
    assert filter_edges(edges, {0, 1, 2}) == (edges, [])
    assert filter_edges(edges, {0}) == ([], edges)
    path = [E(1, 0, 2.0), E(1, 2, 0.5)]
    assert filter_edges(path, {1}, min_weight=1.0) == ([], [E(1, 0, 2.0)])


def test_uniform_probabilities():
    e_out = [E(0, 3), E(0, 4), E(1, 4), E(2, 5)]
    p = edge_probabilities(e_out, state_for(e_out), SamplerConfig())
    assert all(v == pytest.approx(0.25) for v in p.values())


def test_uni_node_probabilities():
    e_out = [E(0, 2), E(0, 3), E(1, 4)]
    p = edge_probabilities(e_out, state_for(e_out), SamplerConfig(alpha=-1))
    assert [p[e] for e in e_out] == pytest.approx([0.25, 0.25, 0.5])


def test_coreball_probabilities():
    # candidate 2 has d_in 1, candidate 3 has d_in 2
    e_out = [E(0, 2), E(0, 3), E(1, 3)]
    cfg = preset("coreball", 2.0)
    p = edge_probabilities(e_out, state_for(e_out), cfg)
    by_target = Counter()
    for e, v in p.items():
        by_target[e.target] += v
    assert by_target[2] == pytest.approx(1 / 9)
    assert p[E(0, 2)] == pytest.approx(1 / 9) and p[E(0, 3)] == pytest.approx(4 / 9)
    single = [E(0, 2), E(1, 3)]
    st_ = layer_state(0, {0, 1}, {0, 1}, single)
    st_.d_in[3] = 2  # the {1, 2} instance: unit weights, d_in = {1, 2}
    p = edge_probabilities(single, st_, cfg)
    assert [p[e] for e in single] == pytest.approx([1 / 5, 4 / 5])


def test_zero_mass_raises():
    e_out = [E(0, 1, 1.0)]
    st_ = state_for(e_out)
    st_.d_out[0] = 0.0
    with pytest.raises(DegenerateDistributionError):
        edge_probabilities(e_out, st_, SamplerConfig(alpha=-1))


def test_layer_budget_examples():
    e_out = [E(0, j) for j in range(1, 38)]
    assert layer_budget(e_out, SamplerConfig(budget=NodeRatio(0.1)), 1) == 4
    assert layer_budget(e_out, SamplerConfig(budget=NodeRatio(1.0)), 1) == 37
    assert layer_budget(e_out[:30], SamplerConfig(budget=NodeRatio(0.1)), 1) == 3
    assert layer_budget(e_out, SamplerConfig(budget=FireballBudget(0.4)), 10) == 7
    assert layer_budget(e_out, SamplerConfig(budget=FixedNodes(100)), 10) == 37
    assert layer_budget([], SamplerConfig(), 3) == 0


@pytest.mark.parametrize("rule", [lambda: NodeRatio(0), lambda: NodeRatio(1.5), lambda: FixedNodes(0),
                                  lambda: FireballBudget(1.0), lambda: MaxLayers(-1), lambda: TargetNodes(0)])
def test_rule_validation(rule):
    with pytest.raises(InvalidArgument):
        rule()


def test_presets():
    assert preset("snowball").budget == NodeRatio(1.0)
    fb = preset("fireball", 0.7)
    assert (fb.alpha, fb.beta, fb.gamma) == (-1, 0, 0) and fb.budget == FireballBudget(0.7)
    assert preset("uni_edge", weighted=True).beta == 1
    hb = preset("hubball", -1.0)
    assert (hb.alpha, hb.gamma) == (fb.alpha, fb.gamma)
    ex = preset("expander", 1.0)
    assert ex.target_feature is TargetFeature.OUT_DEGREE and ex.gamma == 1
    for bad in (("hubball", None), ("coreball", float("nan")), ("expander", -1.0), ("nope", 1.0)):
        with pytest.raises(InvalidArgument):
            preset(*bad)


@given(st.data())
def test_equivalent_presets_give_identical_probabilities(data):
    n_src = data.draw(st.integers(1, 4))
    edges = data.draw(st.lists(st.tuples(st.integers(0, n_src - 1), st.integers(10, 16),
                                         st.floats(0.1, 4.0)), min_size=1, max_size=12,
                               unique_by=lambda t: (t[0], t[1])))
    e_out = [E(u, v, w) for u, v, w in edges]
    st_ = state_for(e_out)
    maps = [edge_probabilities(e_out, st_, cfg) for cfg in
            (preset("hubball", 0.0), preset("coreball", 0.0), preset("uni_edge", weighted=True))]
    for m in maps[1:]:
        assert m == pytest.approx(maps[0], abs=1e-15)


# -- sample_edges ----------------------------------------------------------

def test_sample_edges_small_cases():
    rng = np.random.default_rng(0)
    e_out = [E(0, 1), E(0, 2), E(1, 2)]
    layer, chosen = sample_edges(e_out, np.full(3, 1 / 3), 5, rng)
    assert layer == {1, 2}
    layer, chosen = sample_edges([E(0, 9)], np.array([1.0]), 1, rng)
    assert layer == {9} and chosen == [E(0, 9)]


def test_zero_probability_never_drawn():
    rng = np.random.default_rng(1)
    for _ in range(200):
        order = _draw_order(np.array([0.5, 0.0, 0.5]), rng)
        assert 1 not in order.tolist()


FIVE_EDGES = [E(0, 3, 1.0), E(1, 3, 2.0), E(2, 3, 1.0), E(0, 4, 3.0), E(1, 5, 1.0)]


def five_edge_probs():
    st_ = state_for(FIVE_EDGES, layer={0, 1, 2})
    return np.array([edge_probabilities(FIVE_EDGES, st_, preset("coreball", 2.0))[e] for e in FIVE_EDGES])


def enumerate_draws(p, budget, targets):
    """Exact law of the ordered draw sequence: sequential picks proportional to remaining mass."""
    out = {}

    def rec(seq, mass_left, seen, prob):
        if len(seen) == budget:
            out[tuple(seq)] = out.get(tuple(seq), 0.0) + prob
            return
        for i in range(len(p)):
            if i in seq or p[i] == 0:
                continue
            rec(seq + [i], mass_left - p[i], seen | {targets[i]}, prob * p[i] / mass_left)

    rec([], 1.0, frozenset(), 1.0)
    return out


def test_five_edge_instance_masses():
    # d_in = {3: 3, 4: 1, 5: 1}; masses w * d_in**2 = 9, 18, 9, 3, 1
    assert five_edge_probs() == pytest.approx(np.array([9, 18, 9, 3, 1]) / 40)


def test_enumeration_oracle_sums_to_one():
    law = enumerate_draws(five_edge_probs(), 2, [e.target for e in FIVE_EDGES])
    assert sum(law.values()) == pytest.approx(1.0, abs=1e-12)


def test_first_pick_frequencies():
    p = five_edge_probs()
    rng = np.random.default_rng(12345)
    n = 20000
    first = Counter(int(_draw_order(p, rng)[0]) for _ in range(n))
    obs = [first[i] for i in range(5)]
    assert stats.chisquare(obs, p * n).pvalue > 0.01


# -- the sampler -----------------------------------------------------------

def test_star_half_ratio():
    res = spikyball(InMemorySource(star(10)), {0}, SamplerConfig(budget=NodeRatio(0.5), stop=MaxLayers(1)))
    assert res.sampled_graph.node_count == 6 and res.sampled_graph.edge_count == 5


def test_seed_validation():
    src = InMemorySource(star(3))
    with pytest.raises(InvalidArgument):
        spikyball(src, set(), SamplerConfig())
    with pytest.raises(InvalidArgument):
        spikyball(src, {0, 1, 2}, SamplerConfig(stop=TargetNodes(2)))
    with pytest.raises(InvalidArgument):
        spikyball(src, {7}, SamplerConfig())


def test_frontier_exhaustion():
    g = Graph.from_edges(5, [(0, 1), (1, 2), (3, 4)])
    res = spikyball(InMemorySource(g), {0}, preset("snowball", stop=TargetNodes(5)))
    assert res.frontier_exhausted and res.nodes.tolist() == [0, 1, 2]


def test_target_nodes_exact():
    g = random_graph(200, 0.05, 3)
    for target in (1, 2, 17, 60, 150, 200):
        res = spikyball(InMemorySource(g), {0}, preset("coreball", 2.0, stop=TargetNodes(target), seed=5))
        # Expansion only continues from the newest layer, so a run can die
        # out before every reachable node is collected.
        n = res.sampled_graph.node_count
        assert n == target or (n < target and res.frontier_exhausted)
    res = spikyball(InMemorySource(g), {0}, preset("snowball", stop=TargetNodes(150)))
    assert res.sampled_graph.node_count == 150


def test_target_nodes_truncation_keeps_most_probable():
    # budget 1.0 draws all 4 leaves; the heaviest edges must survive truncation
    g = Graph.from_edges(5, [(0, 1, 1.0), (0, 2, 5.0), (0, 3, 2.0), (0, 4, 4.0)])
    cfg = SamplerConfig(beta=1.0, budget=NodeRatio(1.0), stop=TargetNodes(3))
    res = spikyball(InMemorySource(g), {0}, cfg)
    assert res.nodes.tolist() == [0, 2, 4]


def test_deterministic():
    g = random_graph(150, 0.05, 1)
    cfg = preset("hubball", 1.0, stop=MaxLayers(4), seed=11)
    a = spikyball(InMemorySource(g), {0, 5}, cfg)
    b = spikyball(InMemorySource(g), {0, 5}, cfg)
    assert a.layer_of == b.layer_of and a.edges_sampled == b.edges_sampled
    assert list(a.sampled_graph.edges()) == list(b.sampled_graph.edges())


class CountingScores(GraphSource):
    def __init__(self, g):
        super().__init__()
        self.g = g

    def _neighbors(self, node):
        return [EdgeRecord(node, v, w) for v, w in self.g.neighbors(node)]

    def _node_info(self, node):
        return float(node + 1)


def test_request_counts_per_fetch_mode():
    g = random_graph(120, 0.06, 4)
    base = dict(stop=MaxLayers(3), seed=2)
    for cfg, extra in [(preset("hubball", 0.0, **base), 0),
                       (SamplerConfig(alpha=1.0, source_feature=SourceFeature.NODE_SCORE, **base), 1)]:
        res = spikyball(CountingScores(g), {0}, cfg)
        expanded = sum(len(l) for l in res.layers[: len(res.edges_in)])
        assert res.request_count == expanded * (1 + extra)
    res = spikyball(InMemorySource(g), {0}, preset("expander", 1.0, **base))
    expanded = sum(len(l) for l in res.layers[: len(res.edges_in)])
    assert res.request_count > expanded


def test_custom_source_with_scores():
    g = random_graph(60, 0.1, 9)
    cfg = SamplerConfig(gamma=1.0, target_feature=TargetFeature.NODE_SCORE, stop=MaxLayers(2))
    res = spikyball(CountingScores(g), {0}, cfg)
    assert res.sampled_graph.origin is not None
    assert res.sampled_graph.node_count == len(res.layer_of)


def check_invariants(g, res):
    layers = [set(l) for l in res.layers]
    for i in range(len(layers)):
        for j in range(i + 1, len(layers)):
            assert not layers[i] & layers[j]
    assert set().union(*layers) == set(res.nodes.tolist())
    assert len(res.layer_of) == res.sampled_graph.node_count
    origin = res.nodes
    for e in res.sampled_graph.edges():
        assert g.has_edge(int(origin[e.source]), int(origin[e.target]))
    for s in res.probability_sums:
        assert abs(s - 1.0) <= 1e-9


method_names = st.sampled_from(["snowball", "uni_edge", "fireball", "hubball", "coreball", "expander"])


@settings(max_examples=60, deadline=None)
@given(small_graphs(max_nodes=15, weighted=True), method_names, st.floats(-2, 2),
       st.integers(0, 2**32), st.integers(1, 4))
def test_sampler_invariants(g, name, param, seed, k):
    if name == "fireball":
        param = 0.5
    if name == "expander":
        param = abs(param) + 0.1
    cfg = preset(name, param, stop=MaxLayers(k), seed=seed, budget=NodeRatio(0.5))
    try:
        res = spikyball(InMemorySource(g), {0}, cfg)
    except DegenerateDistributionError:
        return
    check_invariants(g, res)


@settings(max_examples=60, deadline=None)
@given(small_graphs(max_nodes=15), st.integers(0, 2**32), st.integers(0, 4), st.data())
def test_snowball_equals_bfs_ball(g, seed, k, data):
    seeds = data.draw(st.sets(st.integers(0, g.node_count - 1), min_size=1, max_size=3))
    res = spikyball(InMemorySource(g), seeds, preset("snowball", stop=MaxLayers(k), seed=seed))
    assert set(res.nodes.tolist()) == bfs_ball(g, seeds, k)
