"""Layered, probability-weighted breadth-first sampling (the Spikyball family).

Each layer fetches the neighbors of the current frontier, splits the incident
edges into those leading back into the sample and those leading to new
nodes, weights the latter by

    mass(i -> j) = f(i)**alpha * w_ij**beta * h(j)**gamma

and draws edges without replacement until the layer budget of distinct new
nodes is met. ``f`` is the source's weighted degree towards unsampled nodes
(or a node score), ``h`` is the number of frontier edges reaching ``j``, the
target's degree towards unsampled nodes, or a node score.
"""
from __future__ import annotations

import math
from collections import defaultdict
from collections.abc import Mapping
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Union

import numpy as np

from .errors import DegenerateDistributionError, InvalidArgument
from .graph import EdgeRecord, Graph, build_subgraph, subgraph_from_records


# -- graph access ---------------------------------------------------------

class GraphSource:
    """Where a sampler gets its data from; every fetch counts as one request.

    Subclasses implement :meth:`_neighbors` and optionally :meth:`_node_info`.
    Adapters for live APIs belong here; the shipped one wraps a :class:`Graph`.
    """

    def __init__(self):
        self.request_count = 0

    def fetch_neighbors(self, node: int) -> list[EdgeRecord]:
        self.request_count += 1
        return self._neighbors(node)

    def fetch_node_info(self, node: int):
        self.request_count += 1
        return self._node_info(node)

    def _neighbors(self, node):
        raise NotImplementedError

    def _node_info(self, node):
        return None

    def label(self, node: int) -> str:
        return str(node)


class InMemorySource(GraphSource):
    def __init__(self, graph: Graph):
        super().__init__()
        self.graph = graph

    def _neighbors(self, node):
        return [EdgeRecord(node, j, w) for j, w in self.graph.neighbors(node)]

    def _node_info(self, node):
        self.graph._check(node)
        return self.graph.score(node)

    def label(self, node):
        return self.graph.label(node)


# -- configuration --------------------------------------------------------

class SourceFeature(str, Enum):
    OUT_DEGREE = "out_degree"
    NODE_SCORE = "node_score"


class TargetFeature(str, Enum):
    IN_DEGREE = "in_degree"
    OUT_DEGREE = "out_degree"
    NODE_SCORE = "node_score"


@dataclass(frozen=True)
class NodeRatio:
    """Take ``ceil(ratio * distinct candidates)`` new nodes per layer."""
    ratio: float

    def __post_init__(self):
        if not 0 < self.ratio <= 1:
            raise InvalidArgument(f"node ratio must lie in (0, 1], got {self.ratio}")


@dataclass(frozen=True)
class FixedNodes:
    count: int

    def __post_init__(self):
        if self.count < 1:
            raise InvalidArgument("fixed node budget must be >= 1")


@dataclass(frozen=True)
class FireballBudget:
    """Forest-Fire style budget: ``layer size * p_f / (1 - p_f)`` new nodes."""
    p_f: float

    def __post_init__(self):
        if not 0 < self.p_f < 1:
            raise InvalidArgument(f"burning probability must lie in (0, 1), got {self.p_f}")


@dataclass(frozen=True)
class MaxLayers:
    layers: int

    def __post_init__(self):
        if self.layers < 0:
            raise InvalidArgument("layer count must be >= 0")


@dataclass(frozen=True)
class TargetNodes:
    count: int

    def __post_init__(self):
        if self.count < 1:
            raise InvalidArgument("target node count must be >= 1")


BudgetRule = Union[NodeRatio, FixedNodes, FireballBudget]
StopRule = Union[MaxLayers, TargetNodes]


@dataclass(frozen=True)
class SamplerConfig:
    alpha: float = 0.0
    beta: float = 0.0
    gamma: float = 0.0
    source_feature: SourceFeature = SourceFeature.OUT_DEGREE
    target_feature: TargetFeature = TargetFeature.IN_DEGREE
    budget: BudgetRule = NodeRatio(1.0)
    stop: StopRule = MaxLayers(3)
    seed: int = 0
    min_edge_weight: float | None = None

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidArgument(f"{name} must be finite")
        object.__setattr__(self, "source_feature", SourceFeature(self.source_feature))
        object.__setattr__(self, "target_feature", TargetFeature(self.target_feature))
        if not isinstance(self.budget, (NodeRatio, FixedNodes, FireballBudget)):
            raise InvalidArgument(f"unknown budget rule {self.budget!r}")
        if not isinstance(self.stop, (MaxLayers, TargetNodes)):
            raise InvalidArgument(f"unknown stop rule {self.stop!r}")

    def with_(self, **changes) -> "SamplerConfig":
        return replace(self, **changes)


# -- per-layer state and results ------------------------------------------

@dataclass
class LayerState:
    layer_index: int
    layer_nodes: set
    sampled_total: set
    d_out: dict = field(default_factory=dict)
    d_in: dict = field(default_factory=dict)
    target_out: dict = field(default_factory=dict)
    source_scores: dict = field(default_factory=dict)
    target_scores: dict = field(default_factory=dict)


@dataclass
class SampleResult:
    sampled_graph: Graph
    layer_of: dict
    request_count: int
    edges_in: list = field(default_factory=list)
    edges_sampled: list = field(default_factory=list)
    layers: list = field(default_factory=list)
    frontier_exhausted: bool = False
    probability_sums: list = field(default_factory=list)

    @property
    def nodes(self) -> np.ndarray:
        """Ids of the sampled nodes in the original graph, ascending."""
        return self.sampled_graph.origin


# -- the four per-layer steps ---------------------------------------------

def filter_edges(edges, sampled, min_weight=None):
    """Split layer edges into those reaching ``sampled`` nodes and the rest.

    Edges lighter than ``min_weight`` are dropped from both lists.
    """
    e_in, e_out = [], []
    for e in edges:
        if min_weight is not None and e.weight < min_weight:
            continue
        (e_in if e.target in sampled else e_out).append(e)
    return e_in, e_out


def layer_state(k, layer_nodes, sampled_total, e_out) -> LayerState:
    """Degree features of a layer computed from its outgoing edges."""
    d_out = defaultdict(float)
    d_in = defaultdict(int)
    for e in e_out:
        d_out[e.source] += e.weight
        d_in[e.target] += 1
    return LayerState(k, set(layer_nodes), set(sampled_total), dict(d_out), dict(d_in))


def _power(x, e):
    # 0**negative is treated as zero mass (never preferred), 0**0 as 1.
    x = np.asarray(x, dtype=np.float64)
    if e == 0:
        return np.ones_like(x)
    if e < 0:
        out = np.zeros_like(x)
        pos = x > 0
        out[pos] = x[pos] ** e
        return out
    return x ** e


def _feature(values, key, what):
    try:
        v = values[key]
    except KeyError:
        raise InvalidArgument(f"{what} unavailable for node {key}") from None
    if v is None:
        raise InvalidArgument(f"{what} unavailable for node {key}")
    return v


def _masses(e_out, state: LayerState, cfg: SamplerConfig) -> np.ndarray:
    if cfg.source_feature is SourceFeature.OUT_DEGREE:
        src_vals = state.d_out
    else:
        src_vals = state.source_scores
    tgt_vals = {
        TargetFeature.IN_DEGREE: state.d_in,
        TargetFeature.OUT_DEGREE: state.target_out,
        TargetFeature.NODE_SCORE: state.target_scores,
    }[cfg.target_feature]
    f = [_feature(src_vals, e.source, cfg.source_feature.value) for e in e_out] if cfg.alpha else [1.0] * len(e_out)
    h = [_feature(tgt_vals, e.target, cfg.target_feature.value) for e in e_out] if cfg.gamma else [1.0] * len(e_out)
    w = [e.weight for e in e_out]
    return _power(f, cfg.alpha) * _power(w, cfg.beta) * _power(h, cfg.gamma)


def _probability_array(e_out, state, cfg) -> np.ndarray:
    if not e_out:
        raise InvalidArgument("no outgoing edges to weigh")
    mass = _masses(e_out, state, cfg)
    total = mass.sum()
    if not (total > 0 and math.isfinite(total)):
        raise DegenerateDistributionError("all candidate edges have zero probability mass")
    return mass / total


def edge_probabilities(e_out, state: LayerState, cfg: SamplerConfig) -> dict:
    """Normalized selection probability of every outgoing edge of a layer."""
    return dict(zip(e_out, _probability_array(e_out, state, cfg).tolist()))


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def layer_budget(e_out, cfg: SamplerConfig, layer_nodes: int) -> int:
    """Number of distinct new nodes the next layer should contain."""
    distinct = len({e.target for e in e_out})
    if distinct == 0:
        return 0
    rule = cfg.budget
    if isinstance(rule, NodeRatio):
        # Rounded first so 0.1 * 30 is 3, not 4.
        b = math.ceil(round(rule.ratio * distinct, 9))
    elif isinstance(rule, FixedNodes):
        b = rule.count
    else:
        b = _round_half_up(layer_nodes * rule.p_f / (1 - rule.p_f))
    return min(max(b, 1), distinct)


def _draw_order(probs: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Positions in weighted-without-replacement draw order (zero-mass edges excluded).

    Sorting exponential keys ``E_i / p_i`` reproduces sequential draws
    proportional to the remaining mass.
    """
    keys = rng.exponential(size=len(probs))
    with np.errstate(divide="ignore"):
        keys = np.where(probs > 0, keys / probs, np.inf)
    order = np.argsort(keys, kind="stable")
    return order[np.isfinite(keys[order])]


def sample_edges(e_out, probs, budget: int, rng: np.random.Generator):
    """Draw edges without replacement until ``budget`` distinct targets are reached.

    Returns the new layer (distinct targets) and the drawn edges in draw order.
    """
    if isinstance(probs, Mapping):
        probs = np.array([probs[e] for e in e_out], dtype=np.float64)
    new_layer, chosen = [], []
    seen = set()
    if budget <= 0:
        return set(), chosen
    for pos in _draw_order(np.asarray(probs, dtype=np.float64), rng).tolist():
        e = e_out[pos]
        chosen.append(e)
        if e.target not in seen:
            seen.add(e.target)
            new_layer.append(e.target)
            if len(new_layer) == budget:
                break
    return set(new_layer), chosen


# -- the sampler ----------------------------------------------------------

def _collect_target_features(src, e_out, state, cfg):
    targets = sorted({e.target for e in e_out})
    if cfg.gamma == 0:
        return
    if cfg.target_feature is TargetFeature.OUT_DEGREE:
        for j in targets:
            state.target_out[j] = sum(e.weight for e in src.fetch_neighbors(j)
                                      if e.target not in state.sampled_total)
    elif cfg.target_feature is TargetFeature.NODE_SCORE:
        for j in targets:
            state.target_scores[j] = src.fetch_node_info(j)


def _truncate(chosen, probs_by_edge, keep):
    """Keep the ``keep`` new nodes reached by the most probable drawn edges."""
    best = {}  # target -> [highest edge probability, first draw position]
    for rank, e in enumerate(chosen):
        p = probs_by_edge[e]
        if e.target not in best:
            best[e.target] = [p, rank]
        elif p > best[e.target][0]:
            best[e.target][0] = p
    ranked = sorted(best, key=lambda j: (-best[j][0], best[j][1]))
    kept = set(ranked[:keep])
    return kept, [e for e in chosen if e.target in kept]


def spikyball(src: GraphSource, seeds, cfg: SamplerConfig) -> SampleResult:
    """Run the layered sampler from ``seeds`` until the stop rule fires.

    Requests: one neighbor fetch per expanded node, one more per node when
    the source feature is a node score, plus per-candidate fetches when the
    target feature needs information about unsampled nodes.
    """
    seeds = sorted(set(seeds))
    if not seeds:
        raise InvalidArgument("at least one seed node is required")
    stop = cfg.stop
    if isinstance(stop, TargetNodes) and len(seeds) > stop.count:
        raise InvalidArgument("more seed nodes than the target sample size")
    rng = np.random.default_rng(cfg.seed)
    start_requests = src.request_count

    layer = seeds
    sampled = set(seeds)
    layer_of = {v: 0 for v in seeds}
    layers = [list(seeds)]
    edges_in, edges_sampled, prob_sums = [], [], []
    exhausted = False
    k = 0
    while True:
        if isinstance(stop, MaxLayers) and k >= stop.layers:
            break
        if isinstance(stop, TargetNodes) and len(sampled) >= stop.count:
            break
        if not layer:
            exhausted = True
            break

        source_scores = {}
        if cfg.source_feature is SourceFeature.NODE_SCORE:
            source_scores = {i: src.fetch_node_info(i) for i in layer}
        edges = [e for i in layer for e in src.fetch_neighbors(i)]
        e_in, e_out = filter_edges(edges, sampled, cfg.min_edge_weight)
        edges_in.append(e_in)
        if not e_out:
            edges_sampled.append([])
            exhausted = True
            break

        state = layer_state(k, layer, sampled, e_out)
        state.source_scores = source_scores
        _collect_target_features(src, e_out, state, cfg)
        probs = _probability_array(e_out, state, cfg)
        prob_sums.append(float(probs.sum()))
        budget = layer_budget(e_out, cfg, len(layer))
        new_nodes, chosen = sample_edges(e_out, probs, budget, rng)
        if isinstance(stop, TargetNodes) and len(sampled) + len(new_nodes) > stop.count:
            new_nodes, chosen = _truncate(chosen, dict(zip(e_out, probs.tolist())),
                                          stop.count - len(sampled))
        edges_sampled.append(chosen)
        k += 1
        layer = sorted(new_nodes)
        for j in layer:
            layer_of[j] = k
        sampled.update(layer)
        if layer:
            layers.append(layer)

    records = [e for group in edges_in for e in group] + [e for group in edges_sampled for e in group]
    if isinstance(src, InMemorySource):
        g_s = build_subgraph(src.graph, sampled, records)
    else:
        g_s = subgraph_from_records(sampled, records, labels=_LabelView(src))
    return SampleResult(
        sampled_graph=g_s,
        layer_of=layer_of,
        request_count=src.request_count - start_requests,
        edges_in=edges_in,
        edges_sampled=edges_sampled,
        layers=layers,
        frontier_exhausted=exhausted,
        probability_sums=prob_sums,
    )


class _LabelView:
    def __init__(self, src):
        self._src = src

    def __getitem__(self, node):
        return self._src.label(node)


# -- presets --------------------------------------------------------------

PRESETS = ("snowball", "uni_edge", "fireball", "hubball", "coreball", "expander")


def preset(name: str, param: float | None = None, *, budget: BudgetRule = NodeRatio(0.1),
           stop: StopRule = MaxLayers(3), seed: int = 0, weighted: bool = False,
           min_edge_weight: float | None = None) -> SamplerConfig:
    """Named members of the family.

    ``param`` is ``p_f`` for fireball, alpha for hubball and gamma for
    coreball/expander; snowball and uni_edge take none. ``weighted`` sets
    ``beta = 1`` for uni_edge and fireball. Snowball and fireball override
    ``budget`` with their own rule.
    """
    common = dict(stop=stop, seed=seed, min_edge_weight=min_edge_weight)
    beta_w = 1.0 if weighted else 0.0

    def need_param():
        if param is None or not math.isfinite(param):
            raise InvalidArgument(f"preset {name!r} needs a finite parameter")
        return float(param)

    if name == "snowball":
        return SamplerConfig(budget=NodeRatio(1.0), **common)
    if name == "uni_edge":
        return SamplerConfig(beta=beta_w, budget=budget, **common)
    if name == "fireball":
        return SamplerConfig(alpha=-1.0, beta=beta_w, budget=FireballBudget(need_param()), **common)
    if name == "hubball":
        return SamplerConfig(alpha=need_param(), beta=1.0, budget=budget, **common)
    if name == "coreball":
        return SamplerConfig(beta=1.0, gamma=need_param(), target_feature=TargetFeature.IN_DEGREE,
                             budget=budget, **common)
    if name == "expander":
        gamma = need_param()
        if gamma <= 0:
            raise InvalidArgument("expander needs gamma > 0")
        return SamplerConfig(gamma=gamma, target_feature=TargetFeature.OUT_DEGREE,
                             budget=budget, **common)
    raise InvalidArgument(f"unknown preset {name!r}; expected one of {', '.join(PRESETS)}")
