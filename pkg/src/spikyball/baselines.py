"""Comparison samplers outside the layered family."""
from __future__ import annotations

from collections import deque

import numpy as np

from .errors import InvalidArgument
from .graph import EdgeRecord, Graph, induced_subgraph
from .sampler import SampleResult


def _result(g, visited, layer_of, requests, walk_edges, partial):
    return SampleResult(
        sampled_graph=induced_subgraph(g, visited),
        layer_of=layer_of,
        request_count=requests,
        edges_in=[],
        edges_sampled=[walk_edges],
        layers=[],
        frontier_exhausted=partial,
    )


def metropolis_hastings_rw(g: Graph, start: int, target_nodes: int, seed: int = 0,
                           max_steps: int | None = None) -> SampleResult:
    """Random walk with Metropolis-Hastings acceptance ``min(1, d_i / d_j)``.

    A uniformly chosen neighbor ``j`` of the current node ``i`` is proposed;
    rejected proposals keep the walker in place. Stops once ``target_nodes``
    distinct nodes were visited or after ``max_steps`` proposals (default
    ``1000 * target_nodes``), in which case the result is flagged partial.
    ``layer_of`` records the step at which each node was first reached.
    """
    g._check(start)
    if target_nodes < 1:
        raise InvalidArgument("target_nodes must be >= 1")
    rng = np.random.default_rng(seed)
    cap = 1000 * target_nodes if max_steps is None else max_steps
    deg = g.degrees()
    visited = {start}
    layer_of = {start: 0}
    fetched = {start}
    walk = []
    cur = start
    steps = 0
    while len(visited) < target_nodes and steps < cap:
        steps += 1
        nbrs = g.neighbor_ids(cur)
        if len(nbrs) == 0:
            break
        nxt = int(nbrs[rng.integers(len(nbrs))])
        fetched.add(nxt)
        if rng.random() < min(1.0, deg[cur] / deg[nxt]):
            walk.append(EdgeRecord(cur, nxt, g.edge_weight(cur, nxt)))
            cur = nxt
            if cur not in visited:
                visited.add(cur)
                layer_of[cur] = steps
    partial = len(visited) < target_nodes
    return _result(g, visited, layer_of, len(fetched), walk, partial)


def geometric_spread(p_f: float, rng: np.random.Generator, size=None):
    """Number of neighbors to burn: P(x = k) = (1 - p_f) * p_f**k, k >= 0."""
    return rng.geometric(1.0 - p_f, size=size) - 1


def burn(g: Graph, node: int, x: int, burned: set, rng: np.random.Generator) -> list[int]:
    """Pick ``x`` unburned neighbors of ``node`` uniformly (all of them if fewer)."""
    cands = [int(u) for u in g.neighbor_ids(node) if u not in burned]
    if x >= len(cands):
        return cands
    pick = rng.choice(len(cands), size=x, replace=False)
    return [cands[i] for i in pick.tolist()]


def forest_fire(g: Graph, seeds, p_f: float, target_nodes: int, seed: int = 0) -> SampleResult:
    """Classical Forest Fire with a geometric number of burned links per node.

    When the fire dies before ``target_nodes`` nodes are burned it restarts
    from a uniformly chosen unburned node. ``layer_of`` holds the burn
    generation (0 for seeds and restart points).
    """
    if not 0 < p_f < 1:
        raise InvalidArgument("p_f must lie in (0, 1)")
    seeds = sorted(set(seeds))
    if not seeds:
        raise InvalidArgument("at least one seed node is required")
    for s in seeds:
        g._check(s)
    target_nodes = min(target_nodes, g.node_count)
    rng = np.random.default_rng(seed)
    burned = set(seeds)
    layer_of = {s: 0 for s in seeds}
    queue = deque(seeds)
    fire_edges = []
    requests = 0
    while len(burned) < target_nodes:
        if not queue:
            while True:
                r = int(rng.integers(g.node_count))
                if r not in burned:
                    break
            burned.add(r)
            layer_of[r] = 0
            queue.append(r)
            continue
        v = queue.popleft()
        x = int(geometric_spread(p_f, rng))
        if x == 0:
            continue
        requests += 1
        for u in burn(g, v, x, burned, rng):
            if len(burned) >= target_nodes:
                break
            burned.add(u)
            layer_of[u] = layer_of[v] + 1
            queue.append(u)
            fire_edges.append(EdgeRecord(v, u, g.edge_weight(v, u)))
    return _result(g, burned, layer_of, requests, fire_edges, False)
