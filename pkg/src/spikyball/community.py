"""Louvain community detection and Newman modularity."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgument
from .graph import Graph

_EPS = 1e-12
# A local-moving sweep gaining less modularity than this ends the level.
MIN_SWEEP_GAIN = 1e-7


@dataclass
class Partition:
    assignment: np.ndarray
    modularity: float
    history: list = field(default_factory=list)

    @property
    def community_count(self) -> int:
        return int(self.assignment.max()) + 1 if len(self.assignment) else 0

    def members(self) -> list[np.ndarray]:
        order = np.argsort(self.assignment, kind="stable")
        bounds = np.cumsum(np.bincount(self.assignment, minlength=self.community_count))[:-1]
        return np.split(order, bounds)


def _relabel(labels) -> np.ndarray:
    """Contiguous ids numbered by first appearance."""
    _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
    rank = np.empty(len(first), dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(len(first))
    return rank[inverse]


def modularity(g: Graph, partition) -> float:
    """Q = sum_c [L_c / m - (D_c / 2m)^2] with weighted degrees D and internal weight L."""
    comm = np.asarray(getattr(partition, "assignment", partition), dtype=np.int64)
    if len(comm) != g.node_count:
        raise InvalidArgument("partition does not cover the graph")
    two_m = float(g.degrees(weighted=True).sum())
    if two_m == 0:
        return 0.0
    k = int(comm.max()) + 1
    deg_c = np.bincount(comm, weights=g.degrees(weighted=True), minlength=k)
    adj = g.adjacency().tocoo()
    same = comm[adj.row] == comm[adj.col]
    internal = np.bincount(comm[adj.row[same]], weights=adj.data[same], minlength=k) / 2
    return float(np.sum(internal / (two_m / 2) - (deg_c / two_m) ** 2))


def _one_level(adj, loops, rng):
    """Local moving phase. Returns (community per node, whether anything moved)."""
    n = len(adj)
    k = np.array([sum(a.values()) + 2 * loops[i] for i, a in enumerate(adj)])
    two_m = k.sum()
    comm = list(range(n))
    tot = k.astype(float).tolist()
    k = k.tolist()
    order = rng.permutation(n).tolist()
    any_move = False
    sweep_gain = math.inf
    while sweep_gain >= MIN_SWEEP_GAIN:
        sweep_gain = 0.0
        for i in order:
            ci = comm[i]
            links = {}
            for j, w in adj[i].items():
                c = comm[j]
                links[c] = links.get(c, 0.0) + w
            tot[ci] -= k[i]
            scale = k[i] / two_m
            best = ci
            stay_gain = best_gain = links.get(ci, 0.0) - tot[ci] * scale
            # Ascending ids with a strict test: ties go to the lowest id.
            for c in (sorted(links) if len(links) > 1 else links):
                gain = links[c] - tot[c] * scale
                if gain > best_gain + _EPS:
                    best, best_gain = c, gain
            tot[best] += k[i]
            if best != ci:
                comm[i] = best
                any_move = True
                sweep_gain += (best_gain - stay_gain) * 2 / two_m
    return np.array(comm, dtype=np.int64), any_move


def _aggregate(adj, loops, comm):
    m = int(comm.max()) + 1
    new_adj = [dict() for _ in range(m)]
    new_loops = np.zeros(m)
    np.add.at(new_loops, comm, loops)
    for i, a in enumerate(adj):
        ci = comm[i]
        row = new_adj[ci]
        for j, w in a.items():
            cj = comm[j]
            if cj == ci:
                # Each internal edge is seen from both ends.
                new_loops[ci] += w / 2
            else:
                row[cj] = row.get(cj, 0.0) + w
    return new_adj, new_loops


def louvain(g: Graph, seed: int = 0) -> Partition:
    """Two-phase Louvain at resolution 1; node visiting order is shuffled by ``seed``."""
    if g.edge_count == 0:
        raise InvalidArgument("Louvain needs at least one edge")
    rng = np.random.default_rng(seed)
    adj = [dict(g.neighbors(v)) for v in range(g.node_count)]
    loops = np.zeros(g.node_count)
    membership = np.arange(g.node_count)
    history = [modularity(g, membership)]
    while True:
        comm, moved = _one_level(adj, loops, rng)
        if not moved:
            break
        comm = _relabel(comm)
        membership = comm[membership]
        history.append(modularity(g, membership))
        adj, loops = _aggregate(adj, loops, comm)
        if len(adj) == 1:
            break
    membership = _relabel(membership)
    return Partition(membership, modularity(g, membership), history)
