"""Immutable undirected weighted graph in compressed sparse row form."""
from __future__ import annotations

from collections import Counter
from typing import Iterable, NamedTuple

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from .errors import InvalidArgument


class EdgeRecord(NamedTuple):
    source: int
    target: int
    weight: float = 1.0


# Node sets are plain Python sets of node ids.
NodeSet = set


class Graph:
    """Undirected weighted graph with contiguous integer node ids.

    Build instances with :meth:`from_edges`; the constructor takes already
    validated CSR arrays. Neighbor lists are sorted by neighbor id so every
    traversal order is reproducible.

    ``labels`` keeps the original node labels (used when writing files) and
    ``origin`` maps each node to its id in the parent graph when the graph
    was produced by :func:`build_subgraph`.
    """

    def __init__(self, indptr, indices, weights, labels=None, node_scores=None,
                 origin=None, dropped_self_loops=0):
        self._indptr = np.asarray(indptr, dtype=np.int64)
        self._indices = np.asarray(indices, dtype=np.int64)
        self._weights = np.asarray(weights, dtype=np.float64)
        for arr in (self._indptr, self._indices, self._weights):
            arr.setflags(write=False)
        self.node_count = len(self._indptr) - 1
        self.labels = list(labels) if labels is not None else None
        self.node_scores = dict(node_scores) if node_scores else None
        self.origin = None if origin is None else np.asarray(origin, dtype=np.int64)
        self.dropped_self_loops = dropped_self_loops
        self._memo = {}

    @classmethod
    def from_edges(cls, node_count: int, edges: Iterable, labels=None, node_scores=None,
                   origin=None) -> "Graph":
        """Build a graph from ``(u, v)`` or ``(u, v, w)`` tuples.

        Duplicate pairs are merged by summing their weights and self-loops are
        dropped (their number is kept in ``dropped_self_loops``).
        """
        rows = [tuple(e) if len(e) == 3 else (e[0], e[1], 1.0) for e in edges]
        arr = np.array(rows, dtype=np.float64).reshape(-1, 3)
        u = arr[:, 0].astype(np.int64)
        v = arr[:, 1].astype(np.int64)
        w = arr[:, 2]
        return cls._from_arrays(node_count, u, v, w, labels, node_scores, origin)

    @classmethod
    def _from_arrays(cls, n, u, v, w, labels=None, node_scores=None, origin=None):
        n = int(n)
        if n < 0:
            raise InvalidArgument("node_count must be non-negative")
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        w = np.asarray(w, dtype=np.float64)
        if len(u) and (min(u.min(), v.min()) < 0 or max(u.max(), v.max()) >= n):
            raise InvalidArgument("edge endpoint out of range")
        if len(w) and not (np.all(np.isfinite(w)) and np.all(w > 0)):
            raise InvalidArgument("edge weights must be finite and strictly positive")
        if labels is not None and len(labels) != n:
            raise InvalidArgument("labels must have one entry per node")
        loops = u == v
        dropped = int(loops.sum())
        u, v, w = u[~loops], v[~loops], w[~loops]
        lo, hi = np.minimum(u, v), np.maximum(u, v)
        key = lo * n + hi
        uniq, inverse = np.unique(key, return_inverse=True)
        merged = np.bincount(inverse, weights=w, minlength=len(uniq)) if len(uniq) else w[:0]
        lo, hi = np.divmod(uniq, max(n, 1))
        src = np.concatenate([lo, hi])
        dst = np.concatenate([hi, lo])
        wt = np.concatenate([merged, merged])
        order = np.lexsort((dst, src))
        src, dst, wt = src[order], dst[order], wt[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
        return cls(indptr, dst, wt, labels=labels, node_scores=node_scores,
                   origin=origin, dropped_self_loops=dropped)

    # -- queries ---------------------------------------------------------

    def _check(self, v):
        if not 0 <= v < self.node_count:
            raise InvalidArgument(f"node id {v} out of range [0, {self.node_count})")

    def degree(self, v: int) -> float:
        """Weighted degree: the sum of weights of edges incident to ``v``."""
        self._check(v)
        return float(self._weights[self._indptr[v]:self._indptr[v + 1]].sum())

    def neighbor_count(self, v: int) -> int:
        self._check(v)
        return int(self._indptr[v + 1] - self._indptr[v])

    def neighbors(self, v: int) -> list[tuple[int, float]]:
        self._check(v)
        a, b = self._indptr[v], self._indptr[v + 1]
        return list(zip(self._indices[a:b].tolist(), self._weights[a:b].tolist()))

    def neighbor_ids(self, v: int) -> np.ndarray:
        self._check(v)
        return self._indices[self._indptr[v]:self._indptr[v + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        self._check(u)
        self._check(v)
        row = self.neighbor_ids(u)
        i = np.searchsorted(row, v)
        return bool(i < len(row) and row[i] == v)

    def edge_weight(self, u: int, v: int) -> float:
        row = self.neighbor_ids(u)
        i = np.searchsorted(row, v)
        if i < len(row) and row[i] == v:
            return float(self._weights[self._indptr[u] + i])
        raise InvalidArgument(f"({u}, {v}) is not an edge")

    @property
    def edge_count(self) -> int:
        return len(self._indices) // 2

    def degrees(self, weighted: bool = False) -> np.ndarray:
        counts = np.diff(self._indptr)
        if weighted:
            rows = np.repeat(np.arange(self.node_count), counts)
            return np.bincount(rows, weights=self._weights, minlength=self.node_count)
        return counts

    def degree_histogram(self, restrict=None) -> dict[int, int]:
        """Count of nodes per unweighted degree, optionally over a node subset."""
        deg = self.degrees()
        if restrict is not None:
            ids = np.fromiter(restrict, dtype=np.int64, count=len(restrict))
            if len(ids) and (ids.min() < 0 or ids.max() >= self.node_count):
                raise InvalidArgument("restricted node set does not index this graph")
            deg = deg[ids]
        return dict(sorted(Counter(deg.tolist()).items()))

    def edges(self):
        """Yield each undirected edge once as an :class:`EdgeRecord` with source < target."""
        for u in range(self.node_count):
            a, b = self._indptr[u], self._indptr[u + 1]
            for v, w in zip(self._indices[a:b].tolist(), self._weights[a:b].tolist()):
                if u < v:
                    yield EdgeRecord(u, v, w)

    def label(self, v: int) -> str:
        return self.labels[v] if self.labels is not None else str(v)

    def score(self, v: int):
        if self.node_scores is None:
            return None
        return self.node_scores.get(v)

    def adjacency(self, weighted: bool = True) -> sparse.csr_matrix:
        data = self._weights if weighted else np.ones(len(self._indices))
        return sparse.csr_matrix((data, self._indices, self._indptr),
                                 shape=(self.node_count, self.node_count))

    def memo(self, key, compute):
        """Cache a derived quantity; safe because the graph never changes."""
        if key not in self._memo:
            self._memo[key] = compute()
        return self._memo[key]

    def __repr__(self):
        return f"Graph(nodes={self.node_count}, edges={self.edge_count})"


def subgraph_from_records(nodes, edges, labels=None, node_scores=None) -> Graph:
    """Assemble a graph over ``nodes`` (ids of some parent) from edge records.

    Nodes are relabelled in ascending parent-id order and the parent ids kept
    in ``origin``. Records naming the same undirected pair are collapsed into
    one edge: they describe the same parent edge seen from both ends.
    ``labels`` and ``node_scores`` are looked up by parent id.
    """
    order = np.array(sorted(nodes), dtype=np.int64)
    index = {int(p): i for i, p in enumerate(order)}
    pairs = {}
    for e in edges:
        try:
            a, b = index[e.source], index[e.target]
        except KeyError as exc:
            raise InvalidArgument(f"edge ({e.source}, {e.target}) has an endpoint outside the node set") from exc
        if a == b:
            raise InvalidArgument(f"self-loop on node {e.source}")
        pairs[(min(a, b), max(a, b))] = e.weight
    if pairs:
        ab = np.array(list(pairs), dtype=np.int64)
        w = np.fromiter(pairs.values(), dtype=np.float64, count=len(pairs))
        u, v = ab[:, 0], ab[:, 1]
    else:
        u = v = np.zeros(0, dtype=np.int64)
        w = np.zeros(0)
    sub_labels = None
    if labels is not None:
        sub_labels = [labels[p] for p in order.tolist()]
    sub_scores = None
    if node_scores:
        sub_scores = {index[p]: s for p, s in node_scores.items() if p in index}
    return Graph._from_arrays(len(order), u, v, w, sub_labels, sub_scores, origin=order)


def build_subgraph(g: Graph, nodes, edges) -> Graph:
    """Sampled graph on ``nodes`` holding ``edges``, which must be edges of ``g``."""
    nodes = set(nodes)
    for v in nodes:
        g._check(v)
    for e in edges:
        if e.source not in nodes or e.target not in nodes:
            raise InvalidArgument(f"edge ({e.source}, {e.target}) has an endpoint outside the node set")
        if not g.has_edge(e.source, e.target):
            raise InvalidArgument(f"({e.source}, {e.target}) is not an edge of the graph")
    return subgraph_from_records(nodes, edges, g.labels, g.node_scores)


def induced_subgraph(g: Graph, nodes) -> Graph:
    nodes = set(nodes)
    records = [EdgeRecord(u, v, w) for u in sorted(nodes) for v, w in g.neighbors(u)
               if u < v and v in nodes]
    return subgraph_from_records(nodes, records, g.labels, g.node_scores)


def largest_component(g: Graph) -> Graph:
    """Induced subgraph on the largest connected component (lowest-id component on ties)."""
    if g.node_count == 0:
        return g
    _, comp = csgraph.connected_components(g.adjacency(), directed=False)
    sizes = np.bincount(comp)
    keep = np.flatnonzero(comp == int(np.argmax(sizes)))
    if len(keep) == g.node_count:
        return g
    sub = induced_subgraph(g, keep.tolist())
    sub.origin = None
    return sub
