"""Seeded random graph generators."""
from __future__ import annotations

import numpy as np

from .errors import InvalidArgument
from .graph import Graph


def _unrank_pairs(idx, n):
    """Map linear indices over pairs ``i < j`` of ``n`` nodes (row-major) to ``(i, j)``."""
    idx = np.asarray(idx, dtype=np.int64)
    # Row i starts at offset i*n - i*(i+1)/2.
    b = 2 * n - 1
    i = np.floor((b - np.sqrt(b * b - 8.0 * idx)) / 2).astype(np.int64)
    start = i * n - i * (i + 1) // 2
    # Float rounding can land one row off near row boundaries.
    i = np.where(start > idx, i - 1, i)
    start = i * n - i * (i + 1) // 2
    nxt = (i + 1) * n - (i + 1) * (i + 2) // 2
    bump = idx >= nxt
    i = np.where(bump, i + 1, i)
    start = np.where(bump, nxt, start)
    j = idx - start + i + 1
    return i, j


def erdos_renyi(n: int, m: int, seed: int = 0) -> Graph:
    """G(n, m): ``m`` distinct edges drawn uniformly among all pairs."""
    if n < 0 or m < 0:
        raise InvalidArgument("n and m must be non-negative")
    total = n * (n - 1) // 2
    if m > total:
        raise InvalidArgument(f"m={m} exceeds the {total} possible edges")
    rng = np.random.default_rng(seed)
    idx = np.sort(rng.choice(total, size=m, replace=False)) if m else np.zeros(0, dtype=np.int64)
    i, j = _unrank_pairs(idx, n)
    return Graph._from_arrays(n, i, j, np.ones(m))


def erdos_renyi_p(n: int, p: float, seed: int = 0) -> Graph:
    if not 0 <= p <= 1:
        raise InvalidArgument("p must lie in [0, 1]")
    return erdos_renyi(n, round(p * n * (n - 1) / 2), seed)


def barabasi_albert(n: int, m_attach: int, seed: int = 0) -> Graph:
    """Preferential attachment grown from a clique on ``m_attach + 1`` nodes.

    Each new node links to ``m_attach`` distinct existing nodes chosen with
    probability proportional to their current degree.
    """
    if m_attach < 1 or n <= m_attach:
        raise InvalidArgument("need m_attach >= 1 and n > m_attach")
    rng = np.random.default_rng(seed)
    k = m_attach + 1
    src, dst = [], []
    # One entry per edge endpoint, so a uniform pick is degree-proportional.
    ends = []
    for a in range(k):
        for b in range(a + 1, k):
            src.append(a)
            dst.append(b)
            ends += (a, b)
    draws = iter(rng.random(4 * m_attach * max(n - k, 1) + 64).tolist())
    for v in range(k, n):
        chosen = set()
        while len(chosen) < m_attach:
            try:
                r = next(draws)
            except StopIteration:
                draws = iter(rng.random(4096).tolist())
                r = next(draws)
            chosen.add(ends[int(r * len(ends))])
        for t in sorted(chosen):
            src.append(v)
            dst.append(t)
            ends += (v, t)
    return Graph._from_arrays(n, np.array(src), np.array(dst), np.ones(len(src)))


def _bernoulli_indices(total, p, rng):
    """Indices in ``range(total)`` kept independently with probability ``p``."""
    if p <= 0 or total == 0:
        return np.zeros(0, dtype=np.int64)
    if p >= 1:
        return np.arange(total, dtype=np.int64)
    # Geometric gap skipping: O(expected hits) instead of O(total).
    out = []
    pos = -1
    while True:
        need = int((total - pos) * p * 1.1) + 16
        gaps = rng.geometric(p, size=need)
        steps = pos + np.cumsum(gaps)
        hit = steps[steps < total]
        out.append(hit)
        if len(hit) < len(steps):
            break
        pos = int(steps[-1])
    return np.concatenate(out)


def stochastic_block_model(sizes, p_in: float, p_out: float, seed: int = 0) -> Graph:
    """Independent edges: probability ``p_in`` inside a block, ``p_out`` across."""
    sizes = [int(s) for s in sizes]
    if any(s < 0 for s in sizes):
        raise InvalidArgument("block sizes must be non-negative")
    if not 0 <= p_out <= p_in <= 1:
        raise InvalidArgument("need 0 <= p_out <= p_in <= 1")
    rng = np.random.default_rng(seed)
    offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)
    n = int(offsets[-1])
    us, vs = [], []
    for a, sa in enumerate(sizes):
        idx = _bernoulli_indices(sa * (sa - 1) // 2, p_in, rng)
        i, j = _unrank_pairs(idx, sa)
        us.append(i + offsets[a])
        vs.append(j + offsets[a])
        for b in range(a + 1, len(sizes)):
            sb = sizes[b]
            idx = _bernoulli_indices(sa * sb, p_out, rng)
            us.append(idx // sb + offsets[a])
            vs.append(idx % sb + offsets[b])
    u = np.concatenate(us) if us else np.zeros(0, dtype=np.int64)
    v = np.concatenate(vs) if vs else np.zeros(0, dtype=np.int64)
    return Graph._from_arrays(n, u, v, np.ones(len(u)))


def block_labels(sizes) -> np.ndarray:
    """Planted block index of every node of :func:`stochastic_block_model`."""
    return np.repeat(np.arange(len(sizes)), sizes)


def add_pendants(g: Graph, count: int, seed: int = 0) -> Graph:
    """Attach ``count`` new degree-1 nodes to uniformly chosen existing nodes.

    The new nodes get ids ``g.node_count .. g.node_count + count - 1``.
    """
    if count < 0 or g.node_count == 0:
        raise InvalidArgument("need count >= 0 and a non-empty graph")
    rng = np.random.default_rng(seed)
    anchors = rng.integers(0, g.node_count, size=count)
    base = list(g.edges())
    u = np.array([e.source for e in base] + list(range(g.node_count, g.node_count + count)), dtype=np.int64)
    v = np.array([e.target for e in base] + anchors.tolist(), dtype=np.int64)
    w = np.array([e.weight for e in base] + [1.0] * count)
    return Graph._from_arrays(g.node_count + count, u, v, w)
