"""Evaluation metrics comparing a sample with the graph it came from."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .errors import ConvergenceError, InvalidArgument, UndefinedMetricError
from .graph import Graph

REPORT_ORDER = (
    "sampled_nodes", "sampled_edges", "edges_ratio",
    "ks_full", "ks_mean_trunc", "ks_p75_trunc",
    "clustering", "clustering_rel_err", "transitivity", "transitivity_rel_err",
    "pagerank_ratio", "density", "ivip",
)


@dataclass
class MetricReport:
    values: dict = field(default_factory=dict)
    original_degree_hist: dict = field(default_factory=dict)
    sampled_degree_hist: dict = field(default_factory=dict)

    def rows(self):
        known = [k for k in REPORT_ORDER if k in self.values]
        extra = sorted(k for k in self.values if k not in REPORT_ORDER)
        return [(k, float(self.values[k])) for k in known + extra]

    def __getitem__(self, key):
        return self.values[key]


# -- degree distributions -------------------------------------------------

def ks_statistic(hist_a: dict, hist_b: dict, min_degree: float | None = None) -> float:
    """Largest gap between the empirical CDFs of two degree histograms.

    With ``min_degree`` only degrees >= that value are kept and both
    truncated distributions are renormalized.
    """
    if min_degree is not None:
        hist_a = {d: c for d, c in hist_a.items() if d >= min_degree}
        hist_b = {d: c for d, c in hist_b.items() if d >= min_degree}
    na, nb = sum(hist_a.values()), sum(hist_b.values())
    if na == 0 or nb == 0:
        raise UndefinedMetricError("a degree histogram is empty after truncation")
    support = sorted(set(hist_a) | set(hist_b))
    ca = np.cumsum([hist_a.get(d, 0) for d in support]) / na
    cb = np.cumsum([hist_b.get(d, 0) for d in support]) / nb
    return float(np.max(np.abs(ca - cb)))


def degree_thresholds(g: Graph) -> tuple[float, float]:
    """Mean and 75th percentile of the unweighted degrees of ``g``."""
    deg = g.degrees()
    return float(deg.mean()), float(np.percentile(deg, 75))


# -- triangles ------------------------------------------------------------

def triangles_per_node(g: Graph) -> np.ndarray:
    def compute():
        a = g.adjacency(weighted=False)
        return np.asarray(a.multiply(a @ a).sum(axis=1)).ravel() / 2

    return g.memo("triangles", compute)


def avg_clustering(g: Graph) -> float:
    """Mean local clustering; nodes of degree < 2 count as 0."""
    if g.node_count == 0:
        return 0.0
    tri = triangles_per_node(g)
    deg = g.degrees().astype(float)
    pairs = deg * (deg - 1) / 2
    local = np.divide(tri, pairs, out=np.zeros_like(tri), where=pairs > 0)
    return float(local.mean())


def transitivity(g: Graph) -> float:
    """3 * triangles / connected triples; 0 when there are no triples."""
    deg = g.degrees().astype(float)
    wedges = float(np.sum(deg * (deg - 1) / 2))
    if wedges == 0:
        return 0.0
    return float(triangles_per_node(g).sum() / wedges)


# -- PageRank -------------------------------------------------------------

def pagerank(g: Graph, damping: float = 0.85, tol: float = 1e-10, max_iter: int = 10_000) -> np.ndarray:
    """Power iteration on the weighted random walk with uniform teleport.

    Dangling nodes spread their mass uniformly. Stops when the L1 change
    between iterates drops below ``tol``.
    """
    if not 0 < damping < 1:
        raise InvalidArgument("damping must lie in (0, 1)")
    n = g.node_count
    if n == 0:
        return np.zeros(0)
    strength = g.degrees(weighted=True)
    dangling = strength == 0
    inv = np.divide(1.0, strength, out=np.zeros(n), where=~dangling)
    transition = sparse.diags(inv) @ g.adjacency()
    walk = transition.T.tocsr()
    x = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        nxt = damping * (walk @ x + x[dangling].sum() / n) + (1 - damping) / n
        nxt /= nxt.sum()
        if np.abs(nxt - x).sum() < tol:
            return nxt
        x = nxt
    raise ConvergenceError(f"PageRank did not converge in {max_iter} iterations")


def pagerank_ratio(g_orig: Graph, sampled, damping: float = 0.85) -> float:
    """Mean original-graph PageRank of the sampled nodes over the global mean 1/n."""
    ids = np.fromiter(sampled, dtype=np.int64)
    if len(ids) == 0:
        raise InvalidArgument("sampled node set is empty")
    pr = g_orig.memo(("pagerank", damping), lambda: pagerank(g_orig, damping))
    return float(pr[ids].mean() * g_orig.node_count)


def density(g: Graph) -> float:
    n = g.node_count
    if n < 2:
        raise InvalidArgument("density needs at least two nodes")
    return 2.0 * g.edge_count / (n * (n - 1))


# -- influencer coverage --------------------------------------------------

def selected_communities(partition, coverage: float = 0.8) -> list[int]:
    """Largest communities (ties: lower id) until they hold ``coverage`` of the nodes."""
    sizes = np.bincount(partition.assignment)
    order = sorted(range(len(sizes)), key=lambda c: (-sizes[c], c))
    need = coverage * len(partition.assignment)
    chosen, covered = [], 0
    for c in order:
        if covered >= need - 1e-9:
            break
        chosen.append(c)
        covered += sizes[c]
    return chosen


def ivip_score(g_orig: Graph, partition, sampled, coverage: float = 0.8) -> float:
    """Share of the degree mass of the largest communities held by sampled nodes."""
    if not 0 < coverage <= 1:
        raise InvalidArgument("coverage must lie in (0, 1]")
    comm = np.asarray(partition.assignment)
    if len(comm) != g_orig.node_count:
        raise InvalidArgument("partition does not cover the graph")
    chosen = np.zeros(comm.max() + 1, dtype=bool)
    chosen[selected_communities(partition, coverage)] = True
    deg = g_orig.degrees(weighted=True)
    in_top = chosen[comm]
    total = deg[in_top].sum()
    if total == 0:
        return 0.0
    ids = np.fromiter(sampled, dtype=np.int64)
    mask = np.zeros(g_orig.node_count, dtype=bool)
    mask[ids] = True
    return float(deg[in_top & mask].sum() / total)


# -- aggregate report -----------------------------------------------------

def _rel_err(sampled: float, original: float) -> float:
    if original == 0:
        return abs(sampled)
    return abs(sampled - original) / abs(original)


def compare_report(g_orig: Graph, result, partition, coverage: float = 0.8) -> MetricReport:
    """All comparison metrics for one sample of ``g_orig``."""
    g_s = result.sampled_graph
    nodes = result.nodes
    orig_hist = g_orig.memo("degree_hist", g_orig.degree_histogram)
    samp_hist = g_s.degree_histogram()
    mean_deg, p75 = g_orig.memo("degree_thresholds", lambda: degree_thresholds(g_orig))
    clust = g_orig.memo("clustering", lambda: avg_clustering(g_orig))
    trans = g_orig.memo("transitivity", lambda: transitivity(g_orig))
    c_s, t_s = avg_clustering(g_s), transitivity(g_s)
    values = {
        "sampled_nodes": float(g_s.node_count),
        "sampled_edges": float(g_s.edge_count),
        "edges_ratio": g_s.edge_count / g_orig.edge_count if g_orig.edge_count else 0.0,
        "ks_full": ks_statistic(orig_hist, samp_hist),
        "ks_mean_trunc": ks_statistic(orig_hist, samp_hist, mean_deg),
        "ks_p75_trunc": ks_statistic(orig_hist, samp_hist, p75),
        "clustering": c_s,
        "clustering_rel_err": _rel_err(c_s, clust),
        "transitivity": t_s,
        "transitivity_rel_err": _rel_err(t_s, trans),
        "pagerank_ratio": pagerank_ratio(g_orig, nodes.tolist()),
        "density": density(g_s),
        "ivip": ivip_score(g_orig, partition, nodes.tolist(), coverage),
    }
    for k, v in values.items():
        if not math.isfinite(v):
            raise UndefinedMetricError(f"{k} is not finite")
    return MetricReport(values, g_orig.degree_histogram(nodes.tolist()), samp_hist)


# -- visit probability ----------------------------------------------------

def visit_counts(g: Graph, method, runs: int = 10, seeds_per_run: int = 4, seed: int = 0,
                 **run_kwargs) -> np.ndarray:
    """How many of ``runs`` independent samples contain each node.

    Run ``r`` starts from ``seeds_per_run`` uniformly chosen nodes; its
    randomness comes from ``derive_seed(seed, r)``. ``method`` and
    ``run_kwargs`` are passed to :func:`runner.seeded_run`.
    """
    from .runner import derive_seed, seeded_run

    if runs < 1:
        raise InvalidArgument("runs must be >= 1")
    counts = np.zeros(g.node_count, dtype=np.int64)
    for r in range(runs):
        result = seeded_run(g, method, derive_seed(seed, r), num_start=seeds_per_run, **run_kwargs)
        counts[result.nodes] += 1
    return counts


def degree_bin_index(degrees) -> np.ndarray:
    """Logarithmic bins, ten per decade: bin b covers [10**(b/10), 10**((b+1)/10))."""
    d = np.asarray(degrees, dtype=float)
    with np.errstate(divide="ignore"):
        return np.floor(10 * np.log10(d) + 1e-9).astype(np.int64)


def bin_visits(g: Graph, counts) -> dict[float, tuple[float, float]]:
    """Mean visit count and normal-approximation 95% half-width per degree bin.

    Isolated nodes have no bin and are left out.
    """
    deg = g.degrees()
    keep = deg > 0
    bins = degree_bin_index(deg[keep])
    counts = np.asarray(counts, dtype=float)[keep]
    out = {}
    for b in np.unique(bins).tolist():
        c = counts[bins == b]
        half = 1.96 * c.std(ddof=1) / math.sqrt(len(c)) if len(c) > 1 else 0.0
        out[10 ** (b / 10)] = (float(c.mean()), float(half))
    return out


def visit_probability(g: Graph, cfg, runs: int = 10, seeds_per_run: int = 4, seed: int = 0,
                      **run_kwargs) -> dict[float, tuple[float, float]]:
    """Per degree bin, the mean number of runs (out of ``runs``) that sampled a node."""
    return bin_visits(g, visit_counts(g, cfg, runs, seeds_per_run, seed, **run_kwargs))
