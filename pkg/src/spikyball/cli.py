"""Command-line entry point: ``spikyball {generate,sample,compare,visits,sweep}``.

Every option may also come from a JSON file given with ``--config``; keys
are the long option names in snake_case, and options given on the command
line win. The fully resolved configuration is written next to the outputs
so a run can be repeated with ``--config <echo>``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import generators
from .community import louvain, modularity
from .errors import (ConvergenceError, DegenerateDistributionError, InvalidArgument, ParseError,
                     UndefinedMetricError)
from .graph import EdgeRecord, build_subgraph
from .io import (EdgeListFormat, read_edge_list, write_csv, write_edge_list, write_histogram_csv,
                 write_partition_csv)
from .metrics import (REPORT_ORDER, avg_clustering, bin_visits, compare_report, density, transitivity,
                      visit_counts)
from .runner import METHODS, MethodSpec, derive_seed, seeded_run, target_for_fraction
from .sampler import FixedNodes, MaxLayers, NodeRatio, SampleResult, TargetNodes

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3

DEFAULTS = {
    "generate": dict(kind=None, nodes=None, edges=None, p=None, attach=None, sizes=None, pin=None,
                     pout=None, pendants=0, seed=0, out=None),
    "sample": dict(method="snowball", alpha=None, beta=None, gamma=None, pf=None, weighted_edges=False,
                   ratio=0.1, fixed_nodes=None, layers=None, target_nodes=None, fraction=None,
                   min_edge_weight=None, start=None, num_start=1, seed=0, out=None),
    "compare": dict(sampled=None, methods=None, ratio=0.1, fixed_nodes=None, layers=None,
                    target_nodes=None, fraction=None, min_edge_weight=None, runs=1, num_start=4,
                    coverage=0.8, seed=0, out=None),
    "visits": dict(method="hubball:alpha=0", alpha=None, beta=None, gamma=None, pf=None,
                   weighted_edges=False, ratio=0.1, fixed_nodes=None, layers=None, target_nodes=None,
                   fraction=None, min_edge_weight=None, runs=10, seeds_per_run=4, seed=0, out=None),
    "sweep": dict(family="hubball", exponents=None, ratio=0.1, fixed_nodes=None, layers=None,
                  target_nodes=None, fraction=None, min_edge_weight=None, start=None, num_start=1,
                  seed=0, out=None),
}
INPUT_DEFAULTS = dict(input=None, delimiter="whitespace", weighted=False, header=False,
                      largest_component=False)
FORMAT_DEFAULTS = dict(delimiter="whitespace", weighted=False)
for _cmd in ("sample", "compare", "visits", "sweep"):
    DEFAULTS[_cmd].update(INPUT_DEFAULTS)
DEFAULTS["generate"].update(FORMAT_DEFAULTS)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_format(p):
    p.add_argument("--delimiter", choices=["whitespace", "comma"])
    p.add_argument("--weighted", action="store_true", help="edge lines carry a weight column")


def _add_input(p):
    p.add_argument("--input", help="edge list of the graph to sample")
    _add_format(p)
    p.add_argument("--header", action="store_true", help="skip the first data line")
    p.add_argument("--largest-component", action="store_true")


def _add_method(p):
    p.add_argument("--method", help=f"one of {', '.join(METHODS)}, optionally name:key=value,...")
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--pf", type=float, help="burning probability (fireball, forest_fire)")
    p.add_argument("--weighted-edges", action="store_true", help="beta=1 for uni_edge/fireball")


def _add_budget_stop(p):
    p.add_argument("--ratio", type=float, help="share of candidate nodes taken per layer")
    p.add_argument("--fixed-nodes", type=int, help="fixed number of new nodes per layer")
    p.add_argument("--layers", type=int, help="stop after this many layers")
    p.add_argument("--target-nodes", type=int, help="stop at this many sampled nodes")
    p.add_argument("--fraction", type=float, help="stop at this share of the graph's nodes")
    p.add_argument("--min-edge-weight", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="spikyball", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def command(name, help_):
        p = sub.add_parser(name, help=help_, argument_default=argparse.SUPPRESS)
        p.add_argument("--config", help="JSON file with option values")
        p.add_argument("--seed", type=int)
        return p

    p = command("generate", "write a synthetic graph")
    p.add_argument("kind", nargs="?", choices=["er", "ba", "sbm"])
    p.add_argument("--nodes", type=int)
    p.add_argument("--edges", type=int, help="edge count (er)")
    p.add_argument("--p", type=float, help="edge probability (er, instead of --edges)")
    p.add_argument("--attach", type=int, help="edges per new node (ba)")
    p.add_argument("--sizes", help="block sizes, e.g. 500x10 or 100,200 (sbm)")
    p.add_argument("--pin", type=float)
    p.add_argument("--pout", type=float)
    p.add_argument("--pendants", type=int, help="extra degree-1 nodes to attach")
    p.add_argument("--out", help="output edge list path")
    _add_format(p)

    p = command("sample", "sample a graph and write the sampled edge list")
    _add_input(p)
    _add_method(p)
    _add_budget_stop(p)
    p.add_argument("--start", nargs="+", help="labels of the start nodes")
    p.add_argument("--num-start", type=int, help="number of random start nodes")
    p.add_argument("--out", help="output directory")

    p = command("compare", "compare samples with the original graph")
    _add_input(p)
    p.add_argument("--sampled", nargs="+", help="sampled edge lists to evaluate")
    p.add_argument("--methods", nargs="+", help="method specs to run and evaluate")
    _add_budget_stop(p)
    p.add_argument("--runs", type=int)
    p.add_argument("--num-start", type=int)
    p.add_argument("--coverage", type=float)
    p.add_argument("--out", help="output directory")

    p = command("visits", "visit counts per degree over repeated runs")
    _add_input(p)
    _add_method(p)
    _add_budget_stop(p)
    p.add_argument("--runs", type=int)
    p.add_argument("--seeds-per-run", type=int)
    p.add_argument("--out", help="output directory")

    p = command("sweep", "degree histograms over a range of exponents")
    _add_input(p)
    p.add_argument("--family", choices=["hubball", "coreball"])
    p.add_argument("--exponents", nargs="+", type=float)
    _add_budget_stop(p)
    p.add_argument("--start", nargs="+")
    p.add_argument("--num-start", type=int)
    p.add_argument("--out", help="output directory")
    return parser


def resolve(argv) -> dict:
    """Defaults, then the JSON config file, then explicit flags."""
    ns = vars(build_parser().parse_args(argv))
    cmd = ns.pop("command", None)
    if cmd is None:
        raise UsageError("a command is required: " + ", ".join(DEFAULTS))
    cfg = dict(DEFAULTS[cmd])
    path = ns.pop("config", None)
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {path}: {exc}") from None
        if not isinstance(loaded, dict):
            raise UsageError(f"config {path} must hold a JSON object")
        if loaded.pop("command", cmd) != cmd:
            raise UsageError(f"config {path} is for another command")
        unknown = set(loaded) - set(cfg)
        if unknown:
            raise UsageError(f"unknown config key(s): {', '.join(sorted(unknown))}")
        cfg.update(loaded)
    cfg.update(ns)
    if cfg.get("out") is None:
        raise UsageError("--out is required")
    if cmd != "generate" and cfg.get("input") is None:
        raise UsageError("--input is required")
    cfg["command"] = cmd
    return cfg


def _echo(cfg, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(cfg, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _fmt(cfg):
    return EdgeListFormat(delimiter=cfg["delimiter"], weighted=cfg["weighted"],
                          header=cfg.get("header", False))


def _load(cfg):
    return read_edge_list(cfg["input"], _fmt(cfg), cfg["largest_component"])


def _budget(cfg):
    if cfg["fixed_nodes"] is not None:
        return FixedNodes(cfg["fixed_nodes"])
    return NodeRatio(cfg["ratio"])


def _stop(cfg, g, default_layers=None, default_fraction=None):
    if cfg["target_nodes"] is not None:
        return TargetNodes(cfg["target_nodes"])
    if cfg["fraction"] is not None:
        return TargetNodes(target_for_fraction(g, cfg["fraction"]))
    if cfg["layers"] is not None:
        return MaxLayers(cfg["layers"])
    if default_fraction is not None:
        return TargetNodes(target_for_fraction(g, default_fraction))
    return MaxLayers(default_layers)


def _method(cfg) -> MethodSpec:
    spec = MethodSpec.parse(cfg["method"]) if ":" in cfg["method"] else None
    name = spec.name if spec else cfg["method"]
    params = dict(spec.params) if spec else {}
    for key in ("alpha", "beta", "gamma", "pf"):
        if cfg.get(key) is not None:
            params[key] = cfg[key]
    if cfg.get("weighted_edges"):
        params["weighted"] = True
    return MethodSpec(name, params)


def _start_nodes(cfg, g):
    if not cfg.get("start"):
        return None
    index = {g.label(v): v for v in range(g.node_count)}
    try:
        return sorted(index[str(s)] for s in cfg["start"])
    except KeyError as exc:
        raise InvalidArgument(f"unknown start node {exc.args[0]!r}") from None


def _slug(text):
    out = "".join(c if c.isalnum() or c in "._-" else "_" for c in text)
    return out.strip("_") or "method"


def _parse_sizes(text):
    text = str(text)
    if "x" in text:
        size, _, reps = text.partition("x")
        return [int(size)] * int(reps)
    return [int(s) for s in text.split(",") if s]


# -- commands -------------------------------------------------------------

def cmd_generate(cfg) -> int:
    kind, seed = cfg["kind"], cfg["seed"]
    if kind is None:
        raise UsageError("generate needs a kind: er, ba or sbm")
    need = {"er": ["nodes"], "ba": ["nodes", "attach"], "sbm": ["sizes", "pin", "pout"]}[kind]
    missing = [k for k in need if cfg[k] is None]
    if missing:
        raise UsageError("missing " + ", ".join("--" + k for k in missing))
    if kind == "er":
        if cfg["edges"] is not None:
            g = generators.erdos_renyi(cfg["nodes"], cfg["edges"], seed)
        elif cfg["p"] is not None:
            g = generators.erdos_renyi_p(cfg["nodes"], cfg["p"], seed)
        else:
            raise UsageError("er needs --edges or --p")
    elif kind == "ba":
        g = generators.barabasi_albert(cfg["nodes"], cfg["attach"], seed)
    else:
        g = generators.stochastic_block_model(_parse_sizes(cfg["sizes"]), cfg["pin"], cfg["pout"], seed)
    if cfg["pendants"]:
        g = generators.add_pendants(g, cfg["pendants"], derive_seed(seed, 1))
    out = cfg["out"]
    os.makedirs(os.path.dirname(os.path.abspath(out)), exist_ok=True)
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        write_edge_list(g, fh, EdgeListFormat(delimiter=cfg["delimiter"], weighted=cfg["weighted"]))
    _echo(cfg, out + ".run_config.json")
    return EXIT_OK


def _write_sample(result: SampleResult, g, fmt, out, label):
    g_s = result.sampled_graph
    with open(os.path.join(out, "sample.edges"), "w", encoding="utf-8", newline="\n") as fh:
        write_edge_list(g_s, fh, fmt)
    layers = sorted(result.layer_of.items(), key=lambda kv: (kv[1], kv[0]))
    with open(os.path.join(out, "layers.csv"), "w", encoding="utf-8", newline="\n") as fh:
        write_csv(fh, ["node", "layer"], ((g.label(v), k) for v, k in layers))
    summary = [
        ("method", label),
        ("nodes", g_s.node_count),
        ("edges", g_s.edge_count),
        ("layers", max(result.layer_of.values(), default=0)),
        ("request_count", result.request_count),
        ("frontier_exhausted", int(result.frontier_exhausted)),
    ]
    with open(os.path.join(out, "summary.csv"), "w", encoding="utf-8", newline="\n") as fh:
        write_csv(fh, ["key", "value"], summary)


def cmd_sample(cfg) -> int:
    g = _load(cfg)
    spec = _method(cfg)
    stop = _stop(cfg, g, default_layers=3)
    result = seeded_run(g, spec, cfg["seed"], start_nodes=_start_nodes(cfg, g), num_start=cfg["num_start"],
                        budget=_budget(cfg), stop=stop, min_edge_weight=cfg["min_edge_weight"])
    os.makedirs(cfg["out"], exist_ok=True)
    _write_sample(result, g, _fmt(cfg), cfg["out"], spec.label)
    _echo(cfg, os.path.join(cfg["out"], "run_config.json"))
    return EXIT_OK


def _sample_from_file(g, path, fmt):
    g_file = read_edge_list(path, fmt)
    index = {g.label(v): v for v in range(g.node_count)}
    try:
        ids = [index[g_file.label(v)] for v in range(g_file.node_count)]
    except KeyError as exc:
        raise ParseError(f"{path}: node {exc.args[0]!r} is not in the original graph") from None
    records = [EdgeRecord(ids[e.source], ids[e.target], e.weight) for e in g_file.edges()]
    try:
        sub = build_subgraph(g, set(ids), records)
    except InvalidArgument as exc:
        raise ParseError(f"{path}: {exc}") from None
    return SampleResult(sampled_graph=sub, layer_of={}, request_count=0)


def cmd_compare(cfg) -> int:
    g = _load(cfg)
    fmt = _fmt(cfg)
    sampled, methods = cfg["sampled"] or [], cfg["methods"] or []
    if not sampled and not methods:
        raise UsageError("give --sampled files and/or --methods")
    if cfg["runs"] < 1:
        raise UsageError("--runs must be >= 1")
    partition = louvain(g, derive_seed(cfg["seed"], 0))
    out = cfg["out"]
    os.makedirs(out, exist_ok=True)

    # (label, [results]) per compared entry
    entries = [(os.path.basename(path), [_sample_from_file(g, path, fmt)]) for path in sampled]
    if methods:
        stop = _stop(cfg, g, default_fraction=0.1)
        for text in methods:
            spec = MethodSpec.parse(text)
            results = [seeded_run(g, spec, derive_seed(cfg["seed"], r + 1), num_start=cfg["num_start"],
                                  budget=_budget(cfg), stop=stop, min_edge_weight=cfg["min_edge_weight"])
                       for r in range(cfg["runs"])]
            entries.append((spec.label, results))

    header = ["method", "runs"] + list(REPORT_ORDER) + ["ivip_mean", "ivip_std"]
    rows = []
    for i, (label, results) in enumerate(entries):
        reports = [compare_report(g, res, partition, cfg["coverage"]) for res in results]
        means = [float(np.mean([r[k] for r in reports])) for k in REPORT_ORDER]
        ivips = np.array([r["ivip"] for r in reports])
        std = float(ivips.std(ddof=1)) if len(ivips) > 1 else 0.0
        rows.append([label, len(reports)] + means + [float(ivips.mean()), std])
        stem = f"{i:02d}_{_slug(label)}"
        with open(os.path.join(out, stem + "_original_hist.csv"), "w", encoding="utf-8", newline="\n") as fh:
            write_histogram_csv(reports[0].original_degree_hist, fh)
        with open(os.path.join(out, stem + "_sampled_hist.csv"), "w", encoding="utf-8", newline="\n") as fh:
            write_histogram_csv(reports[0].sampled_degree_hist, fh)
    with open(os.path.join(out, "compare.csv"), "w", encoding="utf-8", newline="\n") as fh:
        write_csv(fh, header, rows)

    original = [("nodes", g.node_count), ("edges", g.edge_count), ("clustering", avg_clustering(g)),
                ("transitivity", transitivity(g)), ("density", density(g)),
                ("communities", partition.community_count), ("modularity", modularity(g, partition))]
    with open(os.path.join(out, "original.csv"), "w", encoding="utf-8", newline="\n") as fh:
        write_csv(fh, ["metric", "value"], original)
    with open(os.path.join(out, "partition.csv"), "w", encoding="utf-8", newline="\n") as fh:
        write_partition_csv(g, partition, fh)
    _echo(cfg, os.path.join(out, "run_config.json"))
    return EXIT_OK


def cmd_visits(cfg) -> int:
    g = _load(cfg)
    spec = _method(cfg)
    stop = _stop(cfg, g, default_layers=3)
    counts = visit_counts(g, spec, cfg["runs"], cfg["seeds_per_run"], cfg["seed"], budget=_budget(cfg),
                          stop=stop, min_edge_weight=cfg["min_edge_weight"])
    bins = bin_visits(g, counts)
    out = cfg["out"]
    os.makedirs(out, exist_ok=True)
    with open(os.path.join(out, "visits.csv"), "w", encoding="utf-8", newline="\n") as fh:
        write_csv(fh, ["degree_bin_low", "mean_visits", "ci95"], ((b, m, c) for b, (m, c) in bins.items()))
    deg = g.degrees()
    with open(os.path.join(out, "visits_nodes.csv"), "w", encoding="utf-8", newline="\n") as fh:
        write_csv(fh, ["node", "degree", "visits"],
                  ((g.label(v), int(deg[v]), int(counts[v])) for v in range(g.node_count)))
    _echo(cfg, os.path.join(out, "run_config.json"))
    return EXIT_OK


def cmd_sweep(cfg) -> int:
    g = _load(cfg)
    if not cfg["exponents"]:
        raise UsageError("--exponents is required")
    family = cfg["family"]
    key = "alpha" if family == "hubball" else "gamma"
    stop = _stop(cfg, g, default_layers=3)
    start = _start_nodes(cfg, g)
    out = cfg["out"]
    os.makedirs(out, exist_ok=True)
    for exp in cfg["exponents"]:
        spec = MethodSpec(family, {key: float(exp)})
        res = seeded_run(g, spec, cfg["seed"], start_nodes=start, num_start=cfg["num_start"],
                         budget=_budget(cfg), stop=stop, min_edge_weight=cfg["min_edge_weight"])
        stem = f"{family}_{float(exp):g}"
        with open(os.path.join(out, stem + "_sampled_hist.csv"), "w", encoding="utf-8", newline="\n") as fh:
            write_histogram_csv(res.sampled_graph.degree_histogram(), fh)
        with open(os.path.join(out, stem + "_original_hist.csv"), "w", encoding="utf-8", newline="\n") as fh:
            write_histogram_csv(g.degree_histogram(res.nodes.tolist()), fh)
    _echo(cfg, os.path.join(out, "run_config.json"))
    return EXIT_OK


COMMANDS = {"generate": cmd_generate, "sample": cmd_sample, "compare": cmd_compare,
            "visits": cmd_visits, "sweep": cmd_sweep}


def main(argv=None) -> int:
    try:
        cfg = resolve(sys.argv[1:] if argv is None else argv)
        return COMMANDS[cfg["command"]](cfg)
    except (UsageError, InvalidArgument) as exc:
        print(f"spikyball: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, OSError) as exc:
        print(f"spikyball: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ConvergenceError, DegenerateDistributionError, UndefinedMetricError) as exc:
        print(f"spikyball: numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
