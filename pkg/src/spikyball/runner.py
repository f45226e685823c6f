"""Method descriptors, seed derivation and single-run dispatch."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import baselines
from .errors import InvalidArgument
from .graph import Graph
from .sampler import (PRESETS, InMemorySource, MaxLayers, NodeRatio, SampleResult,
                      SamplerConfig, TargetNodes, preset, spikyball)

BASELINES = ("mh", "forest_fire")
METHODS = PRESETS + ("spikyball",) + BASELINES
_PARAM_OF = {"fireball": "pf", "forest_fire": "pf", "hubball": "alpha",
             "coreball": "gamma", "expander": "gamma"}
_KEYS = {"alpha", "beta", "gamma", "pf", "weighted"}


def derive_seed(master: int, index: int) -> int:
    """Seed of run ``index`` under ``master``: first 63 bits of SeedSequence([master, index])."""
    if master < 0 or index < 0:
        raise InvalidArgument("seeds must be non-negative")
    state = np.random.SeedSequence([master, index]).generate_state(1, np.uint64)
    return int(state[0] >> np.uint64(1))


def random_start_nodes(g: Graph, count: int, seed: int) -> list[int]:
    if not 1 <= count <= g.node_count:
        raise InvalidArgument(f"cannot pick {count} start nodes from {g.node_count}")
    rng = np.random.default_rng(seed)
    return sorted(rng.choice(g.node_count, size=count, replace=False).tolist())


@dataclass(frozen=True)
class MethodSpec:
    """A sampler name plus parameters, written ``name[:key=value,...]``.

    Examples: ``snowball``, ``coreball:gamma=2``, ``fireball:pf=0.7``,
    ``spikyball:alpha=1,beta=0,gamma=-1``, ``forest_fire:pf=0.7``, ``mh``.
    """

    name: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.name not in METHODS:
            raise InvalidArgument(f"unknown method {self.name!r}; expected one of {', '.join(METHODS)}")
        unknown = set(self.params) - _KEYS
        if unknown:
            raise InvalidArgument(f"unknown method parameter(s): {', '.join(sorted(unknown))}")
        key = _PARAM_OF.get(self.name)
        if key and key not in self.params:
            raise InvalidArgument(f"method {self.name!r} needs {key}=...")

    @classmethod
    def parse(cls, text: str) -> "MethodSpec":
        name, _, rest = text.partition(":")
        params = {}
        for item in filter(None, rest.split(",")):
            k, eq, v = item.partition("=")
            if not eq:
                raise InvalidArgument(f"bad method parameter {item!r} in {text!r}")
            k = k.strip()
            if k == "weighted":
                params[k] = v.strip().lower() in ("1", "true", "yes")
            else:
                try:
                    params[k] = float(v)
                except ValueError:
                    raise InvalidArgument(f"bad number {v!r} in {text!r}") from None
        return cls(name.strip(), params)

    @property
    def label(self) -> str:
        if not self.params:
            return self.name
        return self.name + ":" + ",".join(f"{k}={self.params[k]:g}" if not isinstance(self.params[k], bool)
                                          else f"{k}={int(self.params[k])}" for k in sorted(self.params))

    @property
    def is_baseline(self) -> bool:
        return self.name in BASELINES


def sampler_config(spec: MethodSpec, *, budget=NodeRatio(0.1), stop=MaxLayers(3), seed=0,
                   min_edge_weight=None) -> SamplerConfig:
    if spec.is_baseline:
        raise InvalidArgument(f"{spec.name} is not a layered sampler")
    p = spec.params
    if spec.name == "spikyball":
        return SamplerConfig(alpha=p.get("alpha", 0.0), beta=p.get("beta", 0.0), gamma=p.get("gamma", 0.0),
                             budget=budget, stop=stop, seed=seed, min_edge_weight=min_edge_weight)
    param = p.get(_PARAM_OF.get(spec.name, ""), None)
    return preset(spec.name, param, budget=budget, stop=stop, seed=seed,
                  weighted=bool(p.get("weighted", False)), min_edge_weight=min_edge_weight)


def run_method(g: Graph, method, start_nodes, *, budget=NodeRatio(0.1), stop=MaxLayers(3),
               seed: int = 0, min_edge_weight=None) -> SampleResult:
    """Run one sampler (layered or baseline) on an in-memory graph.

    ``method`` is a :class:`MethodSpec`, its string form, or a ready
    :class:`SamplerConfig` (whose own budget/stop are then kept; only the
    seed is replaced). Baselines need a :class:`TargetNodes` stop rule.
    """
    if isinstance(method, str):
        method = MethodSpec.parse(method)
    if isinstance(method, SamplerConfig):
        return spikyball(InMemorySource(g), start_nodes, method.with_(seed=seed))
    if method.is_baseline:
        if not isinstance(stop, TargetNodes):
            raise InvalidArgument(f"{method.name} needs a target node count")
        if method.name == "mh":
            return baselines.metropolis_hastings_rw(g, start_nodes[0], stop.count, seed)
        return baselines.forest_fire(g, start_nodes, method.params["pf"], stop.count, seed)
    cfg = sampler_config(method, budget=budget, stop=stop, seed=seed, min_edge_weight=min_edge_weight)
    return spikyball(InMemorySource(g), start_nodes, cfg)


def target_for_fraction(g: Graph, fraction: float) -> int:
    if not 0 < fraction <= 1:
        raise InvalidArgument("fraction must lie in (0, 1]")
    return max(1, int(math.floor(fraction * g.node_count + 0.5)))


def seeded_run(g: Graph, method, run_seed: int, *, start_nodes=None, num_start: int = 1,
               **run_kwargs) -> SampleResult:
    """One run whose start nodes (unless given) and sampler seed both derive from ``run_seed``.

    Start nodes come from ``derive_seed(run_seed, 0)``, the sampler's own
    randomness from ``derive_seed(run_seed, 1)``.
    """
    if start_nodes is None:
        start_nodes = random_start_nodes(g, num_start, derive_seed(run_seed, 0))
    return run_method(g, method, start_nodes, seed=derive_seed(run_seed, 1), **run_kwargs)
