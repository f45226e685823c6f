"""Layered, probability-weighted graph exploration and its evaluation tools."""
from .baselines import forest_fire, metropolis_hastings_rw
from .community import Partition, louvain, modularity
from .errors import (ConvergenceError, DegenerateDistributionError, EmptyGraphError, InvalidArgument,
                     ParseError, SpikyballError, UndefinedMetricError)
from .graph import EdgeRecord, Graph, induced_subgraph, largest_component
from .io import EdgeListFormat, load_edge_list, read_edge_list, write_edge_list
from .metrics import compare_report, ks_statistic, pagerank, visit_probability
from .runner import MethodSpec, derive_seed, run_method, seeded_run
from .sampler import (FireballBudget, FixedNodes, GraphSource, InMemorySource, MaxLayers, NodeRatio,
                      SampleResult, SamplerConfig, SourceFeature, TargetFeature, TargetNodes, preset,
                      spikyball)

__version__ = "0.1.0"
