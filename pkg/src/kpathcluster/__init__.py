"""Community detection driven by random-walk edge centrality.

Pipeline: estimate per-edge centrality with bounded non-repeating random
walks, turn centralities into structural-equivalence edge weights, then
maximize weighted modularity with a two-phase greedy optimizer.  Includes
evaluation tooling (confusion matrix, NMI, planted-partition benchmarks)
and exhaustive oracles for verification at small scale.
"""

from .graph import (
    EdgeListParseError,
    Graph,
    Partition,
    parse_edge_list,
    read_partition,
    write_edge_list,
    write_partition,
)
from .centrality import (
    DEFAULT_KAPPA,
    DEFAULT_RHO_MULTIPLIER,
    EdgeCentralities,
    WalkRng,
    WalkTrace,
    default_rho,
    erw_kpath,
    exact_kpath_centrality,
    export_centralities,
    simulate_walk,
)
from .distance import EdgeWeights, edge_distances, export_weights, sigma_full
from .louvain import (
    DEFAULT_MIN_GAIN,
    LouvainResult,
    LouvainState,
    aggregate,
    brute_force_best_partition,
    delta_q,
    local_move_phase,
    louvain,
    modularity,
)
from .evaluation import (
    ConfusionMatrix,
    SyntheticSpec,
    confusion_matrix,
    nmi,
    planted_partition,
    planted_probabilities,
    realized_edge_counts,
)

__version__ = "0.1.0"

__all__ = [
    "ConfusionMatrix",
    "DEFAULT_KAPPA",
    "DEFAULT_MIN_GAIN",
    "DEFAULT_RHO_MULTIPLIER",
    "EdgeCentralities",
    "EdgeListParseError",
    "EdgeWeights",
    "Graph",
    "LouvainResult",
    "LouvainState",
    "Partition",
    "SyntheticSpec",
    "WalkRng",
    "WalkTrace",
    "aggregate",
    "brute_force_best_partition",
    "confusion_matrix",
    "default_rho",
    "delta_q",
    "edge_distances",
    "erw_kpath",
    "exact_kpath_centrality",
    "export_centralities",
    "export_weights",
    "local_move_phase",
    "louvain",
    "modularity",
    "nmi",
    "parse_edge_list",
    "planted_partition",
    "planted_probabilities",
    "read_partition",
    "realized_edge_counts",
    "sigma_full",
    "simulate_walk",
    "write_edge_list",
    "write_partition",
]
