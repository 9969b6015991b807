"""Hierarchical compression of discrete factor graphs.

The package builds a hierarchy of increasingly compressed factor-graph
models: a pairwise worst-row relative distance between potential tables
feeds a complete-linkage merge ordering, each level of which seeds colour
refinement and mean-potential replacement. Exact inference plus a
closed-form bound calculus quantify how much any query can move at every
level.
"""

from .bounds import (
    BoundChain,
    bound_chain,
    cd_interval,
    dcd_bound_sharp,
    dcd_bounds_loose,
    eps_for_target,
    pmax_bound,
)
from .colour import (
    CompressedModel,
    Grouping,
    acp_refine,
    greedy_eps_grouping,
    hacp_compress,
    mean_table,
    table_equality_colours,
)
from .generate import PlantedSpec, planted_model
from .hierarchy import (
    LevelPartition,
    Merge,
    MergeTree,
    build_hierarchy,
    export_tree,
    level_for_epsilon,
    parse_tree,
    partition_at_level,
)
from .inference import (
    DEFAULT_ENUM_BUDGET,
    DeviationReport,
    QueryDeviation,
    QueryResult,
    dcd_distance,
    lifted_marginal,
    max_query_deviation,
    partition_function,
    query,
    star_marginal,
)
from .metric import DistanceMatrix, distance_matrix, eps_equivalent, odeed
from .model import (
    Assignment,
    CompatibilitySignature,
    Factor,
    FactorGraph,
    RandomVariable,
    build_graph,
    joint_potential,
    row_assignment,
    row_index,
    signature,
)

__version__ = "0.1.0"

__all__ = [
    "Assignment",
    "BoundChain",
    "CompatibilitySignature",
    "CompressedModel",
    "DEFAULT_ENUM_BUDGET",
    "DeviationReport",
    "DistanceMatrix",
    "Factor",
    "FactorGraph",
    "Grouping",
    "LevelPartition",
    "Merge",
    "MergeTree",
    "PlantedSpec",
    "QueryDeviation",
    "QueryResult",
    "RandomVariable",
    "acp_refine",
    "bound_chain",
    "build_graph",
    "build_hierarchy",
    "cd_interval",
    "dcd_bound_sharp",
    "dcd_bounds_loose",
    "dcd_distance",
    "distance_matrix",
    "eps_equivalent",
    "eps_for_target",
    "export_tree",
    "greedy_eps_grouping",
    "hacp_compress",
    "joint_potential",
    "level_for_epsilon",
    "lifted_marginal",
    "max_query_deviation",
    "mean_table",
    "odeed",
    "parse_tree",
    "partition_at_level",
    "partition_function",
    "planted_model",
    "pmax_bound",
    "query",
    "row_assignment",
    "row_index",
    "signature",
    "star_marginal",
    "table_equality_colours",
]
