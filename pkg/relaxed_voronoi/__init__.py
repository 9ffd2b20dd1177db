"""
Relaxed-Voronoi terminal clustering.

Each terminal t_j, taken in an ordering pi, claims every unclaimed point x
with d(t_j, x) <= R_j * D(x). One rule gives tree Steiner point removal
(constant R = 3, distortion <= 8), metric 0-extension (Gonzalez order,
R_j = 2e^Z) and connected 0-extension (R_j = e^Z).
"""

from relaxed_voronoi.clustering import (
    InducedMinor,
    Retraction,
    TerminalPartition,
    create_cluster,
    graphic_relaxed_voronoi,
    induce_minor,
    metric_relaxed_voronoi,
    terminal_distance_rows,
    validate_partition,
    voronoi_baseline,
)
from relaxed_voronoi.errors import InputError, InvariantViolation, RelaxedVoronoiError
from relaxed_voronoi.evaluation import (
    CutReport,
    DistortionReport,
    EngineConfig,
    StretchReport,
    cut_statistics,
    expected_stretch,
    floyd_warshall,
    minor_distortion,
)
from relaxed_voronoi.generators import (
    GeneratorSpec,
    complete_binary_tree,
    estimate_ddim,
    generate,
    grid_metric,
    random_connected_graph,
    random_tree,
)
from relaxed_voronoi.graph import (
    MetricSpace,
    TerminalInstance,
    TerminalSet,
    WeightedGraph,
    metric_from_graph,
    shortest_paths_from,
    terminal_distances,
)
from relaxed_voronoi.magnitudes import MagnitudePolicy, MagnitudeVector, make_magnitudes, sample_exponential
from relaxed_voronoi.orderings import OrderingPolicy, gonzalez_order, root_distance_order
from relaxed_voronoi.tree_fast import (
    RootedTree,
    SprResult,
    spr_tree,
    tree_root_distances,
    tree_terminal_distances,
)

__version__ = "1.0.0"

__all__ = [
    "CutReport",
    "DistortionReport",
    "EngineConfig",
    "GeneratorSpec",
    "InducedMinor",
    "InputError",
    "InvariantViolation",
    "MagnitudePolicy",
    "MagnitudeVector",
    "MetricSpace",
    "OrderingPolicy",
    "RelaxedVoronoiError",
    "Retraction",
    "RootedTree",
    "SprResult",
    "StretchReport",
    "TerminalInstance",
    "TerminalPartition",
    "TerminalSet",
    "WeightedGraph",
    "complete_binary_tree",
    "create_cluster",
    "cut_statistics",
    "estimate_ddim",
    "expected_stretch",
    "floyd_warshall",
    "generate",
    "gonzalez_order",
    "graphic_relaxed_voronoi",
    "grid_metric",
    "induce_minor",
    "make_magnitudes",
    "metric_from_graph",
    "metric_relaxed_voronoi",
    "minor_distortion",
    "random_connected_graph",
    "random_tree",
    "root_distance_order",
    "sample_exponential",
    "shortest_paths_from",
    "spr_tree",
    "terminal_distance_rows",
    "terminal_distances",
    "tree_root_distances",
    "tree_terminal_distances",
    "validate_partition",
    "voronoi_baseline",
]
