"""Tight paths in fully directed hypergraphs."""

from .conjectures import (
    SearchReport,
    check_34,
    check_34_acyclic,
    check_pairwise_intersecting,
    walk_length_coloring,
)
from .digraph import (
    Digraph,
    RDigraph,
    WalkReport,
    edge_density,
    has_closed_walk,
    is_tight_path,
    longest_walk,
    shift_digraph,
)
from .errors import (
    AlgorithmFailure,
    InvalidInputError,
    PreconditionError,
    ResourceLimitError,
    UnsupportedError,
)
from .families import CycleFamily, disjoint_cycle_family, search_disjoint_cycle_family
from .paths import (
    PathResult,
    PathSearchOptions,
    count_spanning_paths,
    extract_bounded_walk_subgraph,
    longest_tight_path_exact,
    min_degree_subgraph,
    path_from_cycles,
    spanning_path_35,
    spanning_path_flexible,
)
from .perms import canonical_pattern, pattern_match
from .psg import (
    Chord,
    ShiftCycle,
    build_psg,
    chorded_shift_cycles,
    realize_walk,
    second_chord,
    shift_cycles,
    split_cycle,
    totient,
)
from .tables import table_thresholds
from .thresholds import (
    ThresholdCertificate,
    construct_cycle_transversal_clusters,
    construct_transversal_mod_t,
    growing_threshold,
    tau_formula_divisible,
    theta_exact,
    verify_certificate,
)
from .tournaments import (
    Tournament,
    construct_binary_33,
    construct_cycle_sharpness,
    construct_first_not_max,
    construct_from_pattern_set,
    construct_interval_density,
    construct_max_second,
    construct_middle_not_max,
    is_rk_tournament,
)

__version__ = "0.1.0"

__all__ = [
    "AlgorithmFailure",
    "Chord",
    "CycleFamily",
    "Digraph",
    "InvalidInputError",
    "PathResult",
    "PathSearchOptions",
    "PreconditionError",
    "RDigraph",
    "ResourceLimitError",
    "SearchReport",
    "ShiftCycle",
    "ThresholdCertificate",
    "Tournament",
    "UnsupportedError",
    "WalkReport",
    "build_psg",
    "canonical_pattern",
    "check_34",
    "check_34_acyclic",
    "check_pairwise_intersecting",
    "chorded_shift_cycles",
    "construct_binary_33",
    "construct_cycle_sharpness",
    "construct_cycle_transversal_clusters",
    "construct_first_not_max",
    "construct_from_pattern_set",
    "construct_interval_density",
    "construct_max_second",
    "construct_middle_not_max",
    "construct_transversal_mod_t",
    "count_spanning_paths",
    "disjoint_cycle_family",
    "edge_density",
    "extract_bounded_walk_subgraph",
    "growing_threshold",
    "has_closed_walk",
    "is_rk_tournament",
    "is_tight_path",
    "longest_tight_path_exact",
    "longest_walk",
    "min_degree_subgraph",
    "path_from_cycles",
    "pattern_match",
    "realize_walk",
    "search_disjoint_cycle_family",
    "second_chord",
    "shift_cycles",
    "shift_digraph",
    "spanning_path_35",
    "spanning_path_flexible",
    "split_cycle",
    "table_thresholds",
    "tau_formula_divisible",
    "theta_exact",
    "totient",
    "verify_certificate",
    "walk_length_coloring",
]
