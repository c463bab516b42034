"""Generic identifiability of linear structural equation models on acyclic mixed graphs."""

from .errors import (
    BudgetExhaustedError,
    DirectedCycleError,
    GraphError,
    GraphFormatError,
    InstanceTooLargeError,
    NumericFailure,
    SelfLoopError,
    SingularSystemError,
    TrekidError,
    UnsupportedCertificatePhaseError,
    VertexOutOfRangeError,
)
from .flow import (
    HalfTrekSystem,
    brute_force_half_trek_system,
    build_flow_network,
    half_trek_system,
    half_trek_system_exists,
    max_flow,
    satisfies_htc,
)
from .formats import parse_graph_json, parse_graph_text, read_graph, write_graph
from .graph import (
    HalfTrek,
    LabeledGraph,
    MixedComponent,
    MixedGraph,
    ancestors,
    descendants,
    half_trek_reachable,
    induced_subgraph,
    is_ancestral,
    mixed_component_of,
    mixed_components,
    topological_order,
    validate_graph,
)
from .graphgen import GenConfig, random_mixed_graph, random_spanning_tree
from .identify import (
    Certificate,
    IdReport,
    ancestral_identifiable,
    check_certificate,
    classify,
    htc_identifiable,
    htc_unidentifiable,
)
from .numeric import (
    Parameters,
    covariance,
    jacobian,
    jacobian_rank,
    recover_parameters,
    sample_parameters,
    trek_rule_covariance,
)
from .sim import SimConfig, SimRecord, find_inconclusive, run_experiment

__all__ = [name for name in dir() if not name.startswith("_")]
