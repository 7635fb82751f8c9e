"""Max-cut semidefinite relaxation: solver, rank structure and experiments."""
from .graph import (
    CliqueSumSpec,
    GraphError,
    WeightedGraph,
    cost_matrix,
    edge_sum,
    laplacian,
    named_graph,
    read_graph,
    vertex_sum,
)
from .linalg import BACKEND, numerical_rank
from .maxcut import (
    CutResult,
    brute_force_maxcut,
    gw_round,
    rank1_certificate,
    recover_cut_if_rank1,
    sdp_value,
)
from .sdp import SdpProblem, SdpSolution, Status, check_optimality, rank_report, solve
from .structure import (
    compose_vertex_sum,
    cycle_rank1_analysis,
    diamond_analysis,
    vertex_sum_min_rank_exists,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CliqueSumSpec",
    "CutResult",
    "GraphError",
    "SdpProblem",
    "SdpSolution",
    "Status",
    "WeightedGraph",
    "brute_force_maxcut",
    "check_optimality",
    "compose_vertex_sum",
    "cost_matrix",
    "cycle_rank1_analysis",
    "diamond_analysis",
    "edge_sum",
    "gw_round",
    "laplacian",
    "named_graph",
    "numerical_rank",
    "rank1_certificate",
    "rank_report",
    "read_graph",
    "recover_cut_if_rank1",
    "sdp_value",
    "solve",
    "vertex_sum",
    "vertex_sum_min_rank_exists",
]
