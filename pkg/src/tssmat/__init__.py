"""Tree semi-separable (TSS) matrices: construction, matvec, solve and algebra."""

from .algebra import GirsReport, add, inverse, multiply, profile_leq, profile_sum, verify_girs
from .apply import matvec, matvec_opcount
from .blockmat import (
    BlockLayout,
    GraphPartitionedMatrix,
    border_edge_count,
    hankel_induced,
    submatrix,
    unit_hankel,
    unit_hankel_sets,
)
from .construct import EdgeFactors, SweepWorkspace, construct_tss, hankel_rank_profile
from .errors import (
    TssError,
    BadNodeId,
    DisconnectedGraph,
    CycleDetected,
    BadLeafCount,
    EmptyOrFullSubset,
    NotATreeEdge,
    NonFiniteInput,
    ShapeMismatch,
    MissingGenerator,
    LengthMismatch,
    LayoutMismatch,
    NotSquare,
    SingularMatrix,
    SingularPivotBlock,
)
from .lowrank import DEFAULT_TOL, LowRankFactors, numerical_rank, rank_reveal
from .solve import (
    LiftedSolution,
    LiftedSystem,
    SolveInfo,
    assemble_lifted,
    dense_solve,
    solve,
    solve_lifted,
)
from .tree import RootedTree, build_rooted_tree, hss_binary_tree, line_tree, random_tree
from .tss import (
    SpinnerTable,
    TssMatrix,
    block_entry,
    diagonal_tss,
    identity_tss,
    random_tss,
    to_dense,
    uniform_profile,
)

__version__ = "0.1.0"

__all__ = [
    "BadLeafCount",
    "BadNodeId",
    "BlockLayout",
    "CycleDetected",
    "DEFAULT_TOL",
    "DisconnectedGraph",
    "EdgeFactors",
    "EmptyOrFullSubset",
    "GirsReport",
    "GraphPartitionedMatrix",
    "LayoutMismatch",
    "LengthMismatch",
    "LiftedSolution",
    "LiftedSystem",
    "LowRankFactors",
    "MissingGenerator",
    "NonFiniteInput",
    "NotATreeEdge",
    "NotSquare",
    "RootedTree",
    "ShapeMismatch",
    "SingularMatrix",
    "SingularPivotBlock",
    "SolveInfo",
    "SpinnerTable",
    "SweepWorkspace",
    "TssError",
    "TssMatrix",
    "add",
    "assemble_lifted",
    "block_entry",
    "border_edge_count",
    "build_rooted_tree",
    "construct_tss",
    "dense_solve",
    "diagonal_tss",
    "hankel_induced",
    "hankel_rank_profile",
    "hss_binary_tree",
    "identity_tss",
    "inverse",
    "line_tree",
    "matvec",
    "matvec_opcount",
    "multiply",
    "numerical_rank",
    "profile_leq",
    "profile_sum",
    "random_tree",
    "random_tss",
    "rank_reveal",
    "solve",
    "solve_lifted",
    "submatrix",
    "to_dense",
    "uniform_profile",
    "unit_hankel",
    "unit_hankel_sets",
    "verify_girs",
]
