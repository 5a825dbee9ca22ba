"""Multi-vector aggregation AMG.

Aggregation-based algebraic multigrid whose coarsening is driven by
weighted graph matching on a smooth vector, with an adaptive setup loop
that harvests additional smooth vectors and a single multi-vector
hierarchy that compresses them per aggregate by truncated SVD.  Intended
as a preconditioner for conjugate gradients on hard SPD systems.
"""

from .bench import MetricsRow, RunConfig, compute_cr, compute_opc, run_benchmark
from .bootstrap import (
    BootstrapParams,
    CompositeAMG,
    TestReport,
    apply_composite_symmetrized,
    bootstrap_run,
    test_phase,
)
from .cycles import CoarseSolver, CycleSpec, MultigridOperator, SmootherSpec, gauss_seidel_sweep
from .estimator import MultiVectorAMG
from .exceptions import (
    AmgError,
    CoarseningStagnationError,
    MatrixMarketError,
    NotSpdError,
    SvdConvergenceError,
)
from .krylov import SolveReport, fcg, pcg
from .matching import (
    EdgeWeightGraph,
    Matching,
    build_edge_weights,
    exact_max_product_matching,
    greedy_max_product_matching,
)
from .mmio import read_matrix_market, write_matrix_market
from .multivector import (
    AggregateSet,
    BlockProlongator,
    MultiVectorHierarchy,
    build_block_prolongator,
    build_multivector_hierarchy,
    merge_aggregate_levels,
)
from .pairwise import (
    CoarseningParams,
    PairwiseHierarchy,
    build_pair_prolongators,
    build_pairwise_hierarchy,
    compose_pairwise_steps,
)
from .problems import AnisotropySpec, ani_fixtures, generate_anisotropic_2d
from .sparse import a_norm, galerkin_product, spmv, transpose
from .svd import jacobi_svd

__version__ = "0.1.0"

__all__ = [
    "AggregateSet",
    "AmgError",
    "AnisotropySpec",
    "BlockProlongator",
    "BootstrapParams",
    "CoarseSolver",
    "CoarseningParams",
    "CoarseningStagnationError",
    "CompositeAMG",
    "CycleSpec",
    "EdgeWeightGraph",
    "Matching",
    "MatrixMarketError",
    "MetricsRow",
    "MultiVectorAMG",
    "MultiVectorHierarchy",
    "MultigridOperator",
    "NotSpdError",
    "PairwiseHierarchy",
    "RunConfig",
    "SmootherSpec",
    "SolveReport",
    "SvdConvergenceError",
    "TestReport",
    "a_norm",
    "ani_fixtures",
    "apply_composite_symmetrized",
    "bootstrap_run",
    "build_block_prolongator",
    "build_edge_weights",
    "build_multivector_hierarchy",
    "build_pair_prolongators",
    "build_pairwise_hierarchy",
    "compose_pairwise_steps",
    "compute_cr",
    "compute_opc",
    "exact_max_product_matching",
    "fcg",
    "galerkin_product",
    "gauss_seidel_sweep",
    "generate_anisotropic_2d",
    "greedy_max_product_matching",
    "jacobi_svd",
    "merge_aggregate_levels",
    "pcg",
    "read_matrix_market",
    "run_benchmark",
    "spmv",
    "test_phase",
    "transpose",
    "write_matrix_market",
]
