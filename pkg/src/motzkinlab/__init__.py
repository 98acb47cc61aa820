"""Exact computation and simulation lab for weighted random Motzkin paths
with boundary weights."""

from .converge import LadderReport, LadderRow, theorem1_ladder, theorem2_ladder, tv_distance
from .engine import (
    DEFAULT_TAIL_EPS,
    DistTable,
    TransferMatrix,
    WeightTable,
    end_weighted_sums,
    endpoint_pgf,
    free_weight,
    initial_height_cap,
    left_fdd_law,
    normalization_constant,
    prefix_with_endpoint_law,
    right_fdd_law,
    start_weighted_sums,
    weight_table,
)
from .limit_chains import (
    BoundaryKernel,
    QDeformed,
    SizeBiased,
    TwoGeometrics,
    chain_fdd_law,
    chebyshev_u_at_cosh,
    initial_law,
    kernel_row,
    q_bracket,
    simulate_chain,
    xi_pmf,
    xi_walk_law,
)
from .model import (
    BoundaryMeasure,
    ModelSpec,
    MotzkinPath,
    RejectedInputError,
    WeightConfig,
    as_fraction,
    path_weight,
    reverse_path,
)
from .sampler import (
    BackwardTable,
    build_backward_table,
    empirical_fdd,
    read_binary,
    sample_path,
    sample_paths,
    write_binary,
)
from .spectral import (
    CheckReport,
    GaussURule,
    MixedMeasure,
    QuadratureError,
    cheb_u,
    cheb_u_closed,
    h_m_dp,
    lemma42_check,
    mu_moment,
    mu_moment_split,
    ratio_probe,
    semicircle_moment,
    theta_integral,
    viennot_integral,
)

__version__ = "0.1.0"
