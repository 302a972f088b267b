"""Simulation and verification workbench for a measure-preserving linked-twist
map on the two-torus: the composed twist map, its induced first-return map on
the core square, the derivative cocycle with its cone field, the singularity
set of the induced map, unstable-segment growth, and Monte Carlo estimators
for correlation decay and return-time statistics.

Numerics run on plain floats by default; every scalar code path also accepts
exact rationals (fractions.Fraction) for oracle-grade checks.
"""

from .core import (
    DEFAULT_RETURN_CAP,
    LtmSpec,
    ReturnOutcome,
    ReturnTimeOverflow,
    TorusPoint,
    core_return,
    core_return_inv,
    h_twist,
    h_twist_inv,
    h_twist_return,
    in_core,
    in_domain,
    in_h_annulus,
    in_v_annulus,
    ltm,
    ltm_inv,
    orbit,
    points_equal,
    return_time_h,
    return_time_ltm,
    return_time_v,
    v_twist,
    v_twist_inv,
    v_twist_return,
    wrap,
)
from .cocycle import (
    CORNER_PATTERNS,
    ONE_STEP_SERIES_LIMIT,
    BranchMismatch,
    ExpansionReport,
    LyapunovEnsemble,
    Mat2,
    NotHyperbolic,
    branch_matrix,
    cone_step,
    corner_branch_matrix,
    h_step_matrix,
    in_stable_cone,
    in_unstable_cone,
    lyapunov_ensemble,
    lyapunov_estimate,
    numeric_jacobian,
    one_step_partial_series,
    spectral_radius,
    stable_direction,
    tangent_expansion,
    two_step_branch_matrix,
    two_step_corner_eigenvalue,
    unstable_direction,
    v_step_matrix,
)
from .partition import (
    Branch2Label,
    BranchLabel,
    NoCrossingFound,
    SingularLine,
    cell_histogram,
    cell_measure,
    cell_measure_sweep,
    classify,
    classify2,
    locate_cell_boundary,
    neighborhood_measure,
    reflect_antidiagonal,
    singular_lines_h,
    singular_lines_v,
    tail_measure,
    two_step_label_consistent,
)
from .manifold import (
    BudgetExceeded,
    CutResult,
    EvolveResult,
    Generation,
    HeteroclinicResult,
    ResolutionExceeded,
    Segment,
    SegmentExpansion,
    corner_crossing_segment,
    corner_funnel_segment,
    corner_seed_segment,
    evolve_segment,
    heteroclinic_probe,
    iterate_segments,
    length_stats,
    one_step_sum,
    split_many,
    split_segment,
)
from .correlations import (
    CorrSeries,
    IsolationStats,
    MarkarianScan,
    Observable,
    TailDecomposition,
    builtin_observables,
    cell_tail_curve,
    default_markarian_b,
    estimate_correlation,
    estimate_correlation_core,
    isolation_scan,
    markarian_scan,
    n_max_stat,
    observable_by_name,
    r_count,
    shuffled_null,
    tail_decomposition,
)
from .util import (
    FitResult,
    MeasureEstimate,
    binomial_estimate,
    linear_fit,
    loglog_slope,
    nondecreasing_trend,
    semilog_slope,
)

__version__ = "0.1.0"
