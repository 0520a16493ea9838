"""Sparse recovery of underdetermined linear systems by reweighted
fixed-point iteration, with convergence-rate measurement, Newton-type
reformulations, planted dataset generators, and a brute-force oracle.
"""

from .analysis import (
    INCONCLUSIVE,
    LINEAR,
    SUBLINEAR,
    SUPERLINEAR,
    IterationJacobian,
    RateReport,
    TheoryCheck,
    classify_against_theory,
    g_matrix,
    h_vector,
    iteration_jacobian,
    measure_rate,
    rate_series,
    support_bounds_check,
    support_count,
)
from .datagen import (
    OracleResult,
    brute_force_oracle,
    gen_appendix_a,
    gen_appendix_b,
    gen_random,
)
from .errors import (
    AssumptionFailureError,
    DegenerateNullVectorError,
    DegenerateReferenceError,
    FocussError,
    InfeasibleDimensionsError,
    NoExactSolutionError,
    NotSymmetricError,
    PEqualsOneError,
    SingularGramError,
    SingularMatrixError,
    TooLargeError,
    ZeroAnchorError,
    ZeroComponentError,
)
from .linalg import (
    RidgePolicy,
    SolveOutcome,
    null_space_basis,
    pseudoinverse_apply,
    rcond_estimate,
    spd_solve,
)
from .model import (
    AssumptionReport,
    GeneratedDataset,
    ProblemInstance,
    SparsityMeasure,
    as_measure,
    cost,
    dataset_from_dict,
    dataset_to_dict,
    dumps_dataset,
    inverse_weight,
    loads_dataset,
    log_abs,
    lp_norm,
    measure_weight,
    neg_power,
    validate_assumptions,
)
from .newton import (
    BlockSystem,
    assemble_block,
    block_inverse,
    exact_newton_step,
    newton_divergence_probe,
    quasi_newton_step,
)
from .solver import (
    STOP_MAX_ITER,
    STOP_STEP_TOL,
    SolverConfig,
    SolveTrace,
    auxiliary_value,
    default_init,
    focuss_step,
    focuss_step_threeform,
    solve,
)

__version__ = "0.1.0"
