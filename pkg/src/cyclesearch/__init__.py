"""Cycle search for stationary first-order optimization methods.

Encodes the minimization of the cycle score of a method over a function
class as a semidefinite program via interpolation conditions and Gram
lifting, solves it with a built-in interior-point method, and verifies
explicit cycle certificates.  A cycle is a constructive proof that the
method does not converge in the worst case at those parameters.
"""

__version__ = "0.1.0"

from .symbolic import (
    Context,
    ContextMismatchError,
    DegreeError,
    ScalarExpr,
    VectorExpr,
    evaluate,
    inner_product,
    norm_sq,
)
from .function_classes import (
    ClassSpec,
    CocoerciveOperator,
    EvaluationRecord,
    MonotoneOperator,
    SmoothConvex,
    SmoothStronglyConvex,
    interpolation_constraints,
    relative_inexactness_constraint,
)
from .methods import (
    FunctionOracle,
    GalleryFunction,
    MethodSpec,
    SplittingOracle,
    TrajectoryState,
    check_cycle_prefix,
    gallery_f_rho,
    heavy_ball,
    inexact_gradient,
    nesterov,
    recognize_tuning,
    simulate,
    three_operator_splitting,
)
from .builder import (
    ConicProgram,
    CycleProblem,
    LinearConstraint,
    LoweredProblem,
    StructurallyInfeasibleError,
    build_cycle_problem,
    lower_to_conic,
)
from .solver import ConicSolution, ResidualReport, SolverOptions, certify, solve
from .analysis import (
    AnalyticCycle,
    CycleCertificate,
    DecisionThresholds,
    analytic_oracles,
    decide,
    load_certificate,
    reconstruct,
    run_cycle_search,
    save_certificate,
    verify_certificate,
)
from .sweep import AxisSpec, RegionMap, SweepConfig, run_sweep
from .heatmap import emit_heatmap
