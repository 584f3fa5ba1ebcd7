"""Locally D-optimal crossover designs for generalized linear models.

Information matrices come from generalized estimating equations with a
working correlation; optimality is certified by per-sequence sensitivity
conditions for either the full parameter vector or the direct treatment
effects.
"""

from .correlation import CorrelationFactor, CorrelationSpec, build_correlation, factor_inverse
from .criteria import (
    Criterion,
    DesignEvaluator,
    SensitivityProfile,
    directional_derivative,
    objective,
    objective_sweep,
    sensitivity,
    sensitivity_profile,
)
from .design import (
    CrossoverDesign,
    TreatmentSequence,
    build_contrast_matrix,
    build_design_matrix,
    enumerate_sequences,
    n_parameters,
    parse_sequence,
)
from .exceptions import (
    ConvergenceError,
    DesignError,
    InfeasibleSupportError,
    NumericalError,
    SingularInformationError,
    XoverDesignError,
)
from .information import (
    InformationMatrix,
    SequenceContribution,
    information_matrix,
    relative_d_efficiency,
    sequence_contribution,
    variance_tau,
    variance_theta,
)
from .links import (
    LinkEvaluation,
    ModelSpec,
    evaluate_link,
    inverse_link,
    inverse_link_derivative,
    linear_predictor,
    variance_function,
)
from .optimizer import (
    OptimizationResult,
    OptimizerOptions,
    grid_oracle,
    multiplicative_step,
    optimize,
    project_to_simplex,
    solve_equivalence_system,
)
from .verifier import VerificationReport, verify_augmented, verify_optimality

__version__ = "0.1.0"
