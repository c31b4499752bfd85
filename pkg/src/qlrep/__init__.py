"""Contextual probability, interference, and its complex Hilbert space image."""

from ._version import __version__
from .errors import (
    BornRuleUnavailableError,
    DegenerateCellError,
    DegenerateContextError,
    IncompatibilityError,
    InputValidationError,
    NoGeneratorError,
    NotRepresentableError,
    NumericalError,
    PhaseAliasingError,
    QlrepError,
    ScenarioError,
)
from .interference import (
    DEGENERATE_BOUNDARY,
    HYPERBOLIC,
    MIXED,
    TRIGONOMETRIC,
    ContextualData,
    InterferenceReport,
    classify_context,
    interference_total_probability,
    lambda_coefficient,
    phase_constraint_check,
)
from .prespace import (
    Context,
    DichotomousVariable,
    PrespaceProcess,
    ProbabilitySpace,
    are_incompatible,
    build_conserving_process,
    classical_total_probability,
    conditional_probability,
    conserves_all_contexts,
    contextual_data,
    is_nondegenerate,
    sample_atoms,
)
from .hilbert import (
    Amplitude,
    ObservableOperator,
    QLState,
    ReferenceBasis,
    TheoremCheck,
    born_probability,
    energy_observable,
    expectation,
    hamiltonian_observable,
    is_double_stochastic,
    operator_in_b_frame,
    position_observable,
    represent,
    theorem_check,
)
from .dynamics import (
    ApproximationReport,
    DynamicsClassification,
    EnergyReport,
    HamiltonianExtraction,
    LinearityCheck,
    PhaseLaw,
    Propagator,
    approximation_analysis,
    classify_continuity,
    classify_determinism,
    classify_dynamics,
    classify_linearity,
    classify_time_shift_invariance,
    cocycle_residual,
    constant_rate_law,
    context_law,
    continuous_phase_branch,
    energy_process,
    evolve,
    extract_hamiltonian,
    group_law_residual,
    increment_law,
    law_from_phase_samples,
    perturbed_law,
    phase_trajectory,
    propagator,
    rate_law,
    validate_preconditions,
)
from .lambda_ode import (
    HarmonicFit,
    LambdaTrajectory,
    harmonic_residual,
    schroedinger_detector,
    solve_eabb,
    solve_theta,
)
from .scenario import GridSpec, Scenario, load_scenario
from .runner import emit_report, run_scenario

__all__ = [
    "__version__",
    "QlrepError",
    "InputValidationError",
    "DegenerateContextError",
    "IncompatibilityError",
    "DegenerateCellError",
    "NotRepresentableError",
    "BornRuleUnavailableError",
    "PhaseAliasingError",
    "NoGeneratorError",
    "ScenarioError",
    "NumericalError",
    "TRIGONOMETRIC",
    "HYPERBOLIC",
    "MIXED",
    "DEGENERATE_BOUNDARY",
    "ContextualData",
    "InterferenceReport",
    "lambda_coefficient",
    "interference_total_probability",
    "classify_context",
    "phase_constraint_check",
    "ProbabilitySpace",
    "DichotomousVariable",
    "Context",
    "PrespaceProcess",
    "conditional_probability",
    "is_nondegenerate",
    "are_incompatible",
    "classical_total_probability",
    "contextual_data",
    "build_conserving_process",
    "sample_atoms",
    "conserves_all_contexts",
    "Amplitude",
    "ReferenceBasis",
    "ObservableOperator",
    "QLState",
    "TheoremCheck",
    "is_double_stochastic",
    "represent",
    "born_probability",
    "theorem_check",
    "expectation",
    "operator_in_b_frame",
    "position_observable",
    "energy_observable",
    "hamiltonian_observable",
    "PhaseLaw",
    "constant_rate_law",
    "rate_law",
    "increment_law",
    "perturbed_law",
    "context_law",
    "continuous_phase_branch",
    "law_from_phase_samples",
    "Propagator",
    "propagator",
    "evolve",
    "phase_trajectory",
    "LinearityCheck",
    "classify_linearity",
    "cocycle_residual",
    "classify_determinism",
    "classify_time_shift_invariance",
    "classify_continuity",
    "group_law_residual",
    "DynamicsClassification",
    "classify_dynamics",
    "validate_preconditions",
    "HamiltonianExtraction",
    "extract_hamiltonian",
    "EnergyReport",
    "energy_process",
    "ApproximationReport",
    "approximation_analysis",
    "LambdaTrajectory",
    "solve_theta",
    "solve_eabb",
    "harmonic_residual",
    "HarmonicFit",
    "schroedinger_detector",
    "GridSpec",
    "Scenario",
    "load_scenario",
    "run_scenario",
    "emit_report",
]
