"""Kalman estimation for linear quantum optical systems.

Models single-mode cavities and dynamic squeezers in doubled-up
annihilation/creation form, checks physical realizability, solves the
steady-state filter Riccati equation with cross-correlated noises, and
compares purely-classical against coherent-classical estimation costs across
homodyne detector angles.
"""

from .claims import ClaimReport, evaluate_claims, verify_claims
from .doubled import DoubledMatrix, conjugation_defect, is_doubled, make_doubled
from .errors import (
    ConfigurationError,
    ContractViolationError,
    ConvergenceError,
    DimensionError,
    NoStabilizingSolutionError,
    NoSteadyStateError,
    ParameterError,
    PreconditionError,
    QklError,
    SingularInnovationError,
    SolverError,
    StepSizeError,
    UsageError,
)
from .estimation import (
    CLASSICAL,
    COHERENT,
    COHERENT_FEEDBACK,
    CostCurve,
    EstimationProblem,
    HomodyneConfig,
    classical_problem,
    coherent_feedback_problem,
    coherent_problem,
    cost,
    estimator_realization,
    sweep,
)
from .figures import FIGURE_CONFIGS, ExperimentConfig, GridSpec, run_figure
from .realizability import (
    CommutationMatrix,
    RealizabilityReport,
    check_annihilation_realizable,
    check_general_realizable,
    check_realizable,
    solve_commutation,
)
from .riccati import (
    FilterData,
    RiccatiSolution,
    care_residual,
    integrate_care_oracle,
    solve_care,
)
from .search import SearchConfig, run_search, search_from_dict
from .systems import (
    QuantumSystem,
    SqueezerParams,
    build_feedback_squeezer_controller,
    build_feedback_squeezer_plant,
    build_squeezer_controller,
    build_squeezer_plant,
    read_squeezer_params,
)

__version__ = "0.1.0"
