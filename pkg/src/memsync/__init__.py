"""Simulation and synchronization analysis of weakly coupled memristive
reaction-diffusion neural networks.

The package integrates a hybrid PDE-ODE network model on uniform 2-D grids
(only the membrane potential diffuses), evaluates the derived constant chain
that yields the coupling-strength threshold for exponential synchronization,
verifies the structural growth/dissipation assumptions numerically, and
measures synchronization decay from simulated trajectories.
"""

__version__ = "0.1.0"

from .assumptions import AssumptionReport, InequalityCheck, verify_assumptions
from .config import ScenarioConfig, load_config, load_state, save_config, save_state
from .diagnostics import (
    BoundCheck,
    DiffRecord,
    RateFit,
    asynchronous_degree_estimate,
    check_bound,
    energy_norm_sq,
    fit_exponential_rate,
    l2_norm,
    l4_norm4,
    pairwise_diff_norms,
    sup_potential_sum,
)
from .errors import (
    ConfigurationError,
    InsufficientDataError,
    MemsyncError,
    SimulationBlowupError,
    StabilityError,
)
from .grids import FieldGrid, NetworkState, NeuronFields, init_random
from .models import (
    CouplingParams,
    GeneralParams,
    ReactionModel,
    fhn_general_params,
    fhn_model,
    gamma,
    hr_assumption_params,
    hr_general_params,
    hr_model,
)
from .solver import (
    Scenario,
    StabilityReport,
    StepRecord,
    Trajectory,
    coupling_field,
    laplacian_neumann,
    rhs,
    run,
    stability_check,
    step_euler,
)
from .thresholds import (
    REFERENCE_CONSTANTS,
    DerivedConstants,
    ReversalConstants,
    compute_C1,
    compute_C2,
    compute_G,
    compute_K,
    compute_Q,
    compute_all,
    compute_delta,
    compute_kappa,
    compute_mu,
    compute_P_threshold,
    compute_psi,
)

__all__ = [
    "__version__",
    # grids / state
    "FieldGrid", "NeuronFields", "NetworkState", "init_random",
    # models
    "ReactionModel", "CouplingParams", "GeneralParams", "gamma",
    "hr_model", "fhn_model",
    "hr_general_params", "hr_assumption_params", "fhn_general_params",
    # assumptions
    "verify_assumptions", "AssumptionReport", "InequalityCheck",
    # solver
    "Scenario", "Trajectory", "StepRecord", "StabilityReport",
    "laplacian_neumann", "coupling_field", "rhs", "step_euler",
    "stability_check", "run",
    # diagnostics
    "l2_norm", "l4_norm4", "energy_norm_sq", "pairwise_diff_norms",
    "DiffRecord", "sup_potential_sum", "fit_exponential_rate", "RateFit",
    "asynchronous_degree_estimate", "check_bound", "BoundCheck",
    # thresholds
    "DerivedConstants", "ReversalConstants", "REFERENCE_CONSTANTS",
    "compute_C1", "compute_C2", "compute_mu", "compute_K", "compute_Q",
    "compute_G", "compute_kappa", "compute_P_threshold", "compute_delta",
    "compute_all", "compute_psi",
    # config
    "ScenarioConfig", "load_config", "save_config", "save_state", "load_state",
    # errors
    "MemsyncError", "ConfigurationError", "StabilityError",
    "SimulationBlowupError", "InsufficientDataError",
]
