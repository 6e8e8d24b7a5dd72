"""Stationary states, stability, and dynamics of PT-symmetric oligomers."""

from .errors import (
    EmptyBranchError,
    InvalidInputError,
    InvalidRegimeError,
    NoConvergenceError,
    NumericalFailureError,
    PtoligoError,
    SchemaError,
    SingularJacobianError,
    StepUnderflowError,
)
from .model import (
    CASE_ASYMMETRIC,
    CASE_SPECIAL,
    CASE_SYMMETRIC,
    Params,
    StateVector,
    StationarySolution,
    evaluate_rhs,
    power_balance_rate,
    stationary_residual,
    total_power,
)
from .branches import (
    all_solutions,
    dimer_asymmetric,
    dimer_solutions,
    dimer_special_symmetric,
    dimer_symmetric,
    newton_refine,
    trimer_solutions,
)
from .linearize import classify_stability, spectrum_of
from .continuation import (
    analytic_critical_points,
    detect_events,
    sweep_all,
    sweep_branch,
    sweep_case,
)
from .dynamics import (
    IntegrationControls,
    Trajectory,
    classify_outcome,
    deviation_series,
    integrate,
    measured_growth_rate,
    perturb,
)
from .config import RunConfig, load_config

__all__ = [
    "all_solutions",
    "analytic_critical_points",
    "classify_outcome",
    "classify_stability",
    "detect_events",
    "deviation_series",
    "dimer_asymmetric",
    "dimer_solutions",
    "dimer_special_symmetric",
    "dimer_symmetric",
    "integrate",
    "load_config",
    "measured_growth_rate",
    "newton_refine",
    "perturb",
    "spectrum_of",
    "sweep_all",
    "sweep_branch",
    "sweep_case",
    "trimer_solutions",
    "IntegrationControls",
    "RunConfig",
    "Trajectory",
    "CASE_ASYMMETRIC",
    "CASE_SPECIAL",
    "CASE_SYMMETRIC",
    "EmptyBranchError",
    "InvalidInputError",
    "InvalidRegimeError",
    "NoConvergenceError",
    "NumericalFailureError",
    "Params",
    "PtoligoError",
    "SchemaError",
    "SingularJacobianError",
    "StateVector",
    "StationarySolution",
    "StepUnderflowError",
    "evaluate_rhs",
    "power_balance_rate",
    "stationary_residual",
    "total_power",
]

__version__ = "0.1.0"
