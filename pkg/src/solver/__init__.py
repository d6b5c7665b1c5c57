"""Primal-dual solvers for the time-dependent and ergodic problems."""

from .ergodic import ErgodicSolver, solve_ergodic
from .exceptions import InfeasibleInput, InnerProxFailure, NonConvergence, StepSizeError
from .models import ConvergenceSummary, ErgodicSolution, GapRecord, SolutionBundle
from .operators import (
    adjoint_ergodic,
    adjoint_space_time,
    apply_ergodic,
    apply_space_time,
    estimate_operator_norm,
    lambda_scale,
)
from .options import SolverOptions
from .prox import moreau_dual_point, prox_primal_point
from .time_dependent import TimeDependentSolver, complementarity, solve_time_dependent, validate_inputs

__all__ = [
    "ConvergenceSummary",
    "ErgodicSolution",
    "ErgodicSolver",
    "GapRecord",
    "InfeasibleInput",
    "InnerProxFailure",
    "NonConvergence",
    "SolutionBundle",
    "SolverOptions",
    "StepSizeError",
    "TimeDependentSolver",
    "adjoint_ergodic",
    "adjoint_space_time",
    "apply_ergodic",
    "apply_space_time",
    "complementarity",
    "estimate_operator_norm",
    "lambda_scale",
    "moreau_dual_point",
    "prox_primal_point",
    "solve_ergodic",
    "solve_time_dependent",
    "validate_inputs",
]
