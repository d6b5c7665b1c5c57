"""Discrete primal, relaxed, dual and ergodic objectives."""

from .exceptions import ConstraintViolation, TerminalConditionError
from .objectives import (
    dual_integrand,
    duality_gap,
    ergodic_duality_gap,
    eval_dual_B,
    eval_dual_B_arrays,
    eval_ergodic_A,
    eval_ergodic_B,
    eval_primal_A,
    eval_relaxed_A,
    hj_operator,
    hj_operator_arrays,
    perspective_kinetic,
)
from .states import DualState, ErgodicState, PrimalState

__all__ = [
    "ConstraintViolation",
    "DualState",
    "ErgodicState",
    "PrimalState",
    "TerminalConditionError",
    "dual_integrand",
    "duality_gap",
    "ergodic_duality_gap",
    "eval_dual_B",
    "eval_dual_B_arrays",
    "eval_ergodic_A",
    "eval_ergodic_B",
    "eval_primal_A",
    "eval_relaxed_A",
    "hj_operator",
    "hj_operator_arrays",
    "perspective_kinetic",
]
