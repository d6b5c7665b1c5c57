"""Hamiltonian and coupling families with closed-form conjugates."""

from .assumptions import EXPONENT_RELATION, AssumptionReport, check_assumptions, holder_exponent
from .coupling import CouplingFamily, CouplingSpec
from .exceptions import AssumptionViolation, ModelSpecError
from .hamiltonian import HamiltonianSpec
from .spec import ModelSpec, fenchel_young_defect

__all__ = [
    "AssumptionReport",
    "AssumptionViolation",
    "CouplingFamily",
    "CouplingSpec",
    "EXPONENT_RELATION",
    "HamiltonianSpec",
    "ModelSpec",
    "ModelSpecError",
    "check_assumptions",
    "fenchel_young_defect",
    "holder_exponent",
]
