from __future__ import annotations


class AssumptionViolation(ValueError):
    """Raised when the exponent relation r > max{d(q-1),1} fails."""


class ModelSpecError(ValueError):
    """Raised when model data (weights, densities, terminal values) are invalid."""
