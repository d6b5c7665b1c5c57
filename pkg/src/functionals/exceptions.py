from __future__ import annotations


class TerminalConditionError(ValueError):
    """Raised when phi on the last time node violates the terminal condition."""


class ConstraintViolation(ValueError):
    """Raised when -d_t phi + H(x, D phi) <= alpha fails on some cell."""
