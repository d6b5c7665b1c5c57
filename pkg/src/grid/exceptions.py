from __future__ import annotations


class FieldPlacementError(ValueError):
    """Raised when a field sits on the wrong time placement for an operator."""


class FieldShapeError(ValueError):
    """Raised when a value array does not match its grid and placement."""
