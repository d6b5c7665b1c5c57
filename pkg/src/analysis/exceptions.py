from __future__ import annotations


class WrongFamily(ValueError):
    """Raised when the closed-form ergodic oracle is asked about a model outside its family."""


class GridMismatch(ValueError):
    """Raised when fields compared by an analysis routine live on different grids."""
