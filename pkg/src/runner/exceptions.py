from __future__ import annotations

from typing import Optional


class SchemaError(ValueError):
    """Raised when a config document fails validation; ``path`` is the dotted key path."""

    def __init__(self, message: str, path: Optional[str] = None) -> None:
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class ExportFormatError(ValueError):
    """Raised when a field file cannot be written or read back in the requested format."""
