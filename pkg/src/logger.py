from __future__ import annotations

import logging
from typing import Optional

_ROOT_NAME = "mfg"


def get_solver_logger(name: Optional[str] = None) -> logging.Logger:
    """Get a configured logger for the solver stack.

    Args:
        name: Optional child name (e.g. 'solver'). Defaults to the root 'mfg' logger.

    Returns:
        A configured logging.Logger instance.
    """
    root = logging.getLogger(_ROOT_NAME)

    # Only add handler if not already added
    if not root.handlers:
        handler = logging.StreamHandler()
        formatter = logging.Formatter(
            "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
        )
        handler.setFormatter(formatter)
        root.addHandler(handler)
        root.setLevel(logging.INFO)

    if not name:
        return root
    return root.getChild(name)


def set_log_level(level: int) -> None:
    """Set the level of the shared 'mfg' logger (used by --quiet)."""
    get_solver_logger().setLevel(level)
