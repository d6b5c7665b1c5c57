from __future__ import annotations

import platform
from enum import Enum
from importlib import metadata
from pathlib import Path
from typing import Any, Dict, List, Optional

import jinja2
import numpy as np
import pydantic
import scipy
from pydantic import BaseModel, Field

from src.model import AssumptionReport
from src.solver import ConvergenceSummary

from .export import ExportedFile

PACKAGE_NAME = "mfg-duality"


class RunStatus(str, Enum):
    SUCCESS = "success"
    NON_CONVERGENCE = "non_convergence"
    VERIFICATION_FAILED = "verification_failed"


class RunManifest(BaseModel):
    """Record of one run; written even when the solver does not converge."""

    schema_version: int = 1
    mode: str
    status: RunStatus = RunStatus.SUCCESS
    config: Dict[str, Any] = Field(description="Echo of the validated config")
    assumption_report: Optional[AssumptionReport] = None
    versions: Dict[str, str] = Field(default_factory=dict)
    wall_times: Dict[str, float] = Field(default_factory=dict, description="Seconds per phase")
    convergence: List[ConvergenceSummary] = Field(default_factory=list)
    results: Dict[str, Any] = Field(default_factory=dict, description="Mode-specific scalars")
    files: List[ExportedFile] = Field(default_factory=list)

    @property
    def failed(self) -> bool:
        return self.status is not RunStatus.SUCCESS

    def write(self, path: Path) -> Path:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.model_dump_json(indent=2), encoding="utf-8")
        return path


def collect_versions() -> Dict[str, str]:
    try:
        package = metadata.version(PACKAGE_NAME)
    except metadata.PackageNotFoundError:
        package = "unknown"
    return {
        PACKAGE_NAME: package,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "pydantic": pydantic.VERSION,
        "jinja2": jinja2.__version__,
    }
