"""JSON run configuration, validated before any computation.

Defaults (schema_version 1):

=================  ====================================================
grid               d=1, n_x=64, n_t=64, T=1.0
model.hamiltonian  exponent=2, weight=constant 1, potential=zero
model.coupling     family=power, exponent=2 (power only), weight=constant 1
data               m0=constant 1, phi_T=zero
solver             see SolverOptions
output             directory="output/run", formats=["csv", "binary-f64"]
longtime           horizons=[2, 5, 10, 20], h_t=T/n_t, delta=0.1
verify             source="solve", thresholds below
=================  ====================================================
"""

from __future__ import annotations

from enum import Enum
from pathlib import Path
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from src.grid import Grid
from src.model import CouplingFamily, CouplingSpec, HamiltonianSpec, ModelSpec, check_assumptions
from src.solver import SolverOptions

from .exceptions import SchemaError
from .export import ExportFormat
from .presets import ArrayPreset, ConstantPreset, FieldPreset, ZeroPreset


class RunMode(str, Enum):
    SOLVE = "solve"
    ERGODIC = "ergodic"
    LONGTIME = "longtime"
    VERIFY = "verify"


class VerifySource(str, Enum):
    """Where verify mode takes the checked solution from."""

    SOLVE = "solve"
    STATIONARY = "stationary"
    FILES = "files"


class _Block(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


# =============================================================================
# Discretisation and model blocks
# =============================================================================


class GridBlock(_Block):
    d: int = Field(default=1, ge=1, le=2, description="Spatial dimension")
    n_x: int = Field(default=64, ge=2, description="Points per spatial axis")
    n_t: int = Field(default=64, ge=1, description="Number of time cells")
    T: float = Field(default=1.0, gt=0.0, description="Horizon")

    def build(self) -> Grid:
        return Grid(d=self.d, n_x=self.n_x, n_t=self.n_t, horizon=self.T)


class HamiltonianBlock(_Block):
    exponent: float = Field(default=2.0, gt=1.0, description="r in H = c |p|^r / r - V")
    weight: FieldPreset = Field(default_factory=lambda: ConstantPreset(value=1.0))
    potential: FieldPreset = Field(default_factory=ZeroPreset)


class CouplingBlock(_Block):
    family: CouplingFamily = CouplingFamily.POWER
    exponent: Optional[float] = Field(
        default=None, gt=1.0, description="q of the power family (defaults to 2); must be omitted for log"
    )
    weight: FieldPreset = Field(default_factory=lambda: ConstantPreset(value=1.0))

    @model_validator(mode="after")
    def _exponent_matches_family(self) -> "CouplingBlock":
        if self.family is CouplingFamily.LOG and self.exponent is not None:
            raise ValueError("the log coupling takes no exponent")
        return self

    @property
    def q(self) -> Optional[float]:
        if self.family is CouplingFamily.LOG:
            return None
        return 2.0 if self.exponent is None else self.exponent


class ModelBlock(_Block):
    hamiltonian: HamiltonianBlock = Field(default_factory=HamiltonianBlock)
    coupling: CouplingBlock = Field(default_factory=CouplingBlock)


class DataBlock(_Block):
    m0: FieldPreset = Field(default_factory=lambda: ConstantPreset(value=1.0))
    phi_T: FieldPreset = Field(default_factory=ZeroPreset)


# =============================================================================
# Mode-specific and output blocks
# =============================================================================


class OutputBlock(_Block):
    directory: str = Field(default="output/run", description="Directory receiving every artifact")
    formats: List[ExportFormat] = Field(
        default_factory=lambda: [ExportFormat.CSV, ExportFormat.BINARY],
        min_length=1,
        description="Field export formats",
    )


class LongTimeBlock(_Block):
    horizons: List[float] = Field(default_factory=lambda: [2.0, 5.0, 10.0, 20.0], min_length=1)
    h_t: Optional[float] = Field(default=None, gt=0.0, description="Fixed time step; defaults to T / n_t")
    delta: float = Field(default=0.1, gt=0.0, lt=1.0, description="Left end of the psi comparison window")

    @model_validator(mode="after")
    def _increasing(self) -> "LongTimeBlock":
        if any(t <= 0.0 for t in self.horizons):
            raise ValueError("horizons must be positive")
        if any(b <= a for a, b in zip(self.horizons, self.horizons[1:])):
            raise ValueError("horizons must be strictly increasing")
        return self


class VerifyThresholds(_Block):
    hj_violation: float = Field(default=1e-3, ge=0.0, description="On the support of m")
    identity_gap: float = Field(default=1e-3, ge=0.0, description="Multiplied by T")
    continuity_residual: float = Field(default=1e-4, ge=0.0)
    terminal_violation: float = Field(default=1e-10, ge=0.0)


class VerifyBlock(_Block):
    source: VerifySource = VerifySource.SOLVE
    solution_dir: Optional[str] = Field(
        default=None, description="Directory holding phi, m and w exports (source='files')"
    )
    thresholds: VerifyThresholds = Field(default_factory=VerifyThresholds)

    @model_validator(mode="after")
    def _files_need_directory(self) -> "VerifyBlock":
        if self.source is VerifySource.FILES and not self.solution_dir:
            raise ValueError("source='files' needs solution_dir")
        return self


class RunConfig(_Block):
    """Complete, validated description of one run."""

    schema_version: Literal[1]
    mode: RunMode = RunMode.SOLVE
    grid: GridBlock = Field(default_factory=GridBlock)
    model: ModelBlock = Field(default_factory=ModelBlock)
    data: DataBlock = Field(default_factory=DataBlock)
    solver: SolverOptions = Field(default_factory=SolverOptions)
    output: OutputBlock = Field(default_factory=OutputBlock)
    longtime: LongTimeBlock = Field(default_factory=LongTimeBlock)
    verify: VerifyBlock = Field(default_factory=VerifyBlock)

    @model_validator(mode="after")
    def _arrays_fit_grid(self) -> "RunConfig":
        size = self.grid.n_x**self.grid.d
        named = {
            "model.hamiltonian.weight": self.model.hamiltonian.weight,
            "model.hamiltonian.potential": self.model.hamiltonian.potential,
            "model.coupling.weight": self.model.coupling.weight,
            "data.m0": self.data.m0,
            "data.phi_T": self.data.phi_T,
        }
        for name, preset in named.items():
            if isinstance(preset, ArrayPreset) and len(preset.values) != size:
                raise ValueError(f"{name} holds {len(preset.values)} values, the grid needs {size}")
        return self

    def build_grid(self) -> Grid:
        return self.grid.build()

    def build_model(self, grid: Optional[Grid] = None) -> ModelSpec:
        """Expand the presets on ``grid`` (default: the configured grid)."""
        grid = grid or self.build_grid()
        ham = self.model.hamiltonian
        coup = self.model.coupling
        return ModelSpec(
            hamiltonian=HamiltonianSpec(
                exponent=ham.exponent,
                weight=ham.weight.expand(grid),
                potential=ham.potential.expand(grid),
            ),
            coupling=CouplingSpec(family=coup.family, weight=coup.weight.expand(grid), exponent=coup.q),
            m0=self.data.m0.expand(grid),
            phi_T=self.data.phi_T.expand(grid),
        )

    def with_overrides(self, mode: Optional[RunMode] = None, seed: Optional[int] = None) -> "RunConfig":
        update = {}
        if mode is not None:
            update["mode"] = mode
        if seed is not None:
            update["solver"] = self.solver.model_copy(update={"rng_seed": seed})
        return self.model_copy(update=update)


def _dotted(location: tuple) -> str:
    return ".".join(str(part) for part in location)


def parse_config(text: str, check: bool = True) -> RunConfig:
    """Validate a JSON document into a RunConfig.

    With ``check`` the exponent relation is tested right away, so an
    AssumptionViolation surfaces before any solve.
    """
    try:
        config = RunConfig.model_validate_json(text)
    except ValidationError as exc:
        first = exc.errors()[0]
        raise SchemaError(first["msg"], path=_dotted(first["loc"]) or "<document>") from exc
    if check:
        grid = config.build_grid()
        check_assumptions(config.build_model(grid), grid.d)
    return config


def load_config(path: str | Path, check: bool = True) -> RunConfig:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Config file not found: {path}")
    return parse_config(path.read_text(encoding="utf-8"), check=check)
