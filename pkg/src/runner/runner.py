from __future__ import annotations

import time
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterator, List, Optional

import numpy as np

from src.analysis import (
    WrongFamily,
    ergodic_reference,
    explicit_ergodic_oracle,
    long_time_experiment,
    stationary_bundle,
    weak_solution_residuals,
)
from src.functionals import ErgodicState, hj_operator_arrays
from src.grid import Grid, ScalarField, VectorField
from src.logger import get_solver_logger
from src.model import ModelSpec, check_assumptions
from src.reporting import write_summary
from src.solver import (
    ErgodicSolution,
    GapRecord,
    NonConvergence,
    SolutionBundle,
    complementarity,
    solve_ergodic,
    solve_time_dependent,
)

from .config import RunConfig, RunMode, VerifySource
from .export import Exportable, ExportedFile, TorusField, export_field, export_table, import_field
from .manifest import RunManifest, RunStatus, collect_versions

MANIFEST_NAME = "manifest.json"
SUMMARY_NAME = "summary.md"

EXIT_OK = 0
EXIT_CONFIG_ERROR = 1
EXIT_NUMERICAL_FAILURE = 2

GAP_COLUMNS = ["iteration", "primal", "dual", "gap", "relative_gap", "feasibility", "mass_drift"]
LONGTIME_COLUMNS = [
    "T",
    "n_t",
    "mu_error",
    "psi_error",
    "mu_error_l2",
    "psi_error_l2",
    "energy_lhs",
    "converged",
]


@dataclass(frozen=True, slots=True)
class RunOutcome:
    exit_code: int
    manifest: RunManifest
    manifest_path: Path

    def summary(self) -> str:
        lines = [f"Mode: {self.manifest.mode}", f"Status: {self.manifest.status.value}"]
        for key, value in self.manifest.results.items():
            lines.append(f"{key}: {value}")
        lines.append(f"Files written: {len(self.manifest.files)}")
        lines.append(f"Manifest: {self.manifest_path}")
        return "\n".join(lines)


class ExperimentRunner:
    """Runs one configured mode and writes every artifact plus the manifest.

    Config and assumption errors propagate to the caller; numerical failures
    are recorded in the manifest and reflected in the exit code.
    """

    def __init__(self, config: RunConfig, output_dir: Optional[str | Path] = None) -> None:
        self._config = config
        self._out = Path(output_dir or config.output.directory)
        self._logger = get_solver_logger("runner")
        self._files: List[ExportedFile] = []
        self._wall_times: Dict[str, float] = {}

    @property
    def output_dir(self) -> Path:
        return self._out

    @contextmanager
    def _timed(self, phase: str) -> Iterator[None]:
        start = time.perf_counter()
        try:
            yield
        finally:
            self._wall_times[phase] = time.perf_counter() - start

    # ------------------------------------------------------------------
    # exports
    # ------------------------------------------------------------------

    def _export(self, item: Exportable, stem: str) -> None:
        for fmt in self._config.output.formats:
            self._files.append(export_field(item, self._out / f"{stem}{fmt.suffix}", fmt))

    def _export_history(self, history: List[GapRecord], stem: str = "gap_history") -> None:
        rows = np.array([[getattr(r, c) for c in GAP_COLUMNS] for r in history], dtype=float)
        self._files.append(export_table(GAP_COLUMNS, rows, self._out / f"{stem}.csv"))

    def _export_json(self, payload: str, name: str, rows: int = 1) -> None:
        path = self._out / name
        path.write_text(payload, encoding="utf-8")
        self._files.append(
            ExportedFile(path=str(path), format="json", size_bytes=path.stat().st_size, rows=rows)
        )

    def _export_bundle(self, bundle: SolutionBundle) -> None:
        self._export(bundle.phi, "phi")
        self._export(bundle.alpha, "alpha")
        self._export(bundle.m, "m")
        self._export(bundle.w, "w")
        self._export_history(bundle.gap_history)

    # ------------------------------------------------------------------
    # modes
    # ------------------------------------------------------------------

    def _solve(self, model: ModelSpec, grid: Grid, manifest: RunManifest) -> SolutionBundle:
        try:
            with self._timed("solve"):
                bundle = solve_time_dependent(model, grid, self._config.solver)
        except NonConvergence as exc:
            manifest.status = RunStatus.NON_CONVERGENCE
            bundle = exc.bundle
        manifest.convergence.append(bundle.summary())
        manifest.results["complementarity"] = bundle.complementarity
        return bundle

    def _run_solve(self, model: ModelSpec, grid: Grid, manifest: RunManifest) -> None:
        bundle = self._solve(model, grid, manifest)
        self._export_bundle(bundle)
        report = weak_solution_residuals(bundle, model, grid)
        self._export_json(report.model_dump_json(indent=2), "residuals.json")
        manifest.results["identity_gap"] = report.identity_gap
        manifest.results["continuity_residual"] = report.continuity_residual

    def _reference(self, model: ModelSpec, grid: Grid, manifest: RunManifest) -> ErgodicState:
        """Ergodic limit for the comparison modes; a non-converged solve contributes its best iterate."""
        try:
            with self._timed("ergodic_reference"):
                return ergodic_reference(model, grid, self._config.solver)
        except NonConvergence as exc:
            if exc.solution is None:
                raise
            self._logger.warning(f"Ergodic reference did not converge: {exc}")
            manifest.status = RunStatus.NON_CONVERGENCE
            manifest.convergence.append(exc.solution.summary())
            return exc.solution.state()

    def _run_ergodic(self, model: ModelSpec, grid: Grid, manifest: RunManifest) -> None:
        try:
            with self._timed("solve"):
                solution: ErgodicSolution = solve_ergodic(model, grid, self._config.solver)
        except NonConvergence as exc:
            manifest.status = RunStatus.NON_CONVERGENCE
            solution = exc.solution
        manifest.convergence.append(solution.summary())
        manifest.results["lambda"] = solution.lam
        try:
            oracle_lam, oracle_m = explicit_ergodic_oracle(model, grid)
        except WrongFamily:
            self._logger.info("Model outside the closed-form family, no oracle comparison")
        else:
            manifest.results["oracle_lambda"] = oracle_lam
            manifest.results["oracle_m_l1"] = float(np.sum(np.abs(solution.m - oracle_m))) * grid.cell_volume
        self._export(TorusField(grid, solution.phi), "phi_bar")
        self._export(TorusField(grid, solution.m), "m_bar")
        self._export(TorusField(grid, solution.w), "w_bar")
        self._export_history(solution.gap_history)

    def _run_longtime(self, model: ModelSpec, grid: Grid, manifest: RunManifest) -> None:
        block = self._config.longtime
        if block.h_t is not None:
            template = grid.with_time(max(1, int(round(1.0 / block.h_t))), 1.0)
        else:
            template = grid
        reference = self._reference(model, template, manifest)
        with self._timed("longtime"):
            report = long_time_experiment(
                model, template, block.horizons, self._config.solver, ergodic=reference, delta=block.delta
            )
        if not report.complete:
            manifest.status = RunStatus.NON_CONVERGENCE
        rows = np.column_stack(
            [
                report.horizons,
                report.n_t,
                report.mu_errors,
                report.psi_errors,
                report.mu_errors_l2,
                report.psi_errors_l2,
                report.energy_lhs,
                [float(flag) for flag in report.converged],
            ]
        )
        self._files.append(export_table(LONGTIME_COLUMNS, rows, self._out / "longtime.csv"))
        self._export_json(report.model_dump_json(indent=2), "longtime.json", rows=len(report.horizons))
        manifest.results.update(
            lambda_bar=report.lambda_bar,
            mu_slope=report.mu_slope,
            psi_slope=report.psi_slope,
            psi_sign=report.psi_sign,
        )

    def _load_bundle(self, grid: Grid, model: ModelSpec) -> SolutionBundle:
        directory = Path(self._config.verify.solution_dir or "")

        def read(stem: str) -> np.ndarray:
            for suffix in (".bin", ".csv"):
                candidate = directory / f"{stem}{suffix}"
                if candidate.exists():
                    return import_field(candidate).values
            raise FileNotFoundError(f"No export of {stem} in {directory}")

        phi, m, w = read("phi"), read("m"), read("w")
        alpha = hj_operator_arrays(phi, model, grid)
        return SolutionBundle(
            grid=grid,
            phi=ScalarField.nodes(grid, phi),
            alpha=ScalarField.cells(grid, alpha),
            m=ScalarField.cells(grid, m),
            w=VectorField(grid=grid, values=w),
            complementarity=complementarity(alpha, m, model, grid),
        )

    def _run_verify(self, model: ModelSpec, grid: Grid, manifest: RunManifest) -> None:
        block = self._config.verify
        if block.source is VerifySource.FILES:
            bundle = self._load_bundle(grid, model)
        elif block.source is VerifySource.STATIONARY:
            bundle = stationary_bundle(self._reference(model, grid, manifest), model, grid)
        else:
            bundle = self._solve(model, grid, manifest)
        with self._timed("verify"):
            report = weak_solution_residuals(bundle, model, grid)
        self._export_json(report.model_dump_json(indent=2), "residuals.json")
        limits = block.thresholds
        checks = {
            "hj_violation": report.hj_violation_support <= limits.hj_violation,
            "identity_gap": report.identity_gap <= limits.identity_gap * grid.horizon,
            "continuity_residual": report.continuity_residual <= limits.continuity_residual,
            "terminal_violation": report.terminal_violation <= limits.terminal_violation,
        }
        manifest.results.update({f"{name}_ok": ok for name, ok in checks.items()})
        manifest.results["worst_residual"] = report.worst()
        if not all(checks.values()) and manifest.status is RunStatus.SUCCESS:
            manifest.status = RunStatus.VERIFICATION_FAILED

    # ------------------------------------------------------------------

    def run(self) -> RunOutcome:
        config = self._config
        grid = config.build_grid()
        model = config.build_model(grid)
        report = check_assumptions(model, grid.d)
        manifest = RunManifest(
            mode=config.mode.value,
            config=config.model_dump(mode="json"),
            assumption_report=report,
            versions=collect_versions(),
        )
        self._out.mkdir(parents=True, exist_ok=True)
        self._logger.info(f"Running {config.mode.value} into {self._out}")

        handlers = {
            RunMode.SOLVE: self._run_solve,
            RunMode.ERGODIC: self._run_ergodic,
            RunMode.LONGTIME: self._run_longtime,
            RunMode.VERIFY: self._run_verify,
        }
        with self._timed("total"):
            handlers[config.mode](model, grid, manifest)

        manifest.wall_times = dict(self._wall_times)
        manifest.files = list(self._files)
        manifest_path = manifest.write(self._out / MANIFEST_NAME)
        write_summary(manifest, self._out / SUMMARY_NAME)
        if manifest.failed:
            self._logger.warning(f"Run finished with status {manifest.status.value}")
        exit_code = EXIT_NUMERICAL_FAILURE if manifest.failed else EXIT_OK
        return RunOutcome(exit_code=exit_code, manifest=manifest, manifest_path=manifest_path)
