from __future__ import annotations

from pathlib import Path
from typing import TYPE_CHECKING

from .environment import report_environment

if TYPE_CHECKING:
    from src.runner.manifest import RunManifest

SUMMARY_TEMPLATE = "summary.md.j2"


def render_summary(manifest: "RunManifest") -> str:
    """Human-readable markdown digest of a run manifest."""
    template = report_environment.get_template(SUMMARY_TEMPLATE)
    return template.render(manifest=manifest, report=manifest.assumption_report)


def write_summary(manifest: "RunManifest", path: Path) -> Path:
    path.write_text(render_summary(manifest), encoding="utf-8")
    return path
