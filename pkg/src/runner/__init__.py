"""Configuration, orchestration and export for command-line runs."""

from .config import RunConfig, RunMode, VerifySource, load_config, parse_config
from .exceptions import ExportFormatError, SchemaError
from .export import ExportedFile, ExportFormat, ImportedField, TorusField, export_field, import_field
from .manifest import RunManifest, RunStatus
from .runner import EXIT_CONFIG_ERROR, EXIT_NUMERICAL_FAILURE, EXIT_OK, ExperimentRunner, RunOutcome

__all__ = [
    "EXIT_CONFIG_ERROR",
    "EXIT_NUMERICAL_FAILURE",
    "EXIT_OK",
    "ExperimentRunner",
    "ExportFormat",
    "ExportFormatError",
    "ExportedFile",
    "ImportedField",
    "RunConfig",
    "RunManifest",
    "RunMode",
    "RunOutcome",
    "RunStatus",
    "SchemaError",
    "TorusField",
    "VerifySource",
    "export_field",
    "import_field",
    "load_config",
    "parse_config",
]
