"""Weak-solution residuals, energy inequality, ergodic oracle and long-time experiment."""

from .energy import energy_inequality_check
from .exceptions import GridMismatch, WrongFamily
from .longtime import ergodic_reference, long_time_experiment, rescale_to_unit_time
from .models import EnergyReport, LongTimeReport, ResidualReport
from .oracle import explicit_ergodic_oracle, normalised_density, stationary_bundle
from .residuals import support_mask, weak_solution_residuals

__all__ = [
    "EnergyReport",
    "GridMismatch",
    "LongTimeReport",
    "ResidualReport",
    "WrongFamily",
    "energy_inequality_check",
    "ergodic_reference",
    "explicit_ergodic_oracle",
    "long_time_experiment",
    "normalised_density",
    "rescale_to_unit_time",
    "stationary_bundle",
    "support_mask",
    "weak_solution_residuals",
]
