"""Broken k-diamond partitions: exact series, the truncated exact formula,
asymptotics with explicit error envelopes, and inequality verification."""

from .bigseries import delta_table, eta_power_inverse_series
from .circle import exact_formula_eval
from .asymptotics import main_term, error_envelope, relative_error_bound
from .inequalities import logconcavity_certifier, threshold_certificate, turan2_exact

__version__ = "0.1.0"

__all__ = [
    "delta_table", "eta_power_inverse_series", "exact_formula_eval", "main_term",
    "error_envelope", "relative_error_bound", "logconcavity_certifier",
    "threshold_certificate", "turan2_exact",
]
