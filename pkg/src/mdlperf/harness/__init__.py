"""Experiment orchestration: configs, Monte Carlo sweeps, predictions, validation."""
from .config import ConfigError, ExperimentConfig, load_config
from .montecarlo import CurvePoint, run_monte_carlo, wilson_interval
from .prediction import format_csv, merge_points, run_prediction, write_csv
from .validation import ValidationReport, validate_suite

__all__ = [
    "ConfigError", "CurvePoint", "ExperimentConfig", "ValidationReport", "format_csv", "load_config",
    "merge_points", "run_monte_carlo", "run_prediction", "validate_suite", "wilson_interval", "write_csv",
]
