"""Missed-detection analysis of MDL source enumeration in uniform linear arrays.

The analytic predictor lives in :mod:`mdlperf.pm`, the eigenvalue laws it
relies on in :mod:`mdlperf.eigstats`, and the Monte Carlo machinery that
checks both in :mod:`mdlperf.harness`.
"""
from .enumerator import BACKEND, estimate_d, estimate_d_batch, mdl_criterion
from .pm import fishler_mu, pm_predict, pm_wang_baseline, solve_threshold_x, threshold_T
from .scenario import (
    DETERMINISTIC,
    STOCHASTIC,
    PopulationSpectrum,
    Scenario,
    make_scenario,
    population_covariance,
    population_spectrum,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "DETERMINISTIC", "STOCHASTIC", "PopulationSpectrum", "Scenario", "estimate_d",
    "estimate_d_batch", "fishler_mu", "make_scenario", "mdl_criterion", "pm_predict",
    "pm_wang_baseline", "population_covariance", "population_spectrum", "solve_threshold_x",
    "threshold_T",
]
