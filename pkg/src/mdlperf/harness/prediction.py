"""Analytic curves over the SNR grid and CSV output."""
from __future__ import annotations

import csv
import io
import logging
import math
from pathlib import Path

from ..pm import SolverError, fishler_mu, log_Q, pm_predict, pm_wang_baseline
from ..scenario import population_spectrum
from .config import ExperimentConfig
from .montecarlo import CurvePoint

log = logging.getLogger(__name__)

CSV_HEADER = ["snr_db", "pm_empirical", "ci_low", "ci_high", "pm_proposed", "pm_wang", "valid_flag", "trials"]


def run_prediction(cfg: ExperimentConfig) -> list[CurvePoint]:
    """Proposed and reference predictions for every SNR point.

    A solver failure at one point is logged and reported as ``p_m = 1``
    with ``valid_flag = 0``; :class:`SolverError` is re-raised only when
    every point fails.
    """
    points, failures = [], 0
    for snr in cfg.snr_grid():
        spec = population_spectrum(cfg.scenario(float(snr)))
        try:
            proposed = pm_predict(spec, cfg.n, cfg.d, snr_db=float(snr))
            wang = pm_wang_baseline(spec, cfg.n, cfg.d, snr_db=float(snr))
        except SolverError as exc:
            failures += 1
            log.error("prediction failed at %.2f dB: %s", snr, exc)
            points.append(CurvePoint(float(snr), pm_proposed=1.0, pm_wang=1.0, valid_flag=0))
            continue
        if not proposed.valid:
            log.info("predictor outside validity region at %.2f dB (%s)", snr, proposed.reason)
        points.append(CurvePoint(float(snr), pm_proposed=proposed.p_m, pm_wang=wang.p_m,
                                 valid_flag=int(proposed.valid)))
    if points and failures == len(points):
        raise SolverError("threshold solver failed at every grid point")
    return points


def merge_points(empirical: list[CurvePoint], analytic: list[CurvePoint]) -> list[CurvePoint]:
    merged = []
    for e, a in zip(empirical, analytic, strict=True):
        merged.append(CurvePoint(e.snr_db, e.pm_empirical, e.ci_low, e.ci_high, a.pm_proposed,
                                 a.pm_wang, a.valid_flag, e.trials, e.over_rate))
    return merged


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, int):
        return str(value)
    return format(float(value), ".10g")


def format_csv(points: list[CurvePoint], diagnostics: bool = False) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER + (["over_rate"] if diagnostics else []))
    for p in points:
        row = [p.snr_db, p.pm_empirical, p.ci_low, p.ci_high, p.pm_proposed, p.pm_wang, p.valid_flag, p.trials]
        if diagnostics:
            row.append(p.over_rate)
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def write_csv(points: list[CurvePoint], path: str | Path | None, diagnostics: bool = False) -> str:
    text = format_csv(points, diagnostics)
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def fishler_table(cfg: ExperimentConfig) -> str:
    """CSV of the bias-free Gaussian mean of ``Lambda(d-1) - Lambda(d)`` per SNR."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["snr_db", "lambda_d", "fishler_mu", "n_log_q", "penalty"])
    for snr in cfg.snr_grid():
        spec = population_spectrum(cfg.scenario(float(snr)))
        ld, s2 = spec.lambdas[cfg.d - 1], spec.sigma2
        penalty = 0.5 * (2 * cfg.d - 2 * cfg.L - 1)
        w.writerow([_fmt(float(snr)), _fmt(ld), _fmt(fishler_mu(ld, s2, cfg.L, cfg.d, cfg.n)),
                    _fmt(cfg.n * log_Q(ld / s2, cfg.d, cfg.L)), _fmt(penalty * math.log(cfg.n))])
    return buf.getvalue()
