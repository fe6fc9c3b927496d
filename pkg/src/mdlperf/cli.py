"""Command line entry point: ``mdlperf {predict,simulate,compare,validate,fishler-mu}``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .harness.config import ConfigError, load_config
from .harness.montecarlo import run_monte_carlo
from .harness.prediction import fishler_table, merge_points, run_prediction, write_csv
from .harness.validation import validate_suite
from .pm import SolverError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_VALIDATION = 4

log = logging.getLogger("mdlperf")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat JSON experiment config")
    p.add_argument("--seed", type=int, help="64-bit RNG seed")
    p.add_argument("--trials", type=int, help="Monte Carlo trials per SNR point")
    p.add_argument("--out", help="output file (stdout when omitted)")
    p.add_argument("--workers", type=int, help="worker processes")
    p.add_argument("--model", choices=["stochastic", "deterministic"])
    p.add_argument("--sensors", "-L", dest="L", type=int, help="number of sensors")
    p.add_argument("--snapshots", "-n", dest="n", type=int, help="number of snapshots")
    p.add_argument("--doas", type=float, nargs="+", help="source DOAs in degrees")
    p.add_argument("--snr", type=float, nargs=3, metavar=("START", "STOP", "STEP"), help="SNR grid in dB")
    p.add_argument("--redraw-signal", action="store_true", default=None,
                   help="redraw deterministic waveforms every trial")
    p.add_argument("--diagnostics", action="store_true", help="append the over-estimation rate column")
    p.add_argument("-v", "--verbose", action="count", default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mdlperf", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("predict", "analytic missed-detection curves"),
        ("simulate", "Monte Carlo missed-detection curves"),
        ("compare", "analytic and Monte Carlo curves in one CSV"),
        ("fishler-mu", "bias-free Gaussian mean of the MDL difference per SNR"),
    ):
        _common(sub.add_parser(name, help=help_))
    v = sub.add_parser("validate", help="formula-vs-Monte-Carlo validation report")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--out", help="text report path; JSON is written next to it")
    v.add_argument("--scale", type=float, default=1.0, help="sample-size multiplier")
    v.add_argument("-v", "--verbose", action="count", default=0)
    return parser


def _config(args):
    overrides = dict(seed=args.seed, trials=args.trials, workers=args.workers, model=args.model,
                     L=args.L, n=args.n, doas_deg=args.doas, out=args.out,
                     redraw_deterministic_signal=args.redraw_signal)
    if args.snr is not None:
        overrides.update(snr_start=args.snr[0], snr_stop=args.snr[1], snr_step=args.snr[2])
    return load_config(args.config, **overrides)


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _validate(args) -> int:
    report = validate_suite(args.seed, args.scale)
    text = report.to_text() + "\n"
    if args.out:
        out = Path(args.out)
        out.write_text(text, encoding="utf-8")
        out.with_suffix(".json").write_text(report.to_json() + "\n", encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK if report.passed else EXIT_VALIDATION


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "validate":
            return _validate(args)
        cfg = _config(args)
        if args.command in ("predict", "compare", "fishler-mu") and cfg.d < 1:
            raise ConfigError(f"{args.command} needs at least one source DOA")
        if args.command == "predict":
            points = run_prediction(cfg)
        elif args.command == "simulate":
            points = run_monte_carlo(cfg)
        elif args.command == "compare":
            points = merge_points(run_monte_carlo(cfg), run_prediction(cfg))
        else:
            _emit(fishler_table(cfg), cfg.out)
            return EXIT_OK
        _emit(write_csv(points, None, diagnostics=args.diagnostics), cfg.out)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    except SolverError as exc:
        log.error("solver failure: %s", exc)
        return EXIT_SOLVER
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
