import csv
import io
import json
import time

import numpy as np
import pytest

from mdlperf import cli
from mdlperf.harness import (
    ConfigError,
    ExperimentConfig,
    format_csv,
    load_config,
    merge_points,
    run_monte_carlo,
    run_prediction,
    wilson_interval,
)
from mdlperf.harness.montecarlo import BLOCK, fixed_signal, simulate_estimates
from mdlperf.harness.prediction import CSV_HEADER, fishler_table
from mdlperf.harness.validation import Check, ValidationReport
from mdlperf.pm import SolverError


def small(**kw):
    base = dict(L=6, n=40, doas_deg=[-10.0, 10.0], snr_start=-6.0, snr_stop=0.0, snr_step=2.0, trials=60, seed=7)
    base.update(kw)
    return ExperimentConfig(**base)


def test_snr_grid_inclusive():
    cfg = ExperimentConfig(snr_start=-5.0, snr_stop=1.0, snr_step=0.25)
    grid = cfg.snr_grid()
    assert grid.size == 25 and grid[0] == -5.0 and grid[-1] == 1.0


def test_load_config_nested_and_overrides(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"L": 8, "n": 64, "doas_deg": [0], "snr_db": {"start": -3, "stop": 3, "step": 1},
                                "model": "deterministic"}))
    cfg = load_config(path, trials=10, seed=None)
    assert (cfg.L, cfg.n, cfg.d, cfg.model, cfg.trials, cfg.seed) == (8, 64, 1, "deterministic", 10, 0)
    assert list(cfg.snr_grid()) == [-3, -2, -1, 0, 1, 2, 3]


@pytest.mark.parametrize("raw", [
    {"trials": 0},
    {"snr_step": 0},
    {"snr_start": 3, "snr_stop": 0},
    {"model": "bayesian"},
    {"workers": 0},
    {"seed": -1},
    {"L": 2, "doas_deg": [0, 10]},
    {"doas_deg": [5, 5]},
    {"bogus": 1},
])
def test_bad_configs(raw):
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict(raw)


def test_unreadable_config(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(bad)
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.json")


def test_wilson_interval():
    lo, hi = wilson_interval(30, 100)
    assert lo < 0.3 < hi
    assert wilson_interval(0, 50)[0] == pytest.approx(0.0, abs=1e-15)
    assert wilson_interval(50, 50)[1] == pytest.approx(1.0, abs=1e-15)
    # Closed-form Wilson bounds.
    z, p, n = 1.959963984540054, 0.3, 100
    centre = (p + z * z / (2 * n)) / (1 + z * z / n)
    half = z * np.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / (1 + z * z / n)
    assert (lo, hi) == pytest.approx((centre - half, centre + half), rel=1e-9)


def test_monte_carlo_reproducible_and_worker_independent():
    cfg = small(trials=BLOCK + 17)
    a = simulate_estimates(cfg, workers=1)
    b = simulate_estimates(cfg, workers=1)
    c = simulate_estimates(cfg, workers=3)
    assert np.array_equal(a, b) and np.array_equal(a, c)
    assert a.shape == (cfg.snr_grid().size, cfg.trials)


def test_single_trial_determinism():
    r1 = run_monte_carlo(small(trials=1))
    r2 = run_monte_carlo(small(trials=1), workers=2)
    assert [p.pm_empirical for p in r1] == [p.pm_empirical for p in r2]


def test_trial_stream_prefix_stability():
    # Trial t at an SNR point does not depend on the total trial count only through its index.
    a = simulate_estimates(small(trials=40, snr_start=0, snr_stop=0))
    b = simulate_estimates(small(trials=80, snr_start=0, snr_stop=0))
    assert np.array_equal(a[0], b[0, :40])


def test_seed_changes_results():
    a = simulate_estimates(small(trials=200, seed=1))
    b = simulate_estimates(small(trials=200, seed=2))
    assert not np.array_equal(a, b)


def test_deterministic_modes():
    cfg = small(model="deterministic", trials=100)
    unit = fixed_signal(cfg)
    assert unit.shape == (2, 40)
    np.testing.assert_allclose(unit @ unit.conj().T / 40, np.eye(2), atol=1e-12)
    redraw = small(model="deterministic", trials=100, redraw_deterministic_signal=True)
    assert fixed_signal(redraw) is None
    a, b = simulate_estimates(cfg), simulate_estimates(redraw)
    assert a.shape == b.shape and not np.array_equal(a, b)
    assert fixed_signal(small()) is None


def test_monte_carlo_curve_fields():
    pts = run_monte_carlo(small(trials=200))
    for p in pts:
        assert p.trials == 200
        assert p.ci_low <= p.pm_empirical <= p.ci_high
        assert 0 <= p.over_rate <= 1 - p.pm_empirical + 1e-12
    assert pts[0].pm_empirical > pts[-1].pm_empirical


def test_prediction_fast_and_bounded():
    cfg = ExperimentConfig(snr_start=-10, snr_stop=10, snr_step=0.05)
    t0 = time.perf_counter()
    pts = run_prediction(cfg)
    assert time.perf_counter() - t0 < 1.0
    p = np.array([q.pm_proposed for q in pts])
    assert np.all((0 <= p) & (p <= 1)) and np.all(np.diff(p) <= 1e-15)
    assert pts[0].valid_flag == 0 and pts[-1].valid_flag == 1
    assert pts[-1].pm_proposed < 1e-6


def test_prediction_all_failures_raise(monkeypatch):
    import mdlperf.harness.prediction as pred

    def boom(*a, **k):
        raise SolverError("no root")

    monkeypatch.setattr(pred, "pm_predict", boom)
    with pytest.raises(SolverError):
        run_prediction(small())


def test_csv_format():
    cfg = small(trials=50)
    pts = merge_points(run_monte_carlo(cfg), run_prediction(cfg))
    text = format_csv(pts)
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == CSV_HEADER
    assert len(rows) == 1 + cfg.snr_grid().size
    assert all(len(r) == len(CSV_HEADER) for r in rows)
    assert float(rows[1][0]) == -6.0 and rows[1][-1] == "50"
    diag = list(csv.reader(io.StringIO(format_csv(pts, diagnostics=True))))
    assert diag[0] == CSV_HEADER + ["over_rate"]


def test_predict_only_csv_leaves_empirical_blank():
    rows = list(csv.reader(io.StringIO(format_csv(run_prediction(small())))))
    assert rows[1][1:4] == ["", "", ""] and rows[1][-1] == "0"


def test_fishler_table():
    rows = list(csv.reader(io.StringIO(fishler_table(small()))))
    assert rows[0] == ["snr_db", "lambda_d", "fishler_mu", "n_log_q", "penalty"]
    for r in rows[1:]:
        assert float(r[2]) == pytest.approx(float(r[3]) + float(r[4]), rel=1e-9, abs=1e-9)


ARGS = ["-L", "6", "-n", "40", "--doas", "-10", "10", "--snr", "-4", "0", "2", "--trials", "40", "--seed", "3"]


@pytest.mark.parametrize("command", ["predict", "simulate", "compare", "fishler-mu"])
def test_cli_commands(tmp_path, command):
    out = tmp_path / f"{command}.csv"
    assert cli.main([command, *ARGS, "--out", str(out)]) == cli.EXIT_OK
    rows = list(csv.reader(out.open()))
    assert len(rows) == 4


def test_cli_stdout(capsys):
    assert cli.main(["predict", *ARGS]) == 0
    assert capsys.readouterr().out.splitlines()[0] == ",".join(CSV_HEADER)


def test_cli_config_file(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"L": 6, "n": 40, "doas_deg": [0], "snr_start": 0, "snr_stop": 1, "snr_step": 1,
                               "trials": 20}))
    out = tmp_path / "o.csv"
    assert cli.main(["compare", "--config", str(cfg), "--workers", "2", "--out", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 3


@pytest.mark.parametrize("extra", [["--trials", "0"], ["--snr", "1", "0", "1"], ["--doas", "5", "5"]])
def test_cli_config_errors(extra):
    assert cli.main(["simulate", *ARGS, *extra]) == cli.EXIT_CONFIG


def test_cli_predict_needs_sources(tmp_path):
    cfg = tmp_path / "null.json"
    cfg.write_text(json.dumps({"L": 5, "n": 20, "doas_deg": []}))
    assert cli.main(["predict", "--config", str(cfg)]) == cli.EXIT_CONFIG
    assert cli.main(["simulate", "--config", str(cfg), "--trials", "5", "--snr", "0", "0", "1",
                     "--out", str(tmp_path / "n.csv")]) == cli.EXIT_OK
    assert cli.main(["predict", "--config", str(tmp_path / "missing.json")]) == cli.EXIT_CONFIG


def test_cli_solver_failure(monkeypatch):
    def boom(cfg):
        raise SolverError("diverged")

    monkeypatch.setattr(cli, "run_prediction", boom)
    assert cli.main(["predict", *ARGS]) == cli.EXIT_SOLVER


def test_cli_validation_failure(monkeypatch, tmp_path):
    report = ValidationReport(0, [Check("x", "o", 1.0, 0.0, 0.1, False, 1)])
    monkeypatch.setattr(cli, "validate_suite", lambda seed, scale: report)
    assert cli.main(["validate", "--out", str(tmp_path / "r.txt")]) == cli.EXIT_VALIDATION
    assert "[FAIL]" in (tmp_path / "r.txt").read_text()


@pytest.mark.slow
def test_cli_validate_small_scale(tmp_path):
    out = tmp_path / "report.txt"
    # Sample sizes this small are for plumbing only; the gates are exercised at full size elsewhere.
    code = cli.main(["validate", "--seed", "1", "--scale", "0.05", "--out", str(out)])
    data = json.loads(out.with_suffix(".json").read_text())
    assert code == (cli.EXIT_OK if data["passed"] else cli.EXIT_VALIDATION)
    assert data["seed"] == 1 and len(data["checks"]) == 19
    assert len(data["checks"]) == len(out.read_text().splitlines()) - 2
