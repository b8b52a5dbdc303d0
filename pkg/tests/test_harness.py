import json
import math

import numpy as np
import pytest

import wavelimit as wl
from wavelimit import cli, harness, profiles, riemann
from wavelimit.errors import ConfigError

SAMPLE_CONFIG = """\
# sample sweep configuration
model = navier_stokes
gamma = 1.6666666666666667
R = 1.0
A = 1.0
v_left = 1.0
u_left = -0.5
theta_left = 1.0
v_right = 1.2
u_right = 0.5
theta_right = 1.1
eps_list = 0.2, 0.15, 0.1
nu = 1.0
h = 0.5
alpha = 0.25
t_end = 0.6
snapshot_times = 0.6
dx_per_eps = 2.0
out_dir = out
"""


@pytest.fixture()
def config_file(tmp_path):
    path = tmp_path / "sweep.cfg"
    path.write_text(SAMPLE_CONFIG, encoding="utf-8")
    return path


# ---------------------------------------------------------------------------
# rate fit


def test_fit_rate_recovers_synthetic_law():
    eps = np.array([1e-2, 3e-3, 1e-3, 3e-4])
    errors = 3.0 * eps**0.2
    rate, constant, resid = harness.fit_rate(eps, errors)
    assert abs(rate - 0.2) < 1e-6
    assert abs(constant - 3.0) < 1e-6
    assert resid < 1e-12


def test_fit_rate_needs_two_points():
    with pytest.raises(ValueError):
        harness.fit_rate([1e-2], [0.1])


# ---------------------------------------------------------------------------
# config parsing


def test_parse_and_build_config(config_file):
    config = harness.load_config(config_file)
    assert config.model == "navier_stokes"
    assert config.eps_list == (0.2, 0.15, 0.1)
    assert config.left.u == -0.5
    assert config.dx_per_eps == 2.0
    assert config.snapshot_times == (0.6,)


def test_missing_config_file_names_path(tmp_path):
    missing = tmp_path / "nope.cfg"
    with pytest.raises(ConfigError, match="nope.cfg"):
        harness.load_config(missing)


@pytest.mark.parametrize("line,msg", [
    ("bogus_key = 1", "unknown config key"),
    ("gamma 1.4", "expected 'key = value'"),
    ("gamma = fast", "bad float"),
])
def test_malformed_config_lines(line, msg):
    base = "eps_list = 0.1\nv_left=1\nu_left=0\ntheta_left=1\nv_right=1\nu_right=0\ntheta_right=1\n"
    with pytest.raises(ConfigError, match=msg):
        harness.experiment_from_mapping(harness.parse_config_text(base + line + "\n"))


def test_duplicate_key_rejected():
    with pytest.raises(ConfigError, match="duplicate"):
        harness.parse_config_text("gamma = 1.4\ngamma = 1.5\n")


def test_eps_list_must_strictly_decrease(params):
    with pytest.raises(ConfigError, match="strictly decreasing"):
        harness.ExperimentConfig(
            model="navier_stokes", left=wl.ThermoState(1, 0, 1),
            right=wl.ThermoState(1, 0, 1), params=params, eps_list=(1e-2, 1e-2),
        )


def test_alpha_range_enforced(params):
    with pytest.raises(ConfigError, match="alpha"):
        harness.ExperimentConfig(
            model="navier_stokes", left=wl.ThermoState(1, 0, 1),
            right=wl.ThermoState(1, 0, 1), params=params, eps_list=(1e-2,), alpha=0.5,
        )


def test_kinetic_model_requires_kinetic_R(params):
    with pytest.raises(ConfigError, match="2/3"):
        harness.ExperimentConfig(
            model="kinetic", left=wl.ThermoState(1, 0, 1),
            right=wl.ThermoState(1, 0, 1), params=params, eps_list=(1e-2,),
        )


# ---------------------------------------------------------------------------
# report serialization


def test_report_json_round_trip_is_fixed_point():
    report = harness.ConvergenceReport(
        model="navier_stokes", h=0.5, alpha=0.25, eps=[1e-2, 1e-3],
        errors=[[{"t": 1.0, "sup_error": 0.3}], [{"t": 1.0, "sup_error": 0.2}]],
        status=["ok", "ok"], meta=[{"n": 100, "dx": 0.01}, {"n": 1000, "dx": 0.001}],
        fitted_rate=0.19, fitted_constant=0.71, fit_residual=1e-3, fit_note="ok",
        bound_checks=[{"t": 1.0, "eps": 1e-2, "sup_gap": 0.3, "envelope": 0.9,
                       "c": 0.3, "C": 1.0 / 3.0}],
    )
    text = report.dumps()
    again = harness.ConvergenceReport.from_dict(json.loads(text))
    assert again.dumps() == text
    assert all(e["sup_error"] >= 0 for eps_errs in again.errors for e in eps_errs)


def test_report_save_load(tmp_path):
    report = harness.ConvergenceReport(
        model="kinetic", h=0.5, alpha=0.25, eps=[1e-2], errors=[[]],
        status=["failed: boom"], meta=[{}], fitted_rate=None, fitted_constant=None,
        fit_residual=None, fit_note="fit requires >= 3 surviving points, have 0",
    )
    p = tmp_path / "report.json"
    report.save(p)
    assert harness.ConvergenceReport.load(p).dumps() == report.dumps()


# ---------------------------------------------------------------------------
# ansatz bound ledger


def test_bound_check_degenerate_pattern_vanishes(params):
    st = wl.ThermoState(1.0, 0.1, 1.0)
    config = harness.ExperimentConfig(
        model="navier_stokes", left=st, right=st, params=params, eps_list=(1e-2,),
    )
    rows = harness.check_ansatz_bound(config, 1e-2, (0.5, 1.0))
    for row in rows:
        # zero up to the one-ulp residue of summing three constant profiles
        assert row["sup_gap"] < 1e-15
        assert row["C"] < 1e-14


def test_bound_gap_shrinks_with_shift_scale(pattern, params):
    """With the smoothing width pinned tiny, the ansatz-vs-Riemann gap is
    carried by the time shift t0 = eps**(1/5); the two-eps ratio must
    follow t0/(t+t0)."""
    t = 1.0
    gaps = {}
    for eps in (1e-3, 1e-3 / 32.0):
        cfg = wl.build_profile_config(eps, pattern, params, sigma=1e-5)
        core = math.sqrt(eps * (1.0 + t)) * math.log(1.0 / eps)
        x = np.arange(pattern.fan1[0] * (t + cfg.t0) - 0.1,
                      pattern.fan3[1] * (t + cfg.t0) + 0.1, 1e-4)
        x = x[np.abs(x) > core]
        va, ua, ta = profiles.superpose_fields(t, x, cfg, params)
        vr, ur, tr = riemann.eval_riemann_fields(pattern, t, x, params)
        gaps[eps] = float(np.max(np.maximum(
            np.abs(va - vr), np.maximum(np.abs(ua - ur), np.abs(ta - tr)))))
    t0a, t0b = 1e-3 ** 0.2, (1e-3 / 32.0) ** 0.2
    predicted = (t0a / (t + t0a)) / (t0b / (t + t0b))
    ratio = gaps[1e-3] / gaps[1e-3 / 32.0]
    assert ratio == pytest.approx(predicted, rel=0.1)
    assert ratio > 1.4  # genuinely shrinking on the eps**(1/5) scale


def test_bound_ledger_row_regression(pattern, params):
    """Frozen from the first validated run of the sample pattern."""
    config = harness.ExperimentConfig(
        model="navier_stokes", left=pattern.left, right=pattern.right,
        params=params, eps_list=(1e-3,),
    )
    row = harness.check_ansatz_bound(config, 1e-3, (1.0,), pattern)[0]
    assert row["sup_gap"] == pytest.approx(0.2202, abs=2e-4)
    assert row["C"] == pytest.approx(0.4620, abs=5e-4)
    assert row["c"] > 0.0


# ---------------------------------------------------------------------------
# sweeps (small presets)


def degenerate_config(params):
    st = wl.ThermoState(1.0, 0.1, 1.0)
    return harness.ExperimentConfig(
        model="navier_stokes", left=st, right=st, params=params,
        eps_list=(0.2, 0.15, 0.1), h=0.5, alpha=0.25, t_end=0.6,
        snapshot_times=(0.6,), dx_per_eps=2.0,
    )


def test_sweep_degenerate_flags_noise_floor(params):
    report = harness.sweep(degenerate_config(params))
    assert report.fit_note == "below noise floor"
    assert report.fitted_rate is None
    for errs in report.errors:
        for e in errs:
            assert e["sup_error"] < 1e-12


def test_sweep_is_deterministic(tmp_path, params):
    config = harness.ExperimentConfig(
        model="navier_stokes", left=wl.ThermoState(1.0, -0.5, 1.0),
        right=wl.ThermoState(1.2, 0.5, 1.1), params=params,
        eps_list=(0.3, 0.2, 0.15), h=0.5, alpha=0.25, t_end=0.55,
        snapshot_times=(0.55,), dx_per_eps=2.0,
    )
    a = harness.sweep(config).dumps()
    b = harness.sweep(config).dumps()
    assert a == b


# ---------------------------------------------------------------------------
# CLI


def run_cli(argv):
    return cli.main(argv)


def test_cli_riemann_prints_pattern(config_file, capsys):
    assert run_cli(["riemann", "--config", str(config_file)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert set(out) == {"left", "star", "starstar", "right", "fan1", "fan3",
                        "contact_speed"}


def test_cli_missing_config_exits_1(tmp_path, capsys):
    rc = run_cli(["riemann", "--config", str(tmp_path / "absent.cfg")])
    assert rc == 1
    assert "absent.cfg" in capsys.readouterr().err


def test_cli_unknown_subcommand_exits_1(capsys):
    assert run_cli(["frobnicate", "--config", "x"]) == 1


def test_cli_unknown_flag_exits_1(config_file, capsys):
    assert run_cli(["riemann", "--config", str(config_file), "--frob"]) == 1


def test_cli_ansatz_outputs_are_deterministic(config_file, tmp_path, capsys):
    out1 = tmp_path / "a"
    out2 = tmp_path / "b"
    small = tmp_path / "small.cfg"
    small.write_text(SAMPLE_CONFIG.replace("eps_list = 0.2, 0.15, 0.1",
                                           "eps_list = 0.2"), encoding="utf-8")
    assert run_cli(["ansatz", "--config", str(small), "--out", str(out1)]) == 0
    assert run_cli(["ansatz", "--config", str(small), "--out", str(out2)]) == 0
    files1 = sorted(p.name for p in out1.iterdir())
    files2 = sorted(p.name for p in out2.iterdir())
    assert files1 == files2 and files1
    for name in files1:
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
    header = (out1 / files1[0]).read_text().splitlines()[0]
    assert header == "t,x,v,u,theta"


def test_cli_residuals_schema(config_file, tmp_path, capsys):
    small = tmp_path / "small.cfg"
    small.write_text(SAMPLE_CONFIG.replace("eps_list = 0.2, 0.15, 0.1",
                                           "eps_list = 0.2"), encoding="utf-8")
    out = tmp_path / "resid"
    assert run_cli(["residuals", "--config", str(small), "--out", str(out)]) == 0
    files = sorted(out.iterdir())
    assert files
    lines = files[0].read_text().splitlines()
    assert lines[0] == "t,x,q1,q2"
    assert len(lines) > 10


def test_cli_ns_run_writes_snapshots(config_file, tmp_path, capsys):
    small = tmp_path / "small.cfg"
    small.write_text(
        SAMPLE_CONFIG
        .replace("eps_list = 0.2, 0.15, 0.1", "eps_list = 0.2")
        .replace("t_end = 0.6", "t_end = 0.1")
        .replace("snapshot_times = 0.6", "snapshot_times = 0.1"),
        encoding="utf-8",
    )
    out = tmp_path / "ns"
    assert run_cli(["ns-run", "--config", str(small), "--out", str(out)]) == 0
    files = sorted(p.name for p in out.iterdir())
    assert files == ["ns_eps0.2_t0.1.csv"]
    lines = (out / files[0]).read_text().splitlines()
    assert lines[0] == "t,x,v,u,theta"
    row = lines[1].split(",")
    assert float(row[0]) == 0.1


def test_cli_check_bound_writes_ledger(config_file, tmp_path, capsys):
    out = tmp_path / "bound"
    assert run_cli(["check-bound", "--config", str(config_file), "--out", str(out)]) == 0
    rows = json.loads((out / "bound_checks.json").read_text())
    assert len(rows) == 3  # one per eps at the single sample time
    assert {"t", "eps", "sup_gap", "envelope", "c", "C"} <= set(rows[0])


def test_csv_floats_round_trip(tmp_path):
    path = tmp_path / "prof.csv"
    x = np.array([0.1, 0.2])
    v = np.array([1.0 / 3.0, 2.0 / 7.0])
    harness.write_profile_csv(path, 0.5, x, v, v, v)
    lines = path.read_text().splitlines()
    got = np.array([float(line.split(",")[2]) for line in lines[1:]])
    assert np.array_equal(got, v)
