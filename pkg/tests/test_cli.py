import json
import math

import numpy as np
import pytest

from rydbell.cli import main
from rydbell.config import load_config
from rydbell.errors import ConfigurationError

SMALL_CONFIG = """
[geometry]
y_scan_points = 4
y_scan_max_um = 18.0

[temperatures]
t_scan_points = 3
t_scan_max_uk = 24.0

[thermal_average]
n = 12

[blockade_demo]
t_max_us = 2.5
points = 30

[scans]
points = 9

[run]
seed = 42
"""


@pytest.fixture()
def small_config(tmp_path):
    cfg = tmp_path / "small.toml"
    cfg.write_text(SMALL_CONFIG)
    return cfg


def run_cli(*args) -> int:
    return main([str(a) for a in args])


def read_csv(path):
    from rydbell.cli import read_table

    header = [l for l in path.read_text().splitlines() if l.startswith("#")]
    return read_table(path), header


# --------------------------------------------------------------------------


def test_doppler_command(tmp_path, small_config):
    out = tmp_path / "out"
    assert run_cli("--config", small_config, "--out", out, "doppler") == 0
    doc = json.loads((out / "doppler.json").read_text())
    assert doc["analytic_factor"] == pytest.approx(0.78, abs=0.01)
    assert abs(doc["mc_factor"] - doc["analytic_factor"]) < 3 * doc["mc_stderr"]
    assert doc["metadata"]["seed"] == 42


def test_structure_command(tmp_path, small_config):
    out = tmp_path / "out"
    assert run_cli("--config", small_config, "--out", out, "structure") == 0
    rows, header = read_csv(out / "levels.csv")
    assert len(rows) > 20
    assert any("config_hash" in h for h in header)
    energies = np.asarray(rows["energy_J"], dtype=float)
    assert np.all(energies < 0)


def test_blockade_command_and_reproducibility(tmp_path, small_config):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert run_cli("--config", small_config, "--out", out1, "blockade") == 0
    assert run_cli("--config", small_config, "--out", out2, "blockade") == 0
    assert (out1 / "blockade.csv").read_text() == (out2 / "blockade.csv").read_text()
    rows, header = read_csv(out1 / "blockade.csv")
    assert list(rows.dtype.names) == ["y_m", "P85", "deltaE_over_h_Hz"]
    de = np.asarray(rows["deltaE_over_h_Hz"], dtype=float)
    assert de[0] > de[-1]
    assert any("basis_size" in h for h in header)


def test_blockade_jobs_identical(tmp_path, small_config):
    out1, out2 = tmp_path / "j1", tmp_path / "j2"
    assert run_cli("--config", small_config, "--out", out1, "--jobs", 1, "blockade") == 0
    assert run_cli("--config", small_config, "--out", out2, "--jobs", 3, "blockade") == 0
    r1, _ = read_csv(out1 / "blockade.csv")
    r2, _ = read_csv(out2 / "blockade.csv")
    assert np.array_equal(
        np.asarray(r1["P85"], dtype=float), np.asarray(r2["P85"], dtype=float)
    )


def test_thermal_command(tmp_path, small_config):
    out = tmp_path / "out"
    assert run_cli("--config", small_config, "--out", out, "thermal") == 0
    rows, _ = read_csv(out / "thermal.csv")
    b = np.asarray(rows["B_gauss"], dtype=float)
    p = np.asarray(rows["P85_mean"], dtype=float)
    t = np.asarray(rows["T_K"], dtype=float)
    for bval in (0.0, 3.0):
        sel = b == bval
        assert np.all(np.diff(p[sel][np.argsort(t[sel])]) >= -1e-12)
    # field dependence present
    p0 = p[b == 0.0]
    p3 = p[b == 3.0]
    assert np.max(np.abs(p0 - p3) / np.maximum(p3, 1e-12)) > 0.05


def test_cnot_command(tmp_path, small_config):
    out = tmp_path / "out"
    assert run_cli("--config", small_config, "--out", out, "cnot") == 0
    doc = json.loads((out / "cnot_fidelity.json").read_text())
    assert 0.8 < doc["f_cnot"] <= 1.0
    rows, _ = read_csv(out / "cnot_truth_table.csv")
    assert len(rows) == 4


def test_entangle_command(tmp_path, small_config):
    out = tmp_path / "out"
    assert run_cli("--config", small_config, "--out", out, "entangle") == 0
    doc = json.loads((out / "fidelity_report.json").read_text())
    report = doc["report"]
    assert report["entangled"] is True
    assert report["f_ent"] <= report["f_max_bound"] + 0.01
    rows, _ = read_csv(out / "entangle_parity.csv")
    assert abs(np.asarray(rows["parity"], dtype=float)).max() > 0.3


def test_blockade_demo_command(tmp_path, small_config):
    out = tmp_path / "out"
    assert run_cli("--config", small_config, "--out", out, "blockade-demo") == 0
    doc = json.loads((out / "blockade_demo_fit.json").read_text())
    assert doc["peak_to_peak_no_control"] == pytest.approx(0.864, abs=0.03)
    assert doc["peak_to_peak_with_control"] < 0.05


def test_blockade_single_point_grid(tmp_path):
    cfg = tmp_path / "single.toml"
    cfg.write_text("[geometry]\ny_scan_points = 1\ny_scan_max_um = 0.0\n")
    out = tmp_path / "out"
    assert run_cli("--config", cfg, "--out", out, "blockade") == 0
    rows, _ = read_csv(out / "blockade.csv")
    assert rows.shape == () or rows.size == 1  # exactly one data row


IDEAL_CONFIG = """
[error_model]
excitation_efficiency_87 = 1.0
excitation_efficiency_85 = 1.0
detection_efficiency = 1.0
rydberg_lifetime_us = 1e12
doppler_enabled = false
blockade = "inf"

[scans]
points = 17

[run]
seed = 1
"""


def test_entangle_ideal_pipeline_unit_fidelity(tmp_path):
    cfg = tmp_path / "ideal.toml"
    cfg.write_text(IDEAL_CONFIG)
    out = tmp_path / "out"
    assert run_cli("--config", cfg, "--out", out, "entangle") == 0
    doc = json.loads((out / "fidelity_report.json").read_text())
    assert doc["report"]["f_ent"] == pytest.approx(1.0, abs=1e-6)
    assert doc["report"]["coherence"] == pytest.approx(0.5, abs=1e-6)


def test_fit_command(tmp_path, capsys):
    rng = np.random.default_rng(9)
    t = np.linspace(0.0, 8e-6, 60)
    y = 0.5 + 0.49 * np.exp(-t / 28e-6) * np.cos(2 * math.pi * 0.625e6 * t)
    y = np.clip(y + rng.normal(0, 0.02, t.size), 0.0, 1.04)
    data = tmp_path / "rabi.csv"
    data.write_text(
        "t_s,p\n" + "\n".join(f"{a},{b}" for a, b in zip(t, y))
    )
    out = tmp_path / "out"
    assert run_cli("--out", out, "fit", "--file", data, "--model", "damped_sinusoid") == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["fit"]["converged"]
    assert doc["fit"]["params"]["frequency"] == pytest.approx(0.625e6, rel=0.02)
    assert (out / "fit_result.json").exists()


def test_json_format_output(tmp_path, small_config):
    out = tmp_path / "out"
    assert run_cli("--config", small_config, "--out", out, "--format", "json",
                   "blockade") == 0
    doc = json.loads((out / "blockade.json").read_text())
    assert doc["columns"] == ["y_m", "P85", "deltaE_over_h_Hz"]
    assert doc["metadata"]["basis_size"] == 261


# --------------------------------------------------------------------------
# Error handling
# --------------------------------------------------------------------------


def test_missing_config_exits_2(tmp_path, capsys):
    assert run_cli("--config", tmp_path / "nope.toml", "doppler") == 2
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "ConfigurationError"
    assert err["exit_code"] == 2


def test_invalid_config_value_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.toml"
    bad.write_text("[field]\nb_gauss = -3.0\n")
    assert run_cli("--config", bad, "--out", tmp_path / "o", "structure") == 2
    err = json.loads(capsys.readouterr().err)
    assert err["exit_code"] == 2


def test_invalid_toml_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.toml"
    bad.write_text("[geometry\nz_um = ")
    assert run_cli("--config", bad, "doppler") == 2
    capsys.readouterr()


def test_fit_missing_file_exits_2(tmp_path, capsys):
    assert run_cli("fit", "--file", tmp_path / "none.csv", "--model", "parity") == 2
    capsys.readouterr()


def test_config_defaults_load():
    cfg = load_config(None)
    assert cfg.z == pytest.approx(3.8e-6)
    assert cfg.omega_eff_85 / (2 * math.pi) == pytest.approx(0.6008e6, rel=1e-3)


def test_config_validation_direct():
    with pytest.raises(ConfigurationError):
        load_config(None, {"jobs": 0})
    with pytest.raises(ConfigurationError):
        load_config(None, {"channel_preset": "bogus"})
