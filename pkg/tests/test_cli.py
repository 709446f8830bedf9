import csv
import filecmp
import json
import math

import numpy as np
import pytest

from vibrospec.cli import main


def _read_csv(path):
    with open(path) as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[float(x) for x in row] for row in reader]
    return header, np.array(rows)


def test_spectrum_run_writes_csv_and_meta(tmp_path):
    out = tmp_path / "mono"
    code = main([
        "spectrum", "--output", str(out),
        "--set", "bath.gamma=50",
        "--set", "numerics.omega_points=401",
        "--set", "numerics.omega_min=-2", "--set", "numerics.omega_max=2",
        "--set", "numerics.e_max=8",
    ])
    assert code == 0
    header, rows = _read_csv(out.with_suffix(".csv"))
    assert header == ["omega", "F"]
    assert rows.shape == (401, 2)
    # deep in the overdamped regime the peak sits at the electronic transition
    peak = rows[rows[:, 1].argmax(), 0]
    assert abs(peak - 0.0) <= 0.01 + 1e-12

    meta = json.loads(out.with_name("mono.meta.json").read_text())
    assert meta["config"]["bath"]["gamma"] == 50.0
    assert meta["provenance"]["residual_max"] <= 1e-10
    assert meta["provenance"]["package"] == "vibrospec"


def test_decoupled_dimer_matches_two_lorentzian_mixture(tmp_path):
    out = tmp_path / "dimer"
    code = main([
        "spectrum", "--output", str(out),
        "--set", "model.n=2", "--set", "bath.g=0",
        "--set", "numerics.omega_points=1001",
        "--set", "numerics.omega_min=-2", "--set", "numerics.omega_max=2",
        "--set", "numerics.e_max=2",
    ])
    assert code == 0
    _, rows = _read_csv(out.with_suffix(".csv"))
    grid, f = rows[:, 0], rows[:, 1]
    eps = 0.01
    analytic = 2.0 * eps / (eps**2 + (grid - 1.0) ** 2)  # bright mode only
    assert np.abs(f - analytic).max() <= 1e-8 * f.max()


def test_malformed_key_names_the_key(tmp_path, capsys):
    cfg = tmp_path / "bad.toml"
    cfg.write_text("[bath]\ngama = 5.0\n")
    code = main(["spectrum", "--config", str(cfg)])
    assert code == 2
    assert "bath.gama" in capsys.readouterr().err


def test_sweep_requires_axis(tmp_path):
    assert main(["sweep", "--output", str(tmp_path / "x")]) == 2


def test_sweep_empty_values_is_a_config_error(tmp_path):
    code = main([
        "sweep", "--output", str(tmp_path / "x"),
        "--set", "sweep.axis='gamma'", "--set", "sweep.values=[]",
    ])
    assert code == 2


def test_spectrum_command_rejects_sweep_config(tmp_path):
    code = main([
        "spectrum", "--output", str(tmp_path / "x"),
        "--set", "sweep.axis='gamma'", "--set", "sweep.values=[1.0]",
    ])
    assert code == 2


def test_sweep_long_format_and_row_order(tmp_path):
    out = tmp_path / "sweep"
    code = main([
        "sweep", "--output", str(out),
        "--set", "model.n=1",
        "--set", "numerics.omega_points=51",
        "--set", "numerics.omega_min=-1", "--set", "numerics.omega_max=1",
        "--set", "numerics.e_max=6",
        "--set", "sweep.axis='gamma'", "--set", "sweep.values=[0.5, 5.0]",
    ])
    assert code == 0
    header, rows = _read_csv(out.with_suffix(".csv"))
    assert header == ["axis_value", "omega", "F"]
    assert rows.shape == (102, 3)
    assert np.all(rows[:51, 0] == 0.5) and np.all(rows[51:, 0] == 5.0)
    assert np.all(np.diff(rows[:51, 1]) > 0)


def test_meta_sidecar_reproduces_the_csv_bit_for_bit(tmp_path):
    first = tmp_path / "first"
    code = main([
        "spectrum", "--output", str(first),
        "--set", "model.n=2", "--set", "bath.gamma=0.5",
        "--set", "numerics.omega_points=101", "--set", "numerics.e_max=6",
    ])
    assert code == 0
    second = tmp_path / "second"
    code = main([
        "spectrum", "--config", str(first.with_name("first.meta.json")),
        "--output", str(second),
    ])
    assert code == 0
    assert filecmp.cmp(
        first.with_suffix(".csv"), second.with_suffix(".csv"), shallow=False
    )


def test_print_config_shows_defaults(capsys):
    code = main(["spectrum", "--print-config"])
    assert code == 0
    text = capsys.readouterr().out
    assert "[numerics]" in text
    assert "e_max = 12" in text
    assert "epsilon = 0.01" in text


def test_analytic_linear_trimer(capsys):
    code = main(["analytic", "linear", "3"])
    assert code == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0].split() == ["j", "omega", "f"]
    values = [line.split() for line in lines[1:]]
    freqs = [float(v[1]) for v in values]
    np.testing.assert_allclose(freqs, [math.sqrt(2), 0.0, -math.sqrt(2)], atol=1e-12)
    strengths = [float(v[2]) for v in values]
    assert strengths[1] == 0.0


def test_analytic_ring_reports_both_strength_conventions(tmp_path, capsys):
    out = tmp_path / "ring.csv"
    code = main(["analytic", "ring", "4", "--csv", str(out)])
    assert code == 0
    text = capsys.readouterr().out
    assert "f_closed_form" in text
    header, rows = _read_csv(out)
    assert header == ["j", "omega", "f_eigvec", "f_closed_form"]
    bright = rows[3]
    assert bright[1] == pytest.approx(2.0, abs=1e-12)   # omega
    assert bright[2] == pytest.approx(4.0, abs=1e-12)   # eigenvector strength N
    assert bright[3] == pytest.approx(9.0 / 4.0, abs=1e-12)


def test_analytic_zero_coupling(capsys):
    code = main(["analytic", "ring", "5", "--coupling", "0"])
    assert code == 0
    lines = capsys.readouterr().out.strip().splitlines()[1:]
    assert all(float(line.split()[1]) == 0.0 for line in lines)


def test_threads_flag_caps_workers(tmp_path):
    out = tmp_path / "capped"
    code = main([
        "spectrum", "--output", str(out), "--threads", "2",
        "--set", "numerics.workers=8",
        "--set", "numerics.omega_points=11", "--set", "numerics.e_max=2",
    ])
    assert code == 0
    meta = json.loads(out.with_name("capped.meta.json").read_text())
    assert meta["provenance"]["workers"] == 2
