import csv
import hashlib
import json
import os
import subprocess
import sys

import pytest

from h2scatter.cli import main
from h2scatter.config import load_config
from h2scatter.errors import ConfigurationError

CHEAP = ["--set", "engine.n_E=60", "--set", "engine.n_angle=8", "--set", "scan.n_phi=4"]


def run(*argv):
    return main(["run", *argv])


def rows(path):
    with open(path) as fh:
        return list(csv.reader(fh))


def test_bound_scenario(tmp_path):
    assert run("--scenario", "bound", "-o", str(tmp_path)) == 0
    table = rows(tmp_path / "bound_levels.csv")
    assert table[0] == ["nu", "E_hartree", "mean_R_bohr"]
    assert len(table) == 20
    assert float(table[1][1]) == pytest.approx(-0.0972885, abs=1e-6)


def test_fig1_outputs_and_manifest(tmp_path):
    assert run("--scenario", "fig1", "-o", str(tmp_path), *CHEAP) == 0
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["fig1a_phi_scan.csv", "fig1bc_spectra.csv", "manifest.json"]
    man = json.loads((tmp_path / "manifest.json").read_text())
    assert man["scenario"] == "fig1"
    assert {f["file"] for f in man["files"]} == {"fig1a_phi_scan.csv", "fig1bc_spectra.csv"}
    for f in man["files"]:
        assert hashlib.sha256((tmp_path / f["file"]).read_bytes()).hexdigest() == f["sha256"]
    scan = rows(tmp_path / "fig1a_phi_scan.csv")
    assert scan[0] == ["phi", "sigma", "sigma_single_1", "sigma_single_2"] and len(scan) == 5
    # twelve significant digits
    assert len(scan[2][1].replace(".", "").lstrip("0").split("e")[0]) <= 12


def test_reruns_are_byte_identical(tmp_path):
    assert run("--scenario", "fig1", "-o", str(tmp_path), *CHEAP) == 0
    first = {p.name: p.read_bytes() for p in tmp_path.iterdir()}
    assert run("--scenario", "fig1", "-o", str(tmp_path), *CHEAP) == 0
    second = {p.name: p.read_bytes() for p in tmp_path.iterdir()}
    assert first == second


def test_threads_do_not_change_results(tmp_path):
    assert run("--scenario", "fig1", "-o", str(tmp_path / "s"), *CHEAP) == 0
    assert run("--scenario", "fig1", "-o", str(tmp_path / "p"), "--threads", "4", *CHEAP) == 0
    for name in ("fig1a_phi_scan.csv", "fig1bc_spectra.csv"):
        assert (tmp_path / "s" / name).read_bytes() == (tmp_path / "p" / name).read_bytes()


def test_json_format(tmp_path):
    assert run("--scenario", "continuum", "-o", str(tmp_path), "--format", "json") == 0
    doc = json.loads((tmp_path / "continuum_phases.json").read_text())
    assert set(doc) == {"L", "E", "delta", "k"}
    assert len(doc["delta"]) == 12


def test_fig3c_smoke(tmp_path):
    assert run("--scenario", "fig3c", "-o", str(tmp_path), "--set", "sweep.smoke=true") == 0
    table = rows(tmp_path / "fig3c_sweep.csv")
    assert table[0] == ["dWc", "depth", "method", "parameter"]
    data = [(float(r[0]), float(r[1]), r[2]) for r in table[1:]]
    for method in ("shrink_dp", "offset_focus"):
        short, long_ = sorted((d for d in data if d[2] == method), key=lambda d: d[0])
        assert long_[1] < 0.05 * short[1]


def test_config_file_and_env(tmp_path, monkeypatch, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("# bound levels only\nscenario = bound\noutput.dir = %s\n" % (tmp_path / "o"))
    monkeypatch.setenv("SCATTER_CONFIG", str(cfg))
    assert main(["validate"]) == 0
    assert capsys.readouterr().out.strip() == "OK"
    assert main(["run"]) == 0
    assert (tmp_path / "o" / "bound_levels.csv").exists()


def test_validate_rejects_negative_width(capsys):
    assert main(["validate", "--scenario", "fig3b", "--set", "packet.dp=-0.01"]) == 1
    assert "packet.dp" in capsys.readouterr().err


def test_validate_rejects_unknown_key(capsys):
    assert main(["validate", "--set", "engine.bogus=1"]) == 1
    assert "engine.bogus" in capsys.readouterr().err


def test_validate_infeasible_partner(capsys):
    code = main(["validate", "--scenario", "fig1", "--set", "state.p1=0.01", "--set", "state.nu2=10"])
    assert code == 1
    assert "nu=10" in capsys.readouterr().err


def test_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert run("--scenario", "bound", "-o", str(blocker / "sub")) == 3


def test_convergence_failure_exit_code(tmp_path):
    # a partial-wave cap below the converged L forces a non-convergence exit
    code = run("--scenario", "thermal", "-o", str(tmp_path), "--set", "thermal.levels=1",
               "--set", "engine.L_max=1", "--set", "engine.L_cap=1", "--set", "thermal.temperatures=0",
               "--set", "engine.n_E=40", "--set", "engine.n_angle=8")
    assert code == 2
    assert (tmp_path / "manifest.json").exists()


def test_config_grammar(tmp_path):
    p = tmp_path / "x.cfg"
    p.write_text("sweep.targets = 1, 2.5 ,3\nscenario=fig3c  # trailing comment\n")
    cfg = load_config(p)
    assert cfg["sweep.targets"] == (1.0, 2.5, 3.0) and cfg.scenario == "fig3c"
    p.write_text("no equals sign\n")
    with pytest.raises(ConfigurationError):
        load_config(p)
    with pytest.raises(ConfigurationError):
        load_config(overrides=["engine.L_max=4"])
    cfg = load_config(overrides=["morse.D=0.11", "grid.dR=0.005"])
    assert cfg["potential.D"] == 0.11 and cfg["grid.dr"] == 0.005


def test_console_script(tmp_path):
    exe = os.path.join(os.path.dirname(sys.executable), "scatter")
    cmd = [exe] if os.path.exists(exe) else [sys.executable, "-m", "h2scatter.cli"]
    out = subprocess.run(cmd + ["validate", "--scenario", "bound"], capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.strip() == "OK"
