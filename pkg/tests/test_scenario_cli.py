import csv
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from cfmatch.cli import main
from cfmatch.errors import ParseError, ValidationError
from cfmatch.load_model import Regime, derive_params
from cfmatch.scattering import ZeroChoice
from cfmatch.scenario import build_signal_spec, parse_scenario, serialize_scenario

CRITICAL_SERIES = {"name": "crit", "load": {"kind": "series_lc", "l_henry": 125e-9, "c_farad": 200e-12},
                   "line": {"r0_ohm": 50}}
BENCH_SERIES = {"name": "bench_series", "load": {"kind": "series_lc", "l_henry": 333e-9, "c_farad": 2e-9},
                "line": {"r0_ohm": 50}, "zero_choice": "internal"}
REGION2 = {"name": "region2", "load": {"kind": "parallel_lc", "l_henry": 10e-9, "c_farad": 50e-12},
           "line": {"r0_ohm": 50}}


def write(tmp_path, data, name="sc.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return path


def test_parse_critical_series():
    sc = parse_scenario(json.dumps(CRITICAL_SERIES))
    assert derive_params(sc.load, sc.line).regime is Regime.CRITICAL
    assert sc.zero_choice is ZeroChoice.AUTO


def test_parse_bench_parallel():
    data = {"load": {"kind": "parallel_lc", "l_henry": 333e-9, "c_farad": 2e-9}, "line": {"r0_ohm": 50}}
    sc = parse_scenario(json.dumps(data))
    assert sc.load.inductance == 333e-9 and sc.load.capacitance == 2e-9


@pytest.mark.parametrize("data,path", [
    ({"load": {"kind": "single_inductor", "l_henry": 1e-9}, "line": {"r0_ohm": -50}}, "line.r0_ohm"),
    ({"load": {"kind": "series_lc", "l_henry": 1e-9}, "line": {"r0_ohm": 50}}, "load.c_farad"),
    ({"load": {"kind": "coil", "l_henry": 1e-9}, "line": {"r0_ohm": 50}}, "load.kind"),
    ({"load": {"kind": "single_inductor", "l_henry": 1e-9}, "line": {"r0_ohm": 50},
      "excitation": {"epsilon_start": 2}}, "excitation.epsilon_start"),
    ({"load": {"kind": "single_inductor", "l_henry": 1e-9}, "line": {"r0_ohm": 50}, "extra": 1}, ""),
])
def test_validation_error_paths(data, path):
    with pytest.raises(ValidationError) as info:
        parse_scenario(json.dumps(data))
    assert info.value.path == path


def test_malformed_json():
    with pytest.raises(ParseError):
        parse_scenario("{not json")


def test_override_excludes_zero_choice():
    data = dict(REGION2, zero_choice="auto", override_frequency={"omega_r": {"hz": 1e8}, "omega_i": {"hz": 0}})
    with pytest.raises(ValidationError):
        parse_scenario(json.dumps(data))


def test_override_hz_converted_to_rad_per_s():
    data = dict(REGION2, override_frequency={"omega_r": {"hz": 1e8}, "omega_i": {"rad_per_s": 0}})
    sc = parse_scenario(json.dumps(data))
    assert sc.override == complex(2 * math.pi * 1e8, 0.0)


@pytest.mark.parametrize("data", [CRITICAL_SERIES, BENCH_SERIES, REGION2])
def test_round_trip(data):
    sc = parse_scenario(json.dumps(data))
    assert parse_scenario(serialize_scenario(sc)) == sc


def test_matched_drive_starts_at_epsilon():
    spec = build_signal_spec(parse_scenario(json.dumps(REGION2)))
    assert spec.t_kickoff == pytest.approx(math.log(1e4) / spec.sigma, rel=1e-12)


def test_zeros_command(tmp_path, capsys):
    assert main(["zeros", "--scenario", str(write(tmp_path, BENCH_SERIES)), "--out", str(tmp_path)]) == 0
    out = json.loads(capsys.readouterr().out)
    imag = sorted(z["omega_i"] for z in out["zeros"])
    assert imag[1] == pytest.approx(-1.08e7, rel=0.01)
    assert imag[0] == pytest.approx(-1.39e8, rel=0.01)
    assert out["regime"] == "region1"
    assert out["selected"]["omega_i"] == pytest.approx(-1.08e7, rel=0.01)


def test_zeros_command_with_oracle(tmp_path, capsys):
    args = ["zeros", "--scenario", str(write(tmp_path, REGION2)), "--window=1e9,2e9,-5e8,0"]
    assert main(args) == 0
    oracle = json.loads(capsys.readouterr().out)["oracle"]
    assert oracle[0]["omega_r"] == pytest.approx(1.4e9, rel=0.01)


def test_verify_region2_passes(tmp_path):
    assert main(["verify", "--scenario", str(write(tmp_path, REGION2)), "--out", str(tmp_path)]) == 0
    verdict = json.loads((tmp_path / "region2_verdict.json").read_text())
    assert verdict["pass"] is True
    assert {"name", "measured", "threshold", "pass"} <= set(verdict["checks"][0])


def test_simulate_csv_and_determinism(tmp_path):
    scen = write(tmp_path, REGION2)
    assert main(["simulate", "--scenario", str(scen), "--out", str(tmp_path / "one")]) == 0
    assert main(["simulate", "--scenario", str(scen), "--out", str(tmp_path / "two")]) == 0
    first = (tmp_path / "one" / "region2_sim.csv").read_bytes()
    assert first == (tmp_path / "two" / "region2_sim.csv").read_bytes()
    assert first.splitlines()[0] == b"t,a,b,v,i,E,Pin"


def test_real_drive_reflects_everything(tmp_path):
    load = CRITICAL_SERIES["load"]
    wres = 1 / math.sqrt(load["l_henry"] * load["c_farad"])
    data = dict(CRITICAL_SERIES, override_frequency={"omega_r": {"rad_per_s": wres / 2},
                                                     "omega_i": {"rad_per_s": 0}})
    assert main(["simulate", "--scenario", str(write(tmp_path, data)), "--out", str(tmp_path)]) == 0
    with open(tmp_path / "crit_sim.csv") as fh:
        rows = np.array([[float(x) for x in r] for r in list(csv.reader(fh))[1:]])
    t, a, b = rows[:, 0], rows[:, 1], rows[:, 2]
    before = (t <= t[np.nonzero(a)[0][-1]]) & (t > t[np.nonzero(a)[0][-1]] - 10 * 2 * math.pi / (wres / 2))
    assert np.max(np.abs(b[before])) == pytest.approx(np.max(np.abs(a[before])), rel=0.01)


def test_plane_csv(tmp_path):
    assert main(["plane", "--scenario", str(write(tmp_path, REGION2)), "--out", str(tmp_path),
                 "--grid", "11x7"]) == 0
    lines = (tmp_path / "region2_plane.csv").read_text().splitlines()
    assert lines[0] == "omega_r,omega_i,gamma_db"
    assert len(lines) == 1 + 11 * 7


def test_export_afg(tmp_path):
    assert main(["export-afg", "--scenario", str(write(tmp_path, REGION2)), "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "region2_afg.csv").read_text().splitlines()
    assert lines[0].startswith("# peak_volts=")
    assert lines[1] == "t,v_normalized"
    values = np.array([[float(x) for x in ln.split(",")] for ln in lines[2:]])
    assert values[0, 0] == 0.0
    assert np.max(np.abs(values[:, 1])) == 1.0


def test_config_error_exit_code(tmp_path, capsys):
    bad = write(tmp_path, {"load": {"kind": "single_inductor", "l_henry": 1e-9}, "line": {"r0_ohm": -50}})
    assert main(["zeros", "--scenario", str(bad)]) == 1
    assert "line.r0_ohm" in capsys.readouterr().err


def test_failing_verify_exit_code(tmp_path):
    data = dict(REGION2, excitation={"epsilon_start": 0.5})
    assert main(["verify", "--scenario", str(write(tmp_path, data)), "--out", str(tmp_path)]) == 2


def test_scenario_directory(tmp_path):
    scen = tmp_path / "scen"
    scen.mkdir()
    write(scen, REGION2, "a.json")
    write(scen, CRITICAL_SERIES, "b.json")
    assert main(["verify", "--scenario", str(scen), "--out", str(tmp_path)]) == 0
    assert (tmp_path / "region2_verdict.json").exists() and (tmp_path / "crit_verdict.json").exists()


def test_out_directory_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("CFMATCH_OUT", str(tmp_path / "env"))
    assert main(["simulate", "--scenario", str(write(tmp_path, REGION2))]) == 0
    assert (tmp_path / "env" / "region2_sim.csv").exists()


def test_paper_report_is_deterministic(tmp_path):
    codes = [main(["paper", "--out", str(tmp_path / d)]) for d in ("x", "y")]
    first = (tmp_path / "x" / "paper_report.json").read_bytes()
    assert first == (tmp_path / "y" / "paper_report.json").read_bytes()
    report = json.loads(first)
    assert codes[0] == codes[1] == (0 if report["pass"] else 2)


def test_console_script_runs(tmp_path):
    res = subprocess.run([sys.executable, "-m", "cfmatch.cli", "zeros", "--scenario",
                          str(write(tmp_path, CRITICAL_SERIES))], capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["regime"] == "critical"
