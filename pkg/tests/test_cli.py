import json
import shutil
import subprocess
from pathlib import Path

import pytest

from dispersia import cli
from dispersia.errors import ParseError, SchemaError

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def write(tmp_path, obj, name="cfg.json"):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return p


# --------------------------------------------------------------- parsing

def test_parse_lorentz1():
    cfg, m = cli.parse_config(CONFIGS / "lorentz1.json", "bands")
    for w in (0.5, 3.0, 7.0 + 1j):
        assert m.eps(w) == pytest.approx((w * w - 16) / (w * w - 1))
        assert m.mu(w) == pytest.approx((w * w - 25) / (w * w - 4))
    assert cfg.analysis == {"k_max": 10.0, "k_samples": 50}


def test_parse_missing_mu(tmp_path):
    with pytest.raises(SchemaError):
        cli.parse_config(write(tmp_path, {"eps": {"kind": "vacuum"}}))


def test_parse_unknown_key(tmp_path):
    with pytest.raises(SchemaError):
        cli.parse_config(write(tmp_path, {"eps": {"kind": "vacuum"}, "mu": {"kind": "vacuum"}, "grid": 3}))
    with pytest.raises(SchemaError):
        cli.parse_config(write(tmp_path, {"eps": {"kind": "vacuum"}, "mu": {"kind": "vacuum"},
                                          "fdtd": {"resolution": 3}}))


def test_parse_bad_json_reports_position(tmp_path):
    with pytest.raises(ParseError, match=r":2:"):
        cli.parse_config(write(tmp_path, '{"eps": {"kind": "vacuum"},\n  "mu": }'))


# ------------------------------------------------------------- exit codes

def test_check_passive_and_report(tmp_path):
    assert cli.main(["check", "--input", str(CONFIGS / "lorentz1.json"), "--out", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "report.json").read_text())
    assert rep["passive"] and rep["lossless"] and rep["admissible"]


def test_check_non_passive_exits_1(tmp_path, capsys):
    assert cli.main(["check", "--input", str(CONFIGS / "double_drude.json"), "--out", str(tmp_path)]) == 1
    assert "witness" in capsys.readouterr().err
    rep = json.loads((tmp_path / "report.json").read_text())
    assert not rep["passive"] and rep["witnesses"]["passive"] is not None


def test_config_errors_exit_2(tmp_path):
    bad = write(tmp_path, "{")
    assert cli.main(["check", "--input", str(bad), "--out", str(tmp_path)]) == 2
    assert cli.main(["check", "--input", str(tmp_path / "missing.json")]) == 2
    assert cli.main(["check"]) == 2
    assert cli.main(["approx", "--alpha", "1"]) == 2
    assert cli.main(["approx", "--alpha", "-1", "--omega", "1", "--out", str(tmp_path)]) == 2


def test_bands_outputs(tmp_path):
    assert cli.main(["bands", "--input", str(CONFIGS / "lorentz1.json"), "--out", str(tmp_path)]) == 0
    rows = (tmp_path / "bands.csv").read_text().splitlines()
    assert rows == ["band_id,lo,hi,direction", "0,0,1,forward", "1,2,4,backward", "2,5,inf,forward"]
    branches = (tmp_path / "branches.csv").read_text().splitlines()
    assert branches[0] == "k,branch_id,omega" and len(branches) == 1 + 3 * 50


def test_bands_double_drude_uses_equivalent_model(tmp_path, capsys):
    assert cli.main(["bands", "--input", str(CONFIGS / "double_drude.json"), "--out", str(tmp_path)]) == 0
    assert "equivalent passive" in capsys.readouterr().err
    assert (tmp_path / "bands.csv").exists()


def test_measure_output(tmp_path):
    assert cli.main(["measure", "--input", str(CONFIGS / "lorentz1.json"), "--out", str(tmp_path)]) == 0
    d = json.loads((tmp_path / "measure.json").read_text())
    assert d["nu_e"]["points"] == [[-1.0, 7.5], [1.0, 7.5]]
    assert cli.main(["measure", "--input", str(CONFIGS / "double_drude.json"), "--out", str(tmp_path)]) == 1


def test_approx_single_node(tmp_path):
    assert cli.main(["approx", "--alpha", "1", "--omega", "1", "--nq", "1", "--out", str(tmp_path)]) == 0
    form = json.loads((tmp_path / "lorentz_form.json").read_text())
    assert form["e_terms"] == [[1.0, 1.0]] and form["m_terms"] == [[1.0, 1.0]]
    assert len((tmp_path / "errors.csv").read_text().splitlines()) == 402


def test_simulate_small_grid(tmp_path):
    args = ["simulate", "--input", str(CONFIGS / "drude_dissipative.json"), "--grid", "24", "--t-end", "0.5"]
    assert cli.main(args + ["--out", str(tmp_path / "a")]) == 0
    energy = (tmp_path / "a" / "energy.csv").read_text().splitlines()
    assert energy[0] == "t,E_em,E_osc_e,E_osc_m,E_loc,E_tot"
    assert (tmp_path / "a" / "probe_0.csv").exists()
    # byte-identical reruns
    assert cli.main(args + ["--out", str(tmp_path / "b")]) == 0
    for name in ("energy.csv", "probe_0.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_simulate_snapshot_and_custom_initial(tmp_path):
    cfg = {"eps": {"kind": "vacuum"}, "mu": {"kind": "vacuum"},
           "fdtd": {"nx": 16, "ny": 16, "t_end": 0.1, "snapshot": True,
                    "initial": {"hz": {"amp": 2.0, "rate": 100.0, "cutoff": 0.2}}}}
    assert cli.main(["simulate", "--input", str(write(tmp_path, cfg)), "--out", str(tmp_path)]) == 0
    from dispersia import fdtd
    hz, n = fdtd.read_snapshot(tmp_path / "Hz.bin")
    assert hz.shape == (16, 16) and n == 3
    ex, _ = fdtd.read_snapshot(tmp_path / "Ex.bin")
    assert ex.shape == (16, 17)


def test_determinism_of_text_outputs(tmp_path):
    for sub in ("a", "b"):
        cli.main(["bands", "--input", str(CONFIGS / "lorentz1.json"), "--out", str(tmp_path / sub)])
        cli.main(["measure", "--input", str(CONFIGS / "lorentz1.json"), "--out", str(tmp_path / sub)])
    for name in ("bands.csv", "branches.csv", "measure.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


@pytest.mark.skipif(shutil.which("dispersia") is None, reason="console script not installed")
def test_console_script(tmp_path):
    proc = subprocess.run(["dispersia", "check", "--input", str(CONFIGS / "lorentz1.json"), "--out", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert (tmp_path / "report.json").exists()


def test_measure_tol_cross_check(tmp_path):
    args = ["measure", "--input", str(CONFIGS / "lorentz1.json"), "--out", str(tmp_path)]
    assert cli.main(args + ["--tol", "1e-4"]) == 0
    assert cli.main(args + ["--tol", "-1"]) == 2
