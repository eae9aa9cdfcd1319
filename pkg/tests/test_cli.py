import json
import subprocess
import sys

import numpy as np
import pytest
from numpy.testing import assert_allclose

from isac_edge.cli import main, parse_grid
from isac_edge.pipeline import SWEEP_COLUMNS
from isac_edge.scenario import table1_path

TABLE1 = str(table1_path())


def test_parse_grid():
    assert parse_grid("0.1, 0.2") == [0.1, 0.2]
    assert parse_grid("") == []
    assert_allclose(parse_grid("logspace:1e-3:1:4"), [1e-3, 1e-2, 1e-1, 1.0])
    assert parse_grid("linspace:0:1:3") == [0.0, 0.5, 1.0]
    with pytest.raises(ValueError):
        parse_grid("geomspace:1:2:3")


def test_solve_writes_report(tmp_path):
    out = tmp_path / "r.json"
    assert main(["solve", TABLE1, "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert len(doc["isac"]["phases"]) == 2
    assert doc["regime"] == "SensingDominant"


def test_solve_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(["solve", TABLE1, "-o", str(a)])
    main(["solve", TABLE1, "-o", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_solve_exit_codes(tmp_path, capsys):
    doc = json.loads(table1_path().read_text())
    doc["tasks"][0]["eta_db"] = 80
    inf = tmp_path / "inf.json"
    inf.write_text(json.dumps(doc))
    assert main(["solve", str(inf)]) == 2
    assert "task 0" in capsys.readouterr().err
    bad = tmp_path / "bad.json"
    bad.write_text("{ not json")
    assert main(["solve", str(bad)]) == 1
    assert main(["solve", str(tmp_path / "missing.json")]) == 1
    doc["tasks"][0]["colour"] = "red"
    extra = tmp_path / "extra.json"
    extra.write_text(json.dumps(doc))
    assert main(["solve", str(extra)]) == 1
    assert main(["solve"]) == 1


def test_sweep_csv(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["sweep", TABLE1, "--param", "t_s", "--grid", "0.05", "-o", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == ",".join(SWEEP_COLUMNS)
    assert len(lines) == 2
    out2 = tmp_path / "s2.csv"
    main(["sweep", TABLE1, "--param", "target_error", "--mode", "equal_error",
          "--grid", "0.3,0.2", "-j", "2", "-o", str(out2)])
    assert len(out2.read_text().splitlines()) == 3
    assert main(["sweep", TABLE1, "--param", "alpha", "--grid", "1"]) == 1


def test_gain(capsys):
    assert main(["gain", "--x", "1"]) == 0
    assert json.loads(capsys.readouterr().out)["gain_analytic"] == 0.5
    assert main(["gain", TABLE1]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert_allclose(doc["gain_analytic"], 1 / (doc["x"] + 1), rtol=1e-15)


def test_fit(tmp_path, capsys):
    v = np.array([10, 100, 1000])
    p = tmp_path / "pts.csv"
    p.write_text("v,E\n" + "".join(f"{x},{float(2.0 / x)!r}\n" for x in v))
    assert main(["fit", str(p)]) == 0
    a, b = map(float, capsys.readouterr().out.split())
    assert_allclose((a, b), (2.0, 1.0), rtol=1e-9)
    rng = np.random.default_rng(11)
    vs = np.geomspace(50, 5000, 20)
    es = 2.5845 * vs ** -0.5317 * np.exp(0.02 * rng.standard_normal(vs.size))
    p.write_text("".join(f"{float(x)!r},{float(e)!r}\n" for x, e in zip(vs, es)))
    assert main(["fit", str(p)]) == 0
    a, b = map(float, capsys.readouterr().out.split())
    assert abs(a - 2.5845) < 0.2 and abs(b - 0.5317) < 0.02
    p.write_text("v,E\n10,0.5\n")
    assert main(["fit", str(p)]) == 1


def test_remark(capsys):
    assert main(["remark", "--sinr-db", "10", "--t-s", "0.1,0.2"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "sinr_db,t_s,tau_1,tau_2,mu_star"
    assert len(lines) == 3


def test_console_entry_and_log_env(tmp_path):
    env = {"ISAC_EDGE_LOG": "INFO", "PATH": "/usr/bin:/bin"}
    res = subprocess.run([sys.executable, "-m", "isac_edge.cli", "solve", TABLE1, "-o",
                          str(tmp_path / "r.json")], capture_output=True, text=True, env=env)
    assert res.returncode == 0
    assert "INFO" in res.stderr
