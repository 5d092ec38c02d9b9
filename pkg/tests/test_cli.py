import csv
import json
import math

import numpy as np
import pytest

from alarmtaxis import cli, io

STEADY_CFG = """
[domain]
dim = 1
lx = 8
nx = 16
[params]
b1 = 1
b2 = 1
xi = 0.5
chi = 0.2
[initial]
kind = constant
value = 0.66666666666666663, 0.33333333333333331, 1.3333333333333333
[run]
t_end = 3
sample_every = 0.5
"""

PERTURBED_CFG = """
[domain]
dim = 1
lx = 20
nx = 32
[params]
b1 = 1
b2 = 1
xi = 0.3
chi = 0.1
[initial]
kind = perturbed-steady
epsilon = 0.2
modes = 3
[run]
t_end = 40
sample_every = 1
seed = 3
"""


def _write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_simulate_fixed_point(tmp_path, capsys):
    cfg = _write(tmp_path, "run.ini", STEADY_CFG)
    out = tmp_path / "out"
    assert cli.main(["simulate", "--config", str(cfg), "--out", str(out)]) == 0
    rows = _rows(out / "diagnostics.csv")
    assert len(rows) == 7
    assert all(float(r["F"]) <= 1e-12 for r in rows)
    bounds = json.loads((out / "bounds.json").read_text())
    assert bounds["status"] == "ok" and bounds["bounds"]["u_sup_K"]["status"] == "pass"
    stab = json.loads((out / "stability.json").read_text())
    assert stab["gs1"] and stab["gs2"]
    final = _rows(out / "final_u.csv")
    assert len(final) == 16 and set(final[0]) == {"x", "value"}


def test_simulate_bad_param(tmp_path, capsys):
    cfg = _write(tmp_path, "bad.ini", STEADY_CFG.replace("b2 = 1", "b2 = -1"))
    assert cli.main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 1
    assert "b2" in capsys.readouterr().err


def test_simulate_missing_file(tmp_path, capsys):
    assert cli.main(["simulate", "--config", str(tmp_path / "nope.ini")]) == 1


def test_simulate_numerical_failure(tmp_path, capsys):
    text = PERTURBED_CFG.replace("[run]", "[control]\ncfl_safety = 1\ndt_max = 10\nfixed_dt = 5\n[run]")
    cfg = _write(tmp_path, "cfl.ini", text)
    out = tmp_path / "o"
    assert cli.main(["simulate", "--config", str(cfg), "--out", str(out)]) == 2
    assert "numerical failure" in capsys.readouterr().err
    # partial outputs are still written and parse
    assert len(_rows(out / "diagnostics.csv")) >= 1
    assert json.loads((out / "bounds.json").read_text())["status"] == "failed"


def test_simulate_snapshots_and_seed(tmp_path, capsys):
    cfg = _write(tmp_path, "run.ini", PERTURBED_CFG.replace("t_end = 40", "t_end = 2\nsnapshots = true"))
    a, b = tmp_path / "a", tmp_path / "b"
    assert cli.main(["simulate", "--config", str(cfg), "--out", str(a), "--seed", "5"]) == 0
    assert cli.main(["simulate", "--config", str(cfg), "--out", str(b), "--seed", "6"]) == 0
    assert len(list((a / "snapshots").glob("*_u.csv"))) == 3
    assert (a / "diagnostics.csv").read_text() != (b / "diagnostics.csv").read_text()


def test_steady_json(capsys):
    assert cli.main(["steady", "--b1", "1", "--b2", "1"]) == 0
    data = json.loads(capsys.readouterr().out)
    co = next(s for s in data if s["label"] == "coexistence-foodchain")
    assert (co["u"], co["v"], co["w"]) == pytest.approx((2 / 3, 1 / 3, 4 / 3))
    assert set(co) >= {"label", "u", "v", "w", "positive", "residual"}


def test_steady_intraguild(capsys):
    assert cli.main(["steady", "--b1", "0.02", "--b2", "1", "--b3", "0.02", "--c3", "1"]) == 0
    data = {s["label"]: s for s in json.loads(capsys.readouterr().out)}
    for k in ("coexistence-intraguild-branch1", "coexistence-intraguild-branch2"):
        assert data[k]["residual"] <= 1e-10


def test_steady_missing_flag(capsys):
    with pytest.raises(SystemExit) as ei:
        cli.main(["steady", "--b1", "1"])
    assert ei.value.code == 1
    assert "usage" in capsys.readouterr().err


def test_steady_unsupported_regime(capsys):
    assert cli.main(["steady", "--b1", "1", "--b2", "1", "--b3", "0.5", "--c3", "0.5"]) == 1


def test_region(tmp_path, capsys):
    out = tmp_path / "region.csv"
    assert cli.main(["region", "--out", str(out)]) == 0
    rows = _rows(out)
    assert len(rows) == 40000

    def nearest(b1, b2):
        return min(rows, key=lambda r: (float(r["b1"]) - b1) ** 2 + (float(r["b2"]) - b2) ** 2)

    assert nearest(1, 1)["admissible"] == "true"
    r = nearest(3.5, 0.5)
    assert r["gs2"] == "false" and r["admissible"] == "false"


def test_rate_synthetic(tmp_path, capsys):
    t = np.arange(0, 21.0)
    path = tmp_path / "d.csv"
    io.atomic_write_text(path, io.csv_text(["t", "y"], [[float(a), float(3 * math.exp(-0.7 * a))] for a in t]))
    assert cli.main(["rate", "--csv", str(path), "--column", "y", "--window", "0", "20"]) == 0
    fit = json.loads(capsys.readouterr().out)
    assert fit["sigma"] == pytest.approx(0.7, abs=1e-10) and fit["r_squared"] > 1 - 1e-12


def test_rate_zero_value(tmp_path, capsys):
    path = tmp_path / "d.csv"
    io.atomic_write_text(path, io.csv_text(["t", "y"], [[float(a), 0.0 if a == 3 else 1.0] for a in range(10)]))
    assert cli.main(["rate", "--csv", str(path), "--column", "y", "--window", "0", "9"]) == 1
    assert "positive" in capsys.readouterr().err


def test_rate_unknown_column(tmp_path, capsys):
    path = tmp_path / "d.csv"
    io.atomic_write_text(path, io.csv_text(["t", "y"], [[1.0, 1.0]]))
    assert cli.main(["rate", "--csv", str(path), "--column", "z", "--window", "0", "9"]) == 1


def test_rate_on_real_run(tmp_path, capsys):
    cfg = _write(tmp_path, "run.ini", PERTURBED_CFG)
    out = tmp_path / "o"
    assert cli.main(["simulate", "--config", str(cfg), "--out", str(out)]) == 0
    capsys.readouterr()
    assert cli.main(["rate", "--csv", str(out / "diagnostics.csv"), "--column", "dev_Linf_u",
                     "--window", "5", "35"]) == 0
    fit = json.loads(capsys.readouterr().out)
    assert fit["sigma"] > 0 and fit["r_squared"] >= 0.99


def _sweep_files(tmp_path, extra_axis="", base=None):
    base = base or PERTURBED_CFG.replace("t_end = 40", "t_end = 4")
    _write(tmp_path, "base.ini", base)
    return _write(tmp_path, "sweep.ini",
                  "[sweep]\nbase = base.ini\n[axes]\nparams.xi = 0, 0.1\nparams.chi = 0, 0.1\n"
                  + extra_axis + "[fit]\ncolumn = dev_Linf_u\nwindow = 1, 4\n")


def test_sweep_2x2(tmp_path, capsys):
    sweep = _sweep_files(tmp_path)
    out = tmp_path / "s"
    assert cli.main(["sweep", "--config", str(sweep), "--out", str(out)]) == 0
    assert sorted(p.name for p in out.iterdir() if p.is_dir()) == [f"point_00{i}" for i in range(4)]
    rows = _rows(out / "summary.csv")
    assert len(rows) == 4 and all(r["status"] == "ok" for r in rows)
    assert {"point", "params.xi", "params.chi", "final_F", "sigma", "bounds_pass"} <= set(rows[0])
    assert json.loads((out / "summary.json").read_text())["failed"] == 0


def test_sweep_isolates_failures(tmp_path, capsys):
    # jump data makes an oversized fixed step overshoot into negative values
    base = PERTURBED_CFG.replace("t_end = 40", "t_end = 4").replace(
        "kind = perturbed-steady\nepsilon = 0.2\nmodes = 3",
        "kind = indicator\nbase = 0.1, 0.1, 0.1\namplitude = 1, 1, 1\nlo = 0.2\nhi = 0.5")
    sweep = _sweep_files(tmp_path, "control.fixed_dt = none, 5\n", base)
    out = tmp_path / "s"
    assert cli.main(["sweep", "--config", str(sweep), "--out", str(out), "--workers", "2"]) == 0
    rows = _rows(out / "summary.csv")
    assert len(rows) == 8
    failed = [r for r in rows if r["status"] == "failed"]
    assert len(failed) == 4 and all(r["control.fixed_dt"] == "5" for r in failed)
    assert json.loads((out / "summary.json").read_text())["failed"] == 4


def test_sweep_deterministic(tmp_path, capsys):
    sweep = _sweep_files(tmp_path)
    a, b = tmp_path / "a", tmp_path / "b"
    assert cli.main(["sweep", "--config", str(sweep), "--out", str(a), "--seed", "11"]) == 0
    assert cli.main(["sweep", "--config", str(sweep), "--out", str(b), "--seed", "11",
                     "--workers", "2"]) == 0
    assert (a / "summary.csv").read_bytes() == (b / "summary.csv").read_bytes()


def test_sweep_bad_axis(tmp_path, capsys):
    sweep = _sweep_files(tmp_path, "params.b2 = -1\n")
    assert cli.main(["sweep", "--config", str(sweep), "--out", str(tmp_path / "s")]) == 1
    assert "b2" in capsys.readouterr().err


def test_atomic_write_leaves_no_temp(tmp_path):
    io.atomic_write_text(tmp_path / "x.csv", "a,b\n1,2\n")
    assert [p.name for p in tmp_path.iterdir()] == ["x.csv"]


def test_sweep_bad_fit_column(tmp_path, capsys):
    sweep = _sweep_files(tmp_path)
    sweep.write_text(sweep.read_text().replace("column = dev_Linf_u", "column = nope"))
    assert cli.main(["sweep", "--config", str(sweep), "--out", str(tmp_path / "s")]) == 1
    assert "fit.column" in capsys.readouterr().err
