import hashlib
import json
import os

import numpy as np
import pytest

from tripod.cli import run


def write_config(tmp_path, name="c.json", **overrides):
    cfg = {"eps": 0.1, "omega_p": 2000.0, "alpha": 0.0, "delta": 0.0,
           "gamma": 0.0, "n_harmonics": 16, "n_q": 16, "n_x": 1024,
           "n_bands": 2}
    cfg.update(overrides)
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def read_csv(path):
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        rows = [line.strip().split(",") for line in fh]
    return header, rows


def manifest_of(out):
    with open(out + ".manifest.json") as fh:
        return json.load(fh)


def test_potentials_csv_and_manifest(tmp_path):
    cfg = write_config(tmp_path)
    out = str(tmp_path / "pot.csv")
    assert run(["potentials", "--config", cfg, "--out", out]) == 0
    header, rows = read_csv(out)
    assert header == ["x", "omega1", "omega2", "omega3", "theta", "phi",
                      "c1", "c2", "a_y", "v11", "v12", "v22", "v_exact",
                      "v_approx"]
    assert len(rows) == 1024
    man = manifest_of(out)
    with open(out, "rb") as fh:
        assert man["outputs"]["pot.csv"] == hashlib.sha256(fh.read()).hexdigest()
    assert man["params"]["omega_c"] == pytest.approx(20000.0)
    # no stray temp files left behind
    assert not [f for f in os.listdir(tmp_path) if f.startswith(".tmp-")]


def test_bands_dark_csv(tmp_path):
    cfg = write_config(tmp_path, n_harmonics=32)
    out = str(tmp_path / "bands.csv")
    assert run(["bands", "--config", cfg, "--method", "dark",
                "--out", out]) == 0
    header, rows = read_csv(out)
    assert header == ["q", "s", "E_re", "E_im",
                      "pop_D1", "pop_D2", "pop_B", "pop_0"]
    assert len(rows) == 16 * 2
    # dark solver: no bright/excited weight, zero linewidth
    assert all(float(r[3]) == 0.0 for r in rows)
    assert all(float(r[6]) == 0.0 and float(r[7]) == 0.0 for r in rows)


def test_bands_full_with_reorder(tmp_path):
    cfg = write_config(tmp_path, delta=500.0)
    out = str(tmp_path / "bandsf.csv")
    assert run(["bands", "--config", cfg, "--out", out, "--reorder"]) == 0
    _, rows = read_csv(out)
    assert len(rows) == 32


def test_float_formatting_round_trips(tmp_path):
    cfg = write_config(tmp_path)
    out = str(tmp_path / "pot.csv")
    run(["potentials", "--config", cfg, "--out", out])
    _, rows = read_csv(out)
    # 17 significant digits reproduce the double exactly
    val = rows[3][4]
    assert float(val) == float(("%.17g" % float(val)))


def test_determinism_byte_identical(tmp_path):
    cfg = write_config(tmp_path, n_harmonics=32)
    out1, out2 = str(tmp_path / "a.csv"), str(tmp_path / "b.csv")
    run(["bands", "--config", cfg, "--method", "dark", "--out", out1])
    run(["bands", "--config", cfg, "--method", "dark", "--out", out2])
    assert open(out1, "rb").read() == open(out2, "rb").read()


def test_invalid_eps_exit_code_2(tmp_path, capsys):
    cfg = write_config(tmp_path, eps=-1.0)
    assert run(["bands", "--config", cfg, "--out",
                str(tmp_path / "x.csv")]) == 2
    assert "eps" in capsys.readouterr().err


def test_unknown_config_key_exit_code_2(tmp_path):
    cfg = write_config(tmp_path, extra_knob=3)
    assert run(["bands", "--config", cfg, "--out",
                str(tmp_path / "x.csv")]) == 2


def test_missing_config_exit_code_2(tmp_path):
    assert run(["bands", "--config", str(tmp_path / "nope.json"),
                "--out", str(tmp_path / "x.csv")]) == 2


def test_unknown_flag_exit_code_2(tmp_path):
    cfg = write_config(tmp_path)
    assert run(["bands", "--config", cfg, "--out", str(tmp_path / "x.csv"),
                "--bogus"]) == 2


def test_numerical_failure_exit_code_3(tmp_path, capsys):
    # sharp barrier against a coarse cutoff trips the aliasing guard
    cfg = write_config(tmp_path, eps=0.02, n_harmonics=8)
    assert run(["bands", "--config", cfg, "--method", "dark",
                "--out", str(tmp_path / "x.csv")]) == 3
    assert "increase n_harmonics" in capsys.readouterr().err


def test_scatter_csv(tmp_path):
    cfg = write_config(tmp_path, alpha="45deg")
    out = str(tmp_path / "scat.csv")
    assert run(["scatter", "--config", cfg, "--out", out, "--qmax", "2",
                "--nq", "60"]) == 0
    header, rows = read_csv(out)
    assert header == ["Q", "E", "q", "branch", "lambda_mod"]
    assert rows
    qs = np.array([float(r[2]) for r in rows])
    assert np.all(np.abs(qs) <= 2 * np.pi + 1e-9)
    assert manifest_of(out)["gamma0"] == pytest.approx(1.2076, abs=1e-3)


def test_scatter_gamma0_approx_flag(tmp_path):
    cfg = write_config(tmp_path)
    out = str(tmp_path / "scat.csv")
    assert run(["scatter", "--config", cfg, "--out", out, "--qmax", "1.5",
                "--nq", "40", "--gamma0-approx", "--amplitudes",
                "formula"]) == 0
    assert manifest_of(out)["gamma0"] == pytest.approx(np.pi / 2)


def test_wannier_csv(tmp_path):
    cfg = write_config(tmp_path, delta=500.0, n_harmonics=16, n_q=16)
    out = str(tmp_path / "w.csv")
    assert run(["wannier", "--config", cfg, "--out", out, "--band", "1",
                "--center", "0", "--method", "auto"]) == 0
    header, rows = read_csv(out)
    assert header == ["x", "ReW_D1", "ImW_D1", "ReW_D2", "ImW_D2",
                      "ReW_B", "ImW_B", "ReW_0", "ImW_0"]
    man = manifest_of(out)
    assert man["method"] == "center"  # auto resolves odd band -> center
    dx = float(rows[1][0]) - float(rows[0][0])
    norm = sum(sum(float(r[k]) ** 2 for k in range(1, 9)) for r in rows) * dx
    assert norm == pytest.approx(1.0, abs=1e-6)


def test_tb_sweep_csv(tmp_path):
    cfg = write_config(tmp_path, n_harmonics=32)
    out = str(tmp_path / "tb.csv")
    assert run(["tb", "--config", cfg, "--band", "1", "--sweep", "alpha",
                "--from", "0", "--to", "45deg", "--steps", "3",
                "--vmax", "4", "--method", "dark", "--out", out]) == 0
    header, rows = read_csv(out)
    assert header == ["param", "s", "v", "J_re", "J_im", "residual"]
    assert len(rows) == 3 * 5
    params = sorted({float(r[0]) for r in rows})
    assert params == pytest.approx([0.0, np.pi / 8, np.pi / 4])


def test_compare_summary_json(tmp_path):
    cfg = write_config(tmp_path, n_harmonics=32, n_q=16, n_bands=4)
    out = str(tmp_path / "cmp.json")
    assert run(["compare", "--config", cfg, "--out", out,
                "--bands", "2"]) == 0
    with open(out) as fh:
        report = json.load(fh)
    assert report["pass"]["full_vs_dark_band1"]
    assert "scatter_vs_dark_max" in report["bands"]["1"]
    assert report["time_reversal_max_asymmetry"] < 1e-9
