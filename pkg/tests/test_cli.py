"""Tests for the command-line driver."""

import json

import numpy as np
import pytest

from bistable_pwa.cli import (
    build_params,
    config_hash,
    load_config,
    main,
    parse_grid,
)


# ---------------------------------------------------------------------------
# config plumbing
# ---------------------------------------------------------------------------

def test_parse_grid_range():
    np.testing.assert_allclose(parse_grid("0.2..0.5:0.1"),
                               [0.2, 0.3, 0.4, 0.5])


def test_parse_grid_scalar():
    np.testing.assert_allclose(parse_grid("0.62"), [0.62])


@pytest.mark.parametrize("bad", ["0.5..0.2:0.1", "0.2..0.5:-0.1",
                                 "0.2..0.5", "a..b:c"])
def test_parse_grid_rejects(bad):
    with pytest.raises(ValueError):
        parse_grid(bad)


def test_load_config(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\n gamma = 30 \n\nomega = 0.4..1.0:0.1 # end\n")
    assert load_config(cfg) == {"gamma": "30", "omega": "0.4..1.0:0.1"}


def test_load_config_rejects_bare_token(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("gamma\n")
    with pytest.raises(ValueError):
        load_config(cfg)


def test_build_params_overrides():
    p = build_params({"gamma": "30", "omega": "ignored"})
    assert p.gamma == 30.0 and p.delta2 == 0.13


def test_config_hash_is_order_insensitive():
    a = config_hash({"x": 1, "y": "2"})
    b = config_hash({"y": "2", "x": 1})
    assert a == b
    assert a != config_hash({"x": 1, "y": "3"})


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def test_kernel_command(tmp_path):
    out = tmp_path / "k"
    assert main(["kernel", "--out", str(out)]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["max_abs_gap"] < 1e-2
    header = (out / "impulse.csv").read_text().splitlines()[0]
    assert header == "t,hbar,hbar_realized"


def test_era_command_exit_code_tracks_validation(tmp_path):
    # clean impulse data (from the kernel command) validates and exits 0
    kout, eout = tmp_path / "k", tmp_path / "e"
    assert main(["kernel", "--out", str(kout)]) == 0
    assert main(["era", "--out", str(eout),
                 "--impulse", str(kout / "impulse.csv")]) == 0
    report = json.loads((eout / "realization.json").read_text())
    assert report["passed"]
    assert len(report["eigenvalues"]) == 3


def test_era_command_default_reconstruction(tmp_path):
    # without an impulse file the input is regenerated from the damping
    # curve; the identification still validates
    out = tmp_path / "e2"
    assert main(["era", "--out", str(out)]) == 0
    report = json.loads((out / "realization.json").read_text())
    assert report["passed"]
    assert report["max_abs_error"] < 1e-2


def test_era_command_narrow_window_fails_validation(tmp_path):
    # a Hankel window spanning only the initial transient is flagged
    out = tmp_path / "e3"
    assert main(["era", "--out", str(out), "--r", "30", "--s", "30"]) == 1
    report = json.loads((out / "realization.json").read_text())
    assert not report["passed"]


def test_branches_command(tmp_path):
    out = tmp_path / "b"
    assert main(["branches", "--out", str(out),
                 "--omega", "0.5..0.7:0.05", "--amp", "0.1"]) == 0
    lines = (out / "branches.csv").read_text().splitlines()
    assert lines[0] == "Omega,branch,a0,psi0,stable,P_avg,CWR"
    assert len(lines) > 1


def test_sweep_command_and_determinism(tmp_path):
    args = ["sweep", "--omega", "0.60..0.64:0.02", "--amp", "0.1"]
    out1, out2 = tmp_path / "s1", tmp_path / "s2"
    assert main(args + ["--out", str(out1)]) == 0
    assert main(args + ["--out", str(out2)]) == 0
    assert (out1 / "strobes.csv").read_bytes() == \
        (out2 / "strobes.csv").read_bytes()
    assert (out1 / "labels.csv").read_bytes() == \
        (out2 / "labels.csv").read_bytes()


def test_basins_command(tmp_path):
    out = tmp_path / "ba"
    assert main(["basins", "--out", str(out), "--omega", "1.5",
                 "--amp", "0.1", "--y-grid=-0.11..0.11:0.22",
                 "--ydot-grid", "0"]) == 0
    lines = (out / "basins.csv").read_text().splitlines()
    assert len(lines) == 3  # header + two Y0 rows
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["label_codes"]["3"] == "P1-intra"


def test_design_map_command(tmp_path):
    out = tmp_path / "d"
    assert main(["design-map", "--out", str(out),
                 "--amp", "0..0.1:0.02", "--omega", "0.4..1.2:0.05"]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    cr = manifest["critical_amplitudes"]
    assert set(cr) == {"cr1", "cr2", "cr3"}
    assert (out / "design_map.csv").exists()
    assert (out / "loci.csv").exists()
    assert (out / "design_map.gp").exists()


def test_power_map_command(tmp_path):
    out = tmp_path / "p"
    assert main(["power-map", "--out", str(out), "--amp", "0..0.1:0.1",
                 "--omega", "0.6..0.7:0.1", "--n-periods", "120"]) == 0
    lines = (out / "power_map.csv").read_text().splitlines()
    assert len(lines) == 3
    assert (out / "power_map.gp").exists()


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("omega=0.5..0.7:0.1\namp=0.1\ngamma=30\n")
    out = tmp_path / "c"
    assert main(["branches", "--out", str(out), "--config", str(cfg),
                 "--gamma", "50"]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config"]["gamma"] == "50.0"  # flag beats file
    assert manifest["config"]["omega"] == "0.5..0.7:0.1"


# ---------------------------------------------------------------------------
# error handling
# ---------------------------------------------------------------------------

def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["kernel", "--no-such-flag"])
    assert exc.value.code == 2


def test_runtime_error_exit_code_and_log(tmp_path, capsys):
    out = tmp_path / "err"
    rc = main(["branches", "--out", str(out), "--omega", "bogus"])
    assert rc == 1
    assert "error:" in capsys.readouterr().err
    assert (out / "error.log").exists()
