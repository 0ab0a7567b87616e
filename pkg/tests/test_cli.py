import json
import os
import subprocess
import sys

import pytest

CLI = [sys.executable, "-m", "hodgelab.cli"]


def run_cli(*args, env_extra=None):
    env = dict(os.environ)
    env.pop("HODGELAB_SEED", None)
    if env_extra:
        env.update(env_extra)
    return subprocess.run(
        CLI + list(args), capture_output=True, text=True, env=env
    )


def test_help_exits_zero():
    for args in ([], ["mesh"], ["spectrum"], ["verify"], ["converge"]):
        proc = run_cli(*args, "--help")
        assert proc.returncode == 0
        assert "usage" in proc.stdout.lower()


def test_mesh_counts_and_off(tmp_path):
    out = tmp_path / "m.off"
    proc = run_cli("mesh", "--kind", "icosphere", "--level", "2",
                   "--radius", "1", "--out", str(out))
    assert proc.returncode == 0
    assert "V=162 E=480 F=320" in proc.stdout
    assert out.read_bytes().startswith(b"OFF\n162 320 0\n")


def test_mesh_missing_level_usage_error():
    proc = run_cli("mesh", "--kind", "icosphere")
    assert proc.returncode == 1


def test_mesh_level_guard():
    proc = run_cli("mesh", "--kind", "icosphere", "--level", "9")
    assert proc.returncode == 1
    assert "exceeds guard" in proc.stderr


def test_mesh_spheroid_requires_axes():
    proc = run_cli("mesh", "--kind", "spheroid", "--level", "1")
    assert proc.returncode == 1


def test_spectrum_csv(tmp_path):
    out = tmp_path / "spec.csv"
    proc = run_cli("spectrum", "--kind", "icosphere", "--level", "4",
                   "--form", "0", "--count", "9", "--out", str(out))
    assert proc.returncode == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "index,eigenvalue,residual,group"
    values = [float(line.split(",")[1]) for line in lines[1:]]
    targets = [0, 2, 2, 2, 6, 6, 6, 6, 6]
    assert len(values) == 9
    for got, want in zip(values, targets):
        assert abs(got - want) <= 0.01 * max(want, 1.0)
    groups = [int(line.split(",")[3]) for line in lines[1:]]
    assert groups == [0, 1, 1, 1, 2, 2, 2, 2, 2]


def test_spectrum_oneform_groups(tmp_path):
    out = tmp_path / "one.csv"
    proc = run_cli("spectrum", "--kind", "icosphere", "--level", "3",
                   "--form", "1", "--count", "16", "--out", str(out))
    assert proc.returncode == 0
    lines = out.read_text().strip().splitlines()[1:]
    groups = [int(line.split(",")[3]) for line in lines]
    assert groups.count(0) == 6
    assert groups.count(1) == 10


def test_spectrum_invalid_form():
    proc = run_cli("spectrum", "--kind", "icosphere", "--level", "1",
                   "--form", "3")
    assert proc.returncode == 1


def test_spectrum_seed_determinism(tmp_path):
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (out1, out2):
        proc = run_cli("spectrum", "--kind", "icosphere", "--level", "2",
                       "--form", "0", "--count", "6", "--out", str(out),
                       env_extra={"HODGELAB_SEED": "7"})
        assert proc.returncode == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_verify_level3_pass(tmp_path):
    report_path = tmp_path / "report.json"
    proc = run_cli("verify", "--level", "3", "--out", str(report_path))
    assert proc.returncode == 0, proc.stderr
    assert "overall: PASS" in proc.stdout
    assert "INCONSISTENT" in proc.stdout
    report = json.loads(report_path.read_text())
    assert report["pass"] is True
    assert set(report["spectra"]) == {"scalar", "oneform"}


def test_verify_config_file_and_override(tmp_path):
    cfg = {
        "surface": {"kind": "icosphere", "level": 2, "radius": 1.0},
        "eigenpairs": 16,
        "seed": 3,
    }
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    proc = run_cli("verify", "--config", str(path), "--level", "3",
                   "--out", str(tmp_path / "r.json"))
    assert proc.returncode == 0
    report = json.loads((tmp_path / "r.json").read_text())
    assert report["mesh"]["level"] == 3


def test_verify_malformed_config(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    proc = run_cli("verify", "--config", str(path))
    assert proc.returncode == 1


def test_verify_invalid_config_values(tmp_path):
    path = tmp_path / "bad2.json"
    path.write_text(json.dumps({"surface": {"kind": "torus", "level": 1}}))
    proc = run_cli("verify", "--config", str(path))
    assert proc.returncode == 1


def test_converge_monotone(tmp_path):
    out = tmp_path / "conv.csv"
    proc = run_cli("converge", "--levels", "2,3,4", "--form", "0",
                   "--count", "9", "--target", "2.0", "--out", str(out))
    assert proc.returncode == 0, proc.stderr
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "level,target,lambda_hat,abs_error"
    errors = [float(line.split(",")[3]) for line in lines[1:]]
    assert errors[0] > errors[1] > errors[2]


def test_converge_reorders_levels(tmp_path):
    proc = run_cli("converge", "--levels", "3,2", "--form", "0",
                   "--count", "9", "--target", "2.0")
    assert proc.returncode == 0
    assert "reordered" in proc.stdout


def test_converge_single_level_usage_error():
    proc = run_cli("converge", "--levels", "3")
    assert proc.returncode == 1


def test_converge_bad_levels_usage_error():
    proc = run_cli("converge", "--levels", "a,b")
    assert proc.returncode == 1


def test_runconfig_roundtrip():
    from hodgelab.config import RunConfig, default_config

    cfg = default_config()
    back = RunConfig.from_json_dict(cfg.to_json_dict())
    assert back.surface == cfg.surface
    assert back.eigenpairs == cfg.eigenpairs
    assert back.tolerances == cfg.tolerances
    assert len(back.fields) == 11
    assert [f.name for f in back.fields] == [f.name for f in cfg.fields]
