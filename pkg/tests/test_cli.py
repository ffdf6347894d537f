"""End-to-end checks of the command line interface via subprocess."""

import json
import subprocess
import sys

from gegsobolev.cli import build_parser, _combos

HEADER = "experiment,alpha,M,N,n,p,value,target,tolerance,pass"


def run_cli(*args):
    return subprocess.run(
        [sys.executable, "-m", "gegsobolev", *args],
        capture_output=True,
        text=True,
        timeout=600,
    )


def test_ortho_single_combo_passes():
    r = run_cli("ortho", "--alpha", "1", "--mass-m", "1", "--mass-n", "1")
    assert r.returncode == 0, r.stderr
    lines = r.stdout.strip().split("\n")
    assert lines[0] == HEADER
    assert len(lines) == 42  # header + one row per degree 0..40
    assert all(line.endswith(",true") for line in lines[1:])
    assert all(len(line.split(",")) == 10 for line in lines)


def test_ortho_corrupt_control_fails():
    r = run_cli(
        "ortho", "--alpha", "1", "--mass-m", "1", "--mass-n", "1",
        "--debug-corrupt-lambda",
    )
    assert r.returncode == 1
    lines = r.stdout.strip().split("\n")[1:]
    false_rows = [line for line in lines if line.endswith(",false")]
    assert len(false_rows) == 40  # every degree above 0 is mis-scaled
    assert lines[0].endswith(",true")  # degree 0 untouched


def test_output_is_byte_reproducible():
    args = ("asymptotics", "--alpha", "0", "--mass-m", "1", "--mass-n", "0",
            "--nmax", "64")
    r1 = run_cli(*args)
    r2 = run_cli(*args)
    assert r1.returncode == r2.returncode == 0
    assert r1.stdout == r2.stdout


def test_converge_json_document():
    r = run_cli(
        "converge", "exp", "--alpha", "1", "--mass-m", "1", "--mass-n", "1",
        "--nmax", "40", "--format", "json",
    )
    assert r.returncode == 0, r.stderr
    doc = json.loads(r.stdout)
    assert doc["all_pass"] is True
    cfg = doc["config"][0]
    assert cfg["alpha"] == 1.0 and cfg["n_max"] == 40
    assert cfg["quad_nodes"] == 4 * 40 + 64
    names = {row["experiment"] for row in doc["rows"]}
    assert "converge_exp_error_at_32" in names
    assert "converge_exp_monotone" in names
    gated = [row for row in doc["rows"] if row["target"] is not None]
    assert gated and all(row["pass"] for row in gated)


def test_norms_probe_rows_at_p_two():
    r = run_cli("norms", "--alpha", "0", "--mass-m", "1", "--mass-n", "0",
                "--p", "2")
    assert r.returncode == 0, r.stderr
    lines = r.stdout.strip().split("\n")[1:]
    kinds = {line.split(",")[0] for line in lines}
    assert "norms_probe_p2" in kinds
    assert "norms_weighted_sup_slope" in kinds
    assert "norms_kernel_sup_slope" in kinds  # value mass is positive
    p2 = [line for line in lines if line.startswith("norms_probe_p2,")]
    assert len(p2) == 8
    for line in p2:
        assert abs(float(line.split(",")[6]) - 1.0) <= 1e-8


def test_invalid_p_exits_with_config_error():
    r = run_cli("converge", "exp", "--alpha", "1", "--p", "0.5")
    assert r.returncode == 2
    assert "error:" in r.stderr


def test_unknown_function_rejected_by_parser():
    r = run_cli("converge", "sinc", "--alpha", "1")
    assert r.returncode == 2


def test_out_file_uses_lf_endings(tmp_path):
    path = tmp_path / "report.csv"
    r = run_cli("ortho", "--alpha", "0.5", "--mass-m", "0", "--mass-n", "1",
                "--out", str(path))
    assert r.returncode == 0
    data = path.read_bytes()
    assert b"\r\n" not in data
    assert data.decode("utf-8").splitlines()[0] == HEADER


def test_default_sweep_covers_sixteen_combos():
    args = build_parser().parse_args(["ortho"])
    combos = _combos(args)
    assert len(combos) == 16
    assert (0.0, 1.0, 1.0) in combos and (1.5, 0.0, 0.0) in combos


def test_partial_flags_pin_single_combo():
    args = build_parser().parse_args(["ortho", "--mass-m", "0"])
    assert _combos(args) == [(1.0, 0.0, 1.0)]
