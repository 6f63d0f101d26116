"""Command line behavior: payloads, precedence, exit codes, determinism."""

import json
import subprocess
import sys

import numpy as np
import pytest

from startorus import SingularMetricError, basis_matrix
from startorus.cli import ContractViolation, main
from startorus.sine_basis import matrix_from_json


def run(capsys, *argv):
    try:
        code = main(list(argv))
    except SystemExit as exc:  # argparse usage errors leave through exit()
        code = exc.code if isinstance(exc.code, int) else 1
    out = capsys.readouterr()
    return code, out.out, out.err


# ---------------------------------------------------------------------------
# payloads

def test_star_single_modes(capsys):
    code, out, _ = run(
        capsys,
        "star", "--f", "[[1,0,1,0]]", "--g", "[[0,1,1,0]]",
        "--op", "star", "--hbar", repr(float(np.pi)),
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["op"] == "star"
    (mode,) = payload["result"]["modes"]
    assert mode[:2] == [1, 1]  # i E_(1,1) up to the cos(pi/2) dust
    assert abs(mode[2]) < 1e-15 and mode[3] == 1.0


def test_star_defaults_to_moyal(capsys):
    code, out, _ = run(capsys, "star", "--f", "[[1,0,1,0]]", "--g", "[[0,1,1,0]]")
    assert code == 0
    payload = json.loads(out)
    assert payload["op"] == "moyal"
    assert payload["hbar"] == 1.0
    mode = payload["result"]["modes"][0]
    assert mode[:2] == [1, 1]
    assert abs(mode[2] - 2.0 * np.sin(0.5)) < 1e-15


def test_star_poisson_and_missing_input(capsys):
    code, out, _ = run(capsys, "star", "--op", "poisson",
                       "--f", "[[1,0,1,0]]", "--g", "[[0,1,1,0]]")
    assert code == 0
    payload = json.loads(out)
    assert "hbar" not in payload
    code, _, err = run(capsys, "star", "--f", "[[1,0,1,0]]")
    assert code == 1
    assert "error" in err


def test_basis_report_payload(capsys):
    code, out, _ = run(capsys, "basis", "--n", "3")
    assert code == 0
    payload = json.loads(out)
    assert payload["n"] == 3
    assert payload["passed"] is True
    flags = [v for k, v in payload.items() if k.endswith("_ok")]
    assert len(flags) == 8 and all(flags)
    # keys arrive sorted and the text ends with one newline
    assert out == json.dumps(payload, sort_keys=True) + "\n"


def test_project_payload(capsys):
    code, out, _ = run(capsys, "project", "--n", "4", "--modes", "[[1,1,0.5,0]]")
    assert code == 0
    mat = matrix_from_json(out)
    assert np.max(np.abs(mat - 0.5 * basis_matrix(4, 1, 1))) < 1e-15


def test_solve_payload(capsys):
    code, out, _ = run(capsys, "solve", "--terms", "6", "--hbar", "0.3",
                       "--w", "0.2", "--z", "0.5")
    assert code == 0
    payload = json.loads(out)
    assert payload["terms"] == 6
    assert len(payload["order_norms"]) == 6
    assert payload["tail_estimate"] < 1e-2
    assert payload["field"]["modes"]


def test_verify_me_report(capsys):
    code, out, _ = run(capsys, "verify-me", "--hbar", "0.001", "--h", "0.1",
                       "--band-limit", "16", "--torus-n", "48")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "hbar,h,sup_residual,rms_residual,observed_order"
    assert len(lines) == 3
    order = float(lines[2].rsplit(",", 1)[1])
    assert 1.7 <= order <= 2.3


def test_verify_chiral_and_dump(capsys, tmp_path):
    dump = tmp_path / "per_point.csv"
    code, out, _ = run(capsys, "verify-chiral", "--n", "2", "--h", "0.125",
                       "--dump", str(dump))
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "n,h,sup_residual,rms_residual,observed_order"
    order = float(lines[2].rsplit(",", 1)[1])
    assert 1.7 <= order <= 2.3
    dumped = dump.read_text().splitlines()
    assert dumped[0].startswith("w,z,residual,m00_re,m00_im")
    assert len(dumped[0].split(",")) == 3 + 8
    assert len(dumped) == 1 + 15 * 15  # interior of 17x17 coarse nodes


def test_curvature_csv(capsys):
    code, out, _ = run(capsys, "curvature", "--points", "2", "--seed", "1")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "w,z,p,q,C1_re,C1_im,dotted_norm,structure_residual"
    assert len(lines) == 3
    for line in lines[1:]:
        cells = [float(tok) for tok in line.split(",")]
        assert cells[5] == 0.0  # estimates are real by construction
        assert cells[6] < 1e-4
        assert cells[7] < 1e-12


def test_converge_csv(capsys):
    code, out, _ = run(capsys, "converge", "--n-list", "2,4")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "n,d,fitted_exponent"
    assert len(lines) == 3
    d2 = float(lines[1].split(",")[1])
    d4 = float(lines[2].split(",")[1])
    assert d2 > d4 > 0.0


def test_bessel_check_payload(capsys):
    code, out, _ = run(capsys, "bessel-check")
    assert code == 0
    payload = json.loads(out)
    assert payload["second_dev"] <= 1e-12
    assert payload["standard_first_dev"] <= 1e-10
    assert payload["printed_first_dev"] > 0.5
    assert payload["first_identity_form"] == "standard"


# ---------------------------------------------------------------------------
# parameter resolution

def test_config_file_precedence(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("n = 5\n# comment line\n\n")
    code, out, _ = run(capsys, "basis", "--config", str(cfg))
    assert code == 0
    assert json.loads(out)["n"] == 5
    # an explicit flag wins over the file
    code, out, _ = run(capsys, "basis", "--config", str(cfg), "--n", "3")
    assert code == 0
    assert json.loads(out)["n"] == 3


def test_config_dashed_keys_and_malformed(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("zeta-max = 2.0\nterms = 12\n")
    code, out, _ = run(capsys, "bessel-check", "--config", str(cfg))
    assert code == 0
    payload = json.loads(out)
    assert payload["zeta_max"] == 2.0
    assert payload["terms"] == 12
    bad = tmp_path / "bad.cfg"
    bad.write_text("just a line without equals\n")
    code, _, err = run(capsys, "bessel-check", "--config", str(bad))
    assert code == 1
    assert "malformed" in err


def test_out_file_and_env_redirect(capsys, tmp_path, monkeypatch):
    target = tmp_path / "sub" / "report.json"
    code, out, _ = run(capsys, "basis", "--n", "2", "--out", str(target))
    assert code == 0
    assert out == ""
    direct = target.read_text()
    assert json.loads(direct)["n"] == 2

    monkeypatch.setenv("STARTORUS_OUT", str(tmp_path))
    code, _, _ = run(capsys, "basis", "--n", "2", "--out", "nested/env.json")
    assert code == 0
    assert (tmp_path / "nested" / "env.json").read_text() == direct


def test_negative_span_value_forms(capsys):
    for form in (["--grid-w", "-1:1"], ["--grid-w=-1:1"]):
        code, _, _ = run(capsys, "verify-chiral", "--n", "2", "--h", "0.25", *form)
        assert code == 0


# ---------------------------------------------------------------------------
# exit codes

def test_validation_errors_exit_one(capsys):
    cases = [
        ["basis", "--n", "1"],
        ["basis", "--n", "not-a-number"],
        ["project", "--n", "3"],  # missing --modes
        ["verify-chiral", "--n", "2", "--grid-w", "oops"],
        ["verify-chiral", "--n", "2", "--grid-w", "1:0.5"],
        ["verify-me", "--h", "0.07"],  # span not a multiple of h
        ["converge", "--n-list", "2,x"],
        ["bessel-check", "--terms", "3"],
        ["star", "--op", "junk", "--f", "[[1,0,1,0]]", "--g", "[[0,1,1,0]]"],
        ["no-such-command"],
    ]
    for argv in cases:
        code, _, _ = run(capsys, *argv)
        assert code == 1, argv


def test_contract_violation_exits_two(capsys, monkeypatch):
    import startorus.cli as cli

    monkeypatch.setattr(cli, "ORDER_BAND", (2.5, 3.0))
    code, _, err = run(capsys, "verify-chiral", "--n", "2", "--h", "0.25")
    assert code == 2
    assert "contract violation" in err


def test_singular_metric_exits_two(capsys, monkeypatch):
    import startorus.cli as cli

    def boom(*args, **kwargs):
        raise SingularMetricError("branch locus hit", location=(0, 0, 0, 0))

    monkeypatch.setattr(cli, "weyl_sample", boom)
    code, _, err = run(capsys, "curvature", "--points", "1")
    assert code == 2
    assert "contract violation" in err


# ---------------------------------------------------------------------------
# determinism and the installed entry point

def test_repeated_runs_are_byte_identical(capsys):
    outputs = []
    for _ in range(2):
        code, out, _ = run(capsys, "basis", "--n", "4")
        assert code == 0
        outputs.append(out)
    assert outputs[0] == outputs[1]
    outputs = []
    for _ in range(2):
        code, out, _ = run(capsys, "solve", "--terms", "8", "--hbar", "0.3")
        assert code == 0
        outputs.append(out)
    assert outputs[0] == outputs[1]


def test_console_script_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "startorus.cli", "basis", "--n", "2"],
        capture_output=True, text=True, timeout=120,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["passed"] is True
