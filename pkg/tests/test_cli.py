"""Command-line interface: exit codes, determinism, and output formats."""

import json
import math

import pytest

from cebound import two_level_pure, write_state_json
from cebound.cli import main
from cebound.twolevel import binary_entropy, phi


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture
def two_level_file(tmp_path):
    path = tmp_path / "rho_q.json"
    write_state_json(path, two_level_pure(0.25))
    return str(path)


@pytest.fixture
def flat_file(tmp_path):
    path = tmp_path / "flat.json"
    path.write_text(
        json.dumps(
            {
                "dim_p": 1,
                "dim_q": 1,
                "matrix": [[[0.6, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.4, 0.0]]],
            }
        )
    )
    return str(path)


# ------------------------------------------------------------------ verify

def test_verify_small_run_passes(capsys):
    code, out, _ = run(
        capsys, "verify", "--dims", "2..2", "--trials", "2", "--seed", "7"
    )
    assert code == 0
    summary = json.loads(out)
    assert summary["pass"] is True
    assert all(
        entry["worst_margin"] >= -1e-9
        for entry in summary["inequalities"].values()
    )


def test_verify_deterministic_output(capsys):
    flags = ("verify", "--dims", "2..2", "--trials", "2", "--seed", "7")
    _, out1, _ = run(capsys, *flags)
    _, out2, _ = run(capsys, *flags)
    assert out1 == out2


def test_verify_rejects_zero_trials(capsys):
    code, _, err = run(capsys, "verify", "--trials", "0")
    assert code == 2
    assert "trials" in err


def test_verify_rejects_negative_tolerance(capsys):
    code, _, err = run(capsys, "verify", "--trials", "1", "--tol", "-1")
    assert code == 2
    assert "tol" in err


def test_verify_writes_summary_file(capsys, tmp_path):
    out_path = tmp_path / "summary.json"
    code, out, _ = run(
        capsys,
        "verify", "--dims", "2..2", "--trials", "1", "--seed", "3",
        "--out", str(out_path),
    )
    assert code == 0
    assert json.loads(out_path.read_text()) == json.loads(out)


def test_unknown_flag_exits_two(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--bogus", "1"])
    assert exc.value.code == 2


def test_bad_dims_exits_two(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--dims", "four"])
    assert exc.value.code == 2


# ------------------------------------------------------------------ report

def test_report_two_level(capsys, two_level_file):
    code, out, _ = run(capsys, "report", two_level_file)
    assert code == 0
    report = json.loads(out)
    assert report["entropy"] == pytest.approx(binary_entropy(0.25), abs=1e-10)
    assert min(report["margins"].values()) >= -1e-9


def test_report_block_diagonal_zero_bounds(capsys, flat_file):
    code, out, _ = run(capsys, "report", flat_file)
    assert code == 0
    report = json.loads(out)
    assert report["entropy"] == pytest.approx(0.0, abs=1e-12)
    assert report["bkm_bound"] == 0.0
    assert report["pinsker_bound"] == 0.0


def test_report_non_psd_file_exits_two(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(
        json.dumps(
            {
                "dim_p": 1,
                "dim_q": 1,
                "matrix": [[[1.5, 0.0], [0.0, 0.0]], [[0.0, 0.0], [-0.5, 0.0]]],
            }
        )
    )
    code, _, err = run(capsys, "report", str(path))
    assert code == 2
    assert "positive" in err


def test_report_missing_file_exits_two(capsys):
    code, _, _ = run(capsys, "report", "/nonexistent/state.json")
    assert code == 2


# ------------------------------------------------------------------- orbit

def test_orbit_writes_csv(capsys, two_level_file, tmp_path):
    out_path = tmp_path / "orbit.csv"
    code, out, _ = run(
        capsys,
        "orbit", two_level_file,
        "--gamma", "1.0", "--t-max", "5.0", "--steps", "10",
        "--out", str(out_path),
    )
    assert code == 0
    lines = out_path.read_text().strip().splitlines()
    assert lines[0] == "t,entropy,rate,bkm_bound,log_bound,margin"
    assert len(lines) == 12
    entropies = [float(line.split(",")[1]) for line in lines[1:]]
    assert entropies == sorted(entropies, reverse=True)


def test_orbit_deterministic(capsys, two_level_file, tmp_path):
    args = (
        "orbit", two_level_file,
        "--gamma", "1.0", "--t-max", "2.0", "--steps", "4",
    )
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    run(capsys, *args, "--out", str(p1))
    run(capsys, *args, "--out", str(p2))
    assert p1.read_bytes() == p2.read_bytes()


# --------------------------------------------------------------- optimizer

def test_optimizer_command(capsys):
    code, out, _ = run(
        capsys,
        "optimizer", "--a0", "0.1", "--eps", "0.05", "--c", "0.02",
        "--dp", "2", "--dq", "1",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["a_star"] == pytest.approx(0.85, abs=1e-15)
    assert payload["value"] == pytest.approx(phi(0.85, 0.05, 0.02), abs=1e-14)
    matrix = payload["state"]["matrix"]
    assert len(matrix) == 3 and len(matrix[0]) == 3


def test_optimizer_infeasible_exits_two(capsys):
    code, _, err = run(
        capsys,
        "optimizer", "--a0", "0.5", "--eps", "0.05", "--c", "0.0",
        "--dp", "3", "--dq", "1",
    )
    assert code == 2
    assert "floor" in err


# ----------------------------------------------- separation and sharpness

def test_separation_command(capsys):
    code, out, _ = run(capsys, "separation", "--K", "4")
    assert code == 0
    payload = json.loads(out)
    assert payload["ratio"] >= 4.0
    assert 0.0 < payload["eps"] <= 1e-2


def test_sharpness_command(capsys):
    code, out, _ = run(capsys, "sharpness", "--q", "1e-2,1e-4,1e-6")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "q,entropy,bkm,ratio_bkm,ratio_log"
    ratios = [float(line.split(",")[3]) for line in lines[1:]]
    assert ratios == sorted(ratios, reverse=True)
    assert abs(ratios[-1] - 1.0) <= 0.1


def test_modulus_command(capsys):
    code, out, _ = run(
        capsys,
        "modulus", "--a-star", "0.9", "--tau", "0.5",
        "--eps", "1e-2,1e-4,1e-6",
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "eps_q,phi,phi_per_coherence"
    per = [float(line.split(",")[2]) for line in lines[1:]]
    assert per == sorted(per)
    # asymptotic normalization at the smallest eps
    eps_q = 1e-6
    val = float(lines[-1].split(",")[1])
    assert abs(val / (0.5 * eps_q * math.log(0.9 / eps_q)) - 1.0) <= 0.15
