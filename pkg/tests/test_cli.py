import csv
import subprocess
import sys

import pytest

from qdecorr.cli import fmt, main, parse_grid


def run(*args, cwd=None, env=None):
    return subprocess.run(
        [sys.executable, "-m", "qdecorr.cli", *args],
        capture_output=True, text=True, cwd=cwd, env=env,
    )


def read(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_parse_grid():
    assert parse_grid("0:1:3") == [0.0, 0.5, 1.0]
    assert parse_grid("0.5:0.9:1") == [0.5]
    assert parse_grid("0.1,0.5") == [0.1, 0.5]


def test_fmt():
    assert fmt(-0.0) == "0"
    assert fmt(1 / 3) == "0.333333333333"
    assert fmt(1e-6) == "1e-06"


def test_surface_full_grid(tmp_path):
    out = tmp_path / "surf.csv"
    assert main(["surface", "--kappa", "0:1:21", "--lambda", "-1:1:21", "-o", str(out)]) == 0
    rows = read(out)
    assert len(rows) == 441
    assert list(rows[0]) == ["kappa", "lambda", "feasible", "eta_prime", "a", "b", "c", "residual"]
    invalid = [r for r in rows if r["feasible"] == "invalid_state"]
    for r in rows:
        k, l = float(r["kappa"]), float(r["lambda"])
        bad = min(1 + 2 * k + l, 1 - l, 1 - 2 * k + l) < -1e-10
        assert (r in invalid) == bad
    assert all(r["feasible"] == "true" for r in rows if r not in invalid)


def test_surface_is_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["surface", "--kappa", "0:1:6", "--lambda", "-1:1:6", "-o", str(a)]) == 0
    assert main(["surface", "--kappa", "0:1:6", "--lambda", "-1:1:6", "-o", str(b), "-j", "2"]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_surface_diagonal(tmp_path):
    out = tmp_path / "d.csv"
    assert main(["surface", "--kappa", "0.5", "--lambda", "0.25", "-o", str(out)]) == 0
    (row,) = read(out)
    assert float(row["eta_prime"]) == pytest.approx(0.5, abs=1e-9)
    assert (row["a"], row["b"], row["c"]) == ("1", "0", "0")


def test_surface_env_output_dir(tmp_path):
    env = {**__import__("os").environ, "QDECORR_OUTPUT_DIR": str(tmp_path)}
    res = run("surface", "--kappa", "0:1:2", "--lambda", "0:1:2", env=env)
    assert res.returncode == 0, res.stderr
    assert (tmp_path / "surface.csv").exists()


@pytest.mark.parametrize(
    "args",
    [
        ["surface", "--kappa", "0:1:0"],
        ["surface", "--kappa", "zero:1:3"],
        ["surface", "-o", "/nonexistent/dir/out.csv"],
        ["twinbeam", "--lambda", "1.0"],
        ["twinbeam", "--eps", "0"],
        ["verify", "--tol", "-1"],
        ["nonsense"],
    ],
)
def test_config_errors_exit_2(args, tmp_path):
    res = run(*args, cwd=tmp_path)
    assert res.returncode == 2
    assert not list(tmp_path.glob("*.csv"))


def test_twinbeam_half(tmp_path):
    out = tmp_path / "tb.csv"
    assert main(["twinbeam", "--lambda", "0.5", "--eps", "1e-6", "-o", str(out)]) == 0
    (row,) = read(out)
    assert list(row) == [
        "lambda", "eps", "d_out", "n_bar", "min_noise_trace", "offblock_residual", "n_bar_min"
    ]
    assert float(row["n_bar"]) == pytest.approx(1 + (4 / 3) * 1e-6 / 2, rel=1e-11)
    assert float(row["n_bar_min"]) == pytest.approx(1.0, abs=1e-9)
    assert float(row["min_noise_trace"]) == pytest.approx(16 / 3, abs=1e-9)
    assert float(row["offblock_residual"]) <= 1e-12


def test_twinbeam_vacuum_and_strong(tmp_path):
    out = tmp_path / "tb.csv"
    assert main(["twinbeam", "--lambda", "0,0.9", "--eps", "1e-6", "-o", str(out)]) == 0
    vac, strong = read(out)
    assert float(vac["n_bar"]) == 0 and float(vac["min_noise_trace"]) == 0
    assert float(strong["n_bar_min"]) == pytest.approx(9, abs=1e-6)


def test_verify_tight_cp_tolerance_may_fail():
    res = run("verify", "--tol-cp", "1e-17", "--cases", "10", "--grid-steps", "3")
    assert res.returncode == 1
    assert "FAIL  complete_positivity" in res.stdout


def test_verify_quick_is_reproducible():
    args = ("verify", "--seed", "7", "--cases", "50", "--grid-steps", "6")
    first, second = run(*args), run(*args)
    assert first.returncode == 0, first.stdout + first.stderr
    assert first.stdout == second.stdout
