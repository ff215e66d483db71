"""End-to-end smoke tests for the python module and the command-line tool."""

import json
import math
import os
import subprocess

import pytest

import lpdyn

GOLDEN_MEAN_LOG = 0.4812118250596035  # log((1 + sqrt 5)/2)


# ---------------------------------------------------------------------------
# python module


def test_version_strings():
    assert lpdyn.version() == lpdyn.__version__
    assert lpdyn.version().count(".") == 2


def test_exact_orbits():
    somos = lpdyn.iterate_rational("somos4", 13)
    assert somos == "1 1 1 1 2 3 7 23 59 314 1529 8209 83313".split()
    markoff = lpdyn.iterate_rational("markoff", 9)
    assert markoff == "1 1 1 2 5 29 433 37666 48928105".split()


def test_rational_params_and_fractions():
    orbit = lpdyn.iterate_rational(
        "x[n+2]*x[n] = x[n+1] + b", 6, init=["1", "1"], params={"b": "2/3"}
    )
    assert orbit[-1] == "37/35"


def test_init_validation():
    with pytest.raises(lpdyn.Error):
        lpdyn.iterate_rational("markoff", 5, init=["1", "1"])


def test_symbolic_lyness_cycle():
    rows, truncated = lpdyn.iterate_symbolic("lyness", 7)
    assert not truncated
    assert rows[5][1] == rows[0][1]  # x6 = x1
    assert rows[6][1] == rows[1][1]  # x7 = x2
    assert [terms for terms, _ in rows] == [1, 1, 2, 3, 2, 1, 1]


def test_symbolic_budget_truncates():
    rows, truncated = lpdyn.iterate_symbolic("somos4", 18, budget=200)
    assert truncated
    assert 4 < len(rows) < 18


def test_tropical_dvectors_fibonacci():
    dvecs = lpdyn.tropical_dvectors("rank2(3)", 8)
    assert dvecs[7] == [144, 55]  # alternate Fibonacci growth at r = 3


def test_closed_forms():
    assert math.isclose(lpdyn.closed_form("smyth"), 0.3230659473, abs_tol=1e-9)
    assert math.isclose(
        lpdyn.closed_form("rank2-entropy:3"), 2 * GOLDEN_MEAN_LOG, abs_tol=1e-12
    )
    assert len(lpdyn.closed_form_names()) == 7
    with pytest.raises(lpdyn.Error) as excinfo:
        lpdyn.closed_form("nope")
    assert "smyth" in str(excinfo.value)


def test_mahler_sequence_deterministic():
    rows1, trunc1 = lpdyn.mahler_sequence("rank2(2)", 20, samples=400, seed=9)
    rows2, trunc2 = lpdyn.mahler_sequence("rank2(2)", 20, samples=400, seed=9)
    assert rows1 == rows2
    assert not trunc1 and not trunc2
    # The initial variables are monomials: measure exactly zero.
    assert rows1[0][0] == 0.0 and rows1[1][0] == 0.0
    # Thread count must not change the estimates.
    rows4, _ = lpdyn.mahler_sequence("rank2(2)", 20, samples=400, seed=9, threads=4)
    assert rows1 == rows4


def test_mahler_reduced_markoff_slope():
    rows, _ = lpdyn.mahler_sequence("markoff", 40, samples=2000, seed=5, method="reduced")
    # log S_n grows linearly with slope log((1+sqrt 5)/2) once transients die.
    ratios = [
        math.log(rows[n + 1][0]) - math.log(rows[n][0])
        for n in range(25, 38)
        if rows[n][0] > 0 and rows[n + 1][0] > 0
    ]
    mean = sum(ratios) / len(ratios)
    assert math.isclose(mean, GOLDEN_MEAN_LOG, abs_tol=5e-3)


def test_entropy_report_dict():
    rep = lpdyn.entropy_report("rank2:3")
    assert rep["system"] == "rank2(3)"
    assert math.isclose(rep["exact_reference"], 2 * GOLDEN_MEAN_LOG, abs_tol=1e-12)
    for key in ("algebraic", "diophantine", "mahler"):
        assert math.isclose(
            rep[key]["slope"], 2 * GOLDEN_MEAN_LOG, abs_tol=1e-3
        ), key
    assert rep["ordering_ok"] is True
    assert rep["errors"] == {}


def test_cluster_periodicity():
    seed = lpdyn.initial_seed_json("a2")
    assert lpdyn.is_periodic(seed, [0, 1, 0, 1, 0])
    assert not lpdyn.is_periodic(seed, [0, 1, 0])
    mutated = lpdyn.apply_mutations(seed, [0])
    assert json.loads(mutated)["cluster"][0] != "x1"
    seeds, clusters, per_depth, truncated = lpdyn.explore(seed, 4)
    assert seeds == 5 and clusters == 5  # the A2 exchange graph is a pentagon
    assert not truncated


def test_error_is_catchable_everywhere():
    with pytest.raises(lpdyn.Error):
        lpdyn.system_text("no-such-system")
    with pytest.raises(lpdyn.Error):
        lpdyn.mahler_sequence("lyness", 5, method="reduced")


# ---------------------------------------------------------------------------
# command-line tool (path supplied by the test harness via LPDYN_CLI)


def cli():
    path = os.environ.get("LPDYN_CLI")
    if not path:
        pytest.skip("LPDYN_CLI not set")
    return path


def run_cli(*args, expect=0):
    proc = subprocess.run(
        [cli(), *args], capture_output=True, text=True, timeout=300
    )
    assert proc.returncode == expect, proc.stderr
    return proc


def test_cli_orbit_somos4():
    proc = run_cli("orbit", "--system", "somos4", "--mode", "rational",
                   "--init", "1,1,1,1", "--n", "13")
    assert proc.stdout.splitlines()[-1] == "13,83313"
    meta = json.loads(proc.stderr)
    assert meta["schema_version"] == "1" and meta["rows"] == 13


def test_cli_closed_form():
    proc = run_cli("closed-form", "smyth")
    assert proc.stdout.strip() == "0.323065947219"
    bad = run_cli("closed-form", "nope", expect=2)
    assert "rank2-entropy:r" in bad.stderr


def test_cli_mahler_deterministic(tmp_path):
    args = ("mahler", "--system", "rank2:2", "--samples", "500", "--n", "15",
            "--seed", "7")
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    run_cli(*args, "--out", str(out1))
    run_cli(*args, "--out", str(out2))
    assert out1.read_bytes() == out2.read_bytes()
    sidecar = json.loads((tmp_path / "a.csv.meta.json").read_text())
    assert sidecar["rng_seed"] == 7 and sidecar["samples"] == 500


def test_cli_entropy_json():
    proc = run_cli("entropy", "--system", "rank2:3")
    json_line = proc.stdout.splitlines()[-1]
    rep = json.loads(json_line)
    assert math.isclose(rep["exact_reference"], 2 * GOLDEN_MEAN_LOG, abs_tol=1e-12)


def test_cli_cluster_period():
    proc = run_cli("cluster", "--matrix", "a2", "--sequence", "1,2,1,2,1",
                   "--check-period")
    assert "periodic" in proc.stdout
    assert "not periodic" not in proc.stdout


def test_cli_truncation_exit_code(tmp_path):
    out = tmp_path / "t.csv"
    run_cli("orbit", "--system", "lyness", "--mode", "rational",
            "--init", "1,-1", "--n", "9", "--out", str(out), expect=3)
    rows = out.read_text().splitlines()
    assert rows[-1] == "4,-1"  # orbit dies at step 5; partial rows kept
    meta = json.loads((tmp_path / "t.csv.meta.json").read_text())
    assert meta["truncated"] is True
