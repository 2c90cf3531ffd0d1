import json
import math
import subprocess
import sys

import numpy as np
import pytest

from mcmqubit.cli import SweepSpec, main, read_csv, sweep_row
from mcmqubit.families import FamilySpec


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write(tmp_path, doc, name="ens.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def test_families_listing(capsys):
    code, out, _ = run(capsys, "families", "--format", "json")
    assert code == 0
    names = {row["family"] for row in json.loads(out)}
    assert names == {"two_noisy", "geometric_uniform", "tetrahedron", "asymmetric_I", "asymmetric_II"}


def test_compute_tetrahedron(capsys):
    code, out, _ = run(capsys, "compute", "--family", "tetrahedron", "--p", "1", "--format", "json")
    rep = json.loads(out)
    assert code == 0
    assert [s["C"] for s in rep["states"]] == pytest.approx([0.5] * 4, abs=1e-12)
    assert rep["q_inc"] == pytest.approx(0.0, abs=1e-12) and rep["complete"]


def test_compute_geometric_uniform_in_degrees(capsys):
    code, out, _ = run(capsys, "compute", "--family", "geometric_uniform", "--n", "3", "--theta", "60", "--degrees",
                       "--format", "json")
    rep = json.loads(out)
    assert code == 0
    assert [s["C"] for s in rep["states"]] == pytest.approx([2 / 3] * 3, abs=1e-12)
    assert rep["q_inc"] == pytest.approx(0.5, abs=1e-9)
    assert "theta=1.047197551196597" in rep["label"]  # stored in radians


def test_compute_table_and_index(capsys):
    code, out, _ = run(capsys, "compute", "--family", "two_noisy", "--p", "0.8", "--theta", "1.0", "--index", "1")
    assert code == 0 and "q_inc" in out
    assert len([line for line in out.splitlines() if line.strip().startswith("1 ")]) == 1
    code, _, err = run(capsys, "compute", "--family", "two_noisy", "--index", "5")
    assert code == 2 and "out of range" in err


def test_compute_csv_to_file(capsys, tmp_path):
    out_path = tmp_path / "report.csv"
    code, out, _ = run(capsys, "compute", "--family", "tetrahedron", "--p", "0.5", "--format", "csv", "--out", str(out_path))
    assert code == 0 and out == ""
    rows = read_csv(out_path.read_text())
    assert [r["C"] for r in rows] == pytest.approx([0.375] * 4)


def test_invalid_priors_exit_2(capsys, tmp_path):
    path = write(tmp_path, {"states": [{"q": 0.5, "bloch": [0, 0, 1]}, {"q": 0.4, "bloch": [0, 0, -1]}]})
    code, out, err = run(capsys, "compute", "--ensemble", path)
    assert code == 2 and "priors sum" in err and out == ""


@pytest.mark.parametrize("argv", [
    ["compute", "--family", "two_noisy", "--p", "2"],
    ["compute", "--ensemble", "/nonexistent/file.json"],
    ["compute"],
    ["compute", "--family", "tetrahedron", "--random", "3"],
    ["sweep", "--family", "tetrahedron", "--param", "theta", "--start", "0", "--stop", "1"],
    ["sweep", "--family", "two_noisy", "--param", "theta", "--start", "0", "--stop", "1", "--steps", "1"],
    ["sweep", "--family", "two_noisy", "--param", "theta", "--start", "0", "--stop", "4"],
    ["sweep", "--family", "geometric_uniform", "--param", "n", "--start", "2", "--stop", "5", "--steps", "3"],
])
def test_bad_parameters_exit_2(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as info:
        main(["compute", "--family", "hexagon"])
    assert info.value.code == 2


def test_degenerate_ensemble_exit_3(capsys, tmp_path):
    path = write(tmp_path, {"states": [{"q": 0.5, "bloch": [0, 0, 0.5]}, {"q": 0.25, "bloch": [0, 0, 1]},
                                       {"q": 0.25, "bloch": [0, 0, 0]}]})
    code, out, err = run(capsys, "compute", "--ensemble", path, "--format", "json")
    rep = json.loads(out)
    assert code == 3 and "degenerate" in err
    assert rep["states"][0]["degenerate"] and rep["states"][0]["m_hat"] is None
    assert rep["states"][0]["C"] == 0.5
    assert not rep["states"][1]["degenerate"]


def test_verify_tetrahedron(capsys):
    code, out, _ = run(capsys, "verify", "--family", "tetrahedron", "--p", "0.3", "--format", "json")
    rep = json.loads(out)
    assert code == 0
    assert all(s["gap"] <= 1e-6 for s in rep["states"])
    assert all(abs(s["oracle"] - 0.325) <= 1e-6 for s in rep["states"])


def test_verify_skips_degenerate_index(capsys, tmp_path):
    path = write(tmp_path, {"states": [{"q": 0.5, "bloch": [0, 0, 0.5]}, {"q": 0.25, "bloch": [0, 0, 1]},
                                       {"q": 0.25, "bloch": [0, 0, 0]}]})
    code, out, _ = run(capsys, "verify", "--ensemble", path, "--format", "json")
    rep = json.loads(out)
    assert code == 0
    assert rep["states"][0]["verified"] == "skipped" and rep["states"][0]["gap"] is None
    assert rep["states"][1]["verified"] == "ok"


def test_verify_tolerance_beyond_grid_exit_4(capsys):
    code, _, err = run(capsys, "verify", "--family", "tetrahedron", "--p", "0.3", "--tolerance", "1e-12")
    assert code == 4
    assert "state 0" in err and "cannot certify" in err


def sweep_rows(capsys, *argv):
    code, out, _ = run(capsys, "sweep", *argv)
    return code, out, read_csv(out)


def test_sweep_two_noisy_pure(capsys):
    code, out, rows = sweep_rows(capsys, "--family", "two_noisy", "--p", "1", "--param", "theta",
                                 "--start", "0.1", "--stop", "1.5", "--steps", "15")
    assert code == 0 and len(rows) == 15
    for r in rows:
        th = r["theta"]
        assert r["C0"] == pytest.approx(0.5 * (1 + np.sin(th) / np.sin(th)), abs=1e-9)
        assert r["q_inc"] == pytest.approx(np.cos(th), abs=1e-9)
        assert r["usd_inconclusive"] == pytest.approx(r["q_inc"], abs=1e-9)
        assert r["helstrom_error"] == pytest.approx(0.5 * (1 - np.sin(th)), abs=1e-12)


def test_sweep_two_noisy_mixed_rowwise(capsys):
    code, _, rows = sweep_rows(capsys, "--family", "two_noisy", "--p", "0.6", "--param", "theta",
                               "--start", "0.1", "--stop", "3.0", "--steps", "12")
    assert code == 0
    for r in rows:
        c, s = np.cos(r["theta"]), np.sin(r["theta"])
        assert r["C1"] == pytest.approx(0.5 * (1 + 0.6 * s / np.sqrt(1 - 0.36 * c * c)), abs=1e-9)
        assert r["q_inc"] == pytest.approx(0.6 * abs(c), abs=1e-9)
        assert r["usd_inconclusive"] is None


def test_sweep_asymmetric_II_first_confidence_constant(capsys):
    code, _, rows = sweep_rows(capsys, "--family", "asymmetric_II", "--param", "theta", "--start", "0",
                               "--stop", "180", "--degrees", "--steps", "20")
    assert code == 0
    assert np.allclose([r["C0"] for r in rows], 0.5, atol=1e-12)
    assert rows[-1]["theta"] == pytest.approx(math.pi, abs=1e-15)


def test_sweep_geometric_uniform_n(capsys):
    code, out, rows = sweep_rows(capsys, "--family", "geometric_uniform", "--theta", str(math.pi / 2), "--param", "n",
                                 "--start", "2", "--stop", "8", "--steps", "7")
    assert code == 0
    header = out.splitlines()[0].split(",")
    assert header[-1] == "degenerate7"  # padded to the largest ensemble
    for r in rows:
        n = int(r["n"])
        assert [r[f"C{k}"] for k in range(n)] == pytest.approx([2 / n] * n, abs=1e-12)
        assert all(r[f"C{k}"] is None for k in range(n, 8))


def test_sweep_flags_degenerate_rows_and_continues(capsys):
    code, _, rows = sweep_rows(capsys, "--family", "geometric_uniform", "--n", "3", "--param", "theta",
                               "--start", "0", "--stop", "1", "--steps", "3")
    assert code == 3
    assert [r["status"] for r in rows] == ["degenerate", "ok", "ok"]


def test_sweep_round_trip_reproduces_rows(capsys):
    code, out, rows = sweep_rows(capsys, "--family", "asymmetric_I", "--param", "theta", "--start", "0.1",
                                 "--stop", "3.1", "--steps", "9")
    assert code == 0 and "\r" not in out and out.endswith("\n")
    for row in rows:
        spec = SweepSpec("theta", 0, 1, 2, family=FamilySpec("asymmetric_I"))
        fresh = sweep_row((spec, row["theta"]))
        for k, s in enumerate(fresh["states"]):
            assert abs(row[f"C{k}"] - s["C"]) <= 1e-12
            assert abs(row[f"t{k}"] - s["t"]) <= 1e-12
            assert abs(row[f"m{k}_x"] - s["m_hat"][0]) <= 1e-12
        assert abs(row["q_inc"] - fresh["q_inc"]) <= 1e-12


def test_sweep_json_matches_csv(capsys):
    argv = ["--family", "tetrahedron", "--param", "p", "--start", "0.1", "--stop", "1", "--steps", "4"]
    _, _, rows = sweep_rows(capsys, *argv)
    code, out, _ = run(capsys, "sweep", *argv, "--format", "json")
    doc = json.loads(out)
    assert code == 0
    for a, b in zip(rows, doc["rows"]):
        assert a["q_inc"] == b["q_inc"] and a["C3"] == b["C3"]
    assert doc["columns"][:4] == ["param", "value", "family", "p"]


def test_sweep_parallel_output_identical(capsys):
    argv = ["--family", "two_noisy", "--p", "0.7", "--param", "theta", "--start", "0.2", "--stop", "2.8", "--steps", "8"]
    _, serial, _ = sweep_rows(capsys, *argv)
    _, parallel, _ = sweep_rows(capsys, *argv, "--jobs", "3")
    assert serial == parallel


def test_sweep_ensemble_file_in_p(capsys, tmp_path):
    path = write(tmp_path, {"states": [{"q": 0.5, "bloch": [0.6, 0, 0.8]}, {"q": 0.5, "bloch": [-0.6, 0, 0.8]}]})
    code, _, rows = sweep_rows(capsys, "--ensemble", path, "--param", "p", "--start", "0.5", "--stop", "1", "--steps", "3")
    assert code == 0
    for r in rows:
        assert r["q_inc"] == pytest.approx(r["p"] * 0.8, abs=1e-9)  # p |<psi0|psi1>| = p cos(theta), cos(theta) = 0.8


def test_random_source_is_seeded(capsys):
    a = run(capsys, "compute", "--random", "4", "--seed", "3", "--format", "json")[1]
    b = run(capsys, "compute", "--random", "4", "--seed", "3", "--format", "json")[1]
    c = run(capsys, "compute", "--random", "4", "--seed", "4", "--format", "json")[1]
    assert a == b and a != c


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "mcmqubit", "compute", "--family", "tetrahedron", "--p", "1"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "q_inc = 0.0000000000" in proc.stdout
