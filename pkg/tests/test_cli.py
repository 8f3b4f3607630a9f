import cmath
import json
import subprocess
import sys

import numpy as np
import pytest

from nilsolve.charsolve import CharBasis
from nilsolve.cli import main
from nilsolve.solutions import FamilyMember
from nilsolve.verify import ResidualReport


def run(argv, capsys=None):
    code = main([str(a) for a in argv])
    out = capsys.readouterr() if capsys else None
    return code, out


def solve(tmp_path, *extra, name="basis.json"):
    path = tmp_path / name
    code, _ = run(["solve", *extra, "-o", path])
    assert code == 0
    return path, json.loads(path.read_text())


def free_of(data):
    return np.array([[complex(*c) for c in row] for row in data["run"]["free"]])


def test_solve_laplace_seed(tmp_path):
    _, data = solve(tmp_path, "--preset", "laplace3d", "--n", 4, "--branch", "plus", "--seed", 7)
    basis = CharBasis.from_json(data["basis"])
    k0, m0 = free_of(data)[:, 0]
    assert abs(basis.matrix[2, 0] - 1j * cmath.sqrt(k0**2 + m0**2)) < 1e-12
    assert data["run"]["seed"] == 7 and data["run"]["n"] == 4


@pytest.mark.parametrize("branch,sign", [("plus", 1), ("minus", -1)])
def test_solve_helmholtz_k0_zero(tmp_path, branch, sign):
    _, data = solve(tmp_path, "--preset", "helmholtz", "--lambda", 1, "--free", "k0=0", "--branch", branch)
    basis = CharBasis.from_json(data["basis"])
    assert abs(basis.matrix[1, 0] - sign * 1j) < 1e-12


def test_solve_oracle_method(tmp_path):
    _, gen = solve(tmp_path, "--preset", "beam", "--n", 5, "--seed", 3)
    _, orc = solve(tmp_path, "--preset", "beam", "--n", 5, "--seed", 3, "--method", "oracle", name="o.json")
    a = CharBasis.from_json(gen["basis"]).matrix
    b = CharBasis.from_json(orc["basis"]).matrix
    assert np.max(np.abs(a - b)) < 1e-12


def test_degenerate_seed_exit_code(tmp_path, capsys):
    free = tmp_path / "zeros.json"
    free.write_text(json.dumps([[0, 0, 0], [0, 0, 0]]))
    code, out = run(["solve", "--preset", "laplace3d", "--n", 3, "--free-file", free], capsys)
    assert code == 7 and "DegenerateSeed" in out.err


def test_solve_from_pde_file(tmp_path):
    pde = tmp_path / "pde.json"
    pde.write_text(json.dumps({"d": 2, "terms": [{"alpha": [2, 0], "re": 1}, {"alpha": [0, 2], "re": 1}]}))
    code, _ = run(["solve", "--pde", pde, "--n", 3, "--branch", "upper", "-o", tmp_path / "b.json"])
    assert code == 0
    basis = CharBasis.from_json(json.loads((tmp_path / "b.json").read_text())["basis"])
    assert basis.residual() < 1e-12


@pytest.mark.parametrize(
    "argv",
    [
        ["solve", "--preset", "laplace3d", "--n", 1],
        ["solve", "--preset", "laplace3d", "--free", "q0=1"],
        ["solve", "--preset", "laplace3d", "--free", "k9=1"],
        ["solve", "--preset", "beam", "--branch", "sideways"],
    ],
)
def test_usage_errors(argv, capsys):
    assert run(argv, capsys)[0] == 2


def test_malformed_json(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"d": 2,\n "terms": [}')
    code, out = run(["solve", "--pde", bad], capsys)
    assert code == 2 and "line 2" in out.err
    code, out = run(["families", "--basis", tmp_path / "missing.json"], capsys)
    assert code == 2 and "no such file" in out.err


def test_families_exp_beam(tmp_path):
    basis, _ = solve(tmp_path, "--preset", "beam", "--n", 4)
    fam, tex = tmp_path / "fam.json", tmp_path / "fam.tex"
    assert run(["families", "--basis", basis, "--kind", "exp", "--max", 2, "-o", fam, "--latex", tex])[0] == 0
    members = [FamilyMember.from_json(m) for m in json.loads(fam.read_text())["members"]]
    assert [m.index for m in members] == [0, 1, 2]
    assert members[1].terms[0].terms == {(1,): 1}
    assert tex.read_text().startswith("% nilsolve")


def test_families_analytic(tmp_path):
    basis, _ = solve(tmp_path, "--preset", "laplace3d", "--n", 4)
    fam = tmp_path / "fam.json"
    assert run(["families", "--basis", basis, "--kind", "analytic", "--F", "exp", "--max", 3, "-o", fam])[0] == 0
    data = json.loads(fam.read_text())
    assert data["F"] == "exp" and len(data["members"]) == 4
    # pole orders 2..4 carry F', F'', F'''
    assert sorted(p["pole"] for p in data["members"][3]["terms"]) == [2, 3, 4]


def test_families_overflow(tmp_path, capsys):
    basis, _ = solve(tmp_path, "--preset", "laplace3d", "--n", 4)
    code, out = run(["families", "--basis", basis, "--max", 9], capsys)
    assert code == 2 and "InsufficientMembers" not in out.out


def test_verify_and_corruption(tmp_path, capsys):
    basis, _ = solve(tmp_path, "--preset", "helmholtz", "--n", 5)
    fam = tmp_path / "fam.json"
    run(["families", "--basis", basis, "--max", 4, "-o", fam])
    rep = tmp_path / "rep.json"
    assert run(["verify", "--basis", basis, "--families", fam, "-o", rep])[0] == 0
    report = json.loads(rep.read_text())
    assert report["passed"] and report["residual"]["max_rel"] < 1e-8
    data = json.loads(fam.read_text())
    term = data["members"][2]["terms"][0]["poly"][0]
    term["re"], term["im"] = -term["re"], -term["im"]
    fam.write_text(json.dumps(data))
    code, _ = run(["verify", "--basis", basis, "--families", fam, "-o", rep], capsys)
    report = json.loads(rep.read_text())
    assert code == 4 and not report["passed"] and not report["residual"]["members"][2]["passed"]


def test_verify_cauchy(tmp_path):
    basis, _ = solve(tmp_path, "--preset", "laplace3d", "--n", 5)
    fam = tmp_path / "fam.json"
    run(["families", "--basis", basis, "--max", 4, "-o", fam])
    rep = tmp_path / "rep.json"
    assert run(["verify", "--basis", basis, "--families", fam, "--check", "cauchy", "--n-index", 3, "-o", rep])[0] == 0
    assert json.loads(rep.read_text())["cauchy"]["magnitude"] < 1e-7


def pipeline(out_dir, *extra):
    return run(["pipeline", "--preset", "hydro", "--n", 6, "--max", 5, "--seed", 11, "--check", "all",
                "--latex", "--out-dir", out_dir, *extra])[0]


def test_pipeline_is_deterministic(tmp_path):
    assert pipeline(tmp_path / "a") == 0 and pipeline(tmp_path / "b", "--jobs", 3) == 0
    for name in ("basis.json", "families.json", "report.json", "families.tex"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_artifacts_round_trip(tmp_path):
    pipeline(tmp_path)
    basis = json.loads((tmp_path / "basis.json").read_text())["basis"]
    assert CharBasis.from_json(basis).to_json() == basis
    for m in json.loads((tmp_path / "families.json").read_text())["members"]:
        assert FamilyMember.from_json(m).to_json() == m
    rep = json.loads((tmp_path / "report.json").read_text())["residual"]
    assert ResidualReport.from_json(rep).to_json() == rep


def test_env_seed_override(tmp_path, monkeypatch):
    monkeypatch.setenv("NILSOLVE_SEED", "5")
    _, a = solve(tmp_path, "--preset", "wave3d", "--seed", 99, name="a.json")
    monkeypatch.delenv("NILSOLVE_SEED")
    _, b = solve(tmp_path, "--preset", "wave3d", "--seed", 5, name="b.json")
    assert a == b and a["run"]["seed"] == 5


@pytest.mark.parametrize("preset", ["laplace3d", "wave3d", "beam", "beam_hyp", "biharmonic", "helmholtz", "hydro"])
def test_pipeline_every_preset(tmp_path, preset):
    extra = ["--p", 3] if preset == "biharmonic" else []
    code = run(["pipeline", "--preset", preset, "--n", 7, "--max", 6, "--out-dir", tmp_path, "--threshold", 1e-8, *extra])[0]
    assert code == 0


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "nilsolve", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.startswith("nilsolve ")
