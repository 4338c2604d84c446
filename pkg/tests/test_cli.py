import json
import subprocess
import sys
from pathlib import Path

import pytest

from sullivan_dgm.cli import dispatch, main

MODELS = Path(__file__).resolve().parent.parent / "models"
HOPF = str(MODELS / "hopf.model")
SPHERES = str(MODELS / "spheres.model")


def run_json(*argv):
    code, text = dispatch(list(argv) + ["--format", "json"])
    return code, json.loads(text)


def _dims(rep, key="dims"):
    return {int(k): v for k, v in rep["data"][key].items()}


def test_ext_hom_example():
    code, rep = run_json("ext", "--via", "hom", HOPF, "--module", "hopf", "--target", "Q",
                         "--window", "-4:6")
    assert code == 0 and rep["status"] == "complete"
    assert {k: v for k, v in _dims(rep).items() if v} == {-1: 1, 0: 1}


def test_ext_bar_matches_hom():
    _, hom = run_json("ext", "--via", "hom", HOPF, "--module", "hopf", "--target", "Q", "--window", "-4:6")
    code, bar = run_json("ext", "--via", "bar", HOPF, "--module", "hopf", "--target", "Q", "--window", "-4:6")
    assert code == 0
    assert _dims(bar) == _dims(hom)


def test_cohomology_example():
    code, rep = run_json("cohomology", SPHERES, "--algebra", "S3", "--window", "0:7")
    assert code == 0
    assert {k: v for k, v in _dims(rep).items() if v} == {0: 1, 3: 1}


def test_ss_minimal_matches_ext():
    _, ext = run_json("ext", "--via", "hom", HOPF, "--module", "hopf", "--target", "Q", "--window", "-4:6")
    code, ss = run_json("ss", "--kind", "minimal", HOPF, "--module", "hopf", "--target", "Q",
                        "--window", "-4:6")
    assert code == 0 and ss["data"]["agrees"]
    totals = _dims(ss, "einf_totals")
    assert totals == {k: v for k, v in _dims(ext).items() if k in totals}


def test_ss_hyper():
    code, rep = run_json("ss", "--kind", "hyper", HOPF, "--module", "hopf", "--target", "Q",
                         "--window", "-4:6")
    assert code == 0 and rep["data"]["agrees"]
    assert rep["data"]["e1_mismatches"] == [] and rep["data"]["e2_mismatches"] == []


def test_resolve_capped_is_incomplete():
    code, rep = run_json("resolve", SPHERES, "--algebra", "S1", "--target", "Q", "--window", "0:0", "--max-rounds", "3")
    assert code == 2 and rep["status"] == "incomplete" and rep["flags"]


def test_tensor_and_tor():
    _, ten = run_json("tensor", HOPF, "--module", "hopf", "--with", "hopf", "--window", "0:6")
    _, tor = run_json("tor", HOPF, "--module", "hopf", "--with", "hopf", "--window", "0:6")
    want = dict(zip(range(7), [1, 1, 0, 1, 1, 0, 0]))
    assert _dims(ten) == want and _dims(tor) == want


def test_stokes_and_integrate():
    code, rep = run_json("integrate", "--dim", "2", "--form", "t1*t2*dt1*dt2")
    assert code == 0 and rep["data"]["value"] == "1/24"
    code, rep = run_json("stokes", "--dim", "1", "--form", "t1")
    assert code == 0


def test_reports_are_deterministic():
    argv = ["ss", "--kind", "minimal", HOPF, "--module", "hopf", "--target", "Q", "--window", "-4:6"]
    for fmt in ("json", "text"):
        a = dispatch(argv + ["--format", fmt])
        b = dispatch(argv + ["--format", fmt])
        assert a == b


@pytest.mark.parametrize("argv", [
    ["frobnicate"],
    ["cohomology", SPHERES, "--algebra", "S3"],
    ["cohomology", "missing.model", "--algebra", "S3", "--window", "0:3"],
    ["cohomology", SPHERES, "--algebra", "nope", "--window", "0:3"],
    ["ext", "--via", "hom", HOPF, "--module", "hopf", "--target", "Q", "--window", "5:1"],
    [],
])
def test_errors_exit_one(argv):
    code, _ = dispatch(argv)
    assert code == 1


def test_exit_contract_on_fixtures():
    cases = [
        (["validate", HOPF], 0),
        (["validate", SPHERES], 0),
        (["cohomology", HOPF, "--module", "hopf", "--window", "0:4"], 0),
        (["minimize", HOPF, "--module", "hopf"], 0),
        (["postnikov", HOPF, "--module", "hopf", "--at", "0", "--window", "0:4"], 0),
        (["resolve", SPHERES, "--algebra", "Lw3", "--target", "Q", "--window", "0:8"], 0),
        (["resolve", SPHERES, "--algebra", "S1", "--target", "Q", "--window", "0:0", "--max-rounds", "2"], 2),
        (["ext", "--via", "hom", SPHERES, "--module", "circle_path", "--target", "Q", "--window", "-2:2"], 0),
    ]
    for argv, want in cases:
        code, text = dispatch(argv)
        assert code == want, (argv, text)


def test_usage_error_as_json():
    code, text = dispatch(["cohomology", SPHERES, "--algebra", "S3", "--format", "json"])
    assert code == 1 and json.loads(text)["status"] == "error"


def test_main_writes_streams(capsys):
    assert main(["cohomology", SPHERES, "--algebra", "S3", "--window", "0:7"]) == 0
    out = capsys.readouterr()
    assert "status: complete" in out.out and out.err == ""
    assert main(["cohomology", SPHERES, "--algebra", "S3"]) == 1
    assert capsys.readouterr().err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "sullivan_dgm", "cohomology", SPHERES,
                           "--algebra", "S3", "--window", "0:7", "--format", "json"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["status"] == "complete"
