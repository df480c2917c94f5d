from __future__ import annotations

import json
import subprocess
import sys

import jsonschema
import pytest

from chainlift import textio
from chainlift.cli import load_schema, main, report_schema_version
from chainlift.codes import gen_toric
from chainlift.core import BinMatrix, ChainComplexZ, IntMatrix, mod2

TREE = "graph 4 3\n0 1\n1 2\n1 3\n"
K4 = "graph 4 6\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n"
# boundary [[0]] with d1 lift [[2]] and a single 2-cell on the single edge
TORSION_FIXTURE = "complexz 2\nint 1 1\n0 0 2\nint 1 1\n0 0 1\n"


def run(*args, stdin: str = ""):
    proc = subprocess.run(
        [sys.executable, "-m", "chainlift.cli", *args],
        input=stdin,
        capture_output=True,
        text=True,
        timeout=300,
    )
    return proc.returncode, proc.stdout, proc.stderr


def run_json(*args, stdin: str = ""):
    code, out, err = run(*args, stdin=stdin)
    assert code == 0, err
    return json.loads(out)


def check_schema(command: str, report: dict):
    jsonschema.validate(report, load_schema(command))
    assert report["schema_version"] == "1.0.0"
    assert report["command"] == command
    assert "seed" in report


@pytest.fixture(scope="module")
def toric3():
    code, out, _ = run("gen", "toric", "--L", "3")
    assert code == 0
    return out


@pytest.fixture(scope="module")
def toric3_product(toric3):
    code, out, err = run("lift", "--method", "product", stdin=toric3)
    assert code == 0, err
    return out


def test_schema_version():
    assert report_schema_version() == "1.0.0"


def test_generators_round_trip(toric3):
    assert textio.parse_complex(toric3) == gen_toric(3)
    code, out, _ = run("gen", "cycle", "--m", "4")
    assert code == 0 and textio.parse_complex(out).dims == (4, 4)


def test_toric_product_homology_pipeline(toric3_product):
    lifted = textio.parse_complex(toric3_product)
    assert isinstance(lifted, ChainComplexZ)
    assert mod2(lifted) == gen_toric(3)
    report = run_json("homology", "--ring", "z", stdin=toric3_product)
    check_schema("homology", report)
    assert [d["free_rank"] for d in report["degrees"]] == [1, 2, 1]
    assert all(d["torsion"] == [] and d["cohomology_torsion"] == [] for d in report["degrees"])
    assert report["torsion_free"] is True


def test_lift_report_file(tmp_path, toric3):
    rep_path = tmp_path / "lift.json"
    code, out, _ = run("lift", "--method", "general", "--report", str(rep_path), stdin=toric3)
    assert code == 0
    report = json.loads(rep_path.read_text())
    check_schema("lift", report)
    assert report["parity_ok"] and report["admissible"]


def test_sparse_lift_of_torsion_fixture_exits_one():
    code, _, err = run("lift", "--method", "sparse", stdin=TORSION_FIXTURE)
    assert code == 1
    assert "NoSparseLift" in err and "2-cell 0" in err


def test_sparse_lift_with_product_d1(toric3):
    code, out, err = run("lift", "--method", "sparse", "--d1", "product", stdin=toric3)
    assert code == 0, err
    assert mod2(textio.parse_complex(out)) == gen_toric(3)


def test_bundle_generation_and_lift(tmp_path):
    base = tmp_path / "base.txt"
    base.write_text(textio.format_complex(textio.parse_complex(run("gen", "cycle", "--m", "3")[1])))
    twists = tmp_path / "tw.txt"
    twists.write_text("0 0 1\n")
    code, out, err = run("gen", "bundle", "--base", str(base), "--m", "3", "--twists", str(twists))
    assert code == 0, err
    code, lifted, err = run("lift", "--method", "bundle", stdin=out)
    assert code == 0, err
    assert mod2(textio.parse_complex(lifted)) == textio.parse_complex(out)


def test_validate_reports(toric3):
    report = run_json("validate", stdin=toric3)
    check_schema("validate", report)
    assert report["ok"] is True
    bad = "complex2 2\nf2 1 1\n0 0\nf2 1 1\n0 0\n"
    code, out, _ = run("validate", stdin=bad)
    assert code == 1
    assert json.loads(out)["ok"] is False


def test_cycle_basis_tree_and_k4():
    report = run_json("cycle-basis", stdin=TREE)
    check_schema("cycle-basis", report)
    assert report["cycles"] == [] and report["rank"] == 0
    report = run_json("cycle-basis", "--verify", "--stats", "--seed", "3", stdin=K4)
    check_schema("cycle-basis", report)
    assert len(report["cycles"]) == 3
    assert all(report["verified"].values())
    assert report["stats"]["max_multiplicity"] <= 3


def test_distance_and_sr(toric3):
    report = run_json("distance", "--side", "cohomology", stdin=toric3)
    check_schema("distance", report)
    assert report["distance"] == 3
    report = run_json("sr", stdin=toric3)
    check_schema("sr", report)
    assert report["sr"] == "1/2" and report["sr_float"] == 0.5


def test_snf_lu_and_minor_gcd(tmp_path):
    mat = tmp_path / "m.txt"
    mat.write_text(textio.format_matrix(BinMatrix.from_dense([[1, 1, 0], [0, 1, 1], [1, 0, 1]])))
    report = run_json("snf", str(mat))
    check_schema("snf", report)
    assert report["invariant_factors"] == [1, 1, 2]
    ident = tmp_path / "i.txt"
    ident.write_text(textio.format_matrix(BinMatrix.identity(2)))
    report = run_json("lu-probe", str(ident))
    check_schema("lu-probe", report)
    assert report["fill"] == 0
    ones = tmp_path / "ones.txt"
    ones.write_text(textio.format_matrix(BinMatrix.from_dense([[1, 1], [1, 1]])))
    assert run("lu-probe", str(ones))[0] == 1
    pair = tmp_path / "p.txt"
    pair.write_text(textio.format_matrix(IntMatrix.from_dense([[2, 0, 0], [0, 2, 0]])))
    report = run_json("minor-gcd", str(pair))
    check_schema("minor-gcd", report)
    assert report["gcd"] == 4


def test_skeleton_reports(toric3_product):
    report = run_json("skeleton", "--stage", "double", stdin=toric3_product)
    check_schema("skeleton", report)
    assert report["middle_complex_ok"] is True
    assert report["congested"] is False
    code, dot, _ = run("skeleton", "--stage", "x", "--report", "dot", stdin=toric3_product)
    assert code == 0 and dot.startswith("graph skeleton {")


def test_mc_push_report():
    report = run_json("mc-push", "--k", "1", "--n", "2", "--budget-samples", "500", "--seed", "9")
    check_schema("mc-push", report)
    assert report["below_ceiling"] is True and report["seed"] == 9


def test_text_format(toric3):
    code, out, _ = run("validate", "--format", "text", stdin=toric3)
    assert code == 0
    assert "ok: true" in out.lower()


def test_usage_errors_exit_two(toric3):
    assert run("frobnicate")[0] == 2
    assert run("gen", "toric")[0] == 2
    assert run("validate", "--format", "dot", stdin=toric3)[0] == 2
    code, _, err = run("validate", stdin="complex2 2\nf2 1 2\n0 0\nf2 3 1\n")
    assert code == 2 and "line 4" in err


def test_out_flag_and_byte_identical_reruns(tmp_path, toric3):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        code, out, _ = run("cycle-basis", "--seed", "5", "--stats", "--out", str(path), stdin=K4)
        assert code == 0 and out == ""
    assert a.read_bytes() == b.read_bytes()
    first = run("skeleton", "--seed", "2", "--policy", "random", stdin=run("lift", "--method", "product", stdin=toric3)[1])
    second = run("skeleton", "--seed", "2", "--policy", "random", stdin=run("lift", "--method", "product", stdin=toric3)[1])
    assert first == second


def test_json_round_trip_in_process(tmp_path, capsys):
    src = tmp_path / "k4.txt"
    src.write_text(K4)
    assert main(["cycle-basis", str(src), "--seed", "1"]) == 0
    out = capsys.readouterr().out
    report = json.loads(out)
    assert json.dumps(report, sort_keys=True, indent=2) == out.rstrip("\n")


def test_every_schema_loads():
    for name in ("validate", "lift", "homology", "snf", "lu-probe", "minor-gcd", "distance", "sr", "cycle-basis", "skeleton", "mc-push"):
        jsonschema.Draft202012Validator.check_schema(load_schema(name))
