"""CLI behaviour, exit codes, JSON schemas and golden outputs.

Golden files live in tests/golden; regenerate them with
``HYBRIDCOX_UPDATE_GOLDEN=1 pytest tests/test_cli.py``.
"""

import io
import json
import math
import os
import subprocess
import sys
from importlib import resources
from pathlib import Path

import jsonschema
import pytest

from hybridcox.cli import EXIT_DOMAIN, EXIT_OK, EXIT_SOLVER, EXIT_USAGE, TOL_ENV, run
from hybridcox.combinatorics import antiprism, tetrahedron, twisted_antiprism

GOLDEN = Path(__file__).parent / "golden"
UPDATE = os.environ.get("HYBRIDCOX_UPDATE_GOLDEN") == "1"


def cli(*argv, stdin: str = ""):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdin=io.StringIO(stdin), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def schema(name: str) -> dict:
    return json.loads((resources.files("hybridcox") / "schemas" / f"{name}.json").read_text())


def _close(a, b, rel=1e-9, abs_=1e-9) -> bool:
    if isinstance(a, dict) and isinstance(b, dict):
        return a.keys() == b.keys() and all(_close(a[k], b[k], rel, abs_) for k in a)
    if isinstance(a, list) and isinstance(b, list):
        return len(a) == len(b) and all(_close(x, y, rel, abs_) for x, y in zip(a, b))
    if isinstance(a, float) or isinstance(b, float):
        return isinstance(a, (int, float)) and isinstance(b, (int, float)) and math.isclose(a, b, rel_tol=rel, abs_tol=abs_)
    return a == b


def _numeric_lines_close(a: str, b: str, tol=1e-9) -> bool:
    la, lb = a.splitlines(), b.splitlines()
    if len(la) != len(lb):
        return False
    for x, y in zip(la, lb):
        tx, ty = x.replace(",", " ").split(), y.replace(",", " ").split()
        if len(tx) != len(ty):
            return False
        for s, t in zip(tx, ty):
            try:
                if not math.isclose(float(s), float(t), rel_tol=tol, abs_tol=tol):
                    return False
            except ValueError:
                if s != t:
                    return False
    return True


def golden(name: str, text: str, mode: str = "exact") -> None:
    path = GOLDEN / name
    if UPDATE or not path.exists():
        path.write_text(text)
        if not UPDATE:
            pytest.skip(f"golden file {name} created")
    expected = path.read_text()
    if mode == "exact":
        assert text == expected
    elif mode == "json":
        assert _close(json.loads(text), json.loads(expected))
    else:
        assert _numeric_lines_close(text, expected)


# ---- grammar and exit codes ---------------------------------------------------------


def test_unknown_flag_is_usage_error():
    code, out, err = cli("gen", "antiprism", "4", "--bogus")
    assert code == EXIT_USAGE
    assert "usage:" in err and out == ""


def test_missing_subcommand_is_usage_error():
    assert cli()[0] == EXIT_USAGE


def test_mutually_exclusive_formats_rejected():
    code, _, err = cli("gen", "antiprism", "4", "--json", "--csv")
    assert code == EXIT_USAGE
    assert "not allowed" in err


def test_format_flag_and_shortcut_conflict():
    assert cli("gen", "antiprism", "4", "--format", "json", "--text")[0] == EXIT_USAGE


def test_input_sources_are_exclusive(tmp_path):
    path = tmp_path / "a4.txt"
    path.write_text(antiprism(4).dumps())
    assert cli("andreev", str(path), "--stdin")[0] == EXIT_USAGE
    assert cli("andreev")[0] == EXIT_USAGE
    assert cli("volume", "--family", "twist", "--n", "6")[0] == EXIT_USAGE


def test_andreev_tetrahedron_from_stdin():
    code, out, _ = cli("andreev", "--stdin", stdin=tetrahedron().dumps())
    assert code == EXIT_DOMAIN
    data = json.loads(out)
    jsonschema.validate(data, schema("andreev"))
    assert [v["condition"] for v in data["violations"]] == [1]


def test_domain_errors_exit_2(tmp_path):
    assert cli("gen", "antiprism", "2")[0] == EXIT_DOMAIN
    assert cli("twist", "6", "2")[0] == EXIT_DOMAIN
    assert cli("andreev", str(tmp_path / "missing.txt"))[0] == EXIT_DOMAIN
    assert cli("realize", "--stdin", stdin="polytope v1\n4 4\n0 1 2\n")[0] == EXIT_DOMAIN
    assert cli("links", "classify", "9")[0] == EXIT_DOMAIN


def test_solver_failure_exits_3():
    code, _, err = cli("realize", "--family", "antiprism", "--n", "9", "--tol", "1e-30")
    assert code == EXIT_SOLVER
    assert "residual" in err


def test_budget_exhaustion_exits_3():
    code, out, _ = cli("arith", "--family", "antiprism", "--n", "4", "--method", "enumerate", "--budget", "100")
    assert code == EXIT_SOLVER
    assert json.loads(out)["verdict"] == "inconclusive"


def test_invalid_numeric_options_are_usage_errors():
    assert cli("arith", "--family", "antiprism", "--n", "4", "--budget", "0")[0] == EXIT_USAGE
    assert cli("arith", "--family", "antiprism", "--n", "4", "--max-cycle-len", "1")[0] == EXIT_USAGE


def test_tolerance_environment_override(monkeypatch):
    monkeypatch.setenv(TOL_ENV, "1e-30")
    assert cli("realize", "--family", "antiprism", "--n", "9")[0] == EXIT_SOLVER
    # the flag wins over the environment
    assert cli("realize", "--family", "antiprism", "--n", "9", "--tol", "1e-10")[0] == EXIT_OK
    monkeypatch.setenv(TOL_ENV, "not-a-number")
    assert cli("realize", "--family", "antiprism", "--n", "4")[0] == EXIT_USAGE


def test_deterministic_output():
    a = cli("realize", "--family", "twist", "--n", "7", "--k", "4", "--seed", "3")
    b = cli("realize", "--family", "twist", "--n", "7", "--k", "4", "--seed", "3")
    assert a == b


def test_output_file(tmp_path):
    target = tmp_path / "a5.txt"
    code, out, _ = cli("gen", "antiprism", "5", "-o", str(target))
    assert code == EXIT_OK and out == ""
    assert target.read_text() == antiprism(5).dumps()


# ---- round trips ------------------------------------------------------------------------


def test_gen_output_round_trips_through_files(tmp_path):
    code, text, _ = cli("gen", "antiprism", "6")
    assert code == EXIT_OK
    assert text == antiprism(6).dumps()
    path = tmp_path / "a6.txt"
    path.write_text(text)
    assert cli("andreev", str(path))[0] == EXIT_OK
    assert cli("realize", str(path))[1] == cli("realize", "--stdin", stdin=text)[1]


def test_gen_pipes_into_andreev_and_realize():
    gen = subprocess.run(
        [sys.executable, "-m", "hybridcox.cli", "gen", "antiprism", "5"], capture_output=True, text=True, check=True
    )
    assert gen.stdout == antiprism(5).dumps()
    andreev = subprocess.run(
        [sys.executable, "-m", "hybridcox.cli", "andreev", "--stdin"], input=gen.stdout, capture_output=True, text=True
    )
    assert andreev.returncode == 0
    assert json.loads(andreev.stdout)["ok"] is True
    realize = subprocess.run(
        [sys.executable, "-m", "hybridcox.cli", "realize", "--stdin"], input=gen.stdout, capture_output=True, text=True
    )
    assert realize.returncode == 0
    assert realize.stdout.startswith("realization v1\n")


# ---- schemas and goldens ------------------------------------------------------------------


def test_gen_golden():
    golden("gen_antiprism_4.txt", cli("gen", "antiprism", "4")[1])
    code, out, _ = cli("gen", "antiprism", "4", "--json")
    jsonschema.validate(json.loads(out), schema("polytope"))
    golden("gen_antiprism_4.json", out)


def test_twist_golden():
    golden("twist_6_4.txt", cli("twist", "6", "4")[1])


def test_glue_golden():
    code, out, _ = cli("glue", "antiprisms", "3", "5")
    assert code == EXIT_OK
    golden("glue_antiprisms_3_5.txt", out)


def test_glue_files(tmp_path):
    a = tmp_path / "a.txt"
    a.write_text(antiprism(3).dumps())
    code, out, _ = cli("glue", "files", str(a), "2", str(a), "2")
    assert code == EXIT_OK
    assert out.splitlines()[1] == twisted_antiprism(4, 3).dumps().splitlines()[1]


def test_glue_polygons_reference():
    code, out, _ = cli("glue", "polygons")
    assert code == EXIT_OK
    data = json.loads(out)
    jsonschema.validate(data, schema("polygons"))
    assert data["merged_angles"] == ["pi/2", "pi/4"]
    golden("glue_polygons_reference.json", out)


def test_glue_polygons_violation():
    code, out, _ = cli("glue", "polygons", "--p1", "pi/3,pi/8,pi/2", "--p2", "pi/8,pi/3,pi/3")
    assert code == EXIT_DOMAIN
    data = json.loads(out)
    jsonschema.validate(data, schema("polygons"))
    assert data["interface"]["violations"][0]["angles"] == ["pi/3", "pi/3"]


def test_andreev_golden():
    code, out, _ = cli("andreev", "--stdin", stdin=antiprism(7).dumps())
    assert code == EXIT_OK
    golden("andreev_a7.json", out)
    code, out, _ = cli("andreev", "--stdin", "--text", stdin=tetrahedron().dumps())
    assert out.startswith("violation(1)")


def test_realize_golden():
    code, out, _ = cli("realize", "--family", "antiprism", "--n", "4")
    assert code == EXIT_OK
    golden("realize_a4.txt", out, mode="numeric")
    code, out, _ = cli("realize", "--family", "antiprism", "--n", "4", "--json")
    data = json.loads(out)
    jsonschema.validate(data, schema("realization"))
    assert data["validation"]["max"] < 1e-9


def test_gram_golden():
    code, out, _ = cli("gram", "--family", "antiprism", "--n", "3")
    assert code == EXIT_OK
    golden("gram_a3.csv", out, mode="numeric")
    code, out, _ = cli("gram", "--family", "antiprism", "--n", "3", "--json")
    jsonschema.validate(json.loads(out), schema("gram"))


def test_volume_golden():
    code, out, _ = cli("volume", "--family", "antiprism", "--n", "3")
    data = json.loads(out)
    jsonschema.validate(data, schema("volume"))
    assert abs(data["total"] - 3.663862) < 1e-5
    golden("volume_a3.json", out, mode="json")


def test_arith_golden():
    code, out, _ = cli("arith", "--family", "antiprism", "--n", "6")
    assert code == EXIT_OK
    data = json.loads(out)
    jsonschema.validate(data, schema("arith"))
    assert data["verdict"] == "nonarithmetic" and data["witness_exact"] == "16/3"
    golden("arith_a6.json", out, mode="json")
    code, out, _ = cli("arith", "--family", "antiprism", "--n", "4", "--method", "enumerate", "--max-cycle-len", "6")
    jsonschema.validate(json.loads(out), schema("arith"))


def test_fingerprint_golden():
    code, out, _ = cli("fingerprint", "--family", "antiprism", "--n", "4")
    assert code == EXIT_OK
    data = json.loads(out)
    jsonschema.validate(data, schema("fingerprint"))
    golden("fingerprint_a4.json", out)


def test_hybrid_golden():
    code, out, _ = cli("hybrid", "antiprisms", "3", "5")
    assert code == EXIT_OK
    data = json.loads(out)
    jsonschema.validate(data, schema("hybrid"))
    assert data["verdict"] == "nonarithmetic"
    golden("hybrid_a3_a5.json", out, mode="json")
    code, out, _ = cli("hybrid", "antiprisms", "3", "3", "--text")
    assert out.startswith("inconclusive")


def test_hybrid_polygons():
    code, out, _ = cli("hybrid", "polygons", "--text")
    assert code == EXIT_OK
    assert "merged angles: pi/2 pi/4" in out


def test_links_golden():
    code, out, _ = cli("links", "classify", "3")
    assert code == EXIT_OK
    data = json.loads(out)
    jsonschema.validate(data, schema("link"))
    assert data["link"] == "C_13" and data["verdict"] == "arithmetic"
    golden("links_c13.json", out, mode="json")
    code, out, _ = cli("links", "classify", "4", "--link-family", "D")
    assert json.loads(out)["link"] == "D_8"


def test_table_theorem3_golden():
    code, out, _ = cli("table", "theorem3", "--max-n", "8")
    assert code == EXIT_OK
    golden("table_theorem3.txt", out, mode="numeric")
    code, out, _ = cli("table", "theorem3", "--max-n", "6", "--json")
    jsonschema.validate(json.loads(out), schema("table"))


def test_table_theorem4_golden():
    code, out, _ = cli("table", "theorem4", "--csv")
    assert code == EXIT_OK
    golden("table_theorem4.csv", out, mode="numeric")
    code, out, _ = cli("table", "theorem4", "--json")
    jsonschema.validate(json.loads(out), schema("table"))


def test_table_antiprisms():
    code, out, _ = cli("table", "antiprisms", "--json")
    data = json.loads(out)
    jsonschema.validate(data, schema("table"))
    assert [r["verdict"] == "arithmetic" for r in data["rows"]] == [n in (3, 4) for n in range(3, 9)]


def test_svg_outputs():
    code, out, _ = cli("gen", "antiprism", "5", "--svg")
    assert code == EXIT_OK and out.startswith("<svg") and out.count("<line") == 20
    code, out, _ = cli("glue", "polygons", "--svg")
    assert code == EXIT_OK and "pi/8" in out and "5/12" in out
    code, out, _ = cli("twist", "8", "4", "--svg")
    assert out.count("<circle") == 17


def test_schemas_are_valid():
    for path in (resources.files("hybridcox") / "schemas").iterdir():
        jsonschema.Draft202012Validator.check_schema(json.loads(path.read_text()))
