import io
import json
import math
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from toeplitz_lab.cli import SUBCOMMANDS, emit_report, load_symbol_file, parse_report, run_command
from toeplitz_lab.errors import RootFindingFailure, SchemaViolation

DATA = Path(__file__).parent / "data"
sys.path.insert(0, str(DATA))
from make_corpus import COMMANDS, corpus, resolve  # noqa: E402


def run(argv):
    out, err = io.StringIO(), io.StringIO()
    code = run_command(resolve(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def _close(a, b, path="report"):
    """Structural equality with a float tolerance far below any verdict threshold."""
    if isinstance(a, dict):
        assert isinstance(b, dict) and list(a) == list(b), path
        for k in a:
            _close(a[k], b[k], f"{path}.{k}")
    elif isinstance(a, list):
        assert isinstance(b, list) and len(a) == len(b), path
        for i, (x, y) in enumerate(zip(a, b)):
            _close(x, y, f"{path}[{i}]")
    elif isinstance(a, float) or isinstance(b, float):
        assert math.isclose(a, b, rel_tol=1e-9, abs_tol=1e-12), (path, a, b)
    else:
        assert a == b, (path, a, b)


# -- corpus files -----------------------------------------------------------------------------


def test_corpus_files_are_current():
    for name, data in corpus().items():
        on_disk = json.loads((DATA / f"{name}.json").read_text(encoding="utf-8"))
        _close(data, on_disk, name)


def test_corpus_files_validate():
    for name in corpus():
        sf = load_symbol_file(str(DATA / f"{name}.json"))
        assert sf["id"] == name


# -- goldens --------------------------------------------------------------------------------------


@pytest.mark.parametrize("name", sorted(COMMANDS))
def test_golden(name):
    code, out, _ = run(COMMANDS[name])
    assert code == 0
    golden = (DATA / "golden" / f"{name}.out").read_text(encoding="utf-8")
    if COMMANDS[name][0] == "--format":
        assert out.splitlines()[0] == golden.splitlines()[0]
        assert [l.split(":")[0] for l in out.splitlines()] == [l.split(":")[0] for l in golden.splitlines()]
        return
    _close(json.loads(golden), json.loads(out))
    for exp in json.loads(out)["report"].get("expectations", {}).values():
        assert exp["ok"]


def test_every_subcommand_has_a_golden():
    covered = {argv[0] for argv in COMMANDS.values()}
    assert set(SUBCOMMANDS) <= covered


@pytest.mark.parametrize("name", ["classify_singular_cofactor_z", "family_z", "cowen-long_05_8", "coprimality_ones_cofactor"])
def test_byte_identical_across_runs(name):
    first = run(COMMANDS[name])[1]
    assert run(COMMANDS[name])[1] == first


def test_byte_identical_across_processes():
    argv = resolve(COMMANDS["classify_normal_form"])
    cmd = [sys.executable, "-m", "toeplitz_lab", *argv]
    a = subprocess.run(cmd, capture_output=True, text=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, text=True, check=True).stdout
    assert a == b
    assert a == run(COMMANDS["classify_normal_form"])[1]


# -- specific reports ------------------------------------------------------------------------------


def test_counterexample_family_report_verified():
    code, out, err = run(["remark311", "--theta", '{"zeros":[{"alpha":[0,0],"mult":1}]}'])
    rep = parse_report(out)
    assert code == 0 and rep["verified"]
    assert rep["checks"]["operator_normal"] is False
    assert rep["evidence"]["top_eigenvalue"] == pytest.approx(4)
    assert "verified=True" in err


def test_cowen_long_report():
    code, out, _ = run(["cowen-long", "--alpha", "0.5", "--k", "8"])
    rep = parse_report(out)
    assert code == 0 and rep["verdict"] == "subnormal_consistent"
    assert rep["moments"][:3] == [1.0, 0.75, 0.703125]


def test_classify_conclusions():
    want = {"analytic_poly": "analytic", "normal_form": "normal", "singular_cofactor_z": "hypotheses_violated",
            "divisibility_fail": "hypotheses_violated", "zbar_arot": "normal"}
    for name, conclusion in want.items():
        code, out, _ = run(["classify", "--symbol", f"{name}.json"])
        assert code == 0
        assert parse_report(out)["conclusion"] == conclusion


def test_witness_override_flag():
    code, out, _ = run(["certify-witness", "--symbol", "zbar_a2.json", "--witness", '{"entries":[[{"num":[[2,0]]}]]}'])
    rep = parse_report(out)
    assert code == 0 and rep["certified"] is False and rep["checks"]["contractive"] is False


def test_text_format():
    code, out, _ = run(["--format", "text", "classify", "--symbol", "analytic_poly.json", "--section", "8"])
    assert code == 0
    assert 'conclusion: "analytic"' in out


def test_tolerance_env_override(monkeypatch):
    monkeypatch.setenv("TOEPLITZ_LAB_TOL", "1e-6")
    code, out, _ = run(["cowen-long", "--alpha", "0.5", "--k", "2"])
    assert code == 0 and json.loads(out)["meta"]["tolerance"] == 1e-6


# -- emit / parse -------------------------------------------------------------------------------------


def test_emit_empty_report():
    text = emit_report({})
    data = json.loads(text)
    assert data["report"] == {} and "meta" in data
    assert json.dumps(data["report"]) == "{}"


def test_emit_keeps_key_order_and_rounds():
    rep = {"b": 1 / 3, "a": [1e-15, 2.0 + 1j], "c": np.float64(np.pi), "d": np.array([1, 2])}
    data = json.loads(emit_report(rep))["report"]
    assert list(data) == ["b", "a", "c", "d"]
    assert data["b"] == 0.333333333333
    assert data["a"] == [0.0, [2.0, 1.0]]
    assert data["c"] == 3.14159265359 and data["d"] == [1, 2]


def test_parse_emit_roundtrip():
    _, out, _ = run(COMMANDS["classify_singular_cofactor_z"])
    rep = parse_report(out)
    assert parse_report(emit_report(rep)) == rep


# -- errors -----------------------------------------------------------------------------------------


def test_unknown_subcommand_exit_1():
    code, out, err = run(["frobnicate"])
    assert code == 1
    assert json.loads(out)["report"]["error"] == "UnknownSubcommand"
    code, out, _ = run([])
    assert code == 1


def test_schema_violation_exit_1():
    bad = json.dumps({"schema_version": 2, "id": "x", "symbol": {"entries": [[{"num": [[1, 0]]}]]}})
    code, out, _ = run(["classify", "--symbol", bad])
    assert code == 1 and json.loads(out)["report"]["error"] == "SchemaViolation"
    with pytest.raises(SchemaViolation):
        load_symbol_file('{"schema_version": 1, "id": "x"}')


def test_bad_inputs_exit_1(tmp_path):
    assert run(["classify", "--symbol", str(tmp_path / "missing.json")])[0] == 1
    (tmp_path / "broken.json").write_text("{not json", encoding="utf-8")
    assert run(["classify", "--symbol", str(tmp_path / "broken.json")])[0] == 1
    assert run(["cowen-long", "--alpha", "1.5", "--k", "4"])[0] == 1
    assert run(["cowen-long", "--alpha", "0.5"])[0] == 1
    nonsquare = json.dumps({"schema_version": 1, "id": "x", "symbol": {"entries": [[{"num": [[1, 0]]}, {"num": [[1, 0]]}]]}})
    assert run(["classify", "--symbol", nonsquare])[0] == 1


def test_pole_on_circle_is_input_error():
    sym = json.dumps({"schema_version": 1, "id": "x", "symbol": {"entries": [[{"num": [[1, 0]], "den": [[-1, 0], [1, 0]]}]]}})
    code, out, _ = run(["check-hyponormal", "--symbol", sym, "--section", "8"])
    assert code == 1
    assert json.loads(out)["report"]["error"] == "PoleOnCircle"


@pytest.mark.parametrize("exc", [RootFindingFailure("no convergence"), np.linalg.LinAlgError("SVD did not converge")])
def test_numerical_failure_exit_2(monkeypatch, exc):
    import toeplitz_lab.cli as cli

    def boom(*args, **kwargs):
        raise exc

    monkeypatch.setattr(cli, "hyponormal_psd_test", boom)
    code, out, err = run(["check-hyponormal", "--symbol", "zbar_a2.json", "--section", "8"])
    assert code == 2
    assert json.loads(out)["report"]["error"] == type(exc).__name__
    assert "numerical failure" in err
