"""Command-line front end.

Every subcommand prints a JSON report on stdout and a one-line summary on
stderr.  Exit codes: 0 when a verdict was computed, 1 on bad input, 2 when
the numerics failed.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Any, Sequence

import jsonschema
import numpy as np

from . import __version__
from .blaschke import FiniteBlaschke, hermite_witness, lemma312_test
from .criteria import (
    classify,
    find_blaschke_witness,
    hyponormal_psd_test,
    nakazi_takahashi_check,
    operator_normality_test,
    remark311_family,
    symbol_normality_check,
    witness_certify,
)
from .errors import InputError, NumericalError, SchemaViolation, UnknownSubcommand
from .hardy_ops import certified_length, hankel_section, kernel_invariance, numerical_rank_and_kernel, self_commutator_section
from .blaschke import coanalytic_inner
from .shifts import cowen_long_report, cowen_long_weights, moment_sequence
from .symbol import MatrixSymbol
from .tolerances import INVARIANCE_TOL, verdict_tol

_SIG_DIGITS = 12
_SNAP = 1e-13

_COMPLEX = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
_POLY = {"type": "array", "items": _COMPLEX, "minItems": 1}
_RATIONAL = {
    "oneOf": [
        {
            "type": "object",
            "properties": {"num": _POLY, "den": _POLY},
            "required": ["num"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "laurent": {"type": "object", "patternProperties": {"^-?[0-9]+$": _COMPLEX}, "additionalProperties": False}
            },
            "required": ["laurent"],
            "additionalProperties": False,
        },
    ]
}
_MATRIX = {
    "type": "object",
    "properties": {
        "n": {"type": "integer", "minimum": 1},
        "entries": {"type": "array", "minItems": 1, "items": {"type": "array", "minItems": 1, "items": _RATIONAL}},
    },
    "required": ["entries"],
    "additionalProperties": False,
}
_BLASCHKE = {
    "type": "object",
    "properties": {
        "phase": _COMPLEX,
        "zeros": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {"alpha": _COMPLEX, "mult": {"type": "integer", "minimum": 1}},
                "required": ["alpha"],
                "additionalProperties": False,
            },
        },
    },
    "required": ["zeros"],
    "additionalProperties": False,
}
SYMBOL_FILE_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "schema_version": {"const": 1},
        "id": {"type": "string"},
        "symbol": _MATRIX,
        "witness": _MATRIX,
        "theta": _BLASCHKE,
        "expected": {"type": "object"},
    },
    "required": ["schema_version", "id", "symbol"],
    "additionalProperties": False,
}

SUBCOMMANDS = (
    "check-normal",
    "check-hyponormal",
    "certify-witness",
    "classify",
    "remark311",
    "kronecker-rank",
    "cowen-long",
    "lemma312",
)


# ---------------------------------------------------------------------------
# Serialization


def _round(x: float) -> float:
    if not math.isfinite(x):
        return x
    if abs(x) < _SNAP:
        return 0.0
    return float(f"{x:.{_SIG_DIGITS}g}")


def _normalize(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _normalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_normalize(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _round(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return [_round(obj.real), _round(obj.imag)]
    if isinstance(obj, np.ndarray):
        return _normalize(obj.tolist())
    return obj


def _meta() -> dict:
    return {"tool": "toeplitz-lab", "version": __version__, "tolerance": verdict_tol()}


def emit_report(report: dict, fmt: str = "json") -> str:
    """Deterministic serialization: insertion key order, 12 significant digits."""
    body = _normalize(report)
    if fmt == "json":
        return json.dumps({"meta": _normalize(_meta()), "report": body}, indent=2, allow_nan=True) + "\n"
    if fmt == "text":
        lines = [f"# toeplitz-lab {__version__}"]
        _flatten(body, "", lines)
        return "\n".join(lines) + "\n"
    raise InputError(f"unknown format {fmt!r}")


def _flatten(obj, prefix: str, lines: list[str]) -> None:
    if isinstance(obj, dict) and obj:
        for k, v in obj.items():
            _flatten(v, f"{prefix}.{k}" if prefix else k, lines)
    else:
        lines.append(f"{prefix or 'report'}: {json.dumps(obj)}")


def parse_report(text: str) -> dict:
    return json.loads(text)["report"]


# ---------------------------------------------------------------------------
# Inputs


def _load_json(arg: str) -> Any:
    """Accept either inline JSON or a path to a UTF-8 JSON file."""
    text = arg.strip()
    if not text.startswith(("{", "[")):
        try:
            text = Path(arg).read_text(encoding="utf-8")
        except OSError as exc:
            raise InputError(f"cannot read {arg}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON in {arg}: {exc}") from exc


def load_symbol_file(arg: str) -> dict:
    data = _load_json(arg)
    try:
        jsonschema.validate(data, SYMBOL_FILE_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise SchemaViolation(f"symbol file: {exc.message}") from exc
    out = {"id": data["id"], "symbol": MatrixSymbol.from_json(data["symbol"]), "expected": data.get("expected")}
    out["witness"] = MatrixSymbol.from_json(data["witness"]) if "witness" in data else None
    out["theta"] = FiniteBlaschke.from_json(data["theta"]) if "theta" in data else None
    return out


def load_theta(arg: str) -> FiniteBlaschke:
    data = _load_json(arg)
    try:
        jsonschema.validate(data, _BLASCHKE)
    except jsonschema.ValidationError as exc:
        raise SchemaViolation(f"theta: {exc.message}") from exc
    return FiniteBlaschke.from_json(data)


_MISSING = object()


def _lookup(report: dict, key: str):
    if key in report:
        return report[key]
    for sub in ("checks", "evidence"):
        block = report.get(sub)
        if isinstance(block, dict) and key in block:
            val = block[key]
            return val.get("pass") if isinstance(val, dict) and "pass" in val else val
    return _MISSING


def _expectations(report: dict, expected: dict | None) -> dict:
    """Compare expected values against the keys this report carries; others are skipped."""
    if not expected:
        return {}
    out = {}
    for key, want in expected.items():
        got = _lookup(report, key)
        if got is _MISSING:
            continue
        got = _normalize(got)
        out[key] = {"expected": want, "actual": got, "ok": got == _normalize(want)}
    return out


# ---------------------------------------------------------------------------
# Subcommands


def _section(args, phi: MatrixSymbol) -> int:
    return args.section if args.section else certified_length(phi)


def cmd_check_normal(args) -> tuple[dict, str]:
    sf = load_symbol_file(args.symbol)
    phi = sf["symbol"]
    N = _section(args, phi)
    sym = symbol_normality_check(phi)
    s = self_commutator_section(phi, N)
    op = operator_normality_test(phi, N)
    report = {
        "symbol_id": sf["id"],
        "checks": {"symbol_normal": sym.normal, "operator_normal": op},
        "evidence": {"symbol_defect": sym.defect, "commutator_norm": float(np.linalg.norm(s.matrix, 2)), "tail": s.tail_bound, "N": N},
    }
    return report, f"{sf['id']}: symbol normal={sym.normal}, operator normal={op}"


def cmd_check_hyponormal(args) -> tuple[dict, str]:
    sf = load_symbol_file(args.symbol)
    phi = sf["symbol"]
    N = _section(args, phi)
    v = hyponormal_psd_test(phi, N, witness=sf["witness"])
    report = {
        "symbol_id": sf["id"],
        "verdict": v.verdict,
        "evidence": {"min_eig": v.min_eigenvalue, "max_eig": v.max_eigenvalue, "tail": v.tail_bound, "N": N},
    }
    return report, f"{sf['id']}: {v.verdict} (min eigenvalue {v.min_eigenvalue:.3g})"


def cmd_certify_witness(args) -> tuple[dict, str]:
    sf = load_symbol_file(args.symbol)
    k = MatrixSymbol.from_json(_load_json(args.witness)) if args.witness else sf["witness"]
    if k is None:
        raise InputError("no witness given")
    c = witness_certify(sf["symbol"], k)
    report = {
        "symbol_id": sf["id"],
        "certified": c.certified,
        "checks": {"contractive": c.norm_ok, "analytic_difference": c.analytic_ok},
        "evidence": {"max_norm": c.max_norm, "refined_max_norm": c.refined_max, "residue_max": c.residue_max, "coefficient_max": c.coefficient_max},
    }
    return report, f"{sf['id']}: witness certified={c.certified}"


def cmd_classify(args) -> tuple[dict, str]:
    sf = load_symbol_file(args.symbol)
    phi = sf["symbol"]
    r = classify(phi, _section(args, phi), symbol_id=sf["id"])
    return r.to_json(), f"{sf['id']}: {r.conclusion}"


def cmd_remark311(args) -> tuple[dict, str]:
    theta = load_theta(args.theta)
    bundle = remark311_family(theta)
    phi = bundle.symbol
    N = args.section or 32
    s = self_commutator_section(phi, N)
    err = float(np.linalg.norm(s.matrix - bundle.predicted_commutator(N), 2))
    inv = kernel_invariance(phi, N, max(2, theta.degree + 1))
    sym = symbol_normality_check(phi)
    op = operator_normality_test(phi, N)
    wit = witness_certify(phi, bundle.witness)
    rk = numerical_rank_and_kernel(s, 1e-8, certify=False)
    ok = err <= 1e-7 and inv.residual <= INVARIANCE_TOL and sym.defect <= 1e-8 and not op and wit.certified
    report = {
        "theta": theta.to_json(),
        "N": N,
        "verified": ok,
        "checks": {
            "commutator_matches_prediction": err <= 1e-7,
            "kernel_invariant": inv.residual <= INVARIANCE_TOL,
            "symbol_normal": sym.normal,
            "operator_normal": op,
            "witness_certified": wit.certified,
        },
        "evidence": {
            "prediction_error": err,
            "residual": inv.residual,
            "symbol_defect": sym.defect,
            "rank": rk.rank,
            "predicted_rank": bundle.predicted_rank,
            "top_eigenvalue": float(np.linalg.eigvalsh(s.matrix)[-1]),
            "tail": s.tail_bound,
        },
    }
    return report, f"family of degree {theta.degree}: verified={ok}"


def cmd_kronecker_rank(args) -> tuple[dict, str]:
    sf = load_symbol_file(args.symbol)
    phi = sf["symbol"]
    thetas = [coanalytic_inner(e) for row in phi.coanalytic.entries for e in row]
    degree = sum(t.degree for t in thetas) if phi.n == 1 else None
    if phi.n == 1:
        N = args.section or degree + 12
    else:
        N = args.section or 32
    h = hankel_section(phi, N)
    rk = numerical_rank_and_kernel(h, 1e-7, certify=False)
    report = {"symbol_id": sf["id"], "N": N, "rank": rk.rank, "degree": degree, "tail": h.tail_bound}
    if degree is not None:
        report["rank_equals_degree"] = rk.rank == degree
    return report, f"{sf['id']}: Hankel rank {rk.rank}"


def cmd_cowen_long(args) -> tuple[dict, str]:
    report = cowen_long_report(args.alpha, args.k)
    g = moment_sequence(cowen_long_weights(args.alpha, 2 * args.k))
    report["moments"] = g.moments[: min(len(g), 4)].tolist()
    return report, f"alpha={args.alpha}, k={args.k}: {report['verdict']}"


def cmd_lemma312(args) -> tuple[dict, str]:
    sf = load_symbol_file(args.symbol)
    theta = load_theta(args.theta) if args.theta else sf["theta"]
    if theta is None:
        raise InputError("no theta given")
    b = sf["symbol"]
    v = lemma312_test(b, theta)
    report: dict[str, Any] = {
        "symbol_id": sf["id"],
        "coprime": v.coprime,
        "failing_zeros": [complex(a) for a in v.failing_zeros],
        "determinants": [{"alpha": complex(a), "det": complex(d)} for a, d in v.determinants],
    }
    if v.failing_zeros:
        w = hermite_witness(b, theta, v.failing_zeros[0])
        report["witness"] = {"alpha0": complex(w.alpha0), "coeffs": [[complex(c) for c in row] for row in w.coeffs], "residual": w.residual}
    return report, f"{sf['id']}: coprime={v.coprime}"


_HANDLERS = {
    "check-normal": cmd_check_normal,
    "check-hyponormal": cmd_check_hyponormal,
    "certify-witness": cmd_certify_witness,
    "classify": cmd_classify,
    "remark311": cmd_remark311,
    "kronecker-rank": cmd_kronecker_rank,
    "cowen-long": cmd_cowen_long,
    "lemma312": cmd_lemma312,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="toeplitz-lab", description="Normality and hyponormality checks for rational block Toeplitz operators.")
    p.add_argument("--format", choices=("json", "text"), default="json")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    for name in ("check-normal", "check-hyponormal", "certify-witness", "classify", "kronecker-rank"):
        sp = sub.add_parser(name)
        sp.add_argument("--symbol", required=True, help="symbol file (path or inline JSON)")
        sp.add_argument("--section", type=int, default=None, help="section length N")
        if name == "certify-witness":
            sp.add_argument("--witness", default=None, help="witness matrix symbol JSON")
    sp = sub.add_parser("remark311")
    sp.add_argument("--theta", required=True, help="Blaschke product JSON")
    sp.add_argument("--section", type=int, default=None)
    sp = sub.add_parser("cowen-long")
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp = sub.add_parser("lemma312")
    sp.add_argument("--symbol", required=True, help="cofactor B as a symbol file")
    sp.add_argument("--theta", default=None, help="Blaschke product JSON")
    return p


def run_command(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    fmt = "json"
    try:
        positional = [a for a in argv if not a.startswith("-")]
        if positional and positional[0] not in SUBCOMMANDS and argv[0] != "--format":
            raise UnknownSubcommand(f"unknown subcommand {positional[0]!r}; choose from {', '.join(SUBCOMMANDS)}")
        args = build_parser().parse_args(argv)
        fmt = args.format
        if args.command is None:
            raise UnknownSubcommand(f"missing subcommand; choose from {', '.join(SUBCOMMANDS)}")
        report, summary = _HANDLERS[args.command](args)
        expected = None
        if getattr(args, "symbol", None):
            expected = load_symbol_file(args.symbol).get("expected")
        exp = _expectations(report, expected)
        if exp:
            report["expectations"] = exp
            bad = [k for k, v in exp.items() if not v["ok"]]
            summary += f"; expectations {'met' if not bad else 'FAILED: ' + ', '.join(bad)}"
    except InputError as exc:
        stdout.write(emit_report({"error": type(exc).__name__, "message": str(exc)}, fmt))
        stderr.write(f"input error: {exc}\n")
        return 1
    except (NumericalError, np.linalg.LinAlgError, FloatingPointError) as exc:
        stdout.write(emit_report({"error": type(exc).__name__, "message": str(exc)}, fmt))
        stderr.write(f"numerical failure: {exc}\n")
        return 2
    stdout.write(emit_report(report, fmt))
    stderr.write(summary + "\n")
    return 0


def main() -> None:
    sys.exit(run_command())
