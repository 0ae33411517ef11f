"""Command line front end: decide, unify, check-proof, eval, certify.

Exit codes: 0 provable/unifiable/true/accepted, 1 the negative verdict,
2 parse error, 3 limit exceeded, 4 plain-mode violation, 5 model-invariant
failure.  All JSON outputs carry the schema tag "jref-1".
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional

from .calculus import EmptyProof, check_proof, line_from_json
from .model import (
    NotInjective,
    SharpnessViolation,
    build_countermodel,
    countermodel_from_json,
    countermodel_to_json,
    _countermodel_fragment,
)
from .saturation import (
    DEFAULT_MAX_NODES,
    DEFAULT_MAX_STEPS,
    LimitExceeded,
    MalformedCertificate,
    certificate_from_json,
    certificate_to_json,
    decide,
    replay_certificate,
)
from .substitution import SubstitutionError
from .syntax import ParseError, parse_formula, parse_term, print_expr
from .unification import (
    PLAIN,
    REFERENTIAL,
    ConditionalProblem,
    PlainModeError,
    mgu,
)

SCHEMA = "jref-1"

EXIT_POSITIVE = 0
EXIT_NEGATIVE = 1
EXIT_PARSE = 2
EXIT_LIMIT = 3
EXIT_PLAIN = 4
EXIT_MODEL = 5


def _read_input(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as handle:
        return handle.read()


def _emit(data: dict, as_json: bool, text_lines: list[str]) -> None:
    if as_json:
        print(json.dumps(data, indent=2, sort_keys=True))
    else:
        for line in text_lines:
            print(line)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _cmd_decide(args) -> int:
    try:
        formula = parse_formula(_read_input(args.input))
    except (OSError, ParseError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    trace = (lambda s: print(s)) if args.trace else None
    try:
        decision = decide(formula, max_steps=args.max_steps, max_nodes=args.max_nodes, trace=trace)
    except LimitExceeded as exc:
        print(f"limit exceeded: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    as_json = args.format == "json"
    if decision.provable:
        payload = {
            "schema": SCHEMA,
            "command": "decide",
            "formula": print_expr(formula),
            "verdict": "provable",
            "steps": decision.steps,
            "nodes": decision.nodes,
            "certificate": certificate_to_json(decision.certificate),
        }
        _emit(payload, as_json, [
            f"provable: {print_expr(formula)}",
            f"steps={decision.steps} nodes={decision.nodes}",
        ])
        return EXIT_POSITIVE
    model, interp = build_countermodel(decision.leaf, formula)
    counter = countermodel_to_json(model, interp, formula)
    counter["schema"] = SCHEMA
    payload = {
        "schema": SCHEMA,
        "command": "decide",
        "formula": print_expr(formula),
        "verdict": "unprovable",
        "steps": decision.steps,
        "nodes": decision.nodes,
        "countermodel": counter,
    }
    _emit(payload, as_json, [
        f"unprovable: {print_expr(formula)}",
        f"steps={decision.steps} nodes={decision.nodes}",
        "countermodel: " + json.dumps(counter, sort_keys=True),
    ])
    return EXIT_NEGATIVE


def _parse_problem(text: str, mode: str) -> ConditionalProblem:
    clauses = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=>" in line:
            cond_text, eq_text = line.split("=>", 1)
        else:
            cond_text, eq_text = "false = false", line
        clauses.append(_parse_equation(cond_text) + _parse_equation(eq_text))
    return ConditionalProblem(tuple(clauses), mode)


def _parse_equation(text: str):
    parts = text.split("=")
    if len(parts) != 2:
        raise ParseError(f"expected one '=' in {text.strip()!r}", 1, 1)
    lhs, rhs = parts[0].strip(), parts[1].strip()
    try:
        return (parse_formula(lhs), parse_formula(rhs))
    except ParseError:
        return (parse_term(lhs), parse_term(rhs))


def _cmd_unify(args) -> int:
    mode = PLAIN if args.plain else REFERENTIAL
    try:
        prob = _parse_problem(_read_input(args.input), mode)
    except PlainModeError as exc:
        print(f"plain mode: {exc}", file=sys.stderr)
        return EXIT_PLAIN
    except (OSError, ParseError, ValueError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    theta = mgu(prob)
    as_json = args.format == "json"
    if theta is None:
        _emit(
            {"schema": SCHEMA, "command": "unify", "verdict": "not_unifiable"},
            as_json, ["not unifiable"],
        )
        return EXIT_NEGATIVE
    payload = {
        "schema": SCHEMA,
        "command": "unify",
        "verdict": "unifiable",
        "mgu": theta.to_json_dict(),
    }
    _emit(payload, as_json, [
        "unifiable",
        "mgu: " + json.dumps(theta.to_json_dict(), sort_keys=True),
    ])
    return EXIT_POSITIVE


def _cmd_check_proof(args) -> int:
    try:
        data = json.loads(_read_input(args.input))
        lines = [line_from_json(entry) for entry in data]
        verdict = check_proof(lines)
    except EmptyProof as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (OSError, ParseError, ValueError, KeyError, TypeError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    as_json = args.format == "json"
    if verdict.ok:
        _emit(
            {"schema": SCHEMA, "command": "check-proof", "ok": True,
             "theorem": print_expr(verdict.theorem)},
            as_json, [f"theorem: {print_expr(verdict.theorem)}"],
        )
        return EXIT_POSITIVE
    _emit(
        {"schema": SCHEMA, "command": "check-proof", "ok": False,
         "first_bad_line": verdict.first_bad_line},
        as_json, [f"bad line: {verdict.first_bad_line}"],
    )
    return EXIT_NEGATIVE


def _cmd_eval(args) -> int:
    try:
        data = json.loads(_read_input(args.input))
        model, interp, formula = countermodel_from_json(data)
    except (OSError, ParseError, SubstitutionError, ValueError, KeyError, TypeError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        fragment = _countermodel_fragment(model, formula)
        checks = model.check(fragment)
        declared = data.get("checks", {})
        for name, key in (("sharp", "sharp"), ("injective", "injective")):
            if name in declared and bool(declared[name]) != checks[key]:
                print(f"model invariant: declared {name}={declared[name]} "
                      f"but checked {checks[key]}", file=sys.stderr)
                return EXIT_MODEL
        if model.sharp_mode and not checks["sharp"]:
            print("model invariant: sharp mode but not sharp", file=sys.stderr)
            return EXIT_MODEL
        value = interp.eval(formula)
    except (SharpnessViolation, NotInjective) as exc:
        print(f"model invariant: {exc}", file=sys.stderr)
        return EXIT_MODEL
    payload = {
        "schema": SCHEMA,
        "command": "eval",
        "formula": print_expr(formula),
        "value": value,
        "checks": {"sharp": checks["sharp"], "injective": checks["injective"]},
    }
    _emit(payload, args.format == "json", [
        f"value: {str(value).lower()}",
        f"checks: sharp={checks['sharp']} injective={checks['injective']}",
    ])
    return EXIT_POSITIVE if value else EXIT_NEGATIVE


def _cmd_certify(args) -> int:
    try:
        data = json.loads(_read_input(args.input))
        formula = parse_formula(data["formula"])
        cert = certificate_from_json(data["certificate"])
    except (OSError, ParseError, MalformedCertificate, ValueError, KeyError, TypeError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        ok = replay_certificate(formula, cert, max_steps=args.max_steps, max_nodes=args.max_nodes)
    except LimitExceeded as exc:
        print(f"limit exceeded: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    print("certificate ok" if ok else "certificate rejected")
    return EXIT_POSITIVE if ok else EXIT_NEGATIVE


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def _default_max_steps() -> int:
    value = os.environ.get("JREF_MAX_STEPS")
    return int(value) if value else DEFAULT_MAX_STEPS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jref",
        description="Decision procedure and tools for referential justification logic.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_limits=True):
        p.add_argument("input", help="input file, or - for stdin")
        p.add_argument("--format", choices=("text", "json"), default="text")
        if with_limits:
            p.add_argument("--max-steps", type=int, default=_default_max_steps())
            p.add_argument("--max-nodes", type=int, default=DEFAULT_MAX_NODES)

    p = sub.add_parser("decide", help="decide provability of a formula")
    common(p)
    p.add_argument("--trace", action="store_true", help="print each block transition")
    p.set_defaults(func=_cmd_decide)

    p = sub.add_parser("unify", help="solve a conditional unification problem")
    common(p, with_limits=False)
    p.add_argument("--plain", action="store_true",
                   help="non-comprehensive mode; rejects goal variables")
    p.set_defaults(func=_cmd_unify)

    p = sub.add_parser("check-proof", help="check a structured Hilbert proof")
    common(p, with_limits=False)
    p.set_defaults(func=_cmd_check_proof)

    p = sub.add_parser("eval", help="evaluate a formula in a model")
    common(p, with_limits=False)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("certify", help="replay a provability certificate")
    common(p)
    p.set_defaults(func=_cmd_certify)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
