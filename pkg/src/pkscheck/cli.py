"""Command-line front end: ``pkscheck check``, ``pkscheck oracle`` and friends.

Exit status 0 means the analysis completed, whatever the verdict. Input
errors give 2, internal invariant breaches give 3.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .automata import ltl_to_buchi
from .documents import (
    DocumentError,
    automaton_id,
    automaton_to_doc,
    dumps,
    load_automaton,
    load_model,
    model_id,
)
from .engine import ModelValidationError, UnknownAtomError, Value, check, negated_closed_property
from .ltl import LtlSyntaxError, parse_ltl
from .oracle import OracleCapError, model_satisfies
from .pks import CompletionCapError, enumerate_completions, reachable_states, validate
from .product import format_lasso
from .proof import check_proof, proof_to_doc, render_markdown

EXIT_OK, EXIT_INPUT, EXIT_INTERNAL = 0, 2, 3


class InputError(Exception):
    pass


class InternalError(Exception):
    pass


# ---------------------------------------------------------------------------
# shared input handling


def _read_property(args) -> tuple[str, object]:
    if args.property_file is not None:
        try:
            text = Path(args.property_file).read_text(encoding="utf-8").strip()
        except OSError as exc:
            raise InputError(f"{args.property_file}: {exc.strerror}") from None
        source = str(args.property_file)
    else:
        text, source = args.property, "property"
    try:
        return text, parse_ltl(text)
    except LtlSyntaxError as exc:
        raise InputError(f"{source}: {exc}") from None


def _read_model(path, strict: bool):
    try:
        m = load_model(path)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    except DocumentError as exc:
        raise InputError(str(exc)) from None
    problems = [str(v) for v in validate(m)]
    if strict and not problems:
        unreachable = sorted(set(m.states) - set(reachable_states(m)))
        problems += [f"unreachable-state: state {s} is not reachable from an initial state" for s in unreachable]
        used = {p for s in m.states for p in m.labels[s]}
        problems += [f"unused-atom: atom {p} labels no state" for p in m.atoms if p not in used]
    if problems:
        raise InputError(f"{path}: invalid model\n" + "\n".join(f"  {p}" for p in problems))
    return m


def _read_automaton(path):
    if path is None:
        return None
    try:
        return load_automaton(path)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    except DocumentError as exc:
        raise InputError(str(exc)) from None


def _write(text: str, out):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


# ---------------------------------------------------------------------------
# check


def _product_doc(p) -> dict:
    return {
        "nodes": [str(n) for n in p.nodes],
        "initial": [str(p.nodes[i]) for i in p.initial],
        "accepting": [str(n) for n in p.nodes if p.is_accepting(n)],
        "edges": [[str(u), str(v)] for u, v in p.edges()],
    }


def result_document(m, prop_text: str, v, *, emit_proof=True, emit_counterexample=True, emit_product=False) -> dict:
    doc = {
        "tool": {"name": "pkscheck", "version": __version__},
        "model": model_id(m),
        "automaton": automaton_id(v.automaton),
        "property": prop_text,
        "verdict": v.value.value,
    }
    if emit_counterexample:
        cx = None
        if v.lasso is not None:
            pre, cyc = v.lasso.states()
            cx = {
                "source": v.lasso_source,
                "text": format_lasso(pre, cyc),
                "states": {"prefix": list(pre), "cycle": list(cyc)},
                "trace": {"prefix": [str(n) for n in v.lasso.prefix], "cycle": [str(n) for n in v.lasso.cycle]},
                "trace_text": str(v.lasso),
            }
        doc["counterexample"] = cx
    if emit_proof:
        doc["proof"] = None if v.proof is None else {"source": v.proof_source, **proof_to_doc(v.proof)}
    if emit_product:
        doc["product"] = {"pessimistic": _product_doc(v.pessimistic_run.product),
                          "optimistic": _product_doc(v.optimistic_run.product)}
        doc["automaton_document"] = automaton_to_doc(v.automaton)
    return doc


def _render_markdown(doc, v) -> str:
    lines = ["# pkscheck result", "", f"Property: `{doc['property']}`", "", f"Verdict: **{doc['verdict']}**", ""]
    cx = doc.get("counterexample")
    if cx:
        lines += [f"## Counterexample ({cx['source']} approximation)", "",
                  f"States: {cx['text']}", "", f"Product trace: `{cx['trace_text']}`", ""]
    if doc.get("proof"):
        lines += [f"## Proof ({doc['proof']['source']} approximation)", "", render_markdown(v.proof)]
    return "\n".join(lines).rstrip("\n") + "\n"


def _render_plain(doc, v) -> str:
    lines = [f"property: {doc['property']}", f"verdict: {doc['verdict']}"]
    cx = doc.get("counterexample")
    if cx:
        lines += [f"counterexample ({cx['source']}): {cx['text']}", f"trace: {cx['trace_text']}"]
    if doc.get("proof"):
        lines.append(f"proof ({doc['proof']['source']}):")
        for i, st in enumerate(v.proof.steps, 1):
            comp = ", ".join(map(str, st.component))
            concl = "; ".join(map(str, st.conclusions))
            lines.append(f"  {i:>3}. {st.kind:<10} {comp}  =>  {concl}")
    return "\n".join(lines) + "\n"


def cmd_check(args) -> int:
    m = _read_model(args.model, args.strict_validate)
    prop_text, phi = _read_property(args)
    a = _read_automaton(args.automaton)
    try:
        v = check(m, phi, a)
    except (ModelValidationError, UnknownAtomError) as exc:
        raise InputError(str(exc)) from None
    if v.proof is not None:
        product = v.pessimistic_run.product if v.proof_source == "pessimistic" else v.optimistic_run.product
        report = check_proof(product, v.proof)
        if not report.accepted:
            raise InternalError(f"generated proof rejected by the checker: {report}")
    doc = result_document(m, prop_text, v, emit_proof=args.emit_proof,
                          emit_counterexample=args.emit_counterexample, emit_product=args.emit_product)
    if args.format == "json":
        text = dumps(doc)
    elif args.format == "markdown":
        text = _render_markdown(doc, v)
    else:
        text = _render_plain(doc, v)
    _write(text, args.output)
    return EXIT_OK


# ---------------------------------------------------------------------------
# oracle


def oracle_document(m, prop_text, phi, verdict: Value, cap: int) -> dict:
    rows = []
    for i, c in enumerate(enumerate_completions(m, cap)):
        assignment = {f"{s}.{p}": c.labels[s][p] for s, p in m.unknowns()}
        rows.append({"index": i, "assignment": assignment,
                     "result": "satisfy" if model_satisfies(c, phi) else "violate"})
    results = {r["result"] for r in rows}
    if verdict is Value.TRUE:
        consistent = results == {"satisfy"}
    elif verdict is Value.FALSE:
        consistent = results == {"violate"}
    else:
        consistent = True  # maybe makes no claim about the completions
    return {
        "model": model_id(m),
        "property": prop_text,
        "verdict": verdict.value,
        "completions": rows,
        "summary": {"satisfy": sum(r["result"] == "satisfy" for r in rows),
                    "violate": sum(r["result"] == "violate" for r in rows)},
        "consistent": consistent,
    }


def cmd_oracle(args) -> int:
    m = _read_model(args.model, args.strict_validate)
    prop_text, phi = _read_property(args)
    if len(m.unknowns()) > args.max_unknowns:
        raise InputError(f"{len(m.unknowns())} unknown (state, atom) pairs exceed --max-unknowns {args.max_unknowns}")
    try:
        v = check(m, phi)
        doc = oracle_document(m, prop_text, phi, v.value, args.max_unknowns)
    except (ModelValidationError, UnknownAtomError, CompletionCapError, OracleCapError) as exc:
        raise InputError(str(exc)) from None
    if not doc["consistent"]:
        raise InternalError(f"verdict {v.value.value} contradicts the completions: {doc['summary']}")
    if args.format == "json":
        text = dumps(doc)
    else:
        lines = [f"property: {prop_text}", f"verdict: {doc['verdict']}"]
        for r in doc["completions"]:
            assign = " ".join(f"{k}={'T' if b else 'F'}" for k, b in r["assignment"].items())
            lines.append(f"{r['index']:>4}  {r['result']:<8} {assign}".rstrip())
        lines.append(f"satisfy={doc['summary']['satisfy']} violate={doc['summary']['violate']} consistent={doc['consistent']}")
        text = "\n".join(lines) + "\n"
    _write(text, args.output)
    return EXIT_OK


# ---------------------------------------------------------------------------
# translate and verify-fixture


def cmd_translate(args) -> int:
    prop_text, phi = _read_property(args)
    a = ltl_to_buchi(negated_closed_property(phi) if args.negate else phi)
    _write(dumps(automaton_to_doc(a)), args.output)
    return EXIT_OK


def cmd_verify_fixture(args) -> int:
    from .fixtures import verify_fixture

    report = verify_fixture()
    _write(str(report) + "\n", args.output)
    return EXIT_OK if report.ok else EXIT_INTERNAL


# ---------------------------------------------------------------------------
# argument parsing


def _add_property(p):
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--property", "-p", help="LTL property text")
    g.add_argument("--property-file", help="file holding the LTL property")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pkscheck", description="Three-valued LTL model checking of partial Kripke structures.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="check a property and emit verdict, counterexample and proof")
    c.add_argument("--model", "-m", required=True, help="PKS document (JSON)")
    _add_property(c)
    c.add_argument("--automaton", help="use this automaton for the negated property instead of translating it")
    c.add_argument("--format", "-f", choices=("json", "markdown", "plain"), default="json")
    c.add_argument("--emit-proof", action=argparse.BooleanOptionalAction, default=True)
    c.add_argument("--emit-counterexample", action=argparse.BooleanOptionalAction, default=True)
    c.add_argument("--emit-product", action=argparse.BooleanOptionalAction, default=False)
    c.add_argument("--strict-validate", action="store_true",
                   help="also reject unreachable states and unused atoms")
    c.add_argument("--seed", type=int, default=0, help="reserved; the analysis is deterministic")
    c.add_argument("--output", "-o", help="write the document here instead of stdout")
    c.set_defaults(func=cmd_check)

    o = sub.add_parser("oracle", help="check every completion by brute force")
    o.add_argument("--model", "-m", required=True)
    _add_property(o)
    o.add_argument("--format", "-f", choices=("json", "plain"), default="json")
    o.add_argument("--max-unknowns", type=int, default=20)
    o.add_argument("--strict-validate", action="store_true")
    o.add_argument("--output", "-o")
    o.set_defaults(func=cmd_oracle)

    t = sub.add_parser("translate", help="print the Büchi automaton of a property")
    _add_property(t)
    t.add_argument("--negate", action="store_true", help="translate the negated, complement-closed property")
    t.add_argument("--output", "-o")
    t.set_defaults(func=cmd_translate)

    f = sub.add_parser("verify-fixture", help="replay the bundled stereo fixture")
    f.add_argument("--output", "-o")
    f.set_defaults(func=cmd_verify_fixture)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"pkscheck: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InternalError as exc:
        print(f"pkscheck: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # invariant breach somewhere in the core
        print(f"pkscheck: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
