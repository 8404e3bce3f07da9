"""Batch command-line front end.

JSON on stdout by default (byte-identical for identical inputs), with
--pretty switching to indented output.  Exit codes: 0 success, 1 domain
error (reported as {"error": ...}), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import coding, complexity, evaluate, forcing, models, proofs, schemas, syntax
from .enumeration import SizedEnumerator
from .syntax import LogicError


def workbench_signature() -> syntax.Signature:
    """Arithmetic core plus every fresh predicate the schemata introduce."""
    sig = syntax.arith_signature()
    for name, arity in (("T", 1), ("S", 2), ("D", 2), ("R", 3), ("T1", 1), ("T2", 1), ("X", 1), ("in", 2)):
        sig = sig.with_relation(name, arity)
    return sig.with_function("H", 1)


def _dump(obj, pretty: bool) -> str:
    if pretty:
        return json.dumps(obj, sort_keys=True, indent=2) + "\n"
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def _read_json(path: str):
    with open(path) as fh:
        return json.load(fh)


def _read_formula_lines(path: str, sig) -> list:
    with open(path) as fh:
        return [syntax.parse(line, sig) for line in fh if line.strip()]


def _load_truth(path: str) -> dict[int, bool]:
    return {int(code): bool(value) for code, value in _read_json(path)}


def _cmd_parse(args, out):
    sig = workbench_signature()
    f = syntax.parse(args.formula, sig)
    out(
        {
            "sexpr": syntax.render(f),
            "ast": syntax.to_json(f),
            "freeVars": sorted(syntax.free_vars(f)),
        }
    )
    return 0


def _cmd_classify(args, out):
    sig = workbench_signature()
    f = syntax.parse(args.formula, sig)
    r = complexity.rank(f)
    out({"sigma": r.sigma, "pi": r.pi, "dp": complexity.dp(f), "pdp": complexity.pdp(f)})
    return 0


def _cmd_encode(args, out):
    sig = workbench_signature()
    f = syntax.parse(args.formula, sig)
    out({"code": str(coding.encode(f)), "sexpr": syntax.render(f)})
    return 0


def _cmd_decode(args, out):
    x = coding.decode(int(args.code))
    if isinstance(x, syntax.Formula):
        out({"kind": "formula", "sexpr": syntax.render(x), "ast": syntax.to_json(x)})
    else:
        out({"kind": "term", "sexpr": syntax.render_term(x), "ast": syntax.term_to_json(x)})
    return 0


def _iter_schema_sources(schema: str, max_size: int):
    """Deterministic small-formula sources for the streaming generator."""
    sig = syntax.arith_signature()
    enum = SizedEnumerator(sig, ("v0",))
    if schema in ("tb", "twotb"):
        return [f for f in enum.formulas_up_to(max_size) if not syntax.free_vars(f)]
    return [f for f in enum.formulas_up_to(max_size) if syntax.free_vars(f) == {"v0"}]


def _cmd_gen_schema(args, out):
    max_code = int(args.max_code) if args.max_code is not None else None
    emitted = []
    sources = _iter_schema_sources(args.schema, args.max_size)
    if max_code is not None:
        sources = [f for f in sources if coding.encode(f) <= max_code]
    sources = sources[: args.count]

    instances: list[tuple[tuple, syntax.Formula]] = []
    if args.schema == "tb":
        instances = [((coding.encode(f),), schemas.tb_axiom(f)) for f in sources]
    elif args.schema == "usb":
        instances = [((coding.encode(f),), schemas.usb_axiom(f)) for f in sources]
    elif args.schema == "def":
        instances = [((coding.encode(f),), schemas.def_axiom(f)) for f in sources]
    elif args.schema == "utb-term":
        terms = [coding.numeral(n) for n in range(4)]
        for f in sources[: max(1, args.count // 4)]:
            for t in terms:
                instances.append(((coding.encode(f), coding.encode(t)), schemas.utb_term_instance(f, t)))
    elif args.schema == "skolem":
        instances = [((coding.encode(f),), schemas.skolem_axiom(f)) for f in sources]
    elif args.schema == "uskolem":
        for f in sources:
            v = next(iter(syntax.free_vars(f)))
            instances.append(((coding.encode(f),), schemas.us_axiom(f, v, "y")))
    elif args.schema == "twotb":
        for f in sources:
            for g in sources:
                instances.append(((coding.encode(f), coding.encode(g)), schemas.twotb_axiom(f, g)))
        instances = instances[: args.count]
    elif args.schema == "rsat":
        sig = workbench_signature()
        ptype = _read_formula_lines(args.ptype, sig) if args.ptype else []
        batch = schemas.rsat_instances(ptype, args.p_code, args.cutoff)
        instances = batch.instances
    else:
        raise LogicError(f"unknown schema {args.schema!r}")

    lines = []
    manifest = []
    for source, inst in instances[: args.count]:
        lines.append(syntax.render(inst))
        manifest.append(
            {
                "schema": args.schema,
                "source": [str(c) for c in source],
                "instance": str(coding.encode(inst)),
            }
        )
    sys.stdout.write("".join(line + "\n" for line in lines))
    if args.manifest:
        with open(args.manifest, "w") as fh:
            json.dump(manifest, fh, sort_keys=True, indent=2)
            fh.write("\n")
    return 0


def _cmd_eval(args, out):
    sig = workbench_signature()
    if args.formula is not None:
        formulas = [syntax.parse(args.formula, sig)]
    else:
        formulas = [syntax.parse(line, sig) for line in sys.stdin if line.strip()]
    rels = {}
    if args.truth:
        oracle = _load_truth(args.truth)
        rels["T"] = lambda c: oracle.get(c, False)
    asn = {k: int(v) for k, v in json.loads(args.assign).items()} if args.assign else {}
    budget = evaluate.EvalBudget(search_bound=args.budget)
    results = []
    for f in formulas:
        verdict = evaluate.eval_nat(f, asn, budget, rels=rels or None)
        results.append(
            {
                "formula": syntax.render(f),
                "verdict": verdict.value,
                "exact": evaluate.all_quantifiers_bounded(f),
            }
        )
    out(results[0] if args.formula is not None else results)
    return 0


def _cmd_check_model(args, out):
    model = models.FiniteModel.from_json(_read_json(args.model))
    out(models.check_as(model).to_json())
    return 0


def _cmd_definables(args, out):
    model = models.FiniteModel.from_json(_read_json(args.model))
    out(models.definable_elements(model, args.size).to_json())
    return 0


def _cmd_autos(args, out):
    model = models.FiniteModel.from_json(_read_json(args.model))
    out(models.automorphisms(model).to_json())
    return 0


def _cmd_nequiv(args, out):
    a = models.FiniteModel.from_json(_read_json(args.model_a))
    b = models.FiniteModel.from_json(_read_json(args.model_b))
    out(models.n_equiv(a, b, args.level, args.size).to_json())
    return 0


def _cmd_force(args, out):
    sig = forcing.set_signature()
    f = syntax.parse(args.formula, sig)
    s = forcing.parse_condition(args.condition)
    status = forcing.forces(s, f, mode=args.mode, budget=args.budget)
    out(
        {
            "condition": forcing.condition_str(s),
            "formula": syntax.render(f),
            "mode": args.mode,
            "status": status.value,
            "bitBound": forcing.bit_bound(f),
        }
    )
    return 0


def _cmd_build_generic(args, out):
    sig = forcing.set_signature()
    phis = _read_formula_lines(args.phis, sig)
    xis = _read_formula_lines(args.xis, syntax.arith_signature())
    oracle = _load_truth(args.truth)

    def truth(sentence):
        code = coding.encode(sentence)
        if code not in oracle:
            raise LogicError(f"truth oracle missing code {code}")
        return oracle[code]

    trace = forcing.build_generic(args.stages, phis, xis, truth)
    out(trace.to_json())
    return 0


def _cmd_audit(args, out):
    sig = forcing.set_signature()
    phis = _read_formula_lines(args.phis, sig)
    trace = forcing.StageTrace.from_json(_read_json(args.trace))
    entries = forcing.audit_genericity(trace, phis)
    out({"entries": [e.to_json() for e in entries]})
    return 0


def _cmd_check_ct(args, out):
    oracle = evaluate.TruthOracle.from_json(_read_json(args.truth), args.depth, args.numerals)
    report = evaluate.check_ct(oracle, args.depth, args.numerals)
    out(report.to_json())
    return 0


def _cmd_check_compositional(args, out):
    model = models.FiniteModel.from_json(_read_json(args.model))
    sig = workbench_signature()
    fs = _read_formula_lines(args.formulas, sig)
    table = {}
    for code, asn_pairs, value in _read_json(args.table):
        key = tuple(sorted((v, e) for v, e in asn_pairs))
        table[(int(code), key)] = bool(value)
    violations = evaluate.check_compositional(table, fs, model)
    out({"ok": not violations, "violations": [v.to_json() for v in violations]})
    return 0


def _cmd_check_proof(args, out):
    sig = workbench_signature()
    proof = proofs.Proof.from_json(_read_json(args.proof), sig)
    premises = _read_formula_lines(args.premises, sig) if args.premises else []
    out(proofs.check_proof(proof, premises).to_json())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="metalogic")
    parser.add_argument("--pretty", action="store_true", help="indent the JSON output")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("parse", help="parse surface syntax, print AST")
    p.add_argument("formula")
    p.set_defaults(handler=_cmd_parse)

    p = sub.add_parser("classify", help="alternation rank, dp and pdp")
    p.add_argument("formula")
    p.set_defaults(handler=_cmd_classify)

    p = sub.add_parser("encode", help="Godel code of a formula")
    p.add_argument("formula")
    p.set_defaults(handler=_cmd_encode)

    p = sub.add_parser("decode", help="decode a Godel code")
    p.add_argument("code")
    p.set_defaults(handler=_cmd_decode)

    p = sub.add_parser("gen-schema", help="stream axiom schema instances")
    p.add_argument("--schema", required=True,
                   choices=["tb", "usb", "def", "utb-term", "skolem", "uskolem", "twotb", "rsat"])
    p.add_argument("--max-code", default=None)
    p.add_argument("--max-size", type=int, default=5)
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--manifest", default=None)
    p.add_argument("--ptype", default=None, help="file of formulas (rsat)")
    p.add_argument("--p-code", type=int, default=0)
    p.add_argument("--cutoff", type=int, default=1)
    p.set_defaults(handler=_cmd_gen_schema)

    p = sub.add_parser("eval", help="three-valued evaluation over N")
    p.add_argument("--formula", default=None, help="read from stdin when omitted")
    p.add_argument("--budget", type=int, default=64)
    p.add_argument("--assign", default=None, help='JSON object {"var": value}')
    p.add_argument("--truth", default=None, help="truth oracle file for the T predicate")
    p.set_defaults(handler=_cmd_eval)

    p = sub.add_parser("check-model", help="adjunctive-set and extensionality check")
    p.add_argument("--model", required=True)
    p.set_defaults(handler=_cmd_check_model)

    p = sub.add_parser("definables", help="definable-element report")
    p.add_argument("--model", required=True)
    p.add_argument("--size", type=int, default=7)
    p.set_defaults(handler=_cmd_definables)

    p = sub.add_parser("autos", help="automorphism search")
    p.add_argument("--model", required=True)
    p.set_defaults(handler=_cmd_autos)

    p = sub.add_parser("nequiv", help="bounded elementary-equivalence comparison")
    p.add_argument("--model-a", required=True)
    p.add_argument("--model-b", required=True)
    p.add_argument("--level", type=int, default=1)
    p.add_argument("--size", type=int, default=3)
    p.set_defaults(handler=_cmd_nequiv)

    p = sub.add_parser("force", help="forcing decision for one condition/formula")
    p.add_argument("--condition", required=True)
    p.add_argument("--formula", required=True)
    p.add_argument("--mode", choices=["exact", "budget"], default="exact")
    p.add_argument("--budget", type=int, default=64)
    p.set_defaults(handler=_cmd_force)

    p = sub.add_parser("build-generic", help="run the staged generic construction")
    p.add_argument("--stages", type=int, required=True)
    p.add_argument("--phis", required=True)
    p.add_argument("--xis", required=True)
    p.add_argument("--truth", required=True)
    p.set_defaults(handler=_cmd_build_generic)

    p = sub.add_parser("audit", help="genericity audit of a stage trace")
    p.add_argument("--trace", required=True)
    p.add_argument("--phis", required=True)
    p.set_defaults(handler=_cmd_audit)

    p = sub.add_parser("check-ct", help="compositional truth clause check")
    p.add_argument("--truth", required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--numerals", type=int, required=True)
    p.set_defaults(handler=_cmd_check_ct)

    p = sub.add_parser("check-compositional", help="Tarskian clause check of a table")
    p.add_argument("--model", required=True)
    p.add_argument("--table", required=True)
    p.add_argument("--formulas", required=True)
    p.set_defaults(handler=_cmd_check_compositional)

    p = sub.add_parser("check-proof", help="validate a Hilbert-style proof")
    p.add_argument("--proof", required=True)
    p.add_argument("--premises", default=None)
    p.set_defaults(handler=_cmd_check_proof)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    def out(obj):
        sys.stdout.write(_dump(obj, args.pretty))

    try:
        return args.handler(args, out)
    except LogicError as e:
        sys.stdout.write(_dump({"error": str(e)}, args.pretty))
        return 1
    except FileNotFoundError as e:
        sys.stdout.write(_dump({"error": str(e)}, args.pretty))
        return 1


if __name__ == "__main__":
    sys.exit(main())
