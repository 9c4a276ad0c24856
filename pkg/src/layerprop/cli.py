"""Batch command line: parse files, dispatch checks, report verdicts.

Exit codes: 0 success (valid/certified/equal/found), 1 malformed input,
2 check failed (invalid/refuted/distinct), 3 budget exhausted (unknown).
Output is deterministic for fixed inputs; ``--json`` switches the report
to a machine-readable envelope.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import ccs as ccs_mod
from . import chem as chem_mod
from . import circuits as cx
from . import diagram as dg
from . import jsonio
from . import rewrite as rw
from . import sexpr, terms
from .errors import LayerPropError, MalformedInput
from .explain import (check_counterfactual, check_explanation_1,
                      check_explanation_2)
from .rewrite import NotFound, RuleEngine
from .semantics import verify_rule_semantics
from .theory import SystemOfLayers, validate_system

OK, MALFORMED, FAILED, EXHAUSTED = 0, 1, 2, 3

STATUS_EXIT = {"valid": OK, "certified": OK, "refuted": FAILED,
               "invalid": FAILED, "unknown": EXHAUSTED}


def _load_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedInput(f"cannot read {path}: {exc}")


def _load_system(path: str) -> SystemOfLayers:
    sys_ = jsonio.system_from_json(_load_json(path))
    report = validate_system(sys_)
    if not report.ok:
        raise MalformedInput("invalid theory: " + "; ".join(report.violations))
    return sys_


def _load_diagram(sys_: SystemOfLayers, spec: str) -> dg.Diagram:
    """A diagram file, an s-expression file, or a generator reference."""
    path = Path(spec)
    if path.exists():
        text = path.read_text(encoding="utf-8")
        if text.lstrip().startswith("("):
            return terms.build(sexpr.parse_term(text), sys_)
        return jsonio.diagram_from_json(sys_, json.loads(text))
    if ":" in spec:
        layer, gen = spec.split(":", 1)
        return dg.gen_box(sys_, layer, gen)
    hits = [name for name in sorted(sys_.layers)
            if spec in {g.name for g in sys_.layer(name).gen_morphisms}]
    if len(hits) == 1:
        return dg.gen_box(sys_, hits[0], spec)
    raise MalformedInput(
        f"{spec!r} is neither a readable file nor a unique generator name")


def _report(args, payload: dict, lines: list[str]) -> None:
    if getattr(args, "json", False):
        sys.stdout.write(jsonio.dumps(payload))
    else:
        for line in lines:
            print(line)


def _verdict_exit(args, verdict, extra: dict | None = None) -> int:
    payload = {"verdict": jsonio.verdict_to_json(verdict)}
    if extra:
        payload.update(extra)
    lines = [f"status: {verdict.status}"]
    lines += [f"  {r}" for r in verdict.reasons]
    if verdict.witness is not None:
        lines.append(f"  witness: {len(verdict.witness.steps)} steps")
        for step in verdict.witness.steps:
            lines.append(f"    {step.orientation} {step.rule.name}")
    _report(args, payload, lines)
    return STATUS_EXIT[verdict.status]


def cmd_check_theory(args) -> int:
    sys_ = jsonio.system_from_json(_load_json(args.system))
    report = validate_system(sys_)
    payload = {"ok": report.ok, "violations": report.violations}
    lines = (["theory: ok"] if report.ok else
             ["theory: invalid"] + [f"  {v}" for v in report.violations])
    _report(args, payload, lines)
    return OK if report.ok else FAILED


def cmd_typecheck(args) -> int:
    sys_ = _load_system(args.system)
    if args.term is not None:
        term = sexpr.parse_term(args.term)
        sort = terms.infer_sort(term, sys_)
        d = terms.build(term, sys_)
    else:
        d = _load_diagram(sys_, args.diagram)
        sort = d.sort
    payload = {"sort": jsonio.diagram_to_json(d)["sort"]}
    _report(args, payload, [f"sort: {sort.pretty()}"])
    return OK


def cmd_eq(args) -> int:
    sys_ = _load_system(args.system)
    a = _load_diagram(sys_, args.diagrams[0])
    b = _load_diagram(sys_, args.diagrams[1])
    if dg.structural_eq(a, b):
        _report(args, {"result": "equal", "mode": "structural"},
                ["equal (structurally)"])
        return OK
    res = dg.layer_eq(a, b, args.budget)
    payload = {"result": res.status, "mode": "modulo-equations"}
    _report(args, payload, [res.status])
    return {"equal": OK, "distinct": FAILED, "unknown": EXHAUSTED}[res.status]


def cmd_derive(args) -> int:
    sys_ = _load_system(args.system)
    src = _load_diagram(sys_, args.src)
    dst = _load_diagram(sys_, args.dst)
    engine = RuleEngine(sys_, _collapse_pairs(args))
    out = rw.find_derivation(src, dst, args.budget, engine)
    if isinstance(out, NotFound):
        _report(args, {"result": "not-found", "budget": out.budget},
                [f"no derivation within budget {out.budget}"])
        return EXHAUSTED
    payload = {"result": "found",
               "derivation": jsonio.derivation_to_json(out)}
    lines = [f"derivation with {len(out.steps)} steps"]
    lines += [f"  {m.orientation} {m.rule.name}" for m in out.steps]
    _report(args, payload, lines)
    if args.out:
        Path(args.out).write_text(
            jsonio.dumps(jsonio.derivation_to_json(out)), encoding="utf-8")
    return OK


def _collapse_pairs(args) -> list[tuple[str, str]]:
    pairs = []
    for item in getattr(args, "collapse", None) or ():
        src, tgt = item.split(">", 1)
        pairs.append((src, tgt))
    return pairs


def cmd_explain(args) -> int:
    sys_ = _load_system(args.system)
    sigma = _load_diagram(sys_, args.sigma)
    e = _load_diagram(sys_, args.diagram)
    engine = RuleEngine(sys_, _collapse_pairs(args))
    verdict = check_explanation_1(e, sigma, args.budget, engine)
    return _verdict_exit(args, verdict)


def cmd_explain2(args) -> int:
    sys_ = _load_system(args.system)
    engine = RuleEngine(sys_, _collapse_pairs(args))
    dv = jsonio.derivation_from_json(sys_, _load_json(args.derivation),
                                     engine)
    verdict = check_explanation_2(dv, args.layer, args.equation)
    return _verdict_exit(args, verdict)


def cmd_counterfactual(args) -> int:
    sys_ = _load_system(args.system)
    sigma = _load_diagram(sys_, args.sigma)
    e = _load_diagram(sys_, args.diagram)
    engine = RuleEngine(sys_, _collapse_pairs(args))
    verdict = check_counterfactual(e, sigma, args.budget, engine)
    return _verdict_exit(args, verdict)


def cmd_semantics_verify(args) -> int:
    sys_ = _load_system(args.system)
    model = jsonio.model_from_json(sys_, _load_json(args.model))
    problems = model.validate()
    for cat in model.categories.values():
        problems += cat.validate_monoidal()
    for f in model.functors.values():
        problems += f.validate()
    if problems:
        _report(args, {"ok": False, "violations": problems},
                ["model invalid:"] + [f"  {p}" for p in problems])
        return MALFORMED
    words = {}
    for name, lay in sys_.layers.items():
        pool = [()]
        pool += [(s,) for s in lay.gen_objects]
        if args.max_word >= 2:
            pool += [(s, t) for s in lay.gen_objects
                     for t in lay.gen_objects]
        words[name] = pool
    engine = RuleEngine(sys_)
    rules = rw.sample_instances(engine, words)
    failures = []
    checked = 0
    for rule in rules:
        if rule.name.startswith("A3c["):
            continue
        checked += 1
        if not verify_rule_semantics(rule, model, cap=args.cap):
            failures.append(rule.name)
    payload = {"checked": checked, "failures": failures}
    lines = [f"verified {checked} rule instances"]
    lines += [f"  FAILED {name}" for name in failures]
    _report(args, payload, lines)
    return OK if not failures else FAILED


def cmd_chem(args) -> int:
    cs = chem_mod.build_chem_system()
    if args.emit:
        _emit_chem(cs, Path(args.emit))
    verdict = chem_mod.check_glucose_explanation(cs, args.budget)
    return _verdict_exit(args, verdict, {"case": "glucose-phosphorylation"})


def _emit_chem(cs, outdir: Path) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "chem.json").write_text(
        jsonio.dumps(jsonio.system_to_json(cs.system)), encoding="utf-8")
    (outdir / "glucose.json").write_text(
        jsonio.dumps(jsonio.diagram_to_json(cs.explanation)),
        encoding="utf-8")
    (outdir / "sigma.json").write_text(
        jsonio.dumps(jsonio.diagram_to_json(cs.explained)), encoding="utf-8")


def cmd_ccs(args) -> int:
    if args.lts:
        process = ccs_mod.parse_process(args.lts)
        sys.stdout.write(ccs_mod.lts_dot(process))
        return OK
    cs = ccs_mod.build_ccs_system()
    if args.emit:
        outdir = Path(args.emit)
        outdir.mkdir(parents=True, exist_ok=True)
        (outdir / "ccs.json").write_text(
            jsonio.dumps(jsonio.system_to_json(cs.system)), encoding="utf-8")
        (outdir / "red1.json").write_text(
            jsonio.dumps(jsonio.diagram_to_json(cs.explained)),
            encoding="utf-8")
        (outdir / "lts1.json").write_text(
            jsonio.dumps(jsonio.diagram_to_json(cs.explanation)),
            encoding="utf-8")
        (outdir / "lts2.json").write_text(
            jsonio.dumps(jsonio.diagram_to_json(cs.counterfactual)),
            encoding="utf-8")
    valid, counter = ccs_mod.check_ccs_fixtures(cs, args.budget)
    payload = {"explanation": jsonio.verdict_to_json(valid),
               "counterfactual": jsonio.verdict_to_json(counter)}
    lines = [f"explanation: {valid.status}",
             f"counterfactual: {counter.status}"]
    _report(args, payload, lines)
    code = max(STATUS_EXIT[valid.status], STATUS_EXIT[counter.status])
    return code


def _ratfunc_from_param(raw) -> cx.RatFunc:
    if isinstance(raw, (int, float, str)):
        return cx.RatFunc.const(Fraction(str(raw)))
    if isinstance(raw, dict):
        return cx.RatFunc.make(
            [Fraction(str(x)) for x in raw.get("s_poly_num", [0])],
            [Fraction(str(x)) for x in raw.get("s_poly_den", [1])])
    raise MalformedInput(f"bad scalar parameter {raw!r}")


def _ratfunc_to_json(r: cx.RatFunc) -> dict:
    return {"s_poly_num": [str(x) for x in r.num],
            "s_poly_den": [str(x) for x in r.den]}


def cmd_circuit(args) -> int:
    cs = cx.build_circuit_system()
    if args.emit:
        outdir = Path(args.emit)
        outdir.mkdir(parents=True, exist_ok=True)
        (outdir / "circuit.json").write_text(
            jsonio.dumps(jsonio.system_to_json(cs.system)), encoding="utf-8")
    if args.file:
        bipoles = []
        for raw in _load_json(args.file):
            bipoles.append(cx.Bipole(raw["kind"],
                                     _ratfunc_from_param(raw["param"])))
        z = cx.boxing_B(bipoles)
        rel = cx.wrapping_W(z)
        payload = {
            "impedance_rows": [[_ratfunc_to_json(x) for x in row]
                               for row in z.relation.rows],
            "wrapped_rows": [[_ratfunc_to_json(x) for x in row]
                             for row in rel.rows]}
        _report(args, payload,
                [f"impedance relation: {len(z.relation.rows)} constraints",
                 f"wrapped two-port: {len(rel.rows)} constraints"])
        return OK
    verdict = cx.check_series_explanation(cs, args.budget)
    return _verdict_exit(args, verdict, {"case": "series-resistors"})


def cmd_export_dot(args) -> int:
    sys_ = _load_system(args.system)
    d = _load_diagram(sys_, args.diagram)
    sys.stdout.write(dg.export_dot(d))
    return OK


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="layerprop",
        description="multi-layer string diagram kernel")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, budget_default=10_000):
        p.add_argument("--json", action="store_true",
                       help="machine-readable output")
        p.add_argument("--budget", type=int, default=budget_default,
                       help="rewrite application budget")
        p.add_argument("--collapse", action="append", metavar="SRC>TGT",
                       help="enable window collapse for a faithful functor")

    p = sub.add_parser("check-theory", help="validate a theory file")
    p.add_argument("--system", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_check_theory)

    p = sub.add_parser("typecheck", help="sort of a term or diagram")
    p.add_argument("--system", required=True)
    p.add_argument("--term", help="s-expression term")
    p.add_argument("--diagram", help="diagram file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_typecheck)

    p = sub.add_parser("eq", help="equality of two diagrams")
    p.add_argument("--system", required=True)
    p.add_argument("diagrams", nargs=2)
    common(p, budget_default=256)
    p.set_defaults(func=cmd_eq)

    p = sub.add_parser("derive", help="search for a rewrite derivation")
    p.add_argument("--system", required=True)
    p.add_argument("--src", required=True)
    p.add_argument("--dst", required=True)
    p.add_argument("--out", help="write the derivation here")
    common(p)
    p.set_defaults(func=cmd_derive)

    p = sub.add_parser("explain", help="check an explanation of a morphism")
    p.add_argument("--system", required=True)
    p.add_argument("--sigma", required=True,
                   help="explained morphism: file or generator name")
    p.add_argument("--diagram", required=True, help="the explanation")
    common(p)
    p.set_defaults(func=cmd_explain)

    p = sub.add_parser("explain2",
                       help="check an explanation of an equation")
    p.add_argument("--system", required=True)
    p.add_argument("--derivation", required=True)
    p.add_argument("--layer", required=True)
    p.add_argument("--equation", required=True)
    common(p)
    p.set_defaults(func=cmd_explain2)

    p = sub.add_parser("counterfactual",
                       help="check a counterfactual explanation")
    p.add_argument("--system", required=True)
    p.add_argument("--sigma", required=True)
    p.add_argument("--diagram", required=True)
    common(p, budget_default=2_000)
    p.set_defaults(func=cmd_counterfactual)

    p = sub.add_parser("semantics-verify",
                       help="verify rule families over a finite model")
    p.add_argument("--system", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--max-word", type=int, default=2)
    p.add_argument("--cap", type=int, default=1_000_000,
                   help="natural transformation search cap")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_semantics_verify)

    p = sub.add_parser("chem", help="reaction case study")
    p.add_argument("--emit", help="write fixture files to this directory")
    common(p, budget_default=600)
    p.set_defaults(func=cmd_chem)

    p = sub.add_parser("ccs", help="process calculus case study")
    p.add_argument("--emit", help="write fixture files to this directory")
    p.add_argument("--lts", metavar="PROCESS",
                   help="print the reachable transition graph as DOT")
    common(p, budget_default=400)
    p.set_defaults(func=cmd_ccs)

    p = sub.add_parser("circuit", help="electrical circuit case study")
    p.add_argument("--emit", help="write fixture files to this directory")
    p.add_argument("--file", help="evaluate a one-wire circuit file")
    common(p, budget_default=3_000)
    p.set_defaults(func=cmd_circuit)

    p = sub.add_parser("export-dot", help="render a diagram as DOT")
    p.add_argument("--system", required=True)
    p.add_argument("--diagram", required=True)
    p.set_defaults(func=cmd_export_dot)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except MalformedInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return MALFORMED
    except LayerPropError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return MALFORMED


if __name__ == "__main__":
    sys.exit(main())
