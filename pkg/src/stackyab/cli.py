"""Command-line entry point emitting canonical JSON reports over every solver."""

from __future__ import annotations

import argparse
import json
import re
import sys
import time
from math import lcm

import numpy as np

from .artin_schreier import classify_primitive, field_create, frobenius_character, pdisc_check
from .cohomology import restriction_map, schur_multiplier, second_cohomology
from .crossed import check_crossed_module, check_strictly_stable
from .errors import (
    MAX_COHOMOLOGY_ORDER,
    MAX_ORDER,
    NO_DEADLINE,
    AxiomFailure,
    Deadline,
    DeadlineExceeded,
)
from .groupio import group_from_spec, xmod_from_spec
from .groups import abelianization, center, commutator_subgroup, is_perfect, subgroup_generated
from .rootdata import cartan_matrix, fundamental_group_ss
from .snf import smith_normal_form
from .truecomm import stacky_abelianization, true_commutator, verify_p1, verify_p3

__all__ = ["main", "build_parser"]

P1_COEFFICIENTS = ([2], [3], [4])


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if x is None or isinstance(x, str):
        return x
    raise TypeError(f"non-canonical value {x!r} in report")


def _check(name: str, ok, counterexample=None) -> dict:
    out = {"name": name, "verdict": "pass" if ok else "fail"}
    if not ok and counterexample is not None:
        out["counterexample"] = _jsonable(counterexample)
    return out


def _load_doc(path: str) -> dict:
    text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    doc = json.loads(text)
    if not isinstance(doc, dict):
        raise ValueError("input file must hold a JSON object")
    return doc


def _group_cap(args) -> int:
    return args.max_order if args.max_order is not None else MAX_ORDER


def _coh_cap(args) -> int:
    return args.max_order if args.max_order is not None else MAX_COHOMOLOGY_ORDER


def _deadline(args) -> Deadline:
    return NO_DEADLINE if args.deadline_ms is None else Deadline(args.deadline_ms)


def _parse_factors(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        raise ValueError(f"bad factor list {text!r}") from None


# -- command handlers: each returns (inputs, results, checks) ----------------


def cmd_group_info(args):
    doc = _load_doc(args.file)
    g = group_from_spec(doc, max_order=_group_cap(args))
    orders = g.element_orders()
    values, counts = np.unique(orders, return_counts=True)
    exponent = 1
    for v in values.tolist():
        exponent = lcm(exponent, int(v))
    results = {
        "order": g.order,
        "abelian": g.is_abelian(),
        "perfect": is_perfect(g),
        "center_order": center(g).order,
        "derived_order": commutator_subgroup(g).order,
        "abelianization": abelianization(g).group.invariant_factors,
        "exponent": exponent,
        "conjugacy_classes": len(g.conjugacy_classes()[1]),
        "element_order_histogram": {str(int(v)): int(c) for v, c in zip(values, counts)},
    }
    return {"group": doc}, results, [_check("group_axioms", True)]


def cmd_h2(args):
    doc = _load_doc(args.file)
    g = group_from_spec(doc, max_order=_group_cap(args))
    coeffs = _parse_factors(args.coefficients)
    h2 = second_cohomology(g, coeffs, max_order=_coh_cap(args))
    checks = [
        _check(f"basis_class_{i}_order", h2.class_order(b) == d, {"expected": d})
        for i, (b, d) in enumerate(zip(h2.basis, h2.factor_orders))
    ]
    results = {"invariant_factors": h2.factor_orders, "order": h2.order,
               "coefficients": h2.coefficients.invariant_factors}
    return {"group": doc, "coefficients": coeffs}, results, checks


def cmd_schur(args):
    doc = _load_doc(args.file)
    g = group_from_spec(doc, max_order=_group_cap(args))
    m = schur_multiplier(g, max_order=_coh_cap(args))
    exponent = 1
    for d in m.invariant_factors:
        exponent = lcm(exponent, d)
    results = {"invariant_factors": m.invariant_factors, "order": m.order}
    checks = [_check("exponent_divides_group_order", g.order % exponent == 0,
                     {"multiplier_exponent": exponent, "group_order": g.order})]
    return {"group": doc}, results, checks


def cmd_restrict(args):
    doc = _load_doc(args.file)
    g = group_from_spec(doc, max_order=_group_cap(args))
    gens = _parse_factors(args.subgroup)
    coeffs = _parse_factors(args.coefficients)
    s = subgroup_generated(g, gens, max_order=g.order)
    h2 = second_cohomology(g, coeffs, max_order=_coh_cap(args))
    rm = restriction_map(h2, s)
    checks = []
    for i, b in enumerate(h2.basis):
        restricted = rm.restrict_cocycle(b)
        restricted.validate()
        unit = tuple(1 if j == i else 0 for j in range(len(h2.factor_orders)))
        agreed = rm.target.class_coords(restricted) == rm.apply(unit)
        checks.append(_check(f"basis_class_{i}_restriction", agreed))
    results = {
        "subgroup_order": s.order,
        "source_factors": h2.factor_orders,
        "target_factors": rm.target.factor_orders,
        "matrix": rm.matrix.tolist(),
    }
    inputs = {"group": doc, "subgroup_generators": gens, "coefficients": coeffs}
    return inputs, results, checks


def cmd_xmod_check(args):
    doc = _load_doc(args.file)
    xm, bracket = xmod_from_spec(doc, max_order=_group_cap(args))
    report = check_crossed_module(xm)
    checks = [_check(f"crossed:{c.name}", c.ok, c.witness) for c in report.checks]
    if bracket is not None:
        stable = check_strictly_stable(bracket)
        checks += [_check(f"bracket:{c.name}", c.ok, c.witness) for c in stable.checks]
    results = {
        "H_order": xm.H.order,
        "G_order": xm.G.order,
        "has_bracket": bracket is not None,
    }
    return {"crossed_module": doc}, results, checks


def cmd_truecomm(args):
    doc = _load_doc(args.file)
    g = group_from_spec(doc, max_order=_group_cap(args))
    t = true_commutator(g, max_order=_coh_cap(args))
    pi0 = abelianization(g).group.invariant_factors
    results = {
        "aun": t.aun.invariant_factors,
        "derived_order": t.base.order,
        "pi0": pi0,
        "pi1": t.aun.invariant_factors,
    }
    if t.cover is None:
        results.update({"cover_order": None, "cover_perfect": None,
                        "p1": "absent", "p3": "absent"})
        checks = [_check("splitting_choice_reported", t.needs_splitting_choice)]
        return {"group": doc}, results, checks
    total = t.cover.total
    results["cover_order"] = total.order
    results["cover_perfect"] = is_perfect(total)
    p1 = verify_p1(g, t, P1_COEFFICIENTS, max_order=_coh_cap(args))
    results["p1"] = "pass" if p1.ok else "fail"
    checks = [_check("p1_pullbacks_vanish", p1.ok, p1.failures)]
    try:
        p3 = verify_p3(g, t, deadline=_deadline(args), max_order=_coh_cap(args))
        results["p3"] = "found" if p3.found else "exhausted"
        checks.append(_check("p3_descending_cover", p3.found, {"tried": p3.tried}))
    except DeadlineExceeded:
        results["p3"] = "deadline"
        checks.append(_check("p3_descending_cover", False, {"reason": "deadline"}))
    return {"group": doc}, results, checks


def cmd_stacky(args):
    doc = _load_doc(args.file)
    g = group_from_spec(doc, max_order=_group_cap(args))
    inputs = {"group": doc}
    try:
        st = stacky_abelianization(g, deadline=_deadline(args), max_order=_coh_cap(args))
    except (AxiomFailure, DeadlineExceeded) as exc:
        return inputs, {"error": str(exc)}, [_check("stacky_presentation", False, str(exc))]
    stable = check_strictly_stable(st.bracket)
    checks = [_check(f"bracket:{c.name}", c.ok, c.witness) for c in stable.checks]
    checks.append(_check("pi0_matches_abelianization",
                         st.pi0.invariant_factors == abelianization(g).group.invariant_factors))
    checks.append(_check("pi1_matches_aun",
                         st.pi1.invariant_factors == st.truecomm.aun.invariant_factors))
    results = {
        "pi0": st.pi0.invariant_factors,
        "pi1": st.pi1.invariant_factors,
        "objects": st.groupoid.presentation.G.order,
        "arrows_per_hom": st.pi1.order,
        "cover_order": st.groupoid.presentation.H.order,
    }
    return inputs, results, checks


def cmd_rootdata(args):
    m = re.fullmatch(r"([A-Ga-g])\s*([0-9]+)", args.label.strip())
    if m is None:
        raise ValueError(f"bad type/rank label {args.label!r}; expected forms like A3 or E8")
    type_label, rank = m.group(1).upper(), int(m.group(2))
    cm = cartan_matrix(type_label, rank)
    snf = smith_normal_form(cm.entries)
    fundamental = fundamental_group_ss(type_label, rank)
    results = {
        "type": type_label,
        "rank": rank,
        "cartan_matrix": cm.entries.tolist(),
        "invariant_factors": fundamental.invariant_factors,
        "order": fundamental.order,
        "snf": {
            "diagonal": snf.diagonal,
            "left": snf.left.tolist(),
            "right": snf.right.tolist(),
        },
    }
    checks = [
        _check("certificate_reconstructs_diagonal", snf.verify()),
        _check("factors_match_diagonal",
               fundamental.invariant_factors == snf.invariant_factors),
    ]
    return {"type": type_label, "rank": rank}, results, checks


def cmd_as_classify(args):
    fld = field_create(args.p, args.e)
    found = classify_primitive(fld, args.max_degree)
    expected = {()} | {((1, c),) for c in range(1, fld.q)}
    got = {h.key() for h in found}
    results = {
        "p": fld.p,
        "e": fld.e,
        "modulus": fld.modulus_str(),
        "count": len(found),
        "classes": [str(h) for h in found],
    }
    checks = [_check("linear_family", got == expected,
                     {"missing": sorted(map(str, expected - got)),
                      "extra": sorted(map(str, got - expected))})]
    inputs = {"p": args.p, "e": args.e, "max_degree": args.max_degree}
    return inputs, results, checks


def cmd_as_char(args):
    fld = field_create(args.p, args.e)
    c = fld.parse(args.c)
    values = frobenius_character(c, fld)
    trace = [fld.trace(fld.mul(c, g)) for g in range(fld.q)]
    results = {
        "p": fld.p,
        "e": fld.e,
        "c": fld.show(c),
        "character": [[fld.show(g), int(v)] for g, v in enumerate(values.tolist())],
    }
    checks = [_check("matches_trace", values.tolist() == trace,
                     {"trace": trace, "character": values.tolist()})]
    return {"p": args.p, "e": args.e, "c": args.c}, results, checks


def cmd_as_pdisc(args):
    fld = field_create(args.p, args.e)
    inputs = {"p": args.p, "e": args.e}
    try:
        report = pdisc_check(fld)
    except AxiomFailure as exc:
        report = exc.report
        if report is None:
            raise
    results = {
        "p": fld.p,
        "e": fld.e,
        "field_size": fld.q,
        "image_size": report.image_size,
        "hom_count": report.hom_count,
        "bijective": report.bijective,
    }
    checks = [
        _check("injective", report.injective),
        _check("additive", report.additive),
        _check("bijective", report.bijective),
    ]
    return inputs, results, checks


# -- wiring -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--max-order", type=int, default=None,
                        help="override the group/cohomology size caps")
    common.add_argument("--deadline-ms", type=int, default=None,
                        help="cooperative deadline for cover searches")
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--timing", action="store_true",
                        help="include timing_ms in the report (breaks byte determinism)")

    top = argparse.ArgumentParser(prog="stackyab",
                                  description="finite covers, brackets and field classifiers")
    sub = top.add_subparsers(dest="cmd", required=True)

    group = sub.add_parser("group", help="group inspection")
    gsub = group.add_subparsers(dest="sub", required=True)
    p = gsub.add_parser("info", parents=[common], help="orders, center, abelianization")
    p.add_argument("file", help="group JSON file, or - for standard input")
    p.set_defaults(handler=cmd_group_info, command_path="group info")

    p = sub.add_parser("h2", parents=[common], help="second cohomology invariants")
    p.add_argument("file")
    p.add_argument("--coefficients", required=True, help="invariant factors, e.g. 2,4")
    p.set_defaults(handler=cmd_h2, command_path="h2")

    p = sub.add_parser("schur", parents=[common], help="Schur multiplier invariants")
    p.add_argument("file")
    p.set_defaults(handler=cmd_schur, command_path="schur")

    p = sub.add_parser("restrict", parents=[common], help="restriction matrix to a subgroup")
    p.add_argument("file")
    p.add_argument("--subgroup", required=True, help="generator indices, e.g. 0,3,5")
    p.add_argument("--coefficients", required=True)
    p.set_defaults(handler=cmd_restrict, command_path="restrict")

    xmod = sub.add_parser("xmod", help="crossed-module tools")
    xsub = xmod.add_subparsers(dest="sub", required=True)
    p = xsub.add_parser("check", parents=[common], help="verify the crossed-module axioms")
    p.add_argument("file")
    p.set_defaults(handler=cmd_xmod_check, command_path="xmod check")

    p = sub.add_parser("truecomm", parents=[common], help="true commutator cover report")
    p.add_argument("file")
    p.set_defaults(handler=cmd_truecomm, command_path="truecomm")

    p = sub.add_parser("stacky", parents=[common], help="stacky abelianization report")
    p.add_argument("file")
    p.set_defaults(handler=cmd_stacky, command_path="stacky")

    p = sub.add_parser("rootdata", parents=[common], help="fundamental group of a Cartan type")
    p.add_argument("label", help="type and rank, e.g. A3 or E8")
    p.set_defaults(handler=cmd_rootdata, command_path="rootdata")

    asp = sub.add_parser("as", help="additive-group extension classes over finite fields")
    assub = asp.add_subparsers(dest="sub", required=True)
    p = assub.add_parser("classify", parents=[common], help="scan for primitive classes")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--e", type=int, required=True)
    p.add_argument("--max-degree", type=int, required=True)
    p.set_defaults(handler=cmd_as_classify, command_path="as classify")
    p = assub.add_parser("char", parents=[common], help="Frobenius character of one scalar")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--e", type=int, required=True)
    p.add_argument("--c", required=True, help="field element as a polynomial in t")
    p.set_defaults(handler=cmd_as_char, command_path="as char")
    p = assub.add_parser("pdisc", parents=[common], help="dual-exhaustion check")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--e", type=int, required=True)
    p.set_defaults(handler=cmd_as_pdisc, command_path="as pdisc")

    return top


def _render_text(report: dict) -> str:
    lines = [f"command: {report['command']}"]
    lines.append("results:")
    for key in sorted(report["results"]):
        lines.append(f"  {key}: {json.dumps(report['results'][key], sort_keys=True)}")
    lines.append("checks:")
    for c in report["checks"]:
        extra = ""
        if "counterexample" in c:
            extra = f"  counterexample={json.dumps(c['counterexample'], sort_keys=True)}"
        lines.append(f"  {c['name']}: {c['verdict']}{extra}")
    if "timing_ms" in report:
        lines.append(f"timing_ms: {report['timing_ms']}")
    return "\n".join(lines) + "\n"


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    start = time.monotonic()
    try:
        inputs, results, checks = args.handler(args)
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    report = {
        "command": args.command_path,
        "inputs": _jsonable(inputs),
        "results": _jsonable(results),
        "checks": checks,
    }
    if args.timing:
        report["timing_ms"] = int((time.monotonic() - start) * 1000)
    if args.format == "json":
        sys.stdout.write(json.dumps(report, sort_keys=True, indent=2) + "\n")
    else:
        sys.stdout.write(_render_text(report))
    return 0 if all(c["verdict"] == "pass" for c in checks) else 1
