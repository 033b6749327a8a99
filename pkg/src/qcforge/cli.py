"""Command-line front end.

Commands
--------
check-algebra   parse a structure-equation file or catalog entry and gate
                it on integrability
qc-report       run the full verification pipeline on a qc coframe
build           assemble a metric family and report residuals, Ricci data
                and the curvature-span rank
symbolic        run a symbolic coefficient-system verification
sweep           run the complete acceptance suite

Exit codes: 0 pass, 1 verification failure, 2 parse error, 3 structural
precondition failure, 4 domain error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from fractions import Fraction

from . import __version__, acceptance, dga, qc
from .algebra import (AlgebraSyntaxError, DuplicateDifferential,
                      IndexOutOfRange, UnknownName, catalog, format_algebra,
                      jacobi_check, parse_algebra)
from .evolution import FAMILIES, NotEinsteinBase, build_family
from .poly import Poly
from .scalars import DomainError

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_PARSE = 2
EXIT_STRUCTURAL = 3
EXIT_DOMAIN = 4

_PARSE_ERRORS = (AlgebraSyntaxError, DuplicateDifferential, IndexOutOfRange,
                 UnknownName, ValueError)


def _sha256(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def _report(command: str, source: str, source_text: str, params: dict,
            ok: bool, results: dict) -> dict:
    return {
        "tool": "qcforge",
        "version": __version__,
        "command": command,
        "input": source,
        "input_sha256": _sha256(source_text),
        "params": {k: str(v) for k, v in params.items()},
        "ok": ok,
        "results": results,
    }


def _emit(report: dict, fmt: str):
    if fmt == "json":
        print(json.dumps(report, indent=2, sort_keys=True))
        return
    print(f"qcforge {report['version']}  {report['command']}  {report['input']}")
    if report["params"]:
        print("params: " + ", ".join(f"{k}={v}" for k, v in report["params"].items()))
    _emit_tree(report["results"], indent="  ")
    print(f"overall: {'PASS' if report['ok'] else 'FAIL'}")


def _emit_tree(node, indent=""):
    if isinstance(node, dict):
        for key, value in node.items():
            if isinstance(value, (dict, list)) and value and not _is_scalar_list(value):
                print(f"{indent}{key}:")
                _emit_tree(value, indent + "  ")
            else:
                print(f"{indent}{key}: {_fmt(value)}")
    elif isinstance(node, list):
        for value in node:
            print(f"{indent}- {_fmt(value)}")


def _is_scalar_list(value):
    return isinstance(value, list) and all(
        not isinstance(v, (dict, list)) for v in value)


def _fmt(value):
    if isinstance(value, bool) or value is None:
        return {True: "PASS", False: "FAIL", None: "n/a"}[value]
    if isinstance(value, float):
        return f"{value:.6g}"
    if isinstance(value, list):
        return "[" + ", ".join(_fmt(v) for v in value) + "]"
    return str(value)


def _load_source(args):
    if getattr(args, "catalog", None):
        spec = catalog(args.catalog)
        return f"catalog:{args.catalog}", format_algebra(spec.algebra, spec), spec
    path = args.file
    with open(path) as fh:
        text = fh.read()
    alg, spec = parse_algebra(text)
    return f"file:{path}", text, (spec if spec is not None else alg)


def _parse_params(pairs) -> dict:
    out = {}
    for pair in pairs or ():
        if "=" not in pair:
            raise ValueError(f"--param needs name=value, got {pair!r}")
        key, _, value = pair.partition("=")
        out[key.strip()] = Fraction(value.strip())
    return out


def _parse_samples(text):
    if not text:
        return None
    return [float(x) for x in text.replace(",", " ").split()]


def cmd_check_algebra(args) -> int:
    try:
        source, text, spec_or_alg = _load_source(args)
    except _PARSE_ERRORS as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    alg = spec_or_alg.algebra if hasattr(spec_or_alg, "algebra") else spec_or_alg
    rep = jacobi_check(alg)
    results = {
        "dim": alg.dim,
        "jacobi_ok": rep.ok,
        "violations": [f"d.d e{a} on (e{b},e{c},e{d}) = {v}"
                       for a, (b, c, d), v in rep.violations[:10]],
    }
    _emit(_report("check-algebra", source, text, {}, rep.ok, results), args.format)
    return EXIT_OK if rep.ok else EXIT_VERIFICATION


def cmd_qc_report(args) -> int:
    try:
        source, text, spec = _load_source(args)
    except _PARSE_ERRORS as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    if not hasattr(spec, "omega"):
        print("input has no qc block", file=sys.stderr)
        return EXIT_STRUCTURAL
    spec.validate()
    report = qc.analyze(spec, source)
    if not report.reeb_ok:
        results = {"reeb_ok": False, "violations": report.reeb_violations}
        _emit(_report("qc-report", source, text, {}, False, results), args.format)
        return EXIT_STRUCTURAL
    ok = all((report.scalar_crosscheck_ok, report.rho_crosscheck_ok,
              report.sp1curv_ok, report.lemma_closed))
    _emit(_report("qc-report", source, text, {}, ok, report.to_dict()), args.format)
    return EXIT_OK if ok else EXIT_VERIFICATION


def cmd_build(args) -> int:
    fam = FAMILIES.get(args.family)
    if fam is None:
        print(f"unknown family {args.family!r}; known: {', '.join(sorted(FAMILIES))}",
              file=sys.stderr)
        return EXIT_PARSE
    kind_ok = fam.kind.startswith(args.kind) or (args.kind == "qk" and fam.kind == "ideal")
    if not kind_ok:
        print(f"family {args.family} is not of kind {args.kind}", file=sys.stderr)
        return EXIT_PARSE
    if args.tol_residual <= 0 or args.tol_ricci <= 0:
        print("tolerances must be positive", file=sys.stderr)
        return EXIT_PARSE
    try:
        params = _parse_params(args.param)
        result = build_family(args.family, params=params or None,
                              samples=_parse_samples(args.samples))
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except NotEinsteinBase as exc:
        print(f"structural precondition failed: {exc}", file=sys.stderr)
        return EXIT_STRUCTURAL
    except ValueError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE

    tol_res = args.tol_residual
    tol_ric = args.tol_ricci
    verdicts = {}
    for system, value in result.get("ode_residuals", {}).items():
        verdicts[f"ode_{system}_ok"] = value < tol_res
    if result.get("kind") != "ode-only":
        if fam.kind == "ideal":
            verdicts["ideal_ok"] = result["ideal_residual"] < tol_res
            verdicts["not_closed_ok"] = result["dform_residual"] > 1e-3
        else:
            verdicts["closed_ok"] = result["dform_residual"] < tol_res
        if fam.kind == "spin7":
            verdicts["ricci_flat_ok"] = result["ricci_max_abs"] < tol_ric
        if "einstein_expected" in result:
            want = result["einstein_expected"]
            verdicts["einstein_ok"] = (
                abs(result["einstein_const"] - want) < tol_ric * abs(want)
                and result["einstein_deviation"] < tol_ric * abs(want))
        if "rank_min_expected" in result:
            verdicts["rank_ok"] = result["curvature_rank"] >= result["rank_min_expected"]
        if "rank_exact_expected" in result:
            verdicts["rank_ok"] = result["curvature_rank"] == result["rank_exact_expected"]
    result["verdicts"] = verdicts
    ok = all(verdicts.values())
    fam_text = f"{fam.name} {sorted(result['params'].items())}"
    _emit(_report("build", f"family:{args.family}", fam_text,
                  result["params"], ok, result), args.format)
    return EXIT_OK if ok else EXIT_VERIFICATION


_SYMBOLIC_TARGETS = ("closedqc", "qk-closure", "spin7-closure", "triaxial",
                     "hypo-evolution")


def cmd_symbolic(args) -> int:
    target = args.target
    results: dict = {}
    ok = True
    f, h = Poly.symbol("f"), Poly.symbol("h")
    fp, fpp = Poly.symbol("f'"), Poly.symbol("f''")
    s = Poly.symbol("S")
    if target == "closedqc":
        residual = dga.verify_closedqc()
        ok = residual.is_zero()
        results["d_combination"] = str(residual)
    elif target == "qk-closure":
        r = dga.verify_qk_closure()
        results["omega_omega_dt"] = str(r["omega_omega_dt"])
        results["mixed"] = str(r["mixed"])
        results["after_h_substitution"] = str(r["factored"])
        ok = (r["omega_omega_dt_sub"].is_zero()
              and r["factored"] == fp * (f * fpp - fp * fp + s * f))
    elif target == "spin7-closure":
        r = dga.verify_spin7_closure()
        results["omega_omega_dt"] = str(r["omega_omega_dt"])
        results["mixed"] = str(r["mixed"])
        results["after_h_substitution"] = str(r["factored"])
        ok = (r["omega_omega_dt_sub"].is_zero()
              and (-27) * r["factored"] == fp * (3 * f * fpp + fp * fp - 9 * s * f))
    elif target == "triaxial":
        t = dga.verify_triaxial_systems()
        results["qk_first"] = str(t["qk_first"])
        results["qk_rows"] = [str(p) for p in t["qk_rows"]]
        results["spin7_first"] = str(t["spin7_first"])
        results["spin7_rows"] = [str(p) for p in t["spin7_rows"]]
        results["ideal_rows"] = [str(p) for p in t["ideal_rows"]]
        ok = _triaxial_ok(t)
    elif target == "hypo-evolution":
        hy = dga.verify_hypo_evolution()
        qk_r = dga.verify_qk_closure()
        results["v_coeff"] = str(hy["v_coeff"])
        results["mixed"] = [str(m) for m in hy["mixed"]]
        ok = (hy["v_coeff"] == 3 * qk_r["omega_omega_dt"]
              and all(m == qk_r["mixed"] for m in hy["mixed"]))
    else:
        print(f"unknown target {target!r}; known: {', '.join(_SYMBOLIC_TARGETS)}",
              file=sys.stderr)
        return EXIT_PARSE
    _emit(_report("symbolic", f"target:{target}", target, {}, ok, results),
          args.format)
    return EXIT_OK if ok else EXIT_VERIFICATION


def _triaxial_ok(t) -> bool:
    f = t["f"]
    fs = t["fs"]
    prod, fsum = t["prod"], t["fsum"]
    fp, s = Poly.symbol("f'"), Poly.symbol("S")
    if t["qk_first"] != 2 * f * (3 * fp - 2 * fsum):
        return False
    if t["spin7_first"] != 2 * f * (fp - 2 * fsum):
        return False
    for i, j, k in ((1, 2, 3), (2, 3, 1), (3, 1, 2)):
        fi, fj, fk = fs[i - 1], fs[j - 1], fs[k - 1]
        fjp, fkp = Poly.symbol(f"f{j}'"), Poly.symbol(f"f{k}'")
        d_ffjfk = fp * fj * fk + f * fjp * fk + f * fj * fkp
        if t["qk_rows"][i - 1] != 2 * (d_ffjfk - s * f * (fi - fj - fk) - 6 * prod):
            return False
        if t["spin7_rows"][i - 1] != -2 * (d_ffjfk - 2 * prod):
            return False
        rel = (f * (fjp * fk + fj * fkp) - fp * fj * fk + 2 * prod
               - 2 * fj * fk * (fj + fk) + s * f * (fj + fk) - s * f * fi)
        if t["ideal_rows"][i - 1] != f * rel:
            return False
    return True


def cmd_sweep(args) -> int:
    results = acceptance.run_all(verbose=(args.format == "text"))
    ok = all(r[2] for r in results)
    if args.format == "json":
        payload = {
            "criteria": [{"number": n, "title": t, "ok": o, "detail": d}
                         for n, t, o, d in results],
        }
        _emit(_report("sweep", "acceptance", "acceptance", {}, ok, payload), "json")
    else:
        print(f"overall: {'PASS' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_VERIFICATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qcforge",
        description="exact exterior-calculus verification of quaternionic "
                    "contact coframes and their special-holonomy metric families")
    parser.add_argument("--version", action="version", version=f"qcforge {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_io(p, needs_input=True):
        if needs_input:
            group = p.add_mutually_exclusive_group(required=True)
            group.add_argument("--catalog", help="catalog name, e.g. l1 or heis(2)")
            group.add_argument("--file", help="structure-equation file")
        p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("check-algebra", help="parse and integrability-check a coframe")
    add_io(p)
    p.set_defaults(func=cmd_check_algebra)

    p = sub.add_parser("qc-report", help="full verification pipeline on a qc coframe")
    add_io(p)
    p.set_defaults(func=cmd_qc_report)

    p = sub.add_parser("build", help="assemble and verify a metric family")
    p.add_argument("kind", choices=("qk", "spin7"))
    p.add_argument("--family", required=True)
    p.add_argument("--param", action="append", metavar="NAME=VALUE")
    p.add_argument("--samples", help="comma-separated sample points")
    p.add_argument("--tol-residual", type=float, default=1e-10)
    p.add_argument("--tol-ricci", type=float, default=1e-8)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("symbolic", help="symbolic coefficient-system checks")
    p.add_argument("target", choices=_SYMBOLIC_TARGETS)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_symbolic)

    p = sub.add_parser("sweep", help="run the acceptance suite")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
