"""Command-line interface.

Exit codes: 0 success, 1 a verification or certification failed,
2 invalid arguments.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from itertools import product

from .classify import classify_family, symbolic_case_tree
from .errors import QHLorentzError
from .geometry import christoffel, invert_metric, metric_family, riemann, tensor_to_strings
from .killing import AnsatzSpace, solve_killing, solve_killing_cases
from .liealg import VectorFieldAlgebra, classify_algebra, fingerprint, structure_constants

SYM = "sym"


def parameter(text: str):
    """An exact rational ``p`` or ``p/q``, or ``sym`` for a symbolic parameter."""
    if text == SYM:
        return SYM
    try:
        if "." in text or "e" in text.lower():
            raise ValueError
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected a rational p/q or 'sym', got {text!r}")


def _metric(args):
    C = "C" if args.C == SYM else args.C
    D = "D" if args.D == SYM else args.D
    return metric_family(C, D)


def _emit(args, text: str) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(data) -> str:
    return json.dumps(data, indent=2, sort_keys=False)


def cmd_invert(args) -> int:
    inv = invert_metric(_metric(args))
    if args.format == "json":
        _emit(args, _dump({"inverse": tensor_to_strings(inv)}))
    else:
        _emit(args, "\n".join("[" + ", ".join(str(v) for v in r) + "]" for r in inv))
    return 0


def cmd_christoffel(args) -> int:
    gam = christoffel(_metric(args))
    if args.format == "json":
        _emit(args, _dump({"index_order": "gamma[m][i][j] = Gamma^m_ij, 0-based",
                           "christoffel": tensor_to_strings(gam)}))
        return 0
    lines = [f"Gamma^{m + 1}_{i + 1}{j + 1} = {gam[m][i][j]}"
             for i in range(3) for j in range(i, 3) for m in range(3)]
    _emit(args, "\n".join(lines))
    return 0


def cmd_curvature(args) -> int:
    R = riemann(_metric(args))
    comps = {f"{s + 1},{i + 1},{j + 1},{k + 1}": str(R[s][i][j][k])
             for s, i, j, k in product(range(3), repeat=4) if i < j and not R[s][i][j][k].is_zero}
    if args.format == "json":
        _emit(args, _dump({"index_order": "keys 's,i,j,k' (1-based) for R^s_ijk with i<j; "
                                          "array R[s][i][j][k] 0-based",
                           "components": comps, "riemann": tensor_to_strings(R)}))
        return 0
    lines = [f"R^{k[0]}_{k[2]}{k[4]}{k[6]} = {v}" for k, v in comps.items()]
    _emit(args, "\n".join(lines) if lines else "flat: all components vanish")
    return 0


def _ansatz(args):
    D = args.D
    if D == SYM:
        return AnsatzSpace(args.degree)
    return AnsatzSpace.default(D, degree=args.degree, exp=True if args.exp else None)


def cmd_killing(args) -> int:
    g = _metric(args)
    anz = _ansatz(args)
    basis = solve_killing(g, anz)
    report = basis.report(g)
    if SYM in (args.C, args.D):
        report["cases"] = [{"case": leaf.label(), "dimension": leaf.dimension,
                            "basis": [f.to_strings() for f in leaf.basis.fields]}
                           for leaf in solve_killing_cases(g, anz)]
    if args.format == "json":
        _emit(args, _dump(report))
    else:
        lines = [f"dimension {basis.dimension} (degree {anz.degree}"
                 + (", exp(-D x) adjoined)" if anz.exp_basis else ")")]
        lines += [f"  {f}" for f in basis.fields]
        if basis.pivot_conditions:
            lines.append("valid where: " + ", ".join(report["pivot_conditions"]))
        for case in report.get("cases", []):
            lines.append(f"case {case['case']}: dimension {case['dimension']}")
        lines.append(f"note: {report['scope']}")
        _emit(args, "\n".join(lines))
    return 0


def cmd_algebra(args) -> int:
    if SYM in (args.C, args.D):
        raise QHLorentzError("algebra needs rational C and D")
    g = _metric(args)
    basis = solve_killing(g, _ansatz(args))
    A = VectorFieldAlgebra(basis.fields, g)
    sc = structure_constants(A)
    fp = fingerprint(A)
    name = classify_algebra(fp)
    data = {"basis": [f.to_strings() for f in basis.fields], "structure_constants": sc.sparse(),
            "fingerprint": fp.as_dict(), "name": name}
    if args.format == "json":
        _emit(args, _dump(data))
    else:
        lines = [f"e{n} = {f}" for n, f in enumerate(basis.fields)]
        lines += [f"[e{i}, e{j}] has {v} e{k}" for i, j, k, v in sc.sparse()]
        lines.append(f"fingerprint: {fp.as_dict()}")
        lines.append(f"name: {name}")
        _emit(args, "\n".join(lines))
    return 0


def cmd_classify(args) -> int:
    if SYM in (args.C, args.D):
        if args.C != SYM or args.D != SYM:
            raise QHLorentzError("classify takes both parameters rational or both 'sym'")
        tree = symbolic_case_tree(args.degree)
        if args.format == "json":
            _emit(args, _dump({"cases": tree}))
        else:
            _emit(args, "\n".join(f"{c['case']}: dimension {c['dimension']}" for c in tree))
        return 0
    rep = classify_family(args.C, args.D, degree=args.degree, exp=True if args.exp else None)
    if args.format == "json":
        _emit(args, _dump(rep.as_dict()))
    else:
        lines = [f"case {rep.case_label}: C = {rep.C}, D = {rep.D}",
                 f"killing dimension within ansatz: {rep.killing_dim_within_ansatz}",
                 f"algebra: {rep.algebra_name} {rep.fingerprint}",
                 f"homogeneity: {rep.homogeneity}",
                 f"curvature locus: {rep.curvature_locus}",
                 f"degeneracy locus: {rep.degeneracy_locus}"]
        lines += [f"extra field: {f}" for f in rep.extra_fields]
        lines += [f"{'PASS' if c.passed else 'FAIL'} {c.name}: computed {c.computed}, "
                  f"reference {c.reference}" for c in rep.certifications]
        lines += [f"caveat: {c}" for c in rep.caveats]
        _emit(args, "\n".join(lines))
    return 0 if rep.passed else 1


def cmd_verify(args) -> int:
    from .reference import run_suite

    items = run_suite()
    failed = [it for it in items if not it.passed]
    if args.format == "json":
        _emit(args, _dump({"items": [{"name": it.name, "passed": it.passed, "detail": it.detail}
                                     for it in items],
                           "first_failure": failed[0].name if failed else None}))
    else:
        lines = [it.line() for it in items]
        lines.append(f"{len(items) - len(failed)}/{len(items)} reference checks pass")
        if failed:
            lines.append(f"first mismatch: {failed[0].line()}")
        _emit(args, "\n".join(lines))
    return 1 if failed else 0


COMMANDS = {
    "christoffel": cmd_christoffel,
    "curvature": cmd_curvature,
    "invert": cmd_invert,
    "killing": cmd_killing,
    "algebra": cmd_algebra,
    "classify": cmd_classify,
    "verify-paper": cmd_verify,
}


GEOMETRIC = ("christoffel", "curvature", "invert")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qhlorentz",
        description="Exact curvature, Killing fields and Killing algebras of g_{C,D}.")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "christoffel": "Christoffel symbols Gamma^m_ij",
        "curvature": "Riemann components R^s_ijk",
        "invert": "inverse metric matrix",
        "killing": "Killing basis within a polynomial-exponential ansatz",
        "algebra": "structure constants, fingerprint and name of the Killing algebra",
        "classify": "case report with certifications against the reference claims",
        "verify-paper": "check every tabulated reference value; exit 1 on the first mismatch",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text, description=text)
        symbolic = name in GEOMETRIC
        p.add_argument("--C", type=parameter, default=SYM if symbolic else Fraction(1),
                       help="rational p/q or 'sym' (default %(default)s)")
        p.add_argument("--D", type=parameter, default=SYM if symbolic else Fraction(0),
                       help="rational p/q or 'sym' (default %(default)s)")
        p.add_argument("--degree", type=int, default=2, help="ansatz degree bound (default 2)")
        p.add_argument("--exp", action="store_true", help="adjoin exp(-D x) to the ansatz")
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--out", help="write output to this file instead of stdout")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.degree < 0:
        parser.error("--degree must be >= 0")
    try:
        return COMMANDS[args.command](args)
    except QHLorentzError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
