"""Case analysis for the family g_{C,D} = dx^2 + dh dz + C z^2 dh^2 + D z dx dh.

Each report lists what was computed next to the tabulated reference claim
for that case and records every disagreement; a report passes only when all
of its certifications agree with the reference.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import product
from typing import Sequence

from . import linalg
from .errors import DivisionByZero, WrongCase
from .geometry import (
    MetricTensor,
    VectorField,
    christoffel,
    curvature_vanishing_locus,
    is_flat,
    metric_family,
    riemann,
    totally_geodesic_check,
)
from .killing import (
    SCOPE_NOTE,
    AnsatzSpace,
    reference_data,
    solve_killing,
    solve_killing_cases,
    verify_killing,
)
from .liealg import (
    VectorFieldAlgebra,
    classify_algebra,
    degeneracy_locus,
    evaluation_rank_at,
    fingerprint,
    isotropy_at,
    volume_function,
)
from .symring import DEFAULT_VARSET, Expr, VarSet

SAMPLE_GRID = tuple(product((-1, 0, 1), repeat=3))


def _rational(v) -> Fraction:
    if isinstance(v, Expr):
        return v.constant_value()
    if isinstance(v, str):
        return Fraction(v)
    return Fraction(v)


def case_label(C, D) -> str:
    """i: C != 0 = D; ii: C = 0 != D; iii: both nonzero; iv: both zero."""
    c, d = _rational(C), _rational(D)
    if c and not d:
        return "i"
    if d and not c:
        return "ii"
    if c and d:
        return "iii"
    return "iv"


def coordinate_field(*components, varset: VarSet = DEFAULT_VARSET) -> VectorField:
    return VectorField([varset.parse(c) if isinstance(c, str) else varset.const(c)
                        for c in components])


def reference_fields(varset: VarSet = DEFAULT_VARSET) -> tuple[VectorField, ...]:
    """d/dx, d/dh and h d/dh - z d/dz, Killing for every member of the family."""
    return (coordinate_field(1, 0, 0, varset=varset),
            coordinate_field(0, 1, 0, varset=varset),
            coordinate_field(0, "h", "-z", varset=varset))


def case_iii_field(C, D, a) -> VectorField:
    """a h d/dx + 1/2 b h^2 d/dh + (-b z h - a/D) d/dz with b = a (D - C/D)."""
    vs = DEFAULT_VARSET
    c, d, a = (x if isinstance(x, Expr) else vs.parse(str(x)) for x in (C, D, a))
    if d.is_zero:
        raise DivisionByZero("the case (iii) field needs D != 0")
    b = a * (d - c / d)
    h, z = vs.symbol("h"), vs.symbol("z")
    return VectorField([a * h, b * h * h * Fraction(1, 2), -b * z * h - a / d])


def case_ii_field(D) -> VectorField:
    """exp(-D x) d/dz, written with the generator E = exp(-D x)."""
    d = _rational(D)
    if not d:
        raise WrongCase("D = 0: the field degenerates to d/dz (flat case)")
    vs = DEFAULT_VARSET.with_exp("E", "x", -d)
    return VectorField([vs.zero, vs.zero, vs.symbol("E")])


def restrict_to_surface(g: MetricTensor, value=0) -> tuple[tuple[Expr, Expr], tuple[Expr, Expr]]:
    """Induced form on span(d/dx, d/dh) along {z = value}."""
    z = g.coordinates[2]
    s = g.subs({z: value})
    return ((s[0, 0], s[0, 1]), (s[1, 0], s[1, 1]))


def _span_equal(fields_a, fields_b) -> bool:
    from .liealg import _field_vectors

    a, b = list(fields_a), list(fields_b)
    if len(a) != len(b):
        return False
    rows, _ = _field_vectors(a + b)
    n = len(rows[0]) if rows else 0
    return linalg.rank(rows, n) == len(a) == linalg.rank(_field_vectors(a)[0], n) if a else True


@dataclass
class Certification:
    name: str
    computed: object
    reference: object
    passed: bool

    def as_dict(self) -> dict:
        return {"name": self.name, "computed": self.computed, "reference": self.reference,
                "passed": self.passed}


@dataclass
class CaseReport:
    C: Fraction
    D: Fraction
    case_label: str
    killing_dim_within_ansatz: int
    algebra_name: str
    homogeneity: str
    degeneracy_locus: list[str]
    extra_fields: list[VectorField]
    caveats: list[str]
    basis: list[VectorField] = field(default_factory=list)
    fingerprint: dict = field(default_factory=dict)
    curvature_locus: list[str] | None = None
    ranks: dict = field(default_factory=dict)
    certifications: list[Certification] = field(default_factory=list)
    extended_probe: dict | None = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.certifications)

    def discrepancies(self) -> list[Certification]:
        return [c for c in self.certifications if not c.passed]

    def as_dict(self) -> dict:
        return {
            "C": str(self.C), "D": str(self.D), "case_label": self.case_label,
            "killing_dim_within_ansatz": self.killing_dim_within_ansatz,
            "algebra_name": self.algebra_name, "fingerprint": self.fingerprint,
            "homogeneity": self.homogeneity,
            "degeneracy_locus": self.degeneracy_locus,
            "curvature_locus": self.curvature_locus,
            "basis": [f.to_strings() for f in self.basis],
            "extra_fields": [f.to_strings() for f in self.extra_fields],
            "evaluation_ranks": {str(k): v for k, v in sorted(self.ranks.items())},
            "certifications": [c.as_dict() for c in self.certifications],
            "extended_probe": self.extended_probe,
            "caveats": self.caveats,
            "passed": self.passed,
        }


def _homogeneity(flat: bool, ranks: dict) -> str:
    if flat:
        return "flat"
    if all(r == 3 for r in ranks.values()):
        return "locally-homogeneous"
    if any(r == 3 for r in ranks.values()):
        return "quasihomogeneous-evidence"
    return "not-transitive"


def _probe_ansatz(ansatz: AnsatzSpace, D: Fraction) -> AnsatzSpace:
    if D:
        return replace(ansatz, exp_powers=(1, -1, 2, -2))
    return replace(ansatz, degree=ansatz.degree + 1)


def classify_family(C, D, degree: int = 2, exp: bool | None = None,
                    probe: bool = True) -> CaseReport:
    c, d = _rational(C), _rational(D)
    label = case_label(c, d)
    claim = reference_data()["cases"][label]
    g = metric_family(c, d)
    ansatz = AnsatzSpace.default(d, degree=degree, exp=exp)
    basis = solve_killing(g, ansatz)
    algebra = VectorFieldAlgebra(basis.fields, g)
    fp = fingerprint(algebra)
    name = classify_algebra(fp)
    R = riemann(g)
    flat = is_flat(g, R).flat
    curv = None
    if not flat:
        assume = [p for p, v in (("C", c), ("D", d)) if v]
        curv = [f"{f} = 0" for f in curvature_vanishing_locus(g, assume, R).factors]
    ranks = {p: evaluation_rank_at(algebra, p) for p in SAMPLE_GRID}
    homog = _homogeneity(flat, ranks)
    locus = degeneracy_locus(algebra)
    caveats = [SCOPE_NOTE]
    if not locus.exact:
        caveats.append("degeneracy locus: maximal minors have no common factor but their "
                       "common zero set was not proven empty; sampled ranks are all listed")
    extra = []
    if label == "ii":
        extra.append(case_ii_field(d))
    elif label == "iii":
        extra.append(case_iii_field(c, d, 1))
    for f in extra:
        if not verify_killing(g, f).killing:
            raise AssertionError(f"extra field {f} is not Killing")

    certs = [
        Certification("killing_dim", basis.dimension, claim["killing_dim"],
                      basis.dimension == claim["killing_dim"]),
        Certification("algebra", name, claim["algebra"], name == claim["algebra"]),
        Certification("homogeneity", homog, claim["homogeneity"], homog == claim["homogeneity"]),
    ]
    if "curvature_locus" in claim:
        want = [f"{v} = 0" for v in claim["curvature_locus"]]
        certs.append(Certification("curvature_locus", curv, want, curv == want))
    span = VectorFieldAlgebra(list(basis.fields) + list(extra), g, check=False)
    certs.append(Certification("extra_fields_in_basis", True, True,
                               all(_in_span(span.basis[:basis.dimension], f) for f in extra)))

    probe_info = None
    if probe:
        pa = _probe_ansatz(ansatz, d)
        pb = solve_killing(g, pa)
        pfp = fingerprint(VectorFieldAlgebra(pb.fields, g))
        probe_info = {"ansatz": pa.describe(), "dimension": pb.dimension,
                      "algebra_name": classify_algebra(pfp), "fingerprint": pfp.as_dict()}
        if pb.dimension > basis.dimension:
            caveats.append(f"a larger ansatz finds {pb.dimension} Killing fields "
                           f"({probe_info['algebra_name']})")

    return CaseReport(
        C=c, D=d, case_label=label, killing_dim_within_ansatz=basis.dimension,
        algebra_name=name, homogeneity=homog,
        degeneracy_locus=[f"{f} = 0" for f in locus.factors], extra_fields=extra,
        caveats=caveats, basis=list(basis.fields), fingerprint=fp.as_dict(),
        curvature_locus=curv, ranks=ranks, certifications=certs, extended_probe=probe_info,
    )


def _in_span(fields: Sequence[VectorField], f: VectorField) -> bool:
    from .liealg import _field_vectors

    rows, _ = _field_vectors(list(fields) + [f])
    n = len(rows[0]) if rows else 0
    return linalg.rank(rows, n) == linalg.rank(rows[:-1], n)


def symbolic_case_tree(degree: int = 2) -> list[dict]:
    """Case split of the Killing dimension for symbolic C, D (polynomial ansatz)."""
    g = metric_family()
    out = []
    for leaf in solve_killing_cases(g, AnsatzSpace(degree)):
        out.append({"case": leaf.label(), "dimension": leaf.dimension,
                    "bindings": {p: str(v) for p, v in leaf.bindings},
                    "nonzero": [str(c) for c in leaf.nonzero],
                    "unresolved": [str(c) for c in leaf.unresolved],
                    "basis": [f.to_strings() for f in leaf.basis.fields]})
    return out


@dataclass
class Certificate:
    C: Fraction
    checks: list[Certification]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_dict(self) -> dict:
        return {"C": str(self.C), "passed": self.passed,
                "checks": [c.as_dict() for c in self.checks]}


def quasihomogeneity_certificate(C) -> Certificate:
    """Evidence bundle for g_{C,0} with C != 0, against the reference claims."""
    c = _rational(C)
    if not c:
        raise WrongCase("the quasihomogeneous case needs C != 0")
    vs = DEFAULT_VARSET
    g = metric_family(c, 0)
    ref = reference_fields(vs)
    A3 = VectorFieldAlgebra(ref, g)
    basis = solve_killing(g, AnsatzSpace(2))
    full = VectorFieldAlgebra(basis.fields, g)
    checks = []

    same = _span_equal(basis.fields, ref)
    checks.append(Certification("killing_basis", [str(f) for f in basis.fields],
                                [str(f) for f in ref], same))
    name = classify_algebra(fingerprint(full))
    checks.append(Certification("algebra", name, "R+aff(R)", name == "R+aff(R)"))
    ranks = {p: evaluation_rank_at(A3, p) for p in SAMPLE_GRID}
    ok = all(r == (2 if p[2] == 0 else 3) for p, r in ranks.items())
    checks.append(Certification("evaluation_rank", sorted({(p[2] == 0, r) for p, r in ranks.items()}),
                                "2 on z=0, 3 off z=0", ok))
    locus = [f"{f} = 0" for f in curvature_vanishing_locus(g, ["C"]).factors]
    checks.append(Certification("curvature_locus", locus, ["z = 0"], locus == ["z = 0"]))
    v = volume_function(A3, g)
    checks.append(Certification("volume_function", str(v), "-z", v == vs.parse("-z")))
    iso = isotropy_at(A3, (0, 0, 0))
    diag = ((0, 0, 0), (0, 1, 0), (0, 0, -1))
    iso_ok = (len(iso.isotropy_basis) == 1 and iso.type == "semi-simple-real"
              and iso.generator_linearization == tuple(tuple(Fraction(x) for x in r) for r in diag))
    checks.append(Certification("isotropy_origin", iso.type, "semi-simple-real diag(0,1,-1)", iso_ok))
    tg = totally_geodesic_check(g, "z=0")
    checks.append(Certification("totally_geodesic", tg, True, tg))
    restricted = restrict_to_surface(g, 0)
    dx2 = ((vs.one, vs.zero), (vs.zero, vs.zero))
    checks.append(Certification("restriction", [[str(x) for x in r] for r in restricted],
                                [["1", "0"], ["0", "0"]], restricted == dx2))
    g0 = metric_family(0, 0)
    kills = all(verify_killing(g0, f).killing for f in ref)
    checks.append(Certification("preserves_flat_metric", kills, True, kills))
    return Certificate(c, checks)


__all__ = [
    "SAMPLE_GRID", "case_label", "case_ii_field", "case_iii_field", "restrict_to_surface",
    "reference_fields", "classify_family", "CaseReport", "Certification", "Certificate",
    "quasihomogeneity_certificate", "symbolic_case_tree", "coordinate_field",
    "christoffel",
]
