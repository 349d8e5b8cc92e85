"""Finite-dimensional Lie algebras of vector fields.

Structure constants are found by exact span membership: every bracket is
expanded in the monomials of the coordinates and exponentials, and the
coefficient vectors are solved against those of the basis.  All invariants
in the fingerprint come from the constants alone and are basis independent.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Mapping, Sequence

import sympy

from . import linalg
from .errors import EvaluationPole, IrrationalDensity, NotAnAlgebra, Unsupported
from .geometry import MetricTensor, VectorField
from .symring import Expr, VarSet, at_point, common_zero_locus, factor
from .symring.core import PARAMETER, _layout
from .symring.factor import LocusReport

N = 3


def bracket(A: VectorField, B: VectorField) -> VectorField:
    """[A, B]^m = A(B^m) - B(A^m)."""
    return VectorField([A.apply(b) - B.apply(a) for a, b in zip(A, B)])


# ---------------------------------------------------------------------------
# coefficient vectors of fields over "constants" (rationals or parameters)
# ---------------------------------------------------------------------------

def _expand(e: Expr) -> dict[tuple, object]:
    """Coefficients of ``e`` in the non-parameter monomials, keyed by name."""
    vs = e.varset
    lay = _layout(vs)
    if e.den is not None and any(lay.kind[lay.index[n]] != PARAMETER
                                 for n in e.denominator.symbols()):
        raise Unsupported(f"coefficient {e} has a non-constant denominator")
    names = [n for n, k in zip(lay.symbols, lay.kind) if k != PARAMETER]
    den = e.denominator.lift(vs.param_varset) if e.den is not None else None
    out = {}
    for key, coeff in e.numerator.collect(names).items():
        label = tuple((n, k) for n, k in zip(names, key) if k)
        c = coeff.lift(vs.param_varset)
        if den is not None:
            c = c / den
        out[label] = c.constant_value() if c.is_constant else c
    return out


def _field_vectors(fields: Sequence[VectorField]) -> tuple[list[list], list]:
    """Rows = fields, columns = (component, monomial) labels in sorted order."""
    expanded = [[_expand(c) for c in f] for f in fields]
    labels = sorted({(i, k) for ex in expanded for i, comp in enumerate(ex) for k in comp})
    index = {lab: n for n, lab in enumerate(labels)}
    rows = []
    for ex in expanded:
        row = [Fraction(0)] * len(labels)
        for i, comp in enumerate(ex):
            for k, v in comp.items():
                row[index[(i, k)]] = v
        rows.append(row)
    return rows, labels


def _vector_of(f: VectorField, labels) -> list | None:
    index = {lab: n for n, lab in enumerate(labels)}
    row = [Fraction(0)] * len(labels)
    for i, comp in enumerate(f):
        for k, v in _expand(comp).items():
            if (i, k) not in index:
                return None
            row[index[(i, k)]] = v
    return row


def _uniform(fields: Sequence[VectorField]) -> list[VectorField]:
    vs = None
    for f in fields:
        vs = f.varset if vs is None else vs.merge(f.varset)
    return [VectorField([c.lift(vs) for c in f]) for f in fields]


class VectorFieldAlgebra:
    """An ordered basis of vector fields, optionally tied to a metric."""

    def __init__(self, basis: Sequence[VectorField], metric: MetricTensor | None = None,
                 check: bool = True):
        self.basis = tuple(_uniform(list(basis))) if basis else ()
        self.metric = metric
        if check and self.basis:
            rows, _ = _field_vectors(self.basis)
            if linalg.rank(rows, len(rows[0]) if rows else 0) != len(self.basis):
                raise ValueError("basis fields are linearly dependent over the constants")
        self._constants = None

    @property
    def dim(self) -> int:
        return len(self.basis)

    def __len__(self):
        return len(self.basis)

    def __iter__(self):
        return iter(self.basis)

    def __getitem__(self, i):
        return self.basis[i]

    @property
    def varset(self) -> VarSet:
        return self.basis[0].varset


@dataclass(frozen=True)
class StructureConstants:
    """``c[i][j][k]`` with ``[e_i, e_j] = sum_k c[i][j][k] e_k``."""

    c: tuple

    @property
    def dim(self) -> int:
        return len(self.c)

    def bracket_vector(self, u: Sequence, v: Sequence) -> list:
        n = self.dim
        out = [Fraction(0)] * n
        for i, j in product(range(n), repeat=2):
            if u[i] and v[j]:
                w = u[i] * v[j]
                for k in range(n):
                    if self.c[i][j][k]:
                        out[k] = out[k] + w * self.c[i][j][k]
        return out

    def is_numeric(self) -> bool:
        return all(not isinstance(x, Expr) or x.is_constant for a in self.c for b in a for x in b)

    def sparse(self) -> list[tuple[int, int, int, str]]:
        """Nonzero entries with i < j as (i, j, k, value)."""
        n = self.dim
        return [(i, j, k, str(self.c[i][j][k])) for i in range(n) for j in range(i + 1, n)
                for k in range(n) if self.c[i][j][k]]

    def to_json(self) -> str:
        return json.dumps({"dim": self.dim, "entries": [list(e) for e in self.sparse()]})

    def jacobi_residual(self) -> list:
        n = self.dim
        bad = []
        basis = [[Fraction(int(a == b)) for b in range(n)] for a in range(n)]
        for i, j, k in combinations(range(n), 3):
            ei, ej, ek = basis[i], basis[j], basis[k]
            t1 = self.bracket_vector(ei, self.bracket_vector(ej, ek))
            t2 = self.bracket_vector(ej, self.bracket_vector(ek, ei))
            t3 = self.bracket_vector(ek, self.bracket_vector(ei, ej))
            s = [a + b + c for a, b, c in zip(t1, t2, t3)]
            if any(s):
                bad.append(((i, j, k), s))
        return bad

    def change_basis(self, P: Sequence[Sequence]) -> "StructureConstants":
        """Constants in the basis f_a = sum_i P[a][i] e_i (P invertible)."""
        n = self.dim
        Pinv = linalg.inverse(P)
        if Pinv is None:
            raise ValueError("change of basis is singular")
        new = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
        for a, b in product(range(n), repeat=2):
            v = self.bracket_vector(P[a], P[b])
            # v is in e-coordinates; convert to f-coordinates: v = sum_c w_c f_c
            w = [sum((v[i] * Pinv[i][c] for i in range(n)), Fraction(0)) for c in range(n)]
            new[a][b] = w
        return StructureConstants(tuple(tuple(tuple(r) for r in pl) for pl in new))


def structure_constants(A: VectorFieldAlgebra) -> StructureConstants:
    if A._constants is not None:
        return A._constants
    n = A.dim
    rows, labels = _field_vectors(A.basis)
    zero = Fraction(0)
    c = [[[zero] * n for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            br = bracket(A.basis[i], A.basis[j])
            if br.is_zero:
                continue
            target = _vector_of(br, labels)
            coeffs = linalg.in_span(rows, target) if target is not None else None
            if coeffs is None:
                raise NotAnAlgebra(i, j, br)
            for k in range(n):
                c[i][j][k] = coeffs[k]
                c[j][i][k] = -coeffs[k] if coeffs[k] else zero
    sc = StructureConstants(tuple(tuple(tuple(r) for r in pl) for pl in c))
    if sc.jacobi_residual():
        raise AssertionError("structure constants violate the Jacobi identity")
    A._constants = sc
    return sc


# ---------------------------------------------------------------------------
# fingerprint and catalog
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AlgebraFingerprint:
    dim: int
    derived_dims: tuple[int, ...]
    center_dim: int
    killing_form_signature: tuple[int, int, int]
    unimodular: bool

    @property
    def killing_form_rank(self) -> int:
        p, n, _ = self.killing_form_signature
        return p + n

    @property
    def solvable(self) -> bool:
        return self.derived_dims[-1] == 0

    def as_dict(self) -> dict:
        return {"dim": self.dim, "derived_dims": list(self.derived_dims),
                "center_dim": self.center_dim,
                "killing_form_signature": list(self.killing_form_signature),
                "unimodular": self.unimodular}


def _ad(sc: StructureConstants, i: int) -> list[list]:
    n = sc.dim
    # column j of ad(e_i) is [e_i, e_j]
    return [[sc.c[i][j][k] for j in range(n)] for k in range(n)]


def _numeric(sc: StructureConstants) -> StructureConstants:
    if not sc.is_numeric():
        raise Unsupported("fingerprint needs rational structure constants; specialize parameters")
    conv = [[[x.constant_value() if isinstance(x, Expr) else Fraction(x) for x in b] for b in a]
            for a in sc.c]
    return StructureConstants(tuple(tuple(tuple(b) for b in a) for a in conv))


def _span_basis(vectors: list[list], n: int) -> list[list]:
    red, _ = linalg.rref(vectors, n) if vectors else ([], [])
    return red


def fingerprint_constants(sc: StructureConstants) -> AlgebraFingerprint:
    sc = _numeric(sc)
    n = sc.dim
    # derived series, stopping at 0 or at the first repeat
    current = [[Fraction(int(a == b)) for b in range(n)] for a in range(n)]
    dims = [n]
    while dims[-1] > 0:
        brs = [sc.bracket_vector(u, v) for u, v in combinations(current, 2)]
        current = _span_basis([b for b in brs if any(b)], n)
        dims.append(len(current))
        if dims[-1] == dims[-2]:
            break
    # center: x with sum_i x_i c[i][j][k] = 0 for all j, k
    eqs = [[sc.c[i][j][k] for i in range(n)] for j in range(n) for k in range(n)]
    center = n - linalg.rank(eqs, n) if n else 0
    ads = [_ad(sc, i) for i in range(n)]
    B = [[linalg.trace(linalg.matmul(ads[i], ads[j])) for j in range(n)] for i in range(n)]
    sig = linalg.inertia(B)
    unimodular = all(linalg.trace(a) == 0 for a in ads)
    return AlgebraFingerprint(n, tuple(dims), center, sig, unimodular)


def fingerprint(A: VectorFieldAlgebra) -> AlgebraFingerprint:
    return fingerprint_constants(structure_constants(A))


# name -> (dim, derived_dims or None, center_dim, signature or None, unimodular or None)
CATALOG = {
    "R+aff(R)": (3, (3, 1, 0), 1, None, False),
    "heisenberg": (3, (3, 1, 0), 1, None, True),
    "sl(2,R)": (3, (3, 3), 0, (2, 1, 0), True),
    "so(3)": (3, (3, 3), 0, (0, 3, 0), True),
    "R+sl(2,R)": (4, (4, 3, 3), 1, (2, 1, 1), True),
    "R+so(3)": (4, (4, 3, 3), 1, (0, 3, 1), True),
    "so(2,2)": (6, (6, 6), 0, (4, 2, 0), True),
    "so(3,1)": (6, (6, 6), 0, (3, 3, 0), True),
    "flat-lorentz-dim-6": (6, (6, 6), 0, (2, 1, 3), True),
}


def classify_algebra(f: AlgebraFingerprint) -> str:
    """Catalog name, or "unresolved" when the fingerprint is not decisive.

    Distinguishing invariants: abelian iff the first derived algebra is 0;
    in dimension 3 the derived series and unimodularity separate R+aff(R)
    from the Heisenberg algebra, the Killing form separates sl(2,R) from
    so(3); in dimension 4 a solvable algebra is reported as solvable-dim-4
    (subtype unresolved) and a center plus a rank-3 Killing form gives R+sl(2,R)
    or R+so(3); in dimension 6 perfect algebras with trivial center are told
    apart by the inertia of the Killing form, the Poincare algebra of 2+1
    Minkowski space being the one with a 3-dimensional null space.
    """
    if f.dim >= 1 and f.derived_dims[1] == 0:
        return "abelian"
    for name, (dim, dd, cd, sig, uni) in CATALOG.items():
        if f.dim != dim or f.derived_dims != dd or f.center_dim != cd:
            continue
        if sig is not None and f.killing_form_signature != sig:
            continue
        if uni is not None and f.unimodular != uni:
            continue
        return name
    if f.dim == 4 and f.solvable:
        return "solvable-dim-4"
    return "unresolved"


# ---------------------------------------------------------------------------
# evaluation, volume, isotropy, degeneracy
# ---------------------------------------------------------------------------

def _point(p, coords) -> dict:
    if isinstance(p, Mapping):
        return {c: Fraction(p[c]) for c in coords}
    return {c: Fraction(v) for c, v in zip(coords, p)}


def evaluation_matrix(A: VectorFieldAlgebra, p) -> list[list]:
    """Rows are the basis fields evaluated at ``p``.

    Exponentials whose exponent is nonzero at ``p`` stay symbolic, so the
    rank is computed over Q(exp values); since those values are
    transcendental this is the true rank at ``p``.
    """
    pt = _point(p, A.varset.coordinates)
    rows = []
    for f in A.basis:
        try:
            rows.append([_const(at_point(c, pt)) for c in f])
        except EvaluationPole:
            raise
    return rows


def _const(e: Expr):
    return e.constant_value() if e.is_constant else e


def evaluation_rank_at(A: VectorFieldAlgebra, p) -> int:
    return linalg.rank(evaluation_matrix(A, p), N)


def _density(det: Expr) -> Expr:
    vs = det.varset
    if det.is_constant:
        v = abs(det.constant_value())
        num, den = _isqrt(v.numerator), _isqrt(v.denominator)
        if num is None or den is None:
            raise IrrationalDensity(f"|det g| = {v} is not a rational square")
        return vs.const(Fraction(num, den))
    if det.den is not None:
        return _density(det.numerator) / _density(det.denominator)
    parts = factor(det)
    root = vs.one
    prod_ = vs.one
    for f, k in parts:
        if k % 2:
            raise IrrationalDensity(f"|det g| = |{det}| is not the square of a rational function")
        root = root * f ** (k // 2)
        prod_ = prod_ * f ** k
    lead = det / prod_
    if not lead.is_constant:
        raise IrrationalDensity(f"cannot extract a square root of {det}")
    return root * _density(lead)


def _isqrt(n: int):
    import math

    r = math.isqrt(n)
    return r if r * r == n else None


def volume_function(A: VectorFieldAlgebra, g: MetricTensor | None = None) -> Expr:
    """det(components) * |det g|^(1/2), for exactly three fields."""
    if A.dim != 3:
        raise ValueError("volume_function needs exactly three fields")
    g = g or A.metric
    m = [list(f) for f in A.basis]
    v = (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
         - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
         + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))
    if g is None:
        return v
    return v * _density(g.det())


@dataclass(frozen=True)
class IsotropyReport:
    point: tuple[Fraction, ...]
    isotropy_basis: tuple[VectorField, ...]
    generator_linearization: tuple[tuple[Fraction, ...], ...] | None
    type: str

    def as_dict(self) -> dict:
        return {
            "point": [str(x) for x in self.point],
            "isotropy_basis": [f.to_strings() for f in self.isotropy_basis],
            "generator_linearization": None if self.generator_linearization is None else
            [[str(x) for x in r] for r in self.generator_linearization],
            "type": self.type,
        }


def jacobian_at(X: VectorField, p) -> list[list[Fraction]]:
    """J[i][j] = d X^i / d x_j at p."""
    coords = X.varset.coordinates
    pt = _point(p, coords)
    out = []
    for comp in X:
        row = []
        for c in coords:
            v = at_point(comp.diff(c), pt)
            if not v.is_constant:
                raise Unsupported(f"linearization entry {v} is not rational at {p}")
            row.append(v.constant_value())
        out.append(row)
    return out


def linear_type(J: Sequence[Sequence[Fraction]]) -> str:
    """Eigenstructure class of a rational matrix from its characteristic polynomial.

    unipotent: nilpotent; elliptic: some non-real eigenvalue; semi-simple-real:
    diagonalizable over R and not nilpotent; mixed: real spectrum but a
    nontrivial nilpotent part.
    """
    n = len(J)
    cp = linalg.charpoly(J)
    if all(c == 0 for c in cp[1:]):
        return "unipotent"
    t = sympy.Symbol("t")
    poly = sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in cp], t)
    if len(sympy.real_roots(poly)) < n:  # real roots counted with multiplicity
        return "elliptic"
    sqf = sympy.Poly(sympy.quo(poly, sympy.gcd(poly, poly.diff(t))), t)
    coeffs = [Fraction(int(c.p), int(c.q)) for c in sqf.all_coeffs()]
    # Horner evaluation of the square-free part at J
    acc = [[Fraction(0)] * n for _ in range(n)]
    for c in coeffs:
        acc = linalg.matmul(acc, J)
        acc = [[acc[i][j] + (c if i == j else 0) for j in range(n)] for i in range(n)]
    if all(x == 0 for r in acc for x in r):
        return "semi-simple-real"
    return "mixed"


def isotropy_at(A: VectorFieldAlgebra, p) -> IsotropyReport:
    coords = A.varset.coordinates
    pt = _point(p, coords)
    M = evaluation_matrix(A, pt)
    cols = linalg.transpose(M) if M else [[] for _ in range(N)]
    kernel = linalg.nullspace(cols, A.dim)
    fields = []
    for vec in kernel:
        acc = None
        for a, f in zip(vec, A.basis):
            if a:
                if isinstance(a, Expr):
                    raise Unsupported("isotropy coefficients involve transcendental values")
                acc = f * a if acc is None else acc + f * a
        fields.append(acc)
    point = tuple(pt[c] for c in coords)
    if not fields:
        return IsotropyReport(point, (), None, "trivial")
    if len(fields) > 1:
        return IsotropyReport(point, tuple(fields), None, "higher-dimensional")
    J = jacobian_at(fields[0], pt)
    return IsotropyReport(point, tuple(fields), tuple(tuple(r) for r in J), linear_type(J))


def generic_rank(A: VectorFieldAlgebra) -> int:
    return linalg.rank([list(f) for f in A.basis], N)


def degeneracy_locus(A: VectorFieldAlgebra, assume_nonzero=()) -> LocusReport:
    """Where the evaluation rank drops below its generic value: the common
    zeros of all maximal minors of the evaluation matrix.
    """
    rows = [list(f) for f in A.basis]
    r = generic_rank(A)
    if r == 0:
        return LocusReport((), (), everywhere=True)
    minors = []
    for fs in combinations(range(A.dim), r):
        for cs in combinations(range(N), r):
            sub = [[rows[i][j] for j in cs] for i in fs]
            d = linalg.det(sub)
            if isinstance(d, Expr) and not d.is_zero:
                minors.append(d)
            elif d:
                return LocusReport(())
    return common_zero_locus(minors, assume_nonzero)


__all__ = [
    "bracket", "VectorFieldAlgebra", "StructureConstants", "structure_constants",
    "AlgebraFingerprint", "fingerprint", "fingerprint_constants", "classify_algebra", "CATALOG",
    "evaluation_matrix", "evaluation_rank_at", "volume_function", "IsotropyReport",
    "isotropy_at", "jacobian_at", "linear_type", "generic_rank", "degeneracy_locus",
]
