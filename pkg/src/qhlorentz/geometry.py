"""Tensor calculus in the fixed chart (x1, x2, x3) = (x, h, z).

Index conventions (all arrays are 0-based, coordinates in VarSet order):

* ``gamma[m][i][j]`` is the Christoffel symbol Gamma^m_ij;
* ``R[s][i][j][k]`` is R^s_ijk built as
  ``sum_l G^l_ik G^s_jl - sum_l G^l_jk G^s_il + d_j G^s_ik - d_i G^s_jk``,
  which is antisymmetric in ``(i, j)``.

Metric matrices store cross terms at full value, so ``dx^2 + dh dz`` has
``g[1][2] = g[2][1] = 1``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping, Sequence

from . import linalg
from .errors import FlatMetric, SingularMetric, Unsupported
from .symring import DEFAULT_VARSET, Expr, VarSet, common_zero_locus, substitute
from .symring.factor import LocusReport

N = 3


def _expr(value, vs: VarSet) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, str):
        return vs.parse(value)
    return vs.const(value)


def _common_varset(values: Iterable[Expr], base: VarSet | None = None) -> VarSet:
    vs = base
    for v in values:
        vs = v.varset if vs is None else vs.merge(v.varset)
    return vs or DEFAULT_VARSET


class VectorField:
    """Components (X^x, X^h, X^z) in the coordinate frame."""

    __slots__ = ("components",)

    def __init__(self, components: Sequence, varset: VarSet | None = None):
        comps = list(components)
        if len(comps) != N:
            raise ValueError(f"a vector field needs {N} components, got {len(comps)}")
        known = [c for c in comps if isinstance(c, Expr)]
        vs = _common_varset(known, varset)
        self.components = tuple(_expr(c, vs).lift(vs) for c in comps)

    @classmethod
    def coordinate(cls, index: int, varset: VarSet = DEFAULT_VARSET) -> "VectorField":
        return cls([1 if i == index else 0 for i in range(N)], varset)

    @property
    def varset(self) -> VarSet:
        return self.components[0].varset

    @property
    def is_zero(self) -> bool:
        return all(c.is_zero for c in self.components)

    def __getitem__(self, i):
        return self.components[i]

    def __iter__(self):
        return iter(self.components)

    def __add__(self, other: "VectorField") -> "VectorField":
        return VectorField([a + b for a, b in zip(self, other)])

    def __sub__(self, other: "VectorField") -> "VectorField":
        return VectorField([a - b for a, b in zip(self, other)])

    def __neg__(self) -> "VectorField":
        return VectorField([-a for a in self])

    def __mul__(self, k) -> "VectorField":
        return VectorField([a * k for a in self])

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        return all(a == b for a, b in zip(self, other))

    def __hash__(self):
        return hash(self.components)

    def apply(self, f: Expr) -> Expr:
        """Directional derivative X(f)."""
        total = f.varset.zero
        for c, name in zip(self.components, self.varset.coordinates):
            if not c.is_zero:
                total = total + c * f.diff(name)
        return total

    def subs(self, bindings: Mapping[str, object]) -> "VectorField":
        return VectorField([substitute(c, bindings) for c in self])

    def to_strings(self) -> list[str]:
        return [str(c) for c in self.components]

    def __str__(self):
        parts = []
        for c, name in zip(self.components, self.varset.coordinates):
            if c.is_zero:
                continue
            d = f"d/d{name}"
            s = str(c)
            if s == "1":
                term = d
            elif s == "-1":
                term = f"-{d}"
            elif len(c.num) == 1 and c.den is None:
                term = f"{s}*{d}"
            else:
                term = f"({s})*{d}"
            parts.append(term)
        if not parts:
            return "0"
        out = parts[0]
        for p in parts[1:]:
            out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return out

    def __repr__(self):
        return f"VectorField({self.to_strings()!r})"


@dataclass(frozen=True)
class MetricTensor:
    """Symmetric 3x3 matrix of Exprs with determinant not identically zero."""

    g: tuple[tuple[Expr, ...], ...]

    def __post_init__(self):
        rows = [list(r) for r in self.g]
        if len(rows) != N or any(len(r) != N for r in rows):
            raise ValueError("metric must be 3x3")
        known = [v for r in rows for v in r if isinstance(v, Expr)]
        vs = _common_varset(known)
        rows = [[_expr(v, vs).lift(vs) for v in r] for r in rows]
        for i in range(N):
            for j in range(i + 1, N):
                if rows[i][j] != rows[j][i]:
                    raise ValueError(f"metric is not symmetric at ({i}, {j})")
        object.__setattr__(self, "g", tuple(tuple(r) for r in rows))
        if _det3(self.g).is_zero:
            raise SingularMetric("metric determinant vanishes identically")

    @property
    def varset(self) -> VarSet:
        return self.g[0][0].varset

    @property
    def coordinates(self) -> tuple[str, ...]:
        return self.varset.coordinates

    def __getitem__(self, ij):
        i, j = ij
        return self.g[i][j]

    def det(self) -> Expr:
        return _det3(self.g)

    def subs(self, bindings: Mapping[str, object]) -> "MetricTensor":
        return MetricTensor(tuple(tuple(substitute(v, bindings) for v in r) for r in self.g))

    def to_strings(self) -> list[list[str]]:
        return tensor_to_strings(self.g)


def _det3(m) -> Expr:
    return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))


def metric_family(C="C", D="D", varset: VarSet = DEFAULT_VARSET) -> MetricTensor:
    """dx^2 + dh dz + C z^2 dh^2 + D z dx dh as the matrix [[1,Dz,0],[Dz,Cz^2,1],[0,1,0]]."""
    c = _expr(C, varset)
    d = _expr(D, varset)
    vs = c.varset.merge(d.varset).merge(varset)
    z = vs.symbol(vs.coordinates[2])
    zero, one = vs.zero, vs.one
    return MetricTensor((
        (one, d * z, zero),
        (d * z, c * z * z, one),
        (zero, one, zero),
    ))


def invert_metric(g: MetricTensor) -> tuple[tuple[Expr, ...], ...]:
    inv = linalg.inverse(g.g)
    if inv is None:
        raise SingularMetric("metric is singular")
    vs = g.varset
    return tuple(tuple(_expr(v, vs).lift(vs) if not isinstance(v, Expr) else v for v in r)
                 for r in inv)


def christoffel(g: MetricTensor, inverse=None) -> tuple:
    """``gamma[m][i][j] = 1/2 sum_k (d_i g_jk + d_j g_ki - d_k g_ij) g^km``."""
    vs = g.varset
    ginv = inverse or invert_metric(g)
    coords = vs.coordinates
    dg = [[[g.g[i][j].diff(coords[k]) for k in range(N)] for j in range(N)] for i in range(N)]
    half = Fraction(1, 2)
    lower = [[[None] * N for _ in range(N)] for _ in range(N)]
    for i, j, k in product(range(N), repeat=3):
        lower[i][j][k] = (dg[j][k][i] + dg[k][i][j] - dg[i][j][k]) * half
    gamma = [[[vs.zero] * N for _ in range(N)] for _ in range(N)]
    for m in range(N):
        for i in range(N):
            for j in range(i, N):
                s = vs.zero
                for k in range(N):
                    if not lower[i][j][k].is_zero and not ginv[k][m].is_zero:
                        s = s + lower[i][j][k] * ginv[k][m]
                gamma[m][i][j] = gamma[m][j][i] = s
    return tuple(tuple(tuple(r) for r in plane) for plane in gamma)


def riemann(g: MetricTensor, gamma=None) -> tuple:
    vs = g.varset
    gam = gamma or christoffel(g)
    coords = vs.coordinates
    dgam = [[[[gam[s][i][k].diff(coords[j]) for j in range(N)] for k in range(N)]
             for i in range(N)] for s in range(N)]
    R = [[[[vs.zero] * N for _ in range(N)] for _ in range(N)] for _ in range(N)]
    for s, i, j, k in product(range(N), repeat=4):
        if i == j:
            continue
        if j < i:
            R[s][i][j][k] = -R[s][j][i][k]
            continue
        v = dgam[s][i][k][j] - dgam[s][j][k][i]
        for l in range(N):
            v = v + gam[l][i][k] * gam[s][j][l] - gam[l][j][k] * gam[s][i][l]
        R[s][i][j][k] = v
    return tuple(tuple(tuple(tuple(c) for c in b) for b in a) for a in R)


def lie_derivative_metric(T: VectorField, g: MetricTensor) -> tuple[tuple[Expr, ...], ...]:
    """``(L_T g)_ij = T(g_ij) + sum_k (d_i T^k) g_kj + (d_j T^k) g_ik``."""
    vs = _common_varset(list(T) + [g.g[0][0]])
    coords = vs.coordinates
    comps = [c.lift(vs) for c in T]
    gg = [[v.lift(vs) for v in r] for r in g.g]
    dT = [[comps[k].diff(coords[i]) for k in range(N)] for i in range(N)]
    out = [[None] * N for _ in range(N)]
    for i in range(N):
        for j in range(i, N):
            v = vs.zero
            for k in range(N):
                if not comps[k].is_zero:
                    v = v + comps[k] * gg[i][j].diff(coords[k])
                if not dT[i][k].is_zero:
                    v = v + dT[i][k] * gg[k][j]
                if not dT[j][k].is_zero:
                    v = v + dT[j][k] * gg[i][k]
            out[i][j] = out[j][i] = v
    return tuple(tuple(r) for r in out)


@dataclass(frozen=True)
class FlatnessResult:
    flat: bool
    witness: tuple[tuple[int, int, int, int], Expr] | None = None

    def __bool__(self):
        return self.flat


# components tabulated for the g_{C,D} family (0-based s, i, j, k), checked
# first when picking a witness so reports quote familiar entries
TABULATED_COMPONENTS = (
    (1, 0, 1, 0), (2, 0, 1, 0), (2, 0, 2, 0), (1, 0, 2, 0),
    (2, 0, 2, 1), (2, 1, 2, 1), (2, 0, 1, 1),
)


def is_flat(g: MetricTensor, R=None) -> FlatnessResult:
    """Flatness test; the witness is the first nonzero tabulated component,
    else the first nonzero R^s_ijk in ascending (s, i, j, k) order.
    """
    R = R or riemann(g)
    rest = [idx for idx in product(range(N), repeat=4) if idx not in TABULATED_COMPONENTS]
    for s, i, j, k in list(TABULATED_COMPONENTS) + rest:
        if not R[s][i][j][k].is_zero:
            return FlatnessResult(False, ((s, i, j, k), R[s][i][j][k]))
    return FlatnessResult(True)


def curvature_vanishing_locus(g: MetricTensor, assume_nonzero: Iterable[str] = (),
                              R=None) -> LocusReport:
    """Common zero set of all curvature components as reduced coordinate conditions.

    Parameter names in ``assume_nonzero`` are treated as nonvanishing, which is
    how a case such as C != 0 is communicated.
    """
    R = R or riemann(g)
    comps = [R[s][i][j][k] for s, i, j, k in product(range(N), repeat=4) if i < j]
    if all(c.is_zero for c in comps):
        raise FlatMetric("curvature vanishes identically")
    return common_zero_locus(comps, assume_nonzero)


def _parse_surface(surface, vs: VarSet) -> tuple[int, Fraction]:
    if isinstance(surface, str):
        text = surface.replace(" ", "")
        if "=" in text:
            lhs, rhs = text.split("=", 1)
        else:
            lhs, rhs = text, "0"
        if lhs not in vs.coordinates:
            raise Unsupported(f"{surface!r} is not a coordinate hyperplane")
        try:
            value = vs.param_varset.parse(rhs)
        except Exception:
            raise Unsupported(f"{surface!r} is not a coordinate hyperplane") from None
        if not value.is_constant:
            raise Unsupported(f"{surface!r} is not a coordinate hyperplane")
        return vs.coordinates.index(lhs), value.constant_value()
    name, value = surface
    if name not in vs.coordinates:
        raise Unsupported(f"{name!r} is not a coordinate")
    return vs.coordinates.index(name), Fraction(value)


def totally_geodesic_check(g: MetricTensor, surface="z=0", gamma=None) -> bool:
    """Whether Gamma^n_ij vanish on {x_n = c} for the tangent indices i, j."""
    n, c = _parse_surface(surface, g.varset)
    gam = gamma or christoffel(g)
    name = g.coordinates[n]
    tangent = [i for i in range(N) if i != n]
    return all(substitute(gam[n][i][j], {name: c}).is_zero for i in tangent for j in tangent)


def covariant_derivative(g: MetricTensor, Z: VectorField, gamma=None) -> VectorField:
    """nabla_Z Z with components sum Z^i Z^j G^m_ij + Z(Z^m)."""
    gam = gamma or christoffel(g)
    vs = _common_varset(list(Z) + [g.g[0][0]])
    comps = [c.lift(vs) for c in Z]
    out = []
    for m in range(N):
        v = Z.apply(comps[m])
        for i, j in product(range(N), repeat=2):
            if not comps[i].is_zero and not comps[j].is_zero:
                v = v + comps[i] * comps[j] * gam[m][i][j]
        out.append(v)
    return VectorField(out)


def geodesic_field_check(g: MetricTensor, Z: VectorField, gamma=None) -> bool:
    return covariant_derivative(g, Z, gamma).is_zero


def metric_compatibility_residual(g: MetricTensor, gamma=None) -> tuple:
    """``(nabla_k g)_ij = d_k g_ij - G^l_ki g_lj - G^l_kj g_il`` for all k, i, j."""
    gam = gamma or christoffel(g)
    coords = g.coordinates
    out = []
    for k in range(N):
        plane = []
        for i in range(N):
            row = []
            for j in range(N):
                v = g.g[i][j].diff(coords[k])
                for l in range(N):
                    v = v - gam[l][k][i] * g.g[l][j] - gam[l][k][j] * g.g[i][l]
                row.append(v)
            plane.append(tuple(row))
        out.append(tuple(plane))
    return tuple(out)


# ---------------------------------------------------------------------------
# serialization: nested arrays of canonical Expr strings, indices as stored
# ---------------------------------------------------------------------------

def tensor_to_strings(t):
    if isinstance(t, Expr):
        return str(t)
    return [tensor_to_strings(x) for x in t]


def tensor_from_strings(data, varset: VarSet):
    if isinstance(data, str):
        return varset.parse(data)
    return tuple(tensor_from_strings(x, varset) for x in data)


def tensor_to_json(t, **kwargs) -> str:
    return json.dumps(tensor_to_strings(t), **kwargs)


def tensor_from_json(text: str, varset: VarSet = DEFAULT_VARSET):
    return tensor_from_strings(json.loads(text), varset)


def all_zero(t) -> bool:
    if isinstance(t, Expr):
        return t.is_zero
    return all(all_zero(x) for x in t)
