"""Killing fields over a finite polynomial-exponential ansatz.

A candidate field is ``T = sum_c sum_f u_{c,f} f d/dc`` with ``f`` running
over the ansatz basis functions.  ``L_T g = 0`` is linear in the unknowns
``u``; matching coefficients of every coordinate-exponential monomial turns
it into a :class:`~qhlorentz.symring.LinearSystem` whose exact nullspace is
the Killing algebra inside the ansatz.

Results are bounded by the ansatz: a returned dimension is a lower bound for
the analytic Killing algebra and an upper bound only relative to the ansatz.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from itertools import product
from typing import Iterable, Mapping, Sequence

from . import linalg
from .errors import PdeMismatch
from .geometry import MetricTensor, VectorField, lie_derivative_metric, metric_family
from .symring import Expr, ExpGenerator, VarSet, coefficient_system, substitute
from .symring.core import PARAMETER
from .symring.linear import LinearSystem

N = 3

SCOPE_NOTE = ("dimension is relative to the ansatz: exhibited fields are certified Killing "
              "fields, fields outside the ansatz are not excluded")


def _monomials(coords: Sequence[str], degree: int) -> list[tuple[int, ...]]:
    """Exponent vectors of total degree <= degree, ascending degree then x > h > z."""
    out = []
    for d in range(degree + 1):
        layer = [e for e in product(range(d + 1), repeat=len(coords)) if sum(e) == d]
        layer.sort(reverse=True)
        out.extend(layer)
    return out


@dataclass(frozen=True)
class AnsatzSpace:
    """Coefficient functions ``m * E^p``: coordinate monomials ``m`` of degree
    at most ``degree`` times ``E^p`` for each generator ``E`` in ``exp_basis``
    and exponent ``p`` in ``exp_powers`` (plus the plain monomials).
    """

    degree: int = 2
    exp_basis: tuple[ExpGenerator, ...] = ()
    exp_powers: tuple[int, ...] = (1,)
    prefix: str = "u"

    def __post_init__(self):
        if self.degree < 0:
            raise ValueError("degree must be >= 0")
        object.__setattr__(self, "exp_basis", tuple(self.exp_basis))
        object.__setattr__(self, "exp_powers", tuple(p for p in self.exp_powers if p))

    @classmethod
    def default(cls, D, C=None, degree: int = 2, exp: bool | None = None,
                varset: VarSet | None = None) -> "AnsatzSpace":
        """Degree-``degree`` polynomials, adjoined with ``E = exp(-D x)`` when
        ``exp`` is true or (``exp`` unset) ``D`` is a nonzero rational.
        """
        vs = varset or metric_family().varset
        if exp is None:
            exp = _is_nonzero_number(D)
        if not exp:
            return cls(degree)
        d = D if isinstance(D, Expr) else vs.param_varset.parse(str(D)) if isinstance(D, str) \
            else vs.param_varset.const(D)
        if d.is_zero:
            return cls(degree)
        return cls(degree, (ExpGenerator("E", vs.coordinates[0], -d.lift(vs.param_varset)),))

    def varset(self, base: VarSet) -> VarSet:
        vs = base
        for g in self.exp_basis:
            vs = vs.with_exp(g.name, g.direction, g.rate)
        return vs

    def functions(self, base: VarSet) -> list[Expr]:
        vs = self.varset(base)
        coords = vs.coordinates
        monos = []
        for e in _monomials(coords, self.degree):
            m = vs.one
            for name, k in zip(coords, e):
                if k:
                    m = m * vs.symbol(name) ** k
            monos.append(m)
        out = list(monos)
        for g in self.exp_basis:
            for p in self.exp_powers:
                E = vs.symbol(g.name) ** p
                out.extend(m * E for m in monos)
        seen, uniq = set(), []
        for f in out:
            if f not in seen:
                seen.add(f)
                uniq.append(f)
        return uniq

    def columns(self, base: VarSet) -> list[tuple[int, Expr]]:
        """(component, function) pairs in column order: component-major."""
        fs = self.functions(base)
        return [(c, f) for c in range(N) for f in fs]

    @property
    def size(self) -> int:
        n = len(_monomials("xhz", self.degree))
        return N * n * (1 + len(self.exp_basis) * len(self.exp_powers))

    def subs(self, bindings: Mapping[str, object]) -> "AnsatzSpace":
        """Specialize parameters in the exponential rates; zero rates drop out."""
        gens = []
        for g in self.exp_basis:
            pv = g.rate.varset
            rb = {k: v for k, v in bindings.items() if k in pv.parameters}
            rate = substitute(g.rate, rb) if rb else g.rate
            if not rate.is_zero:
                gens.append(ExpGenerator(g.name, g.direction, rate))
        return AnsatzSpace(self.degree, tuple(gens), self.exp_powers, self.prefix)

    def describe(self) -> dict:
        return {"degree": self.degree,
                "exp_basis": [f"{g.name} = exp(({g.rate})*{g.direction})" for g in self.exp_basis],
                "exp_powers": list(self.exp_powers)}


def _is_nonzero_number(v) -> bool:
    if isinstance(v, Expr):
        return v.is_constant and v.constant_value() != 0
    if isinstance(v, str):
        try:
            return Fraction(v) != 0
        except ValueError:
            return False
    return v != 0


def generic_field(g: MetricTensor, ansatz: AnsatzSpace):
    """The field with one unknown per column, plus its unknown names and columns."""
    base = ansatz.varset(g.varset)
    cols = ansatz.columns(g.varset)
    names = [f"{ansatz.prefix}{n}" for n in range(len(cols))]
    clash = set(names) & set(base.symbols)
    if clash:
        raise ValueError(f"unknown names {sorted(clash)} collide with existing symbols")
    vs = base.with_unknowns(names)
    comps = [vs.zero] * N
    for (c, f), u in zip(cols, names):
        comps[c] = comps[c] + f.lift(vs) * vs.symbol(u)
    return VectorField(comps), names, cols


def killing_equations(g: MetricTensor, T: VectorField, unknowns: Sequence[str]) -> LinearSystem:
    """Coefficient-matched form of ``L_T g = 0``; rows are labelled by the
    0-based index pair (i, j), i <= j, and the monomial they come from.
    """
    L = lie_derivative_metric(T, g)
    items = [((i, j), L[i][j]) for i in range(N) for j in range(i, N)]
    return coefficient_system(items, unknowns)


@dataclass(frozen=True)
class KillingBasis:
    fields: tuple[VectorField, ...]
    ansatz: AnsatzSpace
    pivot_conditions: tuple[Expr, ...] = ()
    system_shape: tuple[int, int] = (0, 0)

    @property
    def dimension(self) -> int:
        return len(self.fields)

    def __len__(self):
        return len(self.fields)

    def __iter__(self):
        return iter(self.fields)

    def __getitem__(self, i):
        return self.fields[i]

    def report(self, metric: MetricTensor) -> dict:
        return {
            "metric": metric.to_strings(),
            "ansatz": self.ansatz.describe(),
            "dimension": self.dimension,
            "basis": [f.to_strings() for f in self.fields],
            "pivot_conditions": [f"{c} != 0" for c in self.pivot_conditions],
            "scope": SCOPE_NOTE,
        }


def _assemble(vector, cols, vs: VarSet) -> VectorField:
    comps = [vs.zero] * N
    for coeff, (c, f) in zip(vector, cols):
        if coeff:
            comps[c] = comps[c] + f.lift(vs) * coeff
    return VectorField(comps)


def solve_killing(g: MetricTensor, ansatz: AnsatzSpace | None = None) -> KillingBasis:
    """Exact Killing basis within ``ansatz`` in reduced echelon normal form.

    With symbolic parameters the nullspace is taken over Q(params); the
    conditions under which that generic answer is valid are recorded.  Use
    :func:`solve_killing_cases` for the full case split.
    """
    ansatz = ansatz or AnsatzSpace()
    T, names, cols = generic_field(g, ansatz)
    system = killing_equations(g, T, names)
    n = len(names)
    base = ansatz.varset(g.varset)
    if system.is_numeric:
        vectors = linalg.nullspace(system.numeric_matrix(), n)
        conditions = ()
    else:
        rows = [list(r) for r in system.matrix]
        conditions = linalg.fraction_free_echelon(rows, n).conditions
        pvs = base.param_varset
        vectors = [[v if isinstance(v, Expr) else pvs.const(v) for v in vec]
                   for vec in linalg.nullspace(rows, n)]
    fields = tuple(_assemble(v, cols, base) for v in vectors)
    for f in fields:
        check = verify_killing(g, f)
        if not check.killing:
            raise AssertionError(f"solver produced a non-Killing field {f}")
    return KillingBasis(fields, ansatz, tuple(conditions), system.shape)


@dataclass(frozen=True)
class KillingCheck:
    killing: bool
    residual: tuple[tuple[Expr, ...], ...]

    def __bool__(self):
        return self.killing

    def nonzero_entries(self) -> dict[tuple[int, int], Expr]:
        return {(i, j): self.residual[i][j]
                for i in range(N) for j in range(i, N) if not self.residual[i][j].is_zero}


def verify_killing(g: MetricTensor, T: VectorField) -> KillingCheck:
    L = lie_derivative_metric(T, g)
    return KillingCheck(all(v.is_zero for r in L for v in r), L)


# ---------------------------------------------------------------------------
# case tree for symbolic parameters
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CaseBranch:
    """One leaf of the parameter case split.

    ``bindings`` lists the equalities imposed (``D -> 0``, ``C -> D^2``),
    ``nonzero`` the conditions assumed nonvanishing on this leaf.
    """

    bindings: tuple[tuple[str, Expr], ...]
    nonzero: tuple[Expr, ...]
    basis: KillingBasis
    unresolved: tuple[Expr, ...] = ()

    @property
    def dimension(self) -> int:
        return self.basis.dimension

    def label(self) -> str:
        eqs = [f"{p} = {v}" for p, v in self.bindings]
        neq = [f"{c} != 0" for c in self.nonzero]
        return ", ".join(eqs + neq) or "generic"


def _solve_linear_factor(f: Expr, params: Sequence[str]):
    """(param, value) with f = k*(param - value) for a rational k, or None."""
    for p in params:
        if f.degree(p) != 1:
            continue
        groups = f.collect([p])
        lead = groups.get((1,))
        if lead is None or not lead.is_constant:
            continue
        rest = groups.get((0,), f.varset.zero)
        return p, (-rest / lead.constant_value())
    return None


def solve_killing_cases(g: MetricTensor, ansatz: AnsatzSpace | None = None,
                        max_depth: int = 4) -> list[CaseBranch]:
    """Split on every pivot condition of the generic solve and re-solve.

    A condition that is linear in some parameter with a rational leading
    coefficient is imposed by substitution into both the metric and the
    ansatz; any other condition is reported as unresolved on its leaf.
    """
    ansatz = ansatz or AnsatzSpace()
    leaves: list[CaseBranch] = []
    seen: set = set()

    def walk(metric: MetricTensor, anz: AnsatzSpace, bindings, nonzero, depth):
        key = tuple(sorted((p, str(v)) for p, v in bindings))
        if key in seen:
            return
        seen.add(key)
        basis = solve_killing(metric, anz)
        params = [p for p in metric.varset.parameters
                  if any(e.depends_on(p) for r in metric.g for e in r)
                  or any(gen.rate.depends_on(p) for gen in anz.exp_basis)]
        unresolved = []
        branches = []
        for cond in basis.pivot_conditions:
            sol = _solve_linear_factor(cond.lift(metric.varset.param_varset), params)
            if sol is None or depth >= max_depth:
                unresolved.append(cond)
            else:
                branches.append((cond, sol))
        leaves.append(CaseBranch(tuple(bindings), tuple(nonzero) + tuple(basis.pivot_conditions),
                                 basis, tuple(unresolved)))
        for cond, (p, value) in branches:
            b = {p: value}
            composed = [(q, substitute(v, b)) for q, v in bindings] + [(p, value)]
            walk(metric.subs(b), anz.subs(b), composed, list(nonzero), depth + 1)

    walk(g, ansatz, [], [], 0)
    return leaves


# ---------------------------------------------------------------------------
# reference PDE system
# ---------------------------------------------------------------------------

@lru_cache(maxsize=1)
def reference_data() -> dict:
    text = resources.files("qhlorentz").joinpath("golden/reference.json").read_text()
    return json.loads(text)


_PAIR_INDEX = {"x": 0, "h": 1, "z": 2}


@dataclass(frozen=True)
class PdeReport:
    pairs: tuple[str, ...]
    multiples: tuple[Fraction, ...]
    engine: tuple[Expr, ...]

    def as_dict(self) -> dict:
        return {p: str(m) for p, m in zip(self.pairs, self.multiples)}


def formal_killing_field(g: MetricTensor, names=("alpha", "beta", "gamma")):
    vs = g.varset.with_functions(names)
    return VectorField([vs.symbol(n) for n in names]), vs


def pde_check(g: MetricTensor | None = None) -> PdeReport:
    """Compare each Lie-derivative component with the tabulated PDE.

    For every listed index pair the engine's component divided by the
    tabulated expression must be a nonzero rational; the six ratios are
    returned.  Raises :class:`PdeMismatch` otherwise.
    """
    g = g or metric_family()
    ref = reference_data()["pde"]
    T, vs = formal_killing_field(g)
    L = lie_derivative_metric(T, g)
    multiples, engine = [], []
    for pair in ref["order"]:
        a, b = (_PAIR_INDEX[s] for s in pair.split(","))
        mine = L[a][b]
        theirs = vs.parse(ref["equations"][pair])
        if theirs.is_zero:
            raise PdeMismatch(pair, mine, theirs)
        ratio = mine / theirs
        if not ratio.is_constant or ratio.is_zero:
            raise PdeMismatch(pair, mine, theirs)
        multiples.append(ratio.constant_value())
        engine.append(mine)
    return PdeReport(tuple(ref["order"]), tuple(multiples), tuple(engine))


__all__ = [
    "AnsatzSpace", "KillingBasis", "KillingCheck", "CaseBranch", "PdeReport", "SCOPE_NOTE",
    "generic_field", "killing_equations", "solve_killing", "solve_killing_cases",
    "verify_killing", "pde_check", "formal_killing_field", "reference_data", "PARAMETER",
]
