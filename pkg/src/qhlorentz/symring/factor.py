"""gcd, irreducible factors and common zero loci of polynomial Exprs.

The heavy lifting (multivariate gcd / factorisation over Q) is delegated to
sympy's sparse polynomial rings; everything here converts to and from the
exponent-tuple representation used by :mod:`.core`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .core import (
    COORDINATE,
    EXPONENTIAL,
    PARAMETER,
    Expr,
    _from_sympy,
    _grlex,
    _layout,
    _min_exps,
    _shift,
    _sympy_ring,
    _to_sympy,
)


def _strip_units(e: Expr):
    """Numerator of ``e`` with exponential factors removed (they never vanish)."""
    lay = _layout(e.varset)
    p = e.num
    if not p or not lay.exp_idx:
        return p
    lo = _min_exps(p, len(lay.symbols))
    shift = tuple(lo[i] if i in lay.exp_idx else 0 for i in range(len(lo)))
    return _shift(p, shift) if any(shift) else p


def _monic(vs, p) -> Expr:
    lead = p[max(p, key=_grlex)]
    return Expr(vs, {m: c / lead for m, c in p.items()})


def gcd(values: Iterable[Expr]) -> Expr:
    """Monic gcd of the numerators of ``values`` (zero entries are skipped)."""
    values = [v for v in values if not v.is_zero]
    if not values:
        return Expr(values[0].varset, {}) if values else None
    vs = values[0].varset
    for v in values[1:]:
        vs = vs.merge(v.varset)
    lay = _layout(vs)
    R = _sympy_ring(lay.symbols)
    g = None
    for v in values:
        q = _to_sympy(R, _strip_units(v.lift(vs)))
        g = q if g is None else g.gcd(q)
        if g.is_ground:
            return vs.one
    return _monic(vs, _from_sympy(g))


def factor(e: Expr) -> list[tuple[Expr, int]]:
    """Irreducible non-unit factors of the numerator of ``e`` with multiplicities."""
    vs = e.varset
    p = _strip_units(e)
    if not p:
        raise ValueError("cannot factor zero")
    R = _sympy_ring(_layout(vs).symbols)
    _, parts = _to_sympy(R, p).factor_list()
    out = [(_monic(vs, _from_sympy(f)), k) for f, k in parts]
    out.sort(key=lambda fk: (fk[0].total_degree, str(fk[0])))
    return out


def squarefree_part(e: Expr) -> Expr:
    result = e.varset.one
    for f, _ in factor(e):
        result = result * f
    return result


def _is_nonvanishing(e: Expr, assume_nonzero: frozenset[str]) -> bool:
    """True when ``e`` is a rational multiple of a monomial in never-zero symbols."""
    lay = _layout(e.varset)
    p = _strip_units(e)
    if len(p) != 1:
        return False
    (m, _), = p.items()
    return all(not x or lay.symbols[i] in assume_nonzero for i, x in enumerate(m))


@dataclass(frozen=True)
class LocusReport:
    """Common zero set of a family of functions.

    ``factors`` are the square-free irreducible conditions involving the
    coordinates (the locus is their union); ``parameter_conditions`` are
    parameter-only factors not covered by the nonvanishing assumptions, on
    which the whole family vanishes identically.  ``exact`` is False when the
    residual system after removing the common factor could not be shown to
    have no zeros, in which case the true locus may be larger.
    """

    factors: tuple[Expr, ...]
    parameter_conditions: tuple[Expr, ...] = ()
    everywhere: bool = False
    exact: bool = True

    @property
    def is_empty(self) -> bool:
        return not self.everywhere and not self.factors and not self.parameter_conditions

    def conditions(self) -> list[str]:
        return [f"{f} = 0" for f in self.factors]


def common_zero_locus(values: Sequence[Expr], assume_nonzero: Iterable[str] = ()) -> LocusReport:
    assume = frozenset(assume_nonzero)
    nonzero = [v for v in values if not v.is_zero]
    if not nonzero:
        return LocusReport((), (), everywhere=True)
    g = gcd(nonzero)
    vs = g.varset
    lay = _layout(vs)
    coord_names = {n for n, k in zip(lay.symbols, lay.kind) if k in (COORDINATE,)}
    coord_factors, param_conditions = [], []
    if not g.is_constant:
        for f, _ in factor(g):
            used = f.symbols()
            if used & coord_names:
                coord_factors.append(f)
            elif _is_nonvanishing(f, assume):
                continue
            else:
                param_conditions.append(f)
    exact = any(_is_nonvanishing((v.lift(vs).numerator / g).numerator, assume | _exp_names(vs))
                for v in nonzero)
    return LocusReport(tuple(coord_factors), tuple(param_conditions), False, exact)


def _exp_names(vs) -> frozenset[str]:
    lay = _layout(vs)
    return frozenset(n for n, k in zip(lay.symbols, lay.kind) if k == EXPONENTIAL)


def content_in(e: Expr, names: Iterable[str]) -> Expr:
    """gcd of the coefficients of ``e`` viewed as a polynomial in ``names``."""
    groups = e.collect(list(names))
    return gcd(groups.values())


__all__ = ["gcd", "factor", "squarefree_part", "common_zero_locus", "LocusReport", "content_in",
           "Fraction", "PARAMETER"]
