"""Exact rational functions over a declared set of symbols.

An :class:`Expr` is a reduced quotient of two sparse polynomials with
:class:`fractions.Fraction` coefficients.  Monomials are exponent tuples laid
out in :class:`VarSet` order (coordinates, parameters, exponential generators,
formal functions, their derivative symbols, unknowns).  Exponential generators
stand for ``exp(rate * direction)`` and may carry negative exponents, so
``E^-1`` is the reciprocal exponential and ``E * E^-1`` reduces to ``1``.

Canonical form: numerator and denominator share no common factor, the
denominator has no exponential factor (those are units) and its leading
coefficient in graded-lex order is ``1``.  Two equal values therefore have
identical representations, which is what the zero test and ``==`` rely on.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Iterable, Mapping

from ..errors import (
    DivisionByZero,
    EvaluationPole,
    NotDifferentiable,
    TranscendentalValue,
    UnknownVariable,
    Unsupported,
)

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

COORDINATE = "coordinate"
PARAMETER = "parameter"
EXPONENTIAL = "exponential"
FUNCTION = "function"
DERIVATIVE = "derivative"
UNKNOWN = "unknown"

_PRINT_RANK = {PARAMETER: 0, COORDINATE: 1, EXPONENTIAL: 2, FUNCTION: 3, DERIVATIVE: 4, UNKNOWN: 5}


@dataclass(frozen=True)
class ExpGenerator:
    """Formal symbol ``name`` with d(name)/d(direction) = rate * name."""

    name: str
    direction: str
    rate: "Expr"

    def __str__(self):
        return f"{self.name} = exp(({self.rate})*{self.direction})"


@dataclass(frozen=True)
class FormalFunction:
    """An unspecified function of the coordinates.

    ``derivatives`` maps every coordinate to the symbol standing for the first
    partial derivative.  Those symbols cannot be differentiated again.
    """

    name: str
    derivatives: tuple[tuple[str, str], ...]

    @classmethod
    def of(cls, name: str, coordinates: Iterable[str]) -> "FormalFunction":
        return cls(name, tuple((c, f"{name}_{c}") for c in coordinates))


@dataclass(frozen=True)
class VarSet:
    coordinates: tuple[str, ...] = ("x", "h", "z")
    parameters: tuple[str, ...] = ("C", "D")
    exp_generators: tuple[ExpGenerator, ...] = ()
    functions: tuple[FormalFunction, ...] = ()
    unknowns: tuple[str, ...] = ()

    def __post_init__(self):
        for name in ("coordinates", "parameters", "exp_generators", "functions", "unknowns"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        names = list(self.coordinates) + list(self.parameters) + list(self.unknowns)
        names += [g.name for g in self.exp_generators]
        for f in self.functions:
            names.append(f.name)
            names += [d for _, d in f.derivatives]
            if tuple(c for c, _ in f.derivatives) != self.coordinates:
                raise ValueError(f"function {f.name} must list one derivative per coordinate")
        for n in names:
            if not isinstance(n, str) or not _IDENT.match(n):
                raise ValueError(f"invalid symbol name {n!r}")
        if len(set(names)) != len(names):
            raise ValueError(f"symbol names are not distinct: {names}")
        if not self.exp_generators:
            return
        pvs = _param_varset(self.parameters)
        gens = []
        for g in self.exp_generators:
            if g.direction not in self.coordinates:
                raise ValueError(f"exponential {g.name}: direction {g.direction} is not a coordinate")
            rate = g.rate
            if not isinstance(rate, Expr):
                rate = Expr.constant(pvs, rate)
            if rate.varset != pvs:
                rate = rate.lift(pvs)
            if not rate.is_polynomial or rate.is_zero:
                raise ValueError(f"exponential {g.name}: rate must be a nonzero polynomial in parameters")
            gens.append(g if rate is g.rate else ExpGenerator(g.name, g.direction, rate))
        object.__setattr__(self, "exp_generators", tuple(gens))

    # -- construction helpers -------------------------------------------------
    @property
    def symbols(self) -> tuple[str, ...]:
        return _layout(self).symbols

    @property
    def param_varset(self) -> "VarSet":
        return _param_varset(self.parameters)

    def kind(self, name: str) -> str:
        lay = _layout(self)
        try:
            return lay.kind[lay.index[name]]
        except KeyError:
            raise UnknownVariable(f"unknown symbol {name!r}") from None

    def exp(self, name: str) -> ExpGenerator:
        for g in self.exp_generators:
            if g.name == name:
                return g
        raise UnknownVariable(f"no exponential generator {name!r}")

    def symbol(self, name: str) -> "Expr":
        lay = _layout(self)
        if name not in lay.index:
            raise UnknownVariable(f"unknown symbol {name!r}")
        mono = [0] * len(lay.symbols)
        mono[lay.index[name]] = 1
        return Expr(self, {tuple(mono): Fraction(1)})

    def const(self, value) -> "Expr":
        return Expr.constant(self, value)

    @property
    def zero(self) -> "Expr":
        return Expr(self, {})

    @property
    def one(self) -> "Expr":
        return Expr.constant(self, 1)

    def parse(self, text: str) -> "Expr":
        from .parse import parse

        return parse(text, self)

    def with_exp(self, name: str, direction: str, rate) -> "VarSet":
        if any(g.name == name for g in self.exp_generators):
            return self
        pvs = self.param_varset
        if isinstance(rate, str):
            rate = pvs.parse(rate)
        gen = ExpGenerator(name, direction, rate if isinstance(rate, Expr) else pvs.const(rate))
        return VarSet(self.coordinates, self.parameters, self.exp_generators + (gen,),
                      self.functions, self.unknowns)

    def with_unknowns(self, names: Iterable[str]) -> "VarSet":
        extra = tuple(n for n in names if n not in self.unknowns)
        return VarSet(self.coordinates, self.parameters, self.exp_generators,
                      self.functions, self.unknowns + extra)

    def with_functions(self, names: Iterable[str]) -> "VarSet":
        have = {f.name for f in self.functions}
        extra = tuple(FormalFunction.of(n, self.coordinates) for n in names if n not in have)
        return VarSet(self.coordinates, self.parameters, self.exp_generators,
                      self.functions + extra, self.unknowns)

    def without_exps(self, names: Iterable[str]) -> "VarSet":
        drop = set(names)
        return VarSet(self.coordinates, self.parameters,
                      tuple(g for g in self.exp_generators if g.name not in drop),
                      self.functions, self.unknowns)

    def merge(self, other: "VarSet") -> "VarSet":
        """Smallest VarSet containing both; raises ValueError on conflicting roles."""
        if self == other:
            return self
        return _merge(self, other)


@lru_cache(maxsize=None)
def _param_varset(parameters: tuple[str, ...]) -> VarSet:
    return VarSet(coordinates=(), parameters=parameters)


def _union(a: tuple, b: tuple) -> tuple:
    return a + tuple(n for n in b if n not in a)


@lru_cache(maxsize=1024)
def _merge(a: VarSet, b: VarSet) -> VarSet:
    if a.coordinates and b.coordinates and a.coordinates != b.coordinates:
        raise ValueError(f"incompatible coordinate lists {a.coordinates} and {b.coordinates}")
    coords = a.coordinates or b.coordinates
    params = _union(a.parameters, b.parameters)
    pvs = _param_varset(params)
    gens: dict[str, ExpGenerator] = {}
    for g in a.exp_generators + b.exp_generators:
        g = ExpGenerator(g.name, g.direction, g.rate.lift(pvs))
        if g.name in gens and gens[g.name] != g:
            raise ValueError(f"conflicting definitions of exponential {g.name}")
        gens[g.name] = g
    funcs: dict[str, FormalFunction] = {}
    for f in a.functions + b.functions:
        if f.name in funcs and funcs[f.name] != f:
            raise ValueError(f"conflicting definitions of function {f.name}")
        funcs[f.name] = f
    return VarSet(coords, params, tuple(gens.values()), tuple(funcs.values()),
                  _union(a.unknowns, b.unknowns))


class _Layout:
    __slots__ = ("symbols", "index", "kind", "exp_idx", "print_order", "zero")

    def __init__(self, vs: VarSet):
        syms, kinds = [], []
        for n in vs.coordinates:
            syms.append(n), kinds.append(COORDINATE)
        for n in vs.parameters:
            syms.append(n), kinds.append(PARAMETER)
        for g in vs.exp_generators:
            syms.append(g.name), kinds.append(EXPONENTIAL)
        for f in vs.functions:
            syms.append(f.name), kinds.append(FUNCTION)
        for f in vs.functions:
            for _, d in f.derivatives:
                syms.append(d), kinds.append(DERIVATIVE)
        for n in vs.unknowns:
            syms.append(n), kinds.append(UNKNOWN)
        self.symbols = tuple(syms)
        self.kind = tuple(kinds)
        self.index = {n: i for i, n in enumerate(syms)}
        self.exp_idx = tuple(i for i, k in enumerate(kinds) if k == EXPONENTIAL)
        self.print_order = tuple(sorted(range(len(syms)), key=lambda i: (_PRINT_RANK[kinds[i]], i)))
        self.zero = (0,) * len(syms)


@lru_cache(maxsize=None)
def _layout(vs: VarSet) -> _Layout:
    return _Layout(vs)


# ---------------------------------------------------------------------------
# sparse polynomial kernels on dict[tuple[int, ...], Fraction]
# ---------------------------------------------------------------------------

def _grlex(m):
    return (sum(m), m)


def _padd(a, b):
    if len(a) < len(b):
        a, b = b, a
    out = dict(a)
    for m, c in b.items():
        v = out.get(m)
        if v is None:
            out[m] = c
        else:
            v += c
            if v:
                out[m] = v
            else:
                del out[m]
    return out


def _pneg(a):
    return {m: -c for m, c in a.items()}


def _psub(a, b):
    return _padd(a, _pneg(b))


def _pscale(a, c):
    if not c:
        return {}
    if c == 1:
        return a
    return {m: v * c for m, v in a.items()}


def _pmul(a, b):
    if len(a) == 1 and len(b) == 1:
        (ma, ca), = a.items()
        (mb, cb), = b.items()
        return {tuple(x + y for x, y in zip(ma, mb)): ca * cb}
    out: dict = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            m = tuple(x + y for x, y in zip(ma, mb))
            v = out.get(m)
            out[m] = ca * cb if v is None else v + ca * cb
    return {m: c for m, c in out.items() if c}


def _pconst(p, zero):
    return not p or (len(p) == 1 and zero in p)


def _shift(p, shift):
    return {tuple(e - s for e, s in zip(m, shift)): c for m, c in p.items()}


# -- gcd through sympy's sparse polynomial rings ------------------------------

@lru_cache(maxsize=None)
def _sympy_ring(symbols: tuple[str, ...]):
    from sympy.polys.domains import QQ
    from sympy.polys.orderings import lex
    from sympy.polys.rings import PolyRing

    return PolyRing(",".join(symbols), QQ, lex)


def _to_sympy(R, p):
    dom = R.domain
    return R.from_dict({m: dom(c.numerator, c.denominator) for m, c in p.items()})


def _from_sympy(q):
    return {tuple(m): Fraction(int(c.numerator), int(c.denominator)) for m, c in q.items()}


def _min_exps(p, n):
    mins = list(next(iter(p)))
    for m in p:
        for i in range(n):
            if m[i] < mins[i]:
                mins[i] = m[i]
    return mins


def _monomial_gcd(num, den_mono, n):
    lo = _min_exps(num, n)
    return tuple(max(0, min(lo[i], den_mono[i])) for i in range(n))


def _pgcd_div(lay: _Layout, num, den):
    """Return num/g, den/g with g = gcd(num, den); den has nonnegative exponents."""
    n = len(lay.symbols)
    if len(den) == 1:
        (dm, _), = den.items()
        g = _monomial_gcd(num, dm, n)
        if any(g):
            return _shift(num, g), _shift(den, g)
        return num, den
    lo = _min_exps(num, n)
    nshift = tuple(min(0, lo[i]) if i in lay.exp_idx else 0 for i in range(n))
    if any(nshift):
        num = _shift(num, nshift)
    R = _sympy_ring(lay.symbols)
    pn, pd = _to_sympy(R, num), _to_sympy(R, den)
    g = pn.gcd(pd)
    if g.is_ground:
        out_n, out_d = num, den
    else:
        out_n, out_d = _from_sympy(pn.exquo(g)), _from_sympy(pd.exquo(g))
    if any(nshift):
        out_n = _shift(out_n, tuple(-s for s in nshift))
    return out_n, out_d


def _normalize(vs: VarSet, num, den):
    if not num:
        return Expr(vs, {})
    if den is None:
        return Expr(vs, num)
    if not den:
        raise DivisionByZero("division by an identically zero expression")
    lay = _layout(vs)
    if lay.exp_idx:
        lo = _min_exps(den, len(lay.symbols))
        shift = tuple(lo[i] if i in lay.exp_idx else 0 for i in range(len(lo)))
        if any(shift):
            num, den = _shift(num, shift), _shift(den, shift)
    if _pconst(den, lay.zero):
        return Expr(vs, _pscale(num, 1 / den[lay.zero]))
    if len(den) == 1:
        (dm, dc), = den.items()
        if any(e < 0 for e in dm):
            raise ValueError("negative exponent on a non-exponential symbol")
    num, den = _pgcd_div(lay, num, den)
    lead = den[max(den, key=_grlex)]
    if lead != 1:
        inv = 1 / lead
        num, den = _pscale(num, inv), _pscale(den, inv)
    if _pconst(den, lay.zero):
        return Expr(vs, num)
    return Expr(vs, num, den)


# ---------------------------------------------------------------------------
# derivation tables
# ---------------------------------------------------------------------------

_RAISE = object()


@lru_cache(maxsize=None)
def _derivation(vs: VarSet, var: str):
    lay = _layout(vs)
    if var not in lay.index:
        raise UnknownVariable(f"unknown symbol {var!r}")
    vkind = lay.kind[lay.index[var]]
    if vkind not in (COORDINATE, PARAMETER, UNKNOWN):
        raise Unsupported(f"cannot differentiate with respect to {vkind} {var!r}")
    table = []
    for idx, s in enumerate(lay.symbols):
        k = lay.kind[idx]
        d = None
        if s == var:
            d = {lay.zero: Fraction(1)}
        elif k == EXPONENTIAL:
            g = vs.exp(s)
            own = vs.symbol(s).num
            if vkind == COORDINATE and g.direction == var:
                d = _pmul(g.rate.lift(vs).num, own)
            elif vkind == PARAMETER:
                drate = g.rate.diff(var)
                if not drate.is_zero:
                    d = _pmul(_pmul(drate.lift(vs).num, vs.symbol(g.direction).num), own)
        elif k == FUNCTION and vkind == COORDINATE:
            f = next(f for f in vs.functions if f.name == s)
            d = vs.symbol(dict(f.derivatives)[var]).num
        elif k == DERIVATIVE and vkind == COORDINATE:
            d = _RAISE
        table.append(d)
    return tuple(table)


def _pdiff(vs: VarSet, p, var: str):
    table = _derivation(vs, var)
    lay = _layout(vs)
    out: dict = {}
    for m, c in p.items():
        for idx, e in enumerate(m):
            if not e:
                continue
            d = table[idx]
            if d is None:
                continue
            if d is _RAISE:
                raise NotDifferentiable(f"{lay.symbols[idx]} has no second derivative")
            base = list(m)
            base[idx] -= 1
            coef = c * e
            for md, cd in d.items():
                key = tuple(x + y for x, y in zip(base, md))
                v = out.get(key)
                out[key] = coef * cd if v is None else v + coef * cd
    return {m: c for m, c in out.items() if c}


# ---------------------------------------------------------------------------
# Expr
# ---------------------------------------------------------------------------

class Expr:
    """Immutable exact rational function; see the module docstring."""

    __slots__ = ("varset", "num", "den", "_hash")

    def __init__(self, varset: VarSet, num, den=None):
        self.varset = varset
        self.num = num
        self.den = den
        self._hash = None

    # -- constructors ----------------------------------------------------------
    @classmethod
    def constant(cls, varset: VarSet, value) -> "Expr":
        if isinstance(value, Expr):
            return value.lift(varset) if value.varset != varset else value
        if isinstance(value, str):
            return varset.parse(value)
        if not isinstance(value, Rational):
            raise TypeError(f"exact rational expected, got {type(value).__name__}")
        value = Fraction(value)
        if not value:
            return cls(varset, {})
        return cls(varset, {_layout(varset).zero: value})

    @classmethod
    def from_terms(cls, varset: VarSet, terms: Mapping[tuple[int, ...], Fraction]) -> "Expr":
        return cls(varset, {m: Fraction(c) for m, c in terms.items() if c})

    # -- predicates -----------------------------------------------------------
    @property
    def is_zero(self) -> bool:
        return not self.num

    @property
    def is_polynomial(self) -> bool:
        return self.den is None

    @property
    def is_constant(self) -> bool:
        return self.den is None and _pconst(self.num, _layout(self.varset).zero)

    def constant_value(self) -> Fraction:
        if not self.is_constant:
            raise ValueError(f"{self} is not a constant")
        return self.num.get(_layout(self.varset).zero, Fraction(0))

    def __bool__(self):
        return bool(self.num)

    def symbols(self) -> frozenset[str]:
        lay = _layout(self.varset)
        used = set()
        for p in (self.num, self.den or {}):
            for m in p:
                used.update(lay.symbols[i] for i, e in enumerate(m) if e)
        return frozenset(used)

    def depends_on(self, name: str) -> bool:
        return name in self.symbols()

    def degree(self, name: str) -> int:
        if not self.is_polynomial:
            raise ValueError("degree of a non-polynomial")
        if not self.num:
            return -1
        i = _layout(self.varset).index[name]
        return max(m[i] for m in self.num)

    @property
    def total_degree(self) -> int:
        return max((sum(m) for m in self.num), default=-1)

    @property
    def numerator(self) -> "Expr":
        return Expr(self.varset, self.num)

    @property
    def denominator(self) -> "Expr":
        return Expr(self.varset, self.den) if self.den is not None else self.varset.one

    # -- varset handling ------------------------------------------------------
    def lift(self, target: VarSet) -> "Expr":
        if target == self.varset:
            return self
        mapping = _lift_map(self.varset, target)
        return Expr(target, _remap(self.num, mapping, len(_layout(target).symbols), self),
                    None if self.den is None else
                    _remap(self.den, mapping, len(_layout(target).symbols), self))

    def _coerce(self, other):
        if isinstance(other, Expr):
            if other.varset == self.varset:
                return self, other
            vs = self.varset.merge(other.varset)
            return self.lift(vs), other.lift(vs)
        if isinstance(other, Rational):
            return self, Expr.constant(self.varset, other)
        return None, None

    # -- arithmetic -------------------------------------------------------------
    def __add__(self, other):
        a, b = self._coerce(other)
        if a is None:
            return NotImplemented
        if a.den is None and b.den is None:
            return Expr(a.varset, _padd(a.num, b.num))
        if a.den == b.den:
            return _normalize(a.varset, _padd(a.num, b.num), a.den)
        ad = a.den or {_layout(a.varset).zero: Fraction(1)}
        bd = b.den or {_layout(a.varset).zero: Fraction(1)}
        return _normalize(a.varset, _padd(_pmul(a.num, bd), _pmul(b.num, ad)), _pmul(ad, bd))

    __radd__ = __add__

    def __neg__(self):
        return Expr(self.varset, _pneg(self.num), self.den)

    def __pos__(self):
        return self

    def __sub__(self, other):
        a, b = self._coerce(other)
        if a is None:
            return NotImplemented
        return a + (-b)

    def __rsub__(self, other):
        a, b = self._coerce(other)
        if a is None:
            return NotImplemented
        return b + (-a)

    def __mul__(self, other):
        a, b = self._coerce(other)
        if a is None:
            return NotImplemented
        if a.den is None and b.den is None:
            return Expr(a.varset, _pmul(a.num, b.num))
        if not a.num or not b.num:
            return Expr(a.varset, {})
        ad = a.den or {_layout(a.varset).zero: Fraction(1)}
        bd = b.den or {_layout(a.varset).zero: Fraction(1)}
        return _normalize(a.varset, _pmul(a.num, b.num), _pmul(ad, bd))

    __rmul__ = __mul__

    def __truediv__(self, other):
        a, b = self._coerce(other)
        if a is None:
            return NotImplemented
        if not b.num:
            raise DivisionByZero(f"division of {a} by zero")
        if b.is_constant:
            return Expr(a.varset, _pscale(a.num, 1 / b.constant_value()), a.den)
        lay = _layout(a.varset)
        one = {lay.zero: Fraction(1)}
        return _normalize(a.varset, _pmul(a.num, b.den or one), _pmul(a.den or one, b.num))

    def __rtruediv__(self, other):
        a, b = self._coerce(other)
        if a is None:
            return NotImplemented
        return b / a

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.varset.one / (self ** (-n))
        result, base = self.varset.one, self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- comparison -------------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, Expr):
            if other.varset != self.varset:
                try:
                    a, b = self._coerce(other)
                except ValueError:
                    return False
                return a.num == b.num and a.den == b.den
            return self.num == other.num and self.den == other.den
        if isinstance(other, Rational):
            return self.is_constant and self.constant_value() == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            if self.is_constant:
                self._hash = hash(self.constant_value())
            else:
                lay = _layout(self.varset)

                def named(p):
                    return frozenset(
                        (tuple((lay.symbols[i], e) for i, e in enumerate(m) if e), c)
                        for m, c in p.items()
                    )

                self._hash = hash((named(self.num), named(self.den) if self.den else None))
        return self._hash

    # -- calculus and substitution ----------------------------------------------
    def diff(self, var: str) -> "Expr":
        vs = self.varset
        dn = _pdiff(vs, self.num, var)
        if self.den is None:
            return Expr(vs, dn)
        dd = _pdiff(vs, self.den, var)
        return _normalize(vs, _psub(_pmul(dn, self.den), _pmul(self.num, dd)),
                          _pmul(self.den, self.den))

    def subs(self, bindings: Mapping[str, object]) -> "Expr":
        return substitute(self, bindings)

    # -- inspection -------------------------------------------------------------
    def terms(self) -> list[tuple[Fraction, dict[str, int]]]:
        """Numerator terms in canonical (descending graded-lex) order."""
        lay = _layout(self.varset)
        return [(self.num[m], {lay.symbols[i]: e for i, e in enumerate(m) if e})
                for m in sorted(self.num, key=_grlex, reverse=True)]

    def collect(self, names: Iterable[str]) -> dict[tuple[int, ...], "Expr"]:
        """Group a polynomial by the exponents of ``names``.

        Returns a map from exponent vectors (aligned with ``names``) to the
        coefficient polynomials in the remaining symbols.
        """
        if self.den is not None:
            raise ValueError("collect() needs a polynomial")
        lay = _layout(self.varset)
        idx = [lay.index[n] for n in names]
        groups: dict = {}
        for m, c in self.num.items():
            key = tuple(m[i] for i in idx)
            rest = list(m)
            for i in idx:
                rest[i] = 0
            groups.setdefault(key, {})[tuple(rest)] = c
        return {k: Expr(self.varset, v) for k, v in groups.items()}

    def __str__(self):
        if self.den is None:
            return _format_poly(self.varset, self.num)
        return f"({_format_poly(self.varset, self.num)})/({_format_poly(self.varset, self.den)})"

    def __repr__(self):
        return f"Expr({str(self)!r})"


@lru_cache(maxsize=4096)
def _lift_map(source: VarSet, target: VarSet):
    src, dst = _layout(source), _layout(target)
    return tuple(dst.index.get(n) for n in src.symbols)


def _remap(p, mapping, n, expr):
    out = {}
    for m, c in p.items():
        new = [0] * n
        for i, e in enumerate(m):
            if e:
                j = mapping[i]
                if j is None:
                    raise UnknownVariable(
                        f"{expr} uses {_layout(expr.varset).symbols[i]!r}, absent from the target VarSet")
                new[j] = e
        out[tuple(new)] = c
    return out


def _format_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _format_poly(vs: VarSet, p) -> str:
    if not p:
        return "0"
    lay = _layout(vs)
    parts = []
    for k, m in enumerate(sorted(p, key=_grlex, reverse=True)):
        c = p[m]
        factors = []
        for i in lay.print_order:
            e = m[i]
            if e == 1:
                factors.append(lay.symbols[i])
            elif e:
                factors.append(f"{lay.symbols[i]}^{e}")
        mono = "*".join(factors)
        a = abs(c)
        if not mono:
            body = _format_coeff(a)
        elif a == 1:
            body = mono
        else:
            body = f"{_format_coeff(a)}*{mono}"
        if k == 0:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append((" - " if c < 0 else " + ") + body)
    return "".join(parts)


# ---------------------------------------------------------------------------
# module-level operations
# ---------------------------------------------------------------------------

def arith(a: Expr, b, op: str) -> Expr:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def differentiate(e: Expr, v: str) -> Expr:
    return e.diff(v)


def _as_expr(value, vs: VarSet) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, str):
        return vs.parse(value)
    return Expr.constant(vs, value)


def substitute(e: Expr, bindings: Mapping[str, object]) -> Expr:
    """Simultaneous exact substitution.

    Binding a parameter also rewrites the rates of exponential generators;
    a generator whose rate becomes zero is replaced by ``1`` and dropped.
    Binding a coordinate to ``0`` sends exponentials along it to ``1``; any
    other value for such a coordinate raises :class:`TranscendentalValue`
    (or :class:`Unsupported` for non-constant values) when the exponential
    actually occurs in ``e``.
    """
    vs = e.varset
    lay = _layout(vs)
    if not bindings:
        return e
    values: dict[str, Expr] = {}
    for name, value in bindings.items():
        if name not in lay.index:
            raise UnknownVariable(f"unknown symbol {name!r}")
        kind = lay.kind[lay.index[name]]
        if kind in (EXPONENTIAL, FUNCTION, DERIVATIVE):
            raise Unsupported(f"cannot substitute for {kind} symbol {name!r}")
        values[name] = _as_expr(value, vs)

    used = e.symbols()
    param_bind = {n: v for n, v in values.items() if lay.kind[lay.index[n]] == PARAMETER}
    target = vs
    for v in values.values():
        target = target.merge(v.varset)
    pvs = _param_varset(target.parameters)

    exp_to_one = set()
    new_gens = []
    for g in vs.exp_generators:
        rate = g.rate
        rb = {n: v for n, v in param_bind.items() if rate.depends_on(n)}
        if rb:
            for n, v in rb.items():
                if v.symbols() - set(target.parameters):
                    raise Unsupported(f"rate of {g.name} would depend on non-parameters via {n}")
            rate = substitute(rate.lift(pvs), {n: v.lift(pvs) for n, v in rb.items()})
        if rate.is_zero:
            exp_to_one.add(g.name)
            continue
        dirval = values.get(g.direction)
        if dirval is not None and g.name in used:
            if dirval.is_zero:
                exp_to_one.add(g.name)
                continue
            if dirval.is_constant:
                raise TranscendentalValue(f"{g.name} at {g.direction} = {dirval} is not exact")
            if dirval != vs.symbol(g.direction):
                raise Unsupported(f"non-constant substitution for {g.direction} under {g.name}")
        new_gens.append(ExpGenerator(g.name, g.direction, rate))
    others = tuple(g for g in target.exp_generators if g.name not in {x.name for x in vs.exp_generators})
    target = VarSet(target.coordinates, target.parameters, tuple(new_gens) + others,
                    target.functions, target.unknowns)
    tlay = _layout(target)
    tn = len(tlay.symbols)
    vals = {n: v.lift(target) for n, v in values.items()}
    const_idx, expr_idx = {}, {}
    for n, v in vals.items():
        if v.is_constant:
            const_idx[lay.index[n]] = v.constant_value()
        else:
            expr_idx[lay.index[n]] = v
    drop = {lay.index[n] for n in exp_to_one}
    keep_map = [None if i in drop else tlay.index[n] for i, n in enumerate(lay.symbols)]
    order = list(expr_idx)

    def sub_poly(p):
        groups: dict = {}
        for m, c in p.items():
            for i, val in const_idx.items():
                if m[i]:
                    c = c * val ** m[i]
            if not c:
                continue
            key = tuple(m[i] for i in order)
            new = [0] * tn
            for i, ex in enumerate(m):
                if ex and i not in const_idx and i not in expr_idx and i not in drop:
                    new[keep_map[i]] = ex
            grp = groups.setdefault(key, {})
            t = tuple(new)
            grp[t] = grp.get(t, 0) + c
        total = target.zero
        for key, terms in groups.items():
            piece = Expr(target, {m: c for m, c in terms.items() if c})
            for i, ex in zip(order, key):
                if ex:
                    piece = piece * expr_idx[i] ** ex
            total = total + piece
        return total

    num = sub_poly(e.num)
    if e.den is None:
        return num
    den = sub_poly(e.den)
    if den.is_zero:
        raise EvaluationPole(f"denominator of {e} vanishes under {dict(bindings)}")
    return num / den


def at_point(e: Expr, point: Mapping[str, object]) -> Expr:
    """Value of ``e`` at a rational point of the coordinates.

    Exponentials whose exponent is nonzero at the point stay symbolic: the
    result lives in a coordinate-free VarSet in which each such generator name
    is a parameter standing for the (transcendental) value ``exp(rate * x0)``.
    """
    vs = e.varset
    lay = _layout(vs)
    pt = {c: Fraction(point[c]) for c in vs.coordinates}
    frozen = [g for g in vs.exp_generators if pt[g.direction] != 0]
    target = VarSet((), vs.parameters + tuple(g.name for g in frozen), (), (), vs.unknowns)
    if vs.functions:
        raise Unsupported("cannot evaluate formal functions at a point")
    tl = _layout(target)
    kinds = lay.kind

    def ev(p):
        out = {}
        for m, c in p.items():
            new = [0] * len(tl.symbols)
            for i, ex in enumerate(m):
                if not ex:
                    continue
                if kinds[i] == COORDINATE:
                    c = c * pt[lay.symbols[i]] ** ex
                    if not c:
                        break
                elif kinds[i] == EXPONENTIAL:
                    j = tl.index.get(lay.symbols[i])
                    if j is not None:
                        new[j] = ex
                else:
                    new[tl.index[lay.symbols[i]]] = ex
            if c:
                t = tuple(new)
                out[t] = out.get(t, 0) + c
        out = {m: c for m, c in out.items() if c}
        if not out:
            return target.zero
        lo = _min_exps(out, len(tl.symbols))
        shift = tuple(min(0, x) for x in lo)
        if any(shift):
            mono = tuple(-s for s in shift)
            return _normalize(target, _shift(out, shift), {mono: Fraction(1)})
        return Expr(target, out)

    num = ev(e.num)
    if e.den is None:
        return num
    den = ev(e.den)
    if den.is_zero:
        raise EvaluationPole(f"{e} has a pole at {dict(point)}")
    return num / den


DEFAULT_VARSET = VarSet()
