"""Turn "expression vanishes identically" into exact linear constraints."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

from ..errors import NonlinearSystem
from .core import COORDINATE, EXPONENTIAL, PARAMETER, Expr, VarSet, _grlex, _layout


@dataclass(frozen=True)
class LinearSystem:
    """Equations ``sum_j matrix[i][j] * unknowns[j] + constants[i] = 0``.

    Entries are Exprs over the parameter-only VarSet, so a system with
    symbolic parameters has coefficients in Q[C, D].  ``rows`` records where
    each equation came from: ``(label, monomial)`` with the coefficient of
    ``monomial`` in the expression tagged ``label``.
    """

    unknowns: tuple[str, ...]
    rows: tuple[tuple[object, str], ...]
    matrix: tuple[tuple[Expr, ...], ...]
    constants: tuple[Expr, ...]

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.unknowns)

    @property
    def is_numeric(self) -> bool:
        return all(e.is_constant for row in self.matrix for e in row) and \
            all(e.is_constant for e in self.constants)

    @property
    def is_homogeneous(self) -> bool:
        return all(e.is_zero for e in self.constants)

    def numeric_matrix(self) -> list[list[Fraction]]:
        return [[e.constant_value() for e in row] for row in self.matrix]

    def equations(self) -> dict[tuple[object, str], str]:
        out = {}
        for label, row, b in zip(self.rows, self.matrix, self.constants):
            vs = b.varset.with_unknowns(self.unknowns)
            lhs = b.lift(vs)
            for a, u in zip(row, self.unknowns):
                lhs = lhs + a.lift(vs) * vs.symbol(u)
            out[label] = f"{lhs} = 0"
        return out


def _basis_names(vs: VarSet, unknowns: set[str]) -> list[str]:
    lay = _layout(vs)
    return [n for n, k in zip(lay.symbols, lay.kind)
            if n not in unknowns and k != PARAMETER]


def _monomial_text(vs: VarSet, names: Sequence[str], key: tuple[int, ...]) -> str:
    e = vs.one
    for n, k in zip(names, key):
        if k:
            e = e * vs.symbol(n) ** k if k > 0 else e * Expr(vs, {_unit(vs, n, k): Fraction(1)})
    return str(e)


def _unit(vs, name, k):
    lay = _layout(vs)
    mono = [0] * len(lay.symbols)
    mono[lay.index[name]] = k
    return tuple(mono)


Source = Union[Expr, Mapping[object, Expr], Iterable[tuple[object, Expr]]]


def coefficient_system(e: Source, unknowns: Sequence[str]) -> LinearSystem:
    """Linear constraints on ``unknowns`` equivalent to every source vanishing.

    Coefficients of each monomial in the non-parameter, non-unknown symbols
    (coordinates, exponentials, remaining formal symbols) must vanish.  A
    denominator is cleared first; it may not involve the unknowns.
    """
    if isinstance(e, Expr):
        items = [(None, e)]
    elif isinstance(e, Mapping):
        items = list(e.items())
    else:
        items = list(e)
    unknowns = tuple(unknowns)
    unk = set(unknowns)
    rows, matrix, consts = [], [], []
    for label, expr in items:
        vs = expr.varset
        missing = unk - set(vs.symbols)
        if missing:
            vs = vs.with_unknowns(sorted(missing))
            expr = expr.lift(vs)
        if expr.den is not None and expr.denominator.symbols() & unk:
            raise NonlinearSystem(f"unknowns occur in a denominator of {expr}")
        num = expr.numerator
        pvs = vs.param_varset
        names = _basis_names(vs, unk)
        groups = num.collect(names)
        for key in sorted(groups, key=_grlex, reverse=True):
            coeff = groups[key]
            by_unknown = coeff.collect(unknowns)
            row = {u: pvs.zero for u in unknowns}
            const = pvs.zero
            for ukey, part in by_unknown.items():
                deg = sum(ukey)
                if deg > 1 or any(k < 0 for k in ukey):
                    raise NonlinearSystem(f"nonlinear occurrence of unknowns in {expr}")
                part = part.lift(pvs)
                if deg == 0:
                    const = part
                else:
                    row[unknowns[ukey.index(1)]] = part
            rows.append((label, _monomial_text(vs, names, key)))
            matrix.append(tuple(row[u] for u in unknowns))
            consts.append(const)
    return LinearSystem(unknowns, tuple(rows), tuple(matrix), tuple(consts))


__all__ = ["LinearSystem", "coefficient_system", "COORDINATE", "EXPONENTIAL"]
