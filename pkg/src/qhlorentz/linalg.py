"""Exact sparse linear algebra over Q or Q(parameters).

Entries are :class:`fractions.Fraction` or :class:`~qhlorentz.symring.Expr`;
any mix works because Expr accepts rational operands.  Rows are stored as
``{column: value}`` dicts and the pivot rule is fixed (leftmost column, then
the first row in input order holding a "simplest" entry), so results never
depend on anything but the input.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .symring import Expr
from .symring.factor import factor, gcd

ZERO = Fraction(0)
ONE = Fraction(1)


def _sparse(rows: Iterable[Sequence]) -> list[dict[int, object]]:
    return [{j: v for j, v in enumerate(r) if v} for r in rows]


def _dense(row: dict[int, object], n: int) -> list:
    return [row.get(j, ZERO) for j in range(n)]


def _is_const(v) -> bool:
    return not isinstance(v, Expr) or v.is_constant


def _cost(v) -> tuple:
    if not isinstance(v, Expr):
        return (0, 0, 0)
    if v.is_constant:
        return (0, 0, 0)
    return (1, v.total_degree, len(v.num))


def _as_fraction(v):
    return v.constant_value() if isinstance(v, Expr) and v.is_constant else v


def _sub_scaled(a: dict, b: dict, k) -> dict:
    """a - k*b, sparse."""
    out = dict(a)
    for j, v in b.items():
        w = out.get(j, ZERO) - k * v
        if w:
            out[j] = _as_fraction(w)
        else:
            out.pop(j, None)
    return out


def rref(rows: Sequence[Sequence], ncols: int | None = None) -> tuple[list[list], list[int]]:
    """Reduced row echelon form over the fraction field of the entries.

    Returns ``(R, pivots)`` with the zero rows dropped.
    """
    rows = list(rows)
    n = ncols if ncols is not None else (len(rows[0]) if rows else 0)
    sparse, pivots = _rref_sparse(_sparse(rows), n)
    return [_dense(r, n) for r in sparse], pivots


def _rref_sparse(rows: list[dict], n: int) -> tuple[list[dict], list[int]]:
    pending = [r for r in rows if r]
    done: list[dict] = []
    pivots: list[int] = []
    for col in range(n):
        cands = [i for i, r in enumerate(pending) if col in r]
        if not cands:
            continue
        best = min(cands, key=lambda i: (_cost(pending[i][col]), len(pending[i]), i))
        prow = pending.pop(best)
        inv = ONE / prow[col]
        prow = {j: _as_fraction(v * inv) for j, v in prow.items()}
        prow[col] = ONE
        pending = [_sub_scaled(r, prow, r[col]) if col in r else r for r in pending]
        pending = [r for r in pending if r]
        done = [_sub_scaled(r, prow, r[col]) if col in r else r for r in done]
        done.append(prow)
        pivots.append(col)
    return done, pivots


def rank(rows: Sequence[Sequence], ncols: int | None = None) -> int:
    return len(rref(rows, ncols)[1])


def nullspace(rows: Sequence[Sequence], ncols: int) -> list[list]:
    """Basis of the right kernel, itself put in reduced echelon form.

    Each basis vector has a leading ``1`` in a column no other vector uses,
    and leading columns increase; this is the normalization used for every
    Killing basis.
    """
    red, pivots = _rref_sparse(_sparse(rows), ncols)
    free = [j for j in range(ncols) if j not in set(pivots)]
    basis = []
    for f in free:
        v = {f: ONE}
        for r, p in zip(red, pivots):
            if f in r:
                v[p] = _as_fraction(-r[f])
        basis.append(v)
    normal, _ = _rref_sparse(basis, ncols)
    return [_dense(v, ncols) for v in normal]


def solve(rows: Sequence[Sequence], rhs: Sequence, ncols: int | None = None):
    """One solution of ``rows * x = rhs`` (free variables set to zero) or None."""
    n = ncols if ncols is not None else (len(rows[0]) if rows else 0)
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    red, pivots = _rref_sparse(_sparse(aug), n + 1)
    if n in pivots:
        return None
    x = [ZERO] * n
    for r, p in zip(red, pivots):
        x[p] = r.get(n, ZERO)
    return x


def in_span(vectors: Sequence[Sequence], target: Sequence):
    """Coefficients expressing ``target`` in terms of ``vectors`` or None."""
    if not vectors:
        return [] if not any(target) else None
    cols = list(zip(*vectors))
    return solve([list(c) for c in cols], list(target), len(vectors))


def det(m: Sequence[Sequence]):
    """Determinant by exact elimination (fraction field of the entries)."""
    a = [list(r) for r in m]
    n = len(a)
    sign, result = 1, ONE
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c]), None)
        if piv is None:
            return ZERO
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            sign = -sign
        p = a[c][c]
        result = result * p
        for r in range(c + 1, n):
            if a[r][c]:
                k = a[r][c] / p
                a[r] = [_as_fraction(x - k * y) for x, y in zip(a[r], a[c])]
    return _as_fraction(result * sign)


def inverse(m: Sequence[Sequence]):
    """Exact inverse or None when the matrix is singular."""
    n = len(m)
    aug = [list(r) + [ONE if i == j else ZERO for j in range(n)] for i, r in enumerate(m)]
    red, pivots = _rref_sparse(_sparse(aug), 2 * n)
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        return None
    return [[r.get(n + j, ZERO) for j in range(n)] for r in red[:n]]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> list[list]:
    bt = list(zip(*b))
    out = []
    for r in a:
        row = []
        for c in bt:
            s = ZERO
            for x, y in zip(r, c):
                if x and y:
                    s = s + x * y
            row.append(_as_fraction(s))
        out.append(row)
    return out


def transpose(a: Sequence[Sequence]) -> list[list]:
    return [list(c) for c in zip(*a)]


def trace(a: Sequence[Sequence]):
    s = ZERO
    for i, r in enumerate(a):
        s = s + r[i]
    return s


def charpoly(a: Sequence[Sequence[Fraction]]) -> list[Fraction]:
    """Coefficients ``[1, c1, ..., cn]`` of det(t I - A), highest degree first.

    Faddeev-LeVerrier; the divisions are by integers so everything stays in Q.
    """
    n = len(a)
    a = [[Fraction(x) for x in r] for r in a]
    coeffs = [ONE]
    m = [[ZERO] * n for _ in range(n)]
    for k in range(1, n + 1):
        am = matmul(a, m)
        m = [[am[i][j] + (coeffs[-1] if i == j else ZERO) for j in range(n)] for i in range(n)]
        c = -trace(matmul(a, m)) / k
        coeffs.append(c)
    return coeffs


def inertia(s: Sequence[Sequence[Fraction]]) -> tuple[int, int, int]:
    """(positive, negative, zero) counts of a rational symmetric matrix.

    Sylvester's law via symmetric Gaussian elimination; a zero pivot with a
    nonzero off-diagonal entry is repaired by adding the partner row/column.
    """
    a = [[Fraction(x) for x in r] for r in s]
    n = len(a)
    for i in range(n):
        for j in range(n):
            if a[i][j] != a[j][i]:
                raise ValueError("inertia needs a symmetric matrix")
    pos = neg = 0
    active = list(range(n))
    while active:
        piv = next((i for i in active if a[i][i]), None)
        if piv is None:
            pair = next(((i, j) for i in active for j in active if i < j and a[i][j]), None)
            if pair is None:
                break
            i, j = pair
            for k in range(n):
                a[i][k] += a[j][k]
            for k in range(n):
                a[k][i] += a[k][j]
            piv = i
        p = a[piv][piv]
        if p > 0:
            pos += 1
        else:
            neg += 1
        active.remove(piv)
        for r in active:
            if a[r][piv]:
                k = a[r][piv] / p
                for c in range(n):
                    a[r][c] -= k * a[piv][c]
        for r in active:
            a[piv][r] = a[r][piv] = ZERO
    return pos, neg, n - pos - neg


# ---------------------------------------------------------------------------
# fraction-free elimination over Q[parameters]
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EchelonResult:
    """Outcome of :func:`fraction_free_echelon`.

    ``conditions`` are the irreducible nonconstant factors of pivots that were
    divided out; the rank and nullspace are valid wherever none of them
    vanishes.
    """

    rows: tuple[dict, ...]
    pivots: tuple[int, ...]
    conditions: tuple[Expr, ...]

    @property
    def rank(self) -> int:
        return len(self.pivots)


def _primitive(row: dict):
    """Divide a polynomial row by the gcd of its entries; returns (row, content)."""
    exprs = [v for v in row.values() if isinstance(v, Expr) and not v.is_constant]
    if not exprs:
        return row, None
    g = gcd(row[j] if isinstance(row[j], Expr) else exprs[0].varset.const(row[j]) for j in row)
    if g.is_constant:
        return row, None
    return {j: _as_fraction(v / g) for j, v in row.items()}, g


def fraction_free_echelon(rows: Sequence[Sequence], ncols: int) -> EchelonResult:
    """Echelon form over Q[params] keeping entries polynomial.

    Rows are combined as ``p*r - a*prow`` and then made primitive, so no
    parameter ever lands in a denominator.  Constant pivots are preferred;
    when only polynomial pivots are available the one of least degree is used.
    Irreducible factors of every polynomial pivot and every content divided
    out are recorded: away from their zeros the same elimination is valid
    after specialization, so the rank there equals the generic rank.
    """
    pending = [r for r in _sparse(rows) if r]
    done, pivots = [], []
    conds: dict[str, Expr] = {}
    for col in range(ncols):
        cands = [i for i, r in enumerate(pending) if col in r]
        if not cands:
            continue
        best = min(cands, key=lambda i: (_cost(pending[i][col]), len(pending[i]), i))
        prow = pending.pop(best)
        p = prow[col]

        def note(e):
            for f, _ in factor(e):
                if not f.is_constant:
                    conds.setdefault(str(f), f)

        if not _is_const(p):
            note(p)
        new = []
        for r in pending:
            if col in r:
                a = r[col]
                combined = {}
                for j in set(r) | set(prow):
                    v = p * r.get(j, ZERO) - a * prow.get(j, ZERO)
                    if v:
                        combined[j] = _as_fraction(v)
                if combined:
                    r, content = _primitive(combined)
                    if content is not None:
                        note(content)
                else:
                    r = combined
            if r:
                new.append(r)
        pending = new
        done.append(prow)
        pivots.append(col)
    order = sorted(conds.values(), key=lambda f: (f.total_degree, str(f)))
    return EchelonResult(tuple(done), tuple(pivots), tuple(order))
