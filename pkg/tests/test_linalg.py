"""Exact linear algebra over rationals and rational functions."""

from __future__ import annotations

from fractions import Fraction

import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from qhlorentz.linalg import (
    charpoly,
    det,
    fraction_free_echelon,
    in_span,
    inertia,
    inverse,
    matmul,
    nullspace,
    rank,
    rref,
    solve,
    trace,
    transpose,
)
from qhlorentz.symring import DEFAULT_VARSET

P = DEFAULT_VARSET.parse
entries = st.integers(min_value=-3, max_value=3).map(Fraction)


def matrices(rows, cols):
    return st.lists(st.lists(entries, min_size=cols, max_size=cols), min_size=rows, max_size=rows)


class TestElimination:
    def test_rref_and_pivots(self):
        R, piv = rref([[2, 4, 2], [1, 2, 3]])
        assert piv == [0, 2]
        assert R[0] == [1, 2, 0]
        assert R[1] == [0, 0, 1]

    def test_solve(self):
        assert solve([[1, 1], [1, -1]], [3, 1]) == [2, 1]
        assert solve([[1, 1], [1, 1]], [1, 2]) is None

    def test_in_span(self):
        assert in_span([[1, 0, 1], [0, 1, 0]], [2, 3, 2]) == [2, 3]
        assert in_span([[1, 0, 1]], [0, 1, 0]) is None

    @settings(max_examples=80, deadline=None)
    @given(matrices(3, 4))
    def test_rank_and_nullspace_agree_with_sympy(self, m):
        M = sp.Matrix(m)
        assert rank(m) == M.rank()
        ns = nullspace(m, 4)
        assert len(ns) == 4 - M.rank()
        for v in ns:
            assert all(sum(a * b for a, b in zip(row, v)) == 0 for row in m)

    def test_symbolic_nullspace(self):
        ns = nullspace([[P("D"), P("D^2")]], 2)
        assert len(ns) == 1
        assert ns[0][0] * P("D") + ns[0][1] * P("D^2") == 0


class TestMatrices:
    @settings(max_examples=60, deadline=None)
    @given(matrices(3, 3))
    def test_det_inverse(self, m):
        d = det(m)
        assert d == sp.Matrix(m).det()
        inv = inverse(m)
        if d == 0:
            assert inv is None
        else:
            I = matmul(m, inv)
            assert I == [[Fraction(int(i == j)) for j in range(3)] for i in range(3)]

    @settings(max_examples=60, deadline=None)
    @given(matrices(3, 3))
    def test_charpoly(self, m):
        lam = sp.Symbol("lam")
        want = sp.Poly(sp.Matrix(m).charpoly(lam).as_expr(), lam).all_coeffs()
        assert charpoly(m) == [Fraction(int(c.p), int(c.q)) for c in want]

    def test_trace_transpose(self):
        assert trace([[1, 2], [3, 4]]) == 5
        assert transpose([[1, 2], [3, 4]]) == [[1, 3], [2, 4]]

    @settings(max_examples=60, deadline=None)
    @given(matrices(3, 3))
    def test_inertia(self, m):
        s = [[m[i][j] + m[j][i] for j in range(3)] for i in range(3)]
        ev = sp.Matrix(s).eigenvals()
        pos = sum(k for e, k in ev.items() if sp.re(sp.N(e)) > 1e-9)
        neg = sum(k for e, k in ev.items() if sp.re(sp.N(e)) < -1e-9)
        assert inertia(s) == (pos, neg, 3 - pos - neg)


class TestFractionFree:
    def test_records_pivot_conditions(self):
        res = fraction_free_echelon([[P("D"), P("1")], [P("C"), P("0")]], 2)
        assert res.rank == 2
        texts = {str(c) for c in res.conditions}
        assert "C" in texts or "D" in texts

    def test_numeric(self):
        res = fraction_free_echelon([[2, 4], [1, 2]], 2)
        assert res.rank == 1
