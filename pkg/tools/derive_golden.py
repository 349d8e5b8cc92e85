"""Recompute the DERIVED golden values with sympy only and freeze them.

Run from the repository root:

    python3 tools/derive_golden.py

The output, ``src/qhlorentz/golden/derived.json``, is read by the tests. None
of the code here imports the package under test.
"""

from __future__ import annotations

import json
from itertools import product
from pathlib import Path

import sympy as sp

x, h, z = X = sp.symbols("x h z")
C, D = sp.symbols("C D")
OUT = Path(__file__).resolve().parents[1] / "src" / "qhlorentz" / "golden" / "derived.json"


def metric(c, d) -> sp.Matrix:
    return sp.Matrix([[1, d * z, 0], [d * z, c * z**2, 1], [0, 1, 0]])


def christoffel(g: sp.Matrix):
    gi = g.inv()
    return [[[sp.expand(sum(gi[m, l] * (sp.diff(g[l, i], X[j]) + sp.diff(g[l, j], X[i])
                                        - sp.diff(g[i, j], X[l])) for l in range(3)) / 2)
              for j in range(3)] for i in range(3)] for m in range(3)]


def riemann(g: sp.Matrix):
    G = christoffel(g)
    R = [[[[0] * 3 for _ in range(3)] for _ in range(3)] for _ in range(3)]
    for s, i, j, k in product(range(3), repeat=4):
        R[s][i][j][k] = sp.expand(
            sum(G[l][i][k] * G[s][j][l] - G[l][j][k] * G[s][i][l] for l in range(3))
            + sp.diff(G[s][i][k], X[j]) - sp.diff(G[s][j][k], X[i]))
    return R


def scalar_curvature(g: sp.Matrix, R) -> sp.Expr:
    """g^{jk} R^s_{sjk}, the trace of the Ricci tensor."""
    gi = g.inv()
    return sp.factor(sp.expand(sum(gi[j, k] * R[s][s][j][k] for s in range(3) for j in range(3)
                                   for k in range(3))))


def lie(T, g: sp.Matrix) -> sp.Matrix:
    return sp.Matrix(3, 3, lambda i, j: sp.expand(sum(
        T[k] * sp.diff(g[i, j], X[k]) + sp.diff(T[k], X[i]) * g[k, j] + sp.diff(T[k], X[j]) * g[i, k]
        for k in range(3))))


def killing_dimension(c, d, degree: int, rates=(0,)) -> int:
    """Dimension of Killing fields spanned by monomials times exp(r x), r in rates."""
    mons = [x**a * h**b * z**e for a in range(degree + 1) for b in range(degree + 1)
            for e in range(degree + 1) if a + b + e <= degree]
    funcs = [m * sp.exp(r * x) for m in mons for r in rates]
    unknowns, T = [], []
    for _ in range(3):
        comp = 0
        for f in funcs:
            u = sp.Symbol(f"u{len(unknowns)}")
            unknowns.append(u)
            comp += u * f
        T.append(comp)
    L = lie(T, metric(c, d))
    E = sp.symbols(f"E0:{len(rates)}")
    swap = {sp.exp(r * x): E[n] for n, r in enumerate(rates) if r != 0}
    eqs = []
    for i in range(3):
        for j in range(i, 3):
            e = sp.expand(sp.expand(L[i, j]).xreplace(swap))
            eqs += sp.Poly(e, x, h, z, *E).coeffs()
    A = sp.Matrix([[sp.diff(q, u) for u in unknowns] for q in eqs])
    return len(unknowns) - A.rank()


def is_killing(T, c, d) -> bool:
    return all(v == 0 for v in lie(T, metric(c, d)))


def main() -> None:
    g = metric(C, D)
    gam = christoffel(g)
    R = riemann(g)
    data = {
        "about": "sympy-derived values; Gamma[m][i][j] and R[s][i][j][k] are 0-based",
        "inverse": [[str(sp.expand(v)) for v in row] for row in g.inv().tolist()],
        "christoffel": [[[str(v) for v in row] for row in mat] for mat in gam],
        "riemann": [[[[str(v) for v in row] for row in mat] for mat in blk] for blk in R],
        "scalar_curvature": str(scalar_curvature(g, R)),
        "killing_dimensions": [],
        "extra_field_C": [],
    }
    cases = [
        (1, 0, 2, (0,)), (-3, 0, 2, (0,)), (2, 0, 2, (0,)),
        (0, 1, 2, (0, -1)), (0, 2, 2, (0, -2)), (2, 1, 2, (0, -1)), (1, 1, 2, (0, -1)),
        (0, 0, 2, (0,)), (0, 0, 1, (0,)),
        (0, 1, 2, (0, -1, 1, -2, 2)),
    ]
    for c, d, deg, rates in cases:
        dim = killing_dimension(c, d, deg, rates)
        data["killing_dimensions"].append({"C": c, "D": d, "degree": deg, "rates": list(rates),
                                           "dimension": dim})
        print(f"C={c} D={d} degree={deg} rates={rates}: {dim}")
    for c in (1, -3, 2, sp.Rational(1, 2)):
        T = [0, h**2, -2 * h * z + sp.Rational(2) / c]
        assert is_killing(T, c, 0)
        data["extra_field_C"].append({"C": str(c), "field": [str(v) for v in T]})
    with open(OUT, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=1)
        fh.write("\n")
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
