"""Comparison of engine output with the tabulated reference values.

The reference data lives in ``golden/reference.json``; keys use 1-based
indices exactly as tabulated ("m,i,j" for Gamma^m_ij, "s,i,j,k" for R^s_ijk).
"""

from __future__ import annotations

from dataclasses import dataclass

from .classify import classify_family, quasihomogeneity_certificate
from .errors import PdeMismatch
from .geometry import christoffel, invert_metric, metric_family, riemann
from .killing import pde_check, reference_data
from .symring import DEFAULT_VARSET, Expr


@dataclass(frozen=True)
class SuiteItem:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}" + (f": {self.detail}" if self.detail else "")


def _key(idx) -> tuple[int, ...]:
    return tuple(int(i) - 1 for i in idx.split(","))


def _compare(name: str, engine: Expr, text: str) -> SuiteItem:
    want = DEFAULT_VARSET.parse(text)
    if engine == want:
        return SuiteItem(name, True)
    return SuiteItem(name, False, f"engine {engine}, reference {want}")


def check_inverse(g=None) -> list[SuiteItem]:
    g = g or metric_family()
    inv = invert_metric(g)
    ref = reference_data()["inverse"]
    return [_compare(f"inverse[{i + 1},{j + 1}]", inv[i][j], ref[i][j])
            for i in range(3) for j in range(3)]


def check_christoffel(g=None) -> list[SuiteItem]:
    g = g or metric_family()
    gam = christoffel(g)
    out = []
    for key, text in reference_data()["christoffel"].items():
        m, i, j = _key(key)
        out.append(_compare(f"Gamma^{key[0]}_{key[2]}{key[4]}", gam[m][i][j], text))
    return out


def check_riemann(g=None) -> list[SuiteItem]:
    g = g or metric_family()
    R = riemann(g)
    out = []
    for key, text in reference_data()["riemann"].items():
        s, i, j, k = _key(key)
        out.append(_compare(f"R^{key[0]}_{key[2]}{key[4]}{key[6]}", R[s][i][j][k], text))
    return out


def check_pde() -> list[SuiteItem]:
    try:
        rep = pde_check()
    except PdeMismatch as exc:
        return [SuiteItem(f"pde({exc.pair})", False, str(exc))]
    return [SuiteItem(f"pde({p})", True, f"multiple {m}") for p, m in zip(rep.pairs, rep.multiples)]


def check_cases() -> list[SuiteItem]:
    out = []
    for label, claim in reference_data()["cases"].items():
        rep = classify_family(claim["C"], claim["D"], probe=False)
        for c in rep.certifications:
            detail = "" if c.passed else f"engine {c.computed}, reference {c.reference}"
            out.append(SuiteItem(f"case {label} (C={claim['C']}, D={claim['D']}) {c.name}",
                                 c.passed, detail))
    return out


def check_certificate(C=1) -> list[SuiteItem]:
    cert = quasihomogeneity_certificate(C)
    return [SuiteItem(f"quasihomogeneity C={C} {c.name}", c.passed,
                      "" if c.passed else f"engine {c.computed}, reference {c.reference}")
            for c in cert.checks]


def run_suite() -> list[SuiteItem]:
    return (check_inverse() + check_christoffel() + check_riemann() + check_pde()
            + check_cases() + check_certificate())
