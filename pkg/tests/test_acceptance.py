"""Acceptance criteria, each checked exactly and reported as one PASS/FAIL line.

Equality is canonical-form identity; there is no numerical tolerance.
"""

from __future__ import annotations

import random
import time
from fractions import Fraction
from itertools import product

from qhlorentz.classify import quasihomogeneity_certificate, reference_fields
from qhlorentz.geometry import (
    VectorField,
    all_zero,
    christoffel,
    invert_metric,
    metric_compatibility_residual,
    metric_family,
    riemann,
)
from qhlorentz.killing import AnsatzSpace, pde_check, solve_killing, verify_killing
from qhlorentz.liealg import (
    VectorFieldAlgebra,
    bracket,
    classify_algebra,
    fingerprint,
    fingerprint_constants,
    structure_constants,
)
from qhlorentz.linalg import det
from qhlorentz.symring import DEFAULT_VARSET
from qhlorentz.symring.core import VarSet

P = DEFAULT_VARSET.parse


def timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def test_criterion_1_inverse_metric(acceptance_log):
    inv, dt = timed(lambda: invert_metric(metric_family("C", "D", VarSet())))
    want = [["1", "0", "-D*z"], ["0", "0", "1"], ["-D*z", "1", "(D^2 - C)*z^2"]]
    ok = all(inv[i][j] == P(want[i][j]) for i in range(3) for j in range(3)) and dt < 1
    acceptance_log(1, ok, f"inverse metric matches the displayed matrix ({dt:.3f} s, limit 1 s)")
    assert ok


CHRISTOFFEL = {  # 1-based (m, i, j)
    (1, 1, 2): "1/2*D^2*z", (2, 1, 2): "-1/2*D", (3, 1, 2): "-1/2*D*(D^2 - C)*z^2",
    (3, 1, 3): "1/2*D", (1, 2, 3): "1/2*D", (3, 2, 3): "(C - 1/2*D^2)*z",
    (1, 2, 2): "C*D*z^2", (2, 2, 2): "-z*C", (3, 2, 2): "C*(C - D^2)*z^3",
    (1, 1, 3): "0", (2, 1, 3): "0", (2, 2, 3): "0",
}


def test_criterion_2_christoffel_table(acceptance_log):
    gam, dt = timed(lambda: christoffel(metric_family("C", "D", VarSet())))
    bad = [k for k, v in CHRISTOFFEL.items() if gam[k[0] - 1][k[1] - 1][k[2] - 1] != P(v)]
    bad += [f"Gamma^{m + 1}_{s}" for m in range(3) for s, (i, j) in (("11", (0, 0)), ("33", (2, 2)))
            if not gam[m][i][j].is_zero]
    ok = not bad and dt < 1
    acceptance_log(2, ok, f"Christoffel table, {len(CHRISTOFFEL)} entries plus Gamma^m_11 = Gamma^m_33 = 0 "
                          f"({dt:.3f} s, limit 1 s){'; mismatches ' + str(bad) if bad else ''}")
    assert ok


RIEMANN = {  # 1-based (s, i, j, k)
    (2, 1, 2, 1): "-1/4*D^2", (3, 1, 3, 1): "-1/4*D^2", (3, 1, 3, 2): "(3/4*D^3 - 2*C*D)*z",
    (3, 2, 3, 2): "(-5/4*C*D^2 + C^2)*z^2", (3, 1, 2, 1): "0", (2, 1, 3, 1): "0", (3, 1, 2, 2): "0",
}


def test_criterion_3_curvature_table(acceptance_log):
    R, dt = timed(lambda: riemann(metric_family("C", "D", VarSet())))
    bad = []
    for key, text in RIEMANN.items():
        got = R[key[0] - 1][key[1] - 1][key[2] - 1][key[3] - 1]
        if got != P(text):
            bad.append(f"R^{key[0]}_{key[1]}{key[2]}{key[3]}: engine {got}, expected {P(text)}")
    ok = not bad and dt < 2
    acceptance_log(3, ok, f"curvature table, {len(RIEMANN)} components ({dt:.3f} s, limit 2 s)"
                          f"{'; ' + '; '.join(bad) if bad else ''}")
    assert ok


def test_criterion_4_pde_proportionality(acceptance_log):
    first = pde_check()
    again = pde_check()
    multiples = first.as_dict()
    ok = (len(first.pairs) == 6 and all(isinstance(m, Fraction) and m != 0 for m in first.multiples)
          and multiples == again.as_dict())
    acceptance_log(4, ok, f"six PDE components are stable nonzero constant multiples {multiples}")
    assert ok


DIMENSIONS = [((1, 0), 3), ((-3, 0), 3), ((0, 1), 4), ((0, 2), 4), ((2, 1), 4), ((1, 1), 4), ((0, 0), 6)]


def test_criterion_5_case_dimensions(acceptance_log):
    t0 = time.perf_counter()
    results, unsound = [], []
    for (C, D), want in DIMENSIONS:
        g = metric_family(C, D)
        basis = solve_killing(g, AnsatzSpace.default(D))
        results.append(((C, D), basis.dimension, want))
        unsound += [((C, D), str(T)) for T in basis.fields if not verify_killing(g, T).killing]
    dt = time.perf_counter() - t0
    wrong = [f"(C,D)={cd}: {got} (expected {want})" for cd, got, want in results if got != want]
    ok = not wrong and not unsound and dt < 30
    acceptance_log(5, ok, f"Killing dimensions with default ansatz, every field verified "
                          f"({dt:.1f} s, limit 30 s){'; ' + '; '.join(wrong) if wrong else ''}")
    assert ok


def test_criterion_6_algebra_types(acceptance_log):
    expected = {"i": ((1, 0), "R+aff(R)"), "ii": ((0, 1), "solvable-dim-4"),
                "iii": ((2, 1), "R+sl(2,R)"), "iii'": ((1, 1), "R+sl(2,R)"),
                "iv": ((0, 0), "flat-lorentz-dim-6")}
    bad = []
    for label, ((C, D), name) in expected.items():
        g = metric_family(C, D)
        A = VectorFieldAlgebra(solve_killing(g, AnsatzSpace.default(D)).fields, g)
        fp = fingerprint(A)
        got = classify_algebra(fp)
        if label == "i":
            shape_ok = fp.derived_dims == (3, 1, 0) and fp.center_dim == 1 and not fp.unimodular
        elif label.startswith("iii"):
            shape_ok = fp.killing_form_rank == 3
        else:
            shape_ok = True
        if got != name or not shape_ok:
            bad.append(f"case {label} (C,D)=({C},{D}): {got} {fp.as_dict()} (expected {name})")
    ok = not bad
    acceptance_log(6, ok, "algebra types by fingerprint" + (f"; {'; '.join(bad)}" if bad else ""))
    assert ok


def test_criterion_7_quasihomogeneity_evidence(acceptance_log):
    cert = quasihomogeneity_certificate(1)
    bad = [f"{c.name}: engine {c.computed}, expected {c.reference}" for c in cert.checks if not c.passed]
    ok = not bad
    acceptance_log(7, ok, f"quasihomogeneity evidence at C=1, D=0, {len(cert.checks)} checks"
                          + (f"; {'; '.join(bad)}" if bad else ""))
    assert ok


def _random_expr(rng: random.Random):
    names = ("x", "h", "z", "C", "D")
    num = DEFAULT_VARSET.zero
    for _ in range(rng.randint(0, 3)):
        m = DEFAULT_VARSET.const(rng.randint(-3, 3))
        for n in names:
            m = m * DEFAULT_VARSET.symbol(n) ** rng.randint(0, 2)
        num = num + m
    den = DEFAULT_VARSET.one + DEFAULT_VARSET.symbol(rng.choice(names)) ** rng.randint(0, 2)
    return num / den


def _random_field(rng: random.Random) -> VectorField:
    atoms = ["0", "1", "x", "h", "z", "h*z", "x^2", "C*h", "D*z^2"]
    return VectorField(tuple(P(rng.choice(atoms)) * rng.randint(-2, 2) for _ in range(3)))


def test_criterion_8_property_suites(acceptance_log):
    rng = random.Random(20261014)
    failures = {}

    def fail(name):
        failures[name] = failures.get(name, 0) + 1

    for _ in range(50):
        a, b, c = (_random_expr(rng) for _ in range(3))
        if not ((a + b) + c == a + (b + c) and a * (b + c) == a * b + a * c and a * b == b * a):
            fail("ring axioms")
        u, v = rng.choice("xhzCD"), rng.choice("xhzCD")
        if a.diff(u).diff(v) != a.diff(v).diff(u):
            fail("mixed partials")
    g = metric_family()
    gam = christoffel(g)
    R = riemann(g, gam)
    for s, i, j, k in product(range(3), repeat=4):
        if not (R[s][i][j][k] + R[s][j][k][i] + R[s][k][i][j]).is_zero:
            fail("Bianchi")
    if not all_zero(metric_compatibility_residual(g, gam)):
        fail("metric compatibility")
    for _ in range(30):
        A, B, Cf = (_random_field(rng) for _ in range(3))
        if not (bracket(A, bracket(B, Cf)) + bracket(B, bracket(Cf, A)) + bracket(Cf, bracket(A, B))).is_zero:
            fail("Jacobi")
    X, H, Y = reference_fields()
    sc = structure_constants(VectorFieldAlgebra((X, H, Y)))
    want = fingerprint_constants(sc)
    changes = 0
    while changes < 20:
        M = [[Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(3)] for _ in range(3)]
        if det(M) == 0:
            continue
        changes += 1
        if fingerprint_constants(sc.change_basis(M)) != want:
            fail("fingerprint invariance")
    for C, D in [(1, 0), (-3, 0), (0, 1), (0, 2), (2, 1), (1, 1), (0, 0), (3, -2)]:
        gg = metric_family(C, D)
        for T in solve_killing(gg, AnsatzSpace.default(D)).fields:
            if not verify_killing(gg, T).killing:
                fail("solver soundness")
    ok = not failures
    acceptance_log(8, ok, "property suites: ring axioms, mixed partials, Bianchi, compatibility, Jacobi, "
                          "fingerprint invariance (20 basis changes), solver soundness"
                          + (f"; failures {failures}" if failures else ""))
    assert ok
