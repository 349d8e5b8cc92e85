"""Vector field brackets, structure constants, fingerprints and isotropy."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qhlorentz.classify import case_ii_field, case_iii_field, reference_fields
from qhlorentz.errors import NotAnAlgebra
from qhlorentz.geometry import VectorField, metric_family
from qhlorentz.killing import AnsatzSpace, solve_killing
from qhlorentz.liealg import (
    CATALOG,
    AlgebraFingerprint,
    VectorFieldAlgebra,
    bracket,
    classify_algebra,
    degeneracy_locus,
    evaluation_rank_at,
    fingerprint,
    fingerprint_constants,
    isotropy_at,
    linear_type,
    structure_constants,
    volume_function,
)
from qhlorentz.linalg import det
from qhlorentz.symring import DEFAULT_VARSET

P = DEFAULT_VARSET.parse
X_, H_, Y_ = reference_fields()  # X' = d/dx, H = d/dh, h d/dh - z d/dz
ABELIAN = (VectorField((P("1"), P("0"), P("0"))), VectorField((P("0"), P("1"), P("0"))),
           VectorField((P("0"), P("0"), P("1"))))


def field(*texts) -> VectorField:
    return VectorField(tuple(P(t) for t in texts))


def flat_algebra() -> VectorFieldAlgebra:
    g = metric_family(0, 0)
    return VectorFieldAlgebra(solve_killing(g, AnsatzSpace(1)).fields, g)


polys = st.sampled_from(["0", "1", "x", "h", "z", "h*z", "x^2", "C*h", "D*z^2"])


class TestBracket:
    def test_scaling_with_translation(self):
        assert bracket(field("0", "-h", "z"), field("0", "1", "0")) == field("0", "1", "0")

    def test_coordinate_fields_commute(self):
        assert bracket(field("1", "0", "0"), field("0", "1", "0")).is_zero

    def test_scaling_with_vertical(self):
        assert bracket(field("0", "-h", "z"), field("0", "0", "1")) == field("0", "0", "-1")

    @settings(max_examples=30, deadline=None)
    @given(st.lists(polys, min_size=9, max_size=9))
    def test_jacobi(self, t):
        A, B, Cf = field(*t[0:3]), field(*t[3:6]), field(*t[6:9])
        s = bracket(A, bracket(B, Cf)) + bracket(B, bracket(Cf, A)) + bracket(Cf, bracket(A, B))
        assert s.is_zero

    @settings(max_examples=30, deadline=None)
    @given(st.lists(polys, min_size=6, max_size=6))
    def test_antisymmetric(self, t):
        A, B = field(*t[0:3]), field(*t[3:6])
        assert (bracket(A, B) + bracket(B, A)).is_zero


class TestStructureConstants:
    def test_reference_algebra(self):
        sc = structure_constants(VectorFieldAlgebra((X_, H_, Y_)))
        assert sc.sparse() == [(1, 2, 1, "1")]  # [H, Y] = H

    def test_abelian(self):
        assert structure_constants(VectorFieldAlgebra(ABELIAN)).sparse() == []

    def test_flat_algebra_closes(self):
        sc = structure_constants(flat_algebra())
        assert sc.dim == 6
        assert sc.jacobi_residual() == []

    def test_not_closed(self):
        with pytest.raises(NotAnAlgebra):
            structure_constants(VectorFieldAlgebra((H_, field("0", "0", "h"))))

    def test_dependent_basis(self):
        with pytest.raises(ValueError):
            VectorFieldAlgebra((H_, H_ * 2))

    def test_json(self):
        import json
        sc = structure_constants(VectorFieldAlgebra((X_, H_, Y_)))
        assert json.loads(sc.to_json()) == {"dim": 3, "entries": [[1, 2, 1, "1"]]}


def random_basis_change(n: int, rng: random.Random):
    while True:
        M = [[Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(n)] for _ in range(n)]
        if det(M) != 0:
            return M


class TestFingerprint:
    def test_reference_algebra(self):
        fp = fingerprint(VectorFieldAlgebra((X_, H_, Y_)))
        assert (fp.dim, fp.derived_dims, fp.center_dim, fp.unimodular) == (3, (3, 1, 0), 1, False)
        assert classify_algebra(fp) == "R+aff(R)"

    def test_abelian(self):
        fp = fingerprint(VectorFieldAlgebra(ABELIAN))
        assert (fp.derived_dims, fp.center_dim, fp.unimodular) == ((3, 0), 3, True)
        assert classify_algebra(fp) == "abelian"

    def test_case_iii(self):
        g = metric_family(2, 1)
        A = VectorFieldAlgebra((X_, H_, Y_, case_iii_field(2, 1, 1)), g)
        fp = fingerprint(A)
        assert fp.killing_form_rank == 3
        assert fp.center_dim == 1
        assert fp.killing_form_signature == (2, 1, 1)
        assert classify_algebra(fp) == "R+sl(2,R)"

    def test_case_ii_with_exponential_field(self):
        A = VectorFieldAlgebra((X_, H_, Y_, case_ii_field(1)), metric_family(0, 1))
        fp = fingerprint(A)
        assert fp.solvable
        assert classify_algebra(fp) == "solvable-dim-4"

    def test_sl2_anchor(self):
        fp = AlgebraFingerprint(3, (3, 3), 0, (2, 1, 0), True)
        assert classify_algebra(fp) == "sl(2,R)"

    def test_catalog_entries_classify_to_themselves(self):
        for name, (dim, derived, center, sig, uni) in CATALOG.items():
            if sig is None:
                sig = (0, 0, dim)
            assert classify_algebra(AlgebraFingerprint(dim, derived, center, sig, uni)) == name

    @pytest.mark.parametrize("which", ["reference", "case_iii", "flat"])
    def test_invariant_under_basis_change(self, which):
        if which == "reference":
            A = VectorFieldAlgebra((X_, H_, Y_))
        elif which == "case_iii":
            A = VectorFieldAlgebra((X_, H_, Y_, case_iii_field(2, 1, 1)))
        else:
            A = flat_algebra()
        sc = structure_constants(A)
        want = fingerprint_constants(sc)
        rng = random.Random(7)
        for _ in range(20):
            changed = sc.change_basis(random_basis_change(sc.dim, rng))
            assert changed.jacobi_residual() == []
            assert fingerprint_constants(changed) == want


class TestEvaluation:
    def test_rank_on_and_off_surface(self):
        A = VectorFieldAlgebra((X_, H_, Y_))
        assert evaluation_rank_at(A, (0, 0, 0)) == 2
        assert evaluation_rank_at(A, (0, 0, 1)) == 3

    def test_abelian_rank(self):
        A = VectorFieldAlgebra(ABELIAN)
        assert all(evaluation_rank_at(A, p) == 3 for p in [(0, 0, 0), (1, -1, 2)])

    def test_exponential_field_rank(self):
        A = VectorFieldAlgebra((X_, H_, Y_, case_ii_field(1)))
        assert evaluation_rank_at(A, (0, 0, 0)) == 3

    def test_degeneracy_locus(self):
        rep = degeneracy_locus(VectorFieldAlgebra((X_, H_, Y_)))
        assert rep.factors == (P("z"),)


class TestVolume:
    def test_reference_algebra(self):
        v = volume_function(VectorFieldAlgebra((X_, H_, Y_)), metric_family())
        assert v == P("-z")
        assert v.subs({"z": 0}).is_zero

    def test_abelian_flat(self):
        assert volume_function(VectorFieldAlgebra(ABELIAN), metric_family(0, 0)) == P("1")


class TestIsotropy:
    def test_semisimple_at_origin(self):
        rep = isotropy_at(VectorFieldAlgebra((X_, H_, Y_)), (0, 0, 0))
        assert rep.type == "semi-simple-real"
        assert len(rep.isotropy_basis) == 1
        J = rep.generator_linearization
        assert sorted(J[i][i] for i in range(3)) == [-1, 0, 1]

    def test_trivial_off_surface(self):
        assert isotropy_at(VectorFieldAlgebra((X_, H_, Y_)), (0, 0, 1)).type == "trivial"

    def test_abelian(self):
        assert isotropy_at(VectorFieldAlgebra(ABELIAN), (1, 2, 3)).type == "trivial"

    @pytest.mark.parametrize("J,kind", [
        ([[0, 1, 0], [0, 0, 0], [0, 0, 0]], "unipotent"),
        ([[0, -1, 0], [1, 0, 0], [0, 0, 0]], "elliptic"),
        ([[0, 0, 0], [0, 1, 0], [0, 0, -1]], "semi-simple-real"),
        ([[1, 1, 0], [0, 1, 0], [0, 0, 0]], "mixed"),
    ])
    def test_linear_type(self, J, kind):
        assert linear_type([[Fraction(v) for v in r] for r in J]) == kind
