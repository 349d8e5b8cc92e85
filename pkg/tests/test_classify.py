"""Case labels, extra Killing fields, surface restriction and case reports."""

from __future__ import annotations

import json

import pytest

from qhlorentz.classify import (
    case_ii_field,
    case_iii_field,
    case_label,
    classify_family,
    quasihomogeneity_certificate,
    reference_fields,
    restrict_to_surface,
    symbolic_case_tree,
)
from qhlorentz.errors import DivisionByZero, WrongCase
from qhlorentz.geometry import VectorField, metric_family
from qhlorentz.killing import verify_killing
from qhlorentz.symring import DEFAULT_VARSET

P = DEFAULT_VARSET.parse


def strs(m):
    return [[str(v) for v in r] for r in m]


class TestCaseLabel:
    @pytest.mark.parametrize("C,D,label", [(1, 0, "i"), (-3, 0, "i"), (0, 1, "ii"), (0, 2, "ii"),
                                           (2, 1, "iii"), (1, 1, "iii"), (0, 0, "iv")])
    def test_labels(self, C, D, label):
        assert case_label(C, D) == label


class TestExtraFields:
    def test_case_iii_field(self):
        assert str(case_iii_field(2, 1, 1)) == "h*d/dx - 1/2*h^2*d/dh + (h*z - 1)*d/dz"
        assert verify_killing(metric_family(2, 1), case_iii_field(2, 1, 1)).killing

    def test_case_iii_zero(self):
        assert case_iii_field("C", "D", 0).is_zero

    def test_case_iii_on_parabola(self):
        T = case_iii_field(1, 1, 1)
        assert T == VectorField((P("h"), P("0"), P("-1")))
        assert verify_killing(metric_family(1, 1), T).killing

    def test_case_iii_needs_D(self):
        with pytest.raises(DivisionByZero):
            case_iii_field(1, 0, 1)

    @pytest.mark.parametrize("D", [1, 2])
    def test_case_ii_field(self, D):
        T = case_ii_field(D)
        assert verify_killing(metric_family(0, D), T).killing

    def test_case_ii_field_fails_when_C_nonzero(self):
        assert not verify_killing(metric_family(1, 1), case_ii_field(1)).killing

    def test_case_ii_needs_D(self):
        with pytest.raises(WrongCase):
            case_ii_field(0)

    def test_scaling_field_preserves_flat_metric(self):
        assert verify_killing(metric_family(0, 0), reference_fields()[2]).killing


class TestRestriction:
    def test_surface(self):
        assert strs(restrict_to_surface(metric_family())) == [["1", "0"], ["0", "0"]]

    def test_general_slice(self):
        assert strs(restrict_to_surface(metric_family(), 1)) == [["1", "D"], ["D", "C"]]

    def test_flat(self):
        assert strs(restrict_to_surface(metric_family(0, 0))) == [["1", "0"], ["0", "0"]]


class TestReports:
    def test_case_iii_passes(self):
        rep = classify_family(2, 1, probe=False)
        assert rep.passed
        assert rep.algebra_name == "R+sl(2,R)"
        assert rep.homogeneity == "locally-homogeneous"

    def test_flat(self):
        rep = classify_family(0, 0, probe=False)
        assert rep.passed
        assert rep.killing_dim_within_ansatz == 6
        assert rep.homogeneity == "flat"

    def test_json_is_deterministic(self):
        a = json.dumps(classify_family(1, 0, probe=False).as_dict())
        b = json.dumps(classify_family(1, 0, probe=False).as_dict())
        assert a == b

    def test_extended_probe_for_solvable_case(self):
        rep = classify_family(0, 1)
        assert rep.extended_probe["dimension"] == 6

    def test_discrepancies_are_listed(self):
        rep = classify_family(1, 0, probe=False)
        assert {c.name for c in rep.discrepancies()} >= {"killing_dim", "algebra"}

    def test_tree(self):
        tree = symbolic_case_tree()
        assert sorted(c["dimension"] for c in tree) == [4, 4, 4, 4, 6]


class TestCertificate:
    @pytest.mark.parametrize("C", [1, -3])
    def test_checks_that_reproduce(self, C):
        cert = {c.name: c for c in quasihomogeneity_certificate(C).checks}
        for name in ("evaluation_rank", "isotropy_origin", "totally_geodesic", "restriction",
                     "preserves_flat_metric"):
            assert cert[name].passed, name

    def test_wrong_case(self):
        with pytest.raises(WrongCase):
            quasihomogeneity_certificate(0)
