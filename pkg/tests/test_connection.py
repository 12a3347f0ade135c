"""Connection and curvature verifications on the 6-space."""

import pytest

from odecartan.cartan import family_detect, family_invariants
from odecartan.connection import (
    BLOCK_METRIC,
    cartan_connection_report,
    expected_cartan_curvature,
    metric_connection_report,
    ricci_formalism_residuals,
)
from tests.conftest import make_problem


@pytest.fixture(scope="module")
def family_reports(family_data):
    return metric_connection_report(family_data), cartan_connection_report(family_data)


class TestMetricConnection:
    def test_annihilates_the_horizontal_coframe(self, family_reports):
        mrep, _ = family_reports
        assert all(r.is_zero for r in mrep.torsion_residuals)

    def test_lowered_connection_is_antisymmetric(self, family_reports):
        mrep, _ = family_reports
        assert all(r.is_zero for r in mrep.antisymmetry_residuals)

    def test_curvature_matches_displayed_list(self, family_reports):
        mrep, _ = family_reports
        assert all(r.is_zero for r in mrep.curvature_residuals)

    def test_curvature_is_horizontal(self, family_reports):
        mrep, _ = family_reports
        assert all(r.is_zero for r in mrep.horizontality_residuals)

    def test_ricci_contraction_is_minus_block_metric(self, family_reports):
        mrep, _ = family_reports
        assert all(r.is_zero for r in mrep.ricci_residuals)

    def test_flat_curvature_entries_reduce(self):
        fd = family_detect(make_problem("3/2*q^2/p"))
        expected = expected_cartan_curvature(fd)
        # vanishing invariants collapse the displayed matrix entirely
        assert all(expected[i][j].is_zero for i in range(4) for j in range(4))
        mrep = metric_connection_report(fd)
        assert mrep.all_zero

    def test_specialized_family_all_checks(self):
        fd = family_detect(make_problem("3/2*q^2/p + x*y*p^3 + 3*p^2 + (x+y)*p"))
        mrep = metric_connection_report(fd)
        assert mrep.all_zero


class TestFormalismConsistency:
    def test_coordinate_and_frame_ricci_agree(self, family_data, family_metric_tensors):
        _, _, tensors = family_metric_tensors
        residuals = ricci_formalism_residuals(family_data, tensors)
        assert all(r.is_zero for r in residuals)


class TestCartanConnection:
    def test_algebra_valued_against_block_metric(self, family_reports):
        _, crep = family_reports
        assert all(r.is_zero for r in crep.algebra_residuals)

    def test_curvature_matches_displayed_matrix(self, family_reports):
        _, crep = family_reports
        assert all(r.is_zero for r in crep.curvature_residuals)

    def test_family_with_invariants_is_not_flat(self, family_reports):
        _, crep = family_reports
        assert not crep.invariants_zero
        assert not crep.curvature_zero
        assert crep.flatness_matches_invariants

    def test_flat_model_has_zero_curvature(self):
        fd = family_detect(make_problem("3/2*q^2/p"))
        crep = cartan_connection_report(fd)
        assert crep.invariants_zero and crep.curvature_zero
        assert crep.all_zero

    def test_flatness_iff_invariants_on_specializations(self):
        cases = [
            ("3/2*q^2/p", True),
            ("3/2*q^2/p + 5*p^2", False),          # C nonzero: k survives
            ("3/2*q^2/p + x*p^3", False),           # A_x nonzero: n survives
            ("3/2*q^2/p + y^2*p", False),           # B_y nonzero: e survives
            ("3/2*q^2/p + 7*p^3 + 2*p", True),      # constant A, B: all vanish
        ]
        for text, flat in cases:
            fd = family_detect(make_problem(text))
            crep = cartan_connection_report(fd)
            kne = family_invariants(fd)
            assert kne.all_zero() is flat
            assert crep.curvature_zero is flat
            assert crep.flatness_matches_invariants

    def test_displayed_entry_for_generic_coefficients(self, family_data):
        # the (2,4) slot of the displayed curvature carries -n/4
        from odecartan.cartan import HALF
        from odecartan.curvature import adapted_tau

        expected = expected_cartan_curvature(family_data)
        tau = adapted_tau(family_data.problem)
        kne = family_invariants(family_data)
        t14 = tau.forms[0].wedge(tau.forms[3])
        from fractions import Fraction

        assert (expected[1][3] - t14.scale(-Fraction(1, 4) * kne.n)).is_zero

    def test_block_metric_shape(self):
        assert BLOCK_METRIC == ((0, 1, 0, 0), (1, 0, 0, 0), (0, 0, 0, 1), (0, 0, 1, 0))
