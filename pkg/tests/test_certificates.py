import random
from itertools import combinations

import pytest

from covercert.exceptions import (
    CoverInvariantError, DomainMismatch, PreconditionViolation, SupportTooLarge
)
from covercert.models import Verdict
from covercert.schemas import Cocycle
from covercert.services.certificate_service import (
    check_cayley_identification, coboundary_of, enumerate_cocycles, face_sums, is_coboundary,
    is_cocycle, search_certificate, verify_theorem11
)
from covercert.services.cheeger_service import cayley_graph, cheeger_best, make_cut
from covercert.services.cover_service import build_cover, vertex_cut_edges
from covercert.services.presentation_service import cyclic_quotients, presentation_from, quotient_from_images
from covercert.services.triangulation_service import build_skeleton


def half_ring(c):
    """The cut {0, ..., n/2 - 1} in the Cayley graph of a cyclic cover."""
    return make_cut(cayley_graph(c.quotient), range(c.degree // 2))


# ============================================================================
# Cocycles and coboundaries
# ============================================================================

class TestCoboundary:

    def test_carry_is_a_nontrivial_cocycle(self, double_cover, carry):
        c = double_cover(6)
        cocycle = carry(c)
        assert is_cocycle(c.lifted, cocycle, c.skeleton)
        result = is_coboundary(c.lifted, cocycle, c.skeleton)
        assert not result.is_coboundary
        assert result.witness_sum != 0
        assert result.witness_sum == sum(direction * cocycle.values[e] for e, direction in result.witness)

    def test_coboundary_recovers_its_potential(self, double_cover):
        c = double_cover(5)
        s = c.skeleton
        potential = [3, -1, 0, 2, 7]
        delta = coboundary_of(s, potential)
        assert not any(face_sums(s, delta))
        result = is_coboundary(c.lifted, delta, s)
        assert result.is_coboundary
        assert coboundary_of(s, result.potential) == delta

    @pytest.mark.parametrize("seed", range(100))
    def test_random_potentials(self, double_cover, s2xs1_cover, seed):
        rng = random.Random(seed)
        factory = rng.choice([double_cover, s2xs1_cover])
        c = factory(rng.randint(2, 9))
        s = c.skeleton
        delta = coboundary_of(s, [rng.randint(-3, 3) for _ in range(s.vertex_count)])
        assert not any(face_sums(s, delta))
        result = is_coboundary(c.lifted, delta, s)
        assert result.is_coboundary
        assert coboundary_of(s, result.potential) == delta

    def test_non_cocycle_is_rejected(self, torus_double):
        with pytest.raises(PreconditionViolation):
            is_coboundary(torus_double, Cocycle(values=[1, 0, 0]))
        assert not is_cocycle(torus_double, Cocycle(values=[1, 0, 0]))

    def test_generator_evaluation_on_base(self, torus_double):
        # y = 2x and z = 3x
        assert is_cocycle(torus_double, Cocycle(values=[1, 2, 3]))
        assert not is_coboundary(torus_double, Cocycle(values=[1, 2, 3])).is_coboundary

    def test_domain_mismatch(self, torus_double):
        with pytest.raises(DomainMismatch):
            is_cocycle(torus_double, Cocycle(values=[0, 0]))

    def test_base_has_no_small_cocycles(self, torus_double):
        s = build_skeleton(torus_double)
        assert [c.values for c in enumerate_cocycles(s, [0, 1, 2])] == [[0, 0, 0]]


# ============================================================================
# Certificate search
# ============================================================================

class TestSearchCertificate:

    @pytest.mark.parametrize("n", [6, 8])
    def test_half_ring_carries_a_certificate(self, double_cover, n):
        c = double_cover(n)
        cut = half_ring(c)
        certificate = search_certificate(c, cut, force=True)
        assert certificate is not None
        assert set(certificate.values) <= {-1, 0, 1}
        assert set(certificate.support) <= set(vertex_cut_edges(c, cut.vertices))
        assert is_cocycle(c.lifted, certificate, c.skeleton)
        assert not is_coboundary(c.lifted, certificate, c.skeleton).is_coboundary

    def test_doubled_edges_block_degree_four(self, double_cover):
        # Every admissible cut keeps both ends of a doubled Cayley edge on one side,
        # and the two lifts of that edge carry different wrap-around values.
        c = double_cover(4)
        for cut in ([0], [0, 1], [0, 2]):
            assert search_certificate(c, make_cut(cayley_graph(c.quotient), cut), force=True) is None

    def test_threshold_gate(self, double_cover):
        c = double_cover(6)
        with pytest.raises(PreconditionViolation, match="threshold"):
            search_certificate(c, half_ring(c))

    def test_override_is_logged(self, double_cover, caplog):
        c = double_cover(6)
        search_certificate(c, half_ring(c), force=True)
        assert "PreconditionOverridden" in caplog.text

    def test_support_cap(self, double_cover):
        c = double_cover(6)
        with pytest.raises(SupportTooLarge):
            search_certificate(c, half_ring(c), cap=5, force=True)

    def test_zero_cap_is_honoured(self, double_cover):
        c = double_cover(6)
        with pytest.raises(SupportTooLarge):
            search_certificate(c, half_ring(c), cap=0, force=True)

    def test_cut_on_another_graph(self, double_cover):
        c = double_cover(6)
        with pytest.raises(PreconditionViolation):
            search_certificate(c, make_cut(cayley_graph(quotient_from_images(8, {0: 1})), [0]), force=True)

    @pytest.mark.parametrize("n", [2, 4])
    def test_no_certificate_when_b1_vanishes(self, l41, n):
        (q,) = cyclic_quotients(presentation_from(l41), n)
        c = build_cover(l41, q)
        g = cayley_graph(q)
        for size in range(1, n // 2 + 1):
            for subset in combinations(range(n), size):
                assert search_certificate(c, make_cut(g, subset), force=True) is None

    def test_cayley_identification_mismatch(self, double_cover):
        c = double_cover(6)
        wrong = cayley_graph(quotient_from_images(6, {0: 1, 1: 1, 2: 1}))
        with pytest.raises(CoverInvariantError):
            check_cayley_identification(c, wrong)


# ============================================================================
# Homology cross-check
# ============================================================================

class TestVerify:

    def test_half_ring_agrees(self, double_cover):
        c = double_cover(6)
        report = verify_theorem11(c, half_ring(c))
        assert report.verdict == Verdict.agree
        assert report.fields["found"] is True
        assert report.fields["b1"] == 1
        assert report.fields["threshold_holds"] is False
        assert report.passed
        assert report.fields["certificate"]

    def test_degree_four_is_inconclusive(self, double_cover):
        c = double_cover(4)
        cut = cheeger_best(cayley_graph(c.quotient))
        report = verify_theorem11(c, cut)
        assert cut.vertices == (0, 1)
        assert report.verdict == Verdict.inconclusive
        assert report.fields["found"] is False
        assert "certificate" not in report.fields

    def test_sphere_cover_agrees(self, l41):
        (q,) = cyclic_quotients(presentation_from(l41), 4)
        c = build_cover(l41, q)
        report = verify_theorem11(c, cheeger_best(cayley_graph(q)))
        assert report.verdict == Verdict.agree
        assert (report.fields["found"], report.fields["b1"]) == (False, 0)

    def test_skipped_search(self, double_cover):
        c = double_cover(6)
        report = verify_theorem11(c, half_ring(c), cap=1)
        assert report.fields["found"] == "skipped"
        assert report.verdict == Verdict.inconclusive
        assert report.notes


class TestOneVertexS2xS1:

    @pytest.mark.parametrize("n", range(2, 13))
    def test_family_agrees(self, s2xs1_cover, n):
        c = s2xs1_cover(n)
        cut = cheeger_best(cayley_graph(c.quotient))
        assert cut.boundary_size == 10
        report = verify_theorem11(c, cut)
        assert report.verdict == Verdict.agree
        assert (report.fields["found"], report.fields["b1"]) == (True, 1)
        assert report.fields["threshold_holds"] is False
        assert report.passed

    @pytest.mark.parametrize("n", [2, 4, 7])
    def test_carry_is_a_certificate_on_the_half_ring(self, s2xs1_cover, s2xs1_steps, carry, n):
        c = s2xs1_cover(n)
        cocycle = carry(c, s2xs1_steps)
        assert set(cocycle.support) <= set(vertex_cut_edges(c, half_ring(c).vertices))
        assert is_cocycle(c.lifted, cocycle, c.skeleton)
        assert not is_coboundary(c.lifted, cocycle, c.skeleton).is_coboundary
