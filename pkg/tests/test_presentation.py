from math import gcd
import random

import pytest
from pydantic import ValidationError

from covercert.exceptions import InvalidQuotient, MultipleVertices
from covercert.schemas import FiniteQuotient, Presentation
from covercert.services import census_service
from covercert.services.presentation_service import (
    abelianization, cyclic_quotients, evaluate_word, presentation_from, quotient_from_images,
    require_valid_quotient, trivial_quotient, validate_quotient
)


def test_double_presentation(torus_double):
    p = presentation_from(torus_double)
    assert p.generators == [0, 1, 2]
    assert len(p.relators) == 4
    assert all(len(relator) == 3 for relator in p.relators)
    h1 = abelianization(p)
    assert (h1.rank, h1.torsion) == (1, [])


@pytest.mark.parametrize("name, rank, torsion", [
    ("s3", 0, []),
    ("l41", 0, [4]),
    ("l52", 0, [5]),
    ("t3", 3, []),
])
def test_abelianization_matches_h1(name, rank, torsion):
    h1 = abelianization(presentation_from(census_service.by_name(name)))
    assert (h1.rank, h1.torsion) == (rank, torsion)


def test_projective_plane_relators():
    # a a b^-1 and b a a^-1 present Z/2.
    p = Presentation(generators=[0, 1], relators=[[(0, 1), (0, 1), (1, -1)], [(1, 1), (0, 1), (0, -1)]])
    h1 = abelianization(p)
    assert (h1.rank, h1.torsion) == (0, [2])


def test_presentation_rejects_undeclared_letters():
    with pytest.raises(ValidationError):
        Presentation(generators=[0], relators=[[(0, 1), (1, 1)]])
    with pytest.raises(ValidationError):
        Presentation(generators=[0], relators=[[(0, 2)]])


def test_multi_vertex_triangulation_has_no_presentation():
    with pytest.raises(MultipleVertices):
        presentation_from(census_service.sphere_two_vertex())


# ============================================================================
# Finite quotients
# ============================================================================

class TestCyclicQuotients:

    @pytest.mark.parametrize("n", [2, 3, 5, 6, 8])
    def test_double_has_one_quotient_per_order(self, torus_double, n):
        options = cyclic_quotients(presentation_from(torus_double), n)
        assert len(options) == 1
        assert options[0].images == {0: 1, 1: 2 % n, 2: 3 % n}

    def test_three_torus_mod_two(self, t3):
        options = cyclic_quotients(presentation_from(t3), 2)
        assert len(options) == 7
        assert len({tuple(sorted(q.images.items())) for q in options}) == 7

    def test_lens_space_orders(self, l41):
        p = presentation_from(l41)
        assert len(cyclic_quotients(p, 2)) == 1
        assert len(cyclic_quotients(p, 4)) == 1
        assert cyclic_quotients(p, 3) == []

    def test_order_below_two_is_rejected(self, torus_double):
        with pytest.raises(InvalidQuotient):
            cyclic_quotients(presentation_from(torus_double), 1)

    def test_every_listed_quotient_validates(self, t3):
        p = presentation_from(t3)
        for q in cyclic_quotients(p, 3):
            assert validate_quotient(p, q).passed

    @pytest.mark.parametrize("seed", range(20))
    def test_generator_order_does_not_matter(self, seed):
        rng = random.Random(seed)
        name, top = rng.choice([("s2xs1", 7), ("s2xs1-double", 7), ("t3", 4), ("l41", 8), ("l52", 7)])
        n = rng.randint(2, top)
        p = presentation_from(census_service.CENSUS[name]())
        renamed = rng.sample(range(100, 100 + len(p.generators)), len(p.generators))
        rename = dict(zip(p.generators, renamed))
        shuffled = Presentation(
            generators=rng.sample(renamed, len(renamed)),
            relators=[[(rename[g], e) for g, e in relator] for relator in p.relators],
        )

        def orbits(presentation, quotients, back):
            units = [u for u in range(1, n) if gcd(u, n) == 1]
            result = set()
            for q in quotients:
                assert validate_quotient(presentation, q).passed
                vector = [q.images[back(g)] for g in p.generators]
                result.add(frozenset(tuple(u * v % n for v in vector) for u in units))
            return result

        original = cyclic_quotients(p, n)
        moved = cyclic_quotients(shuffled, n)
        assert len(original) == len(moved)
        assert orbits(p, original, lambda g: g) == orbits(shuffled, moved, lambda g: rename[g])


class TestValidateQuotient:

    def test_relator_failure(self, torus_double):
        p = presentation_from(torus_double)
        report = validate_quotient(p, quotient_from_images(4, {0: 1, 1: 1, 2: 2}))
        assert not report.check("relators").passed
        with pytest.raises(InvalidQuotient, match="relators"):
            require_valid_quotient(p, quotient_from_images(4, {0: 1, 1: 1, 2: 2}))

    def test_surjectivity_failure(self, torus_double):
        p = presentation_from(torus_double)
        report = validate_quotient(p, quotient_from_images(4, {0: 2, 1: 0, 2: 2}))
        assert report.check("relators").passed
        assert not report.check("surjectivity").passed

    def test_missing_generator(self, torus_double):
        p = presentation_from(torus_double)
        report = validate_quotient(p, quotient_from_images(4, {0: 1, 1: 2}))
        assert not report.check("generators").passed

    def test_trivial_quotient(self, torus_double):
        p = presentation_from(torus_double)
        q = trivial_quotient(p)
        assert q.degree == 1
        assert validate_quotient(p, q).passed


def test_evaluate_word_uses_inverses():
    q = quotient_from_images(5, {0: 1, 1: 2})
    assert evaluate_word(q, [(0, 1), (0, 1), (1, -1)]) == 0
    assert evaluate_word(q, [(1, -1)]) == 3


def test_group_table_axioms():
    with pytest.raises(ValidationError, match="identity"):
        FiniteQuotient(table=[[1, 0], [0, 1]], images={})
    with pytest.raises(ValidationError, match="associative"):
        FiniteQuotient(table=[[0, 1, 2], [1, 0, 0], [2, 2, 0]], images={})
    with pytest.raises(ValidationError, match="not a group element"):
        FiniteQuotient(table=[[0, 1], [1, 0]], images={0: 2})
