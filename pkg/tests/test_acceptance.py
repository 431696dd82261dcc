"""
Corpus-level agreement between the certificate search and integer homology.
"""
from itertools import combinations, permutations
import random

import pytest

from covercert.models import Verdict
from covercert.schemas import Cocycle
from covercert.services import census_service
from covercert.services.certificate_service import search_certificate, verify_theorem11
from covercert.services.cheeger_service import cayley_graph, cheeger_best, make_cut
from covercert.services.cover_service import build_cover
from covercert.services.presentation_service import cyclic_quotients, presentation_from
from covercert.services.surface_service import (
    dual_surface, profile, rebuild_cocycle, verify_counting_bounds
)
from covercert.services.triangulation_service import homology, max_edge_valence, validate

MAX_DEGREE = 12
THREE_TORUS_CHOICES = {2: None, 3: None, 4: None, 5: None, 6: 10}


def _relabelled(name: str, rng: random.Random):
    t = census_service.by_name(name)
    order = list(range(t.tet_count))
    rng.shuffle(order)
    t = census_service.relabel(t, order)
    corners = [0, 1, 2, 3]
    rng.shuffle(corners)
    return census_service.relabel_vertices(t, rng.randrange(t.tet_count), corners)


def _pairs(label: str, t, orders, limit=None):
    p = presentation_from(t)
    for n in orders:
        for choice, q in enumerate(cyclic_quotients(p, n)[:limit]):
            yield pytest.param(t, q, id=f"{label}-{n}-{choice}")


def _corpus():
    cases = []
    for name in ("s2xs1", "s2xs1-double"):
        cases.extend(_pairs(name, census_service.by_name(name), range(2, MAX_DEGREE + 1)))
    rng = random.Random(11)
    for copy in range(2):
        cases.extend(_pairs(f"s2xs1-shuffled{copy}", _relabelled("s2xs1", rng), range(2, MAX_DEGREE + 1)))
    t3 = census_service.three_torus()
    for n, limit in THREE_TORUS_CHOICES.items():
        cases.extend(_pairs("t3", t3, (n,), limit))
    # Every corner numbering of the one-tetrahedron lens spaces.
    for name, orders in [("l41", (2, 4)), ("l52", (5,))]:
        t = census_service.by_name(name)
        for corners in permutations(range(4)):
            relabelled = census_service.relabel_vertices(t, 0, list(corners))
            cases.extend(_pairs(f"{name}-{''.join(map(str, corners))}", relabelled, orders))
    return cases


CORPUS = _corpus()


def test_corpus_size():
    assert len(CORPUS) >= 200
    assert all(q.degree <= MAX_DEGREE for _, q in (case.values for case in CORPUS))


@pytest.mark.parametrize("t, q", CORPUS)
def test_verdicts_never_contradict_homology(t, q):
    c = build_cover(t, q)
    assert validate(c.lifted).passed
    cut = cheeger_best(cayley_graph(q))
    report = verify_theorem11(c, cut)
    b1 = report.fields["b1"]
    assert report.verdict in (Verdict.agree, Verdict.inconclusive)
    assert report.passed
    if b1 == 0:
        assert report.verdict == Verdict.agree
        graph = cayley_graph(q)
        for size in range(1, q.degree // 2 + 1):
            for vertices in combinations(range(q.degree), size):
                assert search_certificate(c, make_cut(graph, vertices), force=True) is None, vertices
    if report.fields["found"] is True:
        assert b1 > 0
        s = c.skeleton
        values = [0] * s.edge_count
        for edge, value in report.fields["certificate"].items():
            values[edge] = value
        certificate = Cocycle(values=values)
        surface = dual_surface(c.lifted, certificate, s)
        assert rebuild_cocycle(surface, s).values == certificate.values
        summary = profile(surface, s)
        assert verify_counting_bounds(surface, cut, max_edge_valence(s), summary).passed


@pytest.mark.parametrize("n", range(2, 7))
def test_three_torus_covers_keep_b1(n):
    t = census_service.three_torus()
    c = build_cover(t, cyclic_quotients(presentation_from(t), n)[0])
    assert homology(c.lifted, c.skeleton).betti == (1, 3, 3, 1)


@pytest.mark.parametrize("n", range(2, MAX_DEGREE + 1))
def test_s2xs1_covers_keep_b1(double_cover, s2xs1_cover, n):
    for c in (double_cover(n), s2xs1_cover(n)):
        assert homology(c.lifted, c.skeleton).b1 == 1
        assert validate(c.lifted).passed
