"""
Cheeger cuts: exact branch and bound against brute force, spectral sweep and brackets,
and the exact threshold comparison.
"""
from fractions import Fraction
from itertools import combinations
import random

import pytest

from covercert.exceptions import GraphDisconnected, NoAdmissibleCut, TooLarge
from covercert.schemas import CutCertificate, FiniteQuotient, MultiGraph
from covercert.services.cheeger_service import (
    boundary_size, cayley_graph, cheeger_best, cheeger_exact, cheeger_sweep, complete_graph,
    cycle_graph, fiedler, graph_from_edges, make_cut, spectral_brackets, threshold_holds,
    theorem11_threshold, threshold_value, within_brackets
)
from covercert.services.presentation_service import quotient_from_images


# ============================================================================
# Helper functions
# ============================================================================

def brute_force(g: MultiGraph) -> tuple[Fraction, tuple[int, ...]]:
    best = None
    for size in range(1, g.vertex_count // 2 + 1):
        for subset in combinations(range(g.vertex_count), size):
            key = (Fraction(boundary_size(g, subset), size), subset)
            if best is None or key < best:
                best = key
    return best


def random_connected_graph(rng: random.Random, n: int) -> MultiGraph:
    """A random spanning tree plus random extra edges, repeats and loops allowed."""
    pairs = [(v, rng.randrange(v)) for v in range(1, n)]
    for _ in range(rng.randint(0, 2 * n)):
        pairs.append((rng.randrange(n), rng.randrange(n)))
    return graph_from_edges(n, pairs)


# ============================================================================
# Cayley graphs
# ============================================================================

def test_cayley_graph_counts_repeated_edges():
    g = cayley_graph(quotient_from_images(6, {0: 1, 1: 2, 2: 3}))
    assert g.vertex_count == 6
    assert g.edge_total == 18
    multiplicity = {(e.u, e.v): e.multiplicity for e in g.edges}
    assert multiplicity[(0, 3)] == 2
    assert multiplicity[(0, 1)] == 1


def test_identity_images_give_loops():
    g = cayley_graph(quotient_from_images(3, {0: 0, 1: 1}))
    assert sum(e.multiplicity for e in g.edges if e.is_loop) == 3
    assert boundary_size(g, [0]) == 2


KLEIN_TABLE = [[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]]


def degrees(g: MultiGraph) -> list[int]:
    """Vertex degrees with a loop counted twice."""
    result = [0] * g.vertex_count
    for e in g.edges:
        result[e.u] += e.multiplicity
        result[e.v] += e.multiplicity
    return result


def test_klein_four_cayley_graph():
    g = cayley_graph(FiniteQuotient(table=KLEIN_TABLE, images={0: 1, 1: 2}))
    assert [(e.u, e.v, e.multiplicity) for e in g.edges] == [(0, 1, 2), (0, 2, 2), (1, 3, 2), (2, 3, 2)]
    assert g.edge_total == 8
    assert degrees(g) == [4, 4, 4, 4]
    cut = cheeger_exact(g)
    assert (cut.ratio, cut.boundary_size, cut.vertices) == (Fraction(2), 4, (0, 1))


@pytest.mark.parametrize("seed", range(30))
def test_cayley_graphs_are_regular(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 12)
    images = {x: rng.randrange(n) for x in range(rng.randint(1, 4))}
    g = cayley_graph(quotient_from_images(n, images))
    assert degrees(g) == [2 * len(images)] * n
    assert g.edge_total == n * len(images)


# ============================================================================
# Exact search
# ============================================================================

class TestCheegerExact:

    @pytest.mark.parametrize("n", list(range(3, 25)))
    def test_cycles(self, n):
        cut = cheeger_exact(cycle_graph(n))
        assert cut.ratio == Fraction(2, n // 2)
        assert cut.optimal

    def test_complete_graph(self):
        cut = cheeger_exact(complete_graph(4))
        assert cut.ratio == 2
        assert cut.vertices == (0, 1)

    def test_cyclic_cayley_graph(self):
        g = cayley_graph(quotient_from_images(6, {0: 1, 1: 2, 2: 3}))
        cut = cheeger_exact(g)
        assert cut.vertices == (0, 1, 3)
        assert (cut.boundary_size, cut.ratio) == (10, Fraction(10, 3))

    def test_degree_four_cover_graph(self):
        g = cayley_graph(quotient_from_images(4, {0: 1, 1: 2, 2: 3}))
        cut = cheeger_exact(g)
        assert cut.vertices == (0, 1)
        assert cut.ratio == 4

    def test_two_vertices(self):
        cut = cheeger_exact(graph_from_edges(2, [(0, 1), (0, 1)]))
        assert (cut.vertices, cut.ratio) == ((0,), 2)

    @pytest.mark.parametrize("seed", range(40))
    def test_matches_brute_force(self, seed):
        rng = random.Random(seed)
        g = random_connected_graph(rng, rng.randint(3, 10))
        ratio, vertices = brute_force(g)
        cut = cheeger_exact(g)
        assert cut.ratio == ratio
        assert cut.vertices == vertices

    def test_limit(self):
        with pytest.raises(TooLarge):
            cheeger_exact(cycle_graph(30), limit=24)

    def test_zero_limit_is_honoured(self):
        with pytest.raises(TooLarge):
            cheeger_exact(cycle_graph(4), limit=0)
        assert cheeger_best(cycle_graph(4), limit=0).optimal is False

    def test_disconnected(self):
        with pytest.raises(GraphDisconnected):
            cheeger_exact(graph_from_edges(4, [(0, 1), (2, 3)]))

    def test_single_vertex(self):
        with pytest.raises(NoAdmissibleCut):
            cheeger_exact(MultiGraph(vertex_count=1))


# ============================================================================
# Spectral side
# ============================================================================

class TestSpectral:

    def test_sweep_is_an_upper_bound(self):
        rng = random.Random(7)
        for _ in range(20):
            g = random_connected_graph(rng, rng.randint(3, 12))
            sweep = cheeger_sweep(g)
            assert not sweep.optimal
            assert sweep.ratio >= cheeger_exact(g).ratio
            assert len(sweep.vertices) <= g.vertex_count // 2

    @pytest.mark.parametrize("g", [cycle_graph(8), cycle_graph(11), complete_graph(4), complete_graph(7)],
                             ids=["c8", "c11", "k4", "k7"])
    def test_exact_value_sits_in_the_brackets(self, g):
        assert within_brackets(g, cheeger_exact(g))

    def test_complete_graph_fiedler_value(self):
        value, _ = fiedler(complete_graph(5))
        assert value == pytest.approx(5.0)
        lower, upper = spectral_brackets(complete_graph(5))
        assert lower == pytest.approx(2.5)
        assert upper == pytest.approx((2 * 4 * 5) ** 0.5)

    def test_best_falls_back_to_the_sweep(self, caplog):
        cut = cheeger_best(cycle_graph(30), limit=10)
        assert not cut.optimal
        assert "spectral sweep" in caplog.text


# ============================================================================
# Threshold
# ============================================================================

class TestThreshold:

    def _cut(self, boundary: int, size: int, vertex_count: int) -> CutCertificate:
        return CutCertificate(
            vertices=tuple(range(size)),
            vertex_count=vertex_count,
            boundary_size=boundary,
            ratio=Fraction(boundary, size),
            optimal=True,
        )

    def test_strict_inequality(self):
        # sqrt(2 / 72) = 1/6 exactly
        assert threshold_holds(self._cut(1, 12, 24))
        assert not threshold_holds(self._cut(2, 12, 24))
        assert threshold_value(24) == pytest.approx(1 / 6)

    def test_threshold_of_a_graph(self):
        assert theorem11_threshold(cycle_graph(6)) == pytest.approx(1 / 3)
        ring = cycle_graph(32)
        half = make_cut(ring, range(16))
        assert half.ratio == Fraction(1, 8)
        assert half.ratio < theorem11_threshold(ring)
        assert threshold_holds(half)

    def test_small_covers_miss_the_threshold(self):
        for n in range(2, 13):
            g = cayley_graph(quotient_from_images(n, {0: 1, 1: 2, 2: 3}))
            assert not threshold_holds(cheeger_best(g))

    def test_cut_certificate_validation(self):
        g = cycle_graph(6)
        with pytest.raises(ValueError):
            make_cut(g, [0, 1, 2, 3])
        with pytest.raises(ValueError):
            CutCertificate(vertices=(0,), vertex_count=6, boundary_size=2, ratio=Fraction(3), optimal=False)
