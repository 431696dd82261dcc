from collections import Counter
from fractions import Fraction
from math import sqrt
from typing import Iterable, Optional

import networkx as nx
import numpy as np

from covercert.config import settings
from covercert.exceptions import GraphDisconnected, NoAdmissibleCut, TooLarge
from covercert.schemas import CutCertificate, FiniteQuotient, GraphEdge, MultiGraph
import logging

logger = logging.getLogger(__name__)


def cayley_graph(q: FiniteQuotient) -> MultiGraph:
    """One edge {g, g*phi(x)} for every element g and generator x; repeats raise the multiplicity."""
    counts: Counter = Counter()
    for g in range(q.degree):
        for generator in sorted(q.images):
            h = q.multiply(g, q.image(generator))
            counts[(min(g, h), max(g, h))] += 1
    edges = [GraphEdge(u=u, v=v, multiplicity=m) for (u, v), m in sorted(counts.items())]
    return MultiGraph(vertex_count=q.degree, edges=edges)


def graph_from_edges(vertex_count: int, pairs: Iterable[tuple[int, int]]) -> MultiGraph:
    counts = Counter((min(u, v), max(u, v)) for u, v in pairs)
    return MultiGraph(
        vertex_count=vertex_count,
        edges=[GraphEdge(u=u, v=v, multiplicity=m) for (u, v), m in sorted(counts.items())],
    )


def cycle_graph(n: int) -> MultiGraph:
    return graph_from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> MultiGraph:
    return graph_from_edges(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


def to_networkx(g: MultiGraph) -> nx.MultiGraph:
    graph = nx.MultiGraph()
    graph.add_nodes_from(range(g.vertex_count))
    for edge in g.edges:
        for _ in range(edge.multiplicity):
            graph.add_edge(edge.u, edge.v)
    return graph


def is_connected(g: MultiGraph) -> bool:
    return g.vertex_count > 0 and nx.is_connected(to_networkx(g))


def _require_connected(g: MultiGraph) -> None:
    if not is_connected(g):
        raise GraphDisconnected(f"Graph on {g.vertex_count} vertices is not connected.")


def _require_cuttable(g: MultiGraph) -> None:
    if g.vertex_count < 2:
        raise NoAdmissibleCut(f"A graph with {g.vertex_count} vertex has no admissible cut.")


def boundary_size(g: MultiGraph, vertices: Iterable[int]) -> int:
    """|dA| with multiplicity; loops never cross."""
    chosen = set(vertices)
    return sum(e.multiplicity for e in g.edges if not e.is_loop and ((e.u in chosen) != (e.v in chosen)))


def make_cut(g: MultiGraph, vertices: Iterable[int], optimal: bool = False) -> CutCertificate:
    chosen = tuple(sorted(set(vertices)))
    size = boundary_size(g, chosen)
    return CutCertificate(
        vertices=chosen,
        vertex_count=g.vertex_count,
        boundary_size=size,
        ratio=Fraction(size, len(chosen)) if chosen else Fraction(0),
        optimal=optimal,
    )


def _weights(g: MultiGraph) -> list[dict[int, int]]:
    adjacency: list[dict[int, int]] = [dict() for _ in range(g.vertex_count)]
    for edge in g.edges:
        if edge.is_loop:
            continue
        adjacency[edge.u][edge.v] = adjacency[edge.u].get(edge.v, 0) + edge.multiplicity
        adjacency[edge.v][edge.u] = adjacency[edge.v].get(edge.u, 0) + edge.multiplicity
    return adjacency


def cheeger_exact(g: MultiGraph, limit: Optional[int] = None) -> CutCertificate:
    """Branch and bound over admissible subsets in BFS order.

    A partial assignment with cut c and at most m more vertices allowed in A can only reach
    ratios >= c/m, so it is abandoned when c/m exceeds the best ratio seen. Equal ratios are
    kept so the lexicographically smallest minimiser wins.
    """
    if limit is None:
        limit = settings.EXACT_LIMIT
    if g.vertex_count > limit:
        raise TooLarge(f"Exact Cheeger search limited to {limit} vertices; graph has {g.vertex_count}.")
    _require_cuttable(g)
    _require_connected(g)

    n = g.vertex_count
    half = n // 2
    adjacency = _weights(g)
    order = list(nx.bfs_tree(to_networkx(g), 0))

    seed = cheeger_sweep(g) if n >= 3 else make_cut(g, [0])
    best_ratio = seed.ratio
    best_set = seed.vertices

    side = [None] * n
    chosen: list[int] = []

    def search(depth: int, inside: int, cut: int) -> None:
        nonlocal best_ratio, best_set
        room = min(half, inside + (n - depth))
        if room == 0:
            return
        if Fraction(cut, room) > best_ratio:
            return
        if depth == n:
            if inside == 0:
                return
            ratio = Fraction(cut, inside)
            candidate = tuple(sorted(chosen))
            if ratio < best_ratio or (ratio == best_ratio and candidate < best_set):
                best_ratio, best_set = ratio, candidate
            return
        v = order[depth]
        if inside < half:
            added = sum(w for u, w in adjacency[v].items() if side[u] is False)
            side[v] = True
            chosen.append(v)
            search(depth + 1, inside + 1, cut + added)
            chosen.pop()
        added = sum(w for u, w in adjacency[v].items() if side[u] is True)
        side[v] = False
        search(depth + 1, inside, cut + added)
        side[v] = None

    search(0, 0, 0)
    logger.info(f"Exact Cheeger constant of {n}-vertex graph: {best_ratio} with |A|={len(best_set)}")
    return make_cut(g, best_set, optimal=True)


def laplacian(g: MultiGraph) -> np.ndarray:
    matrix = np.zeros((g.vertex_count, g.vertex_count))
    for edge in g.edges:
        if edge.is_loop:
            continue
        matrix[edge.u, edge.v] -= edge.multiplicity
        matrix[edge.v, edge.u] -= edge.multiplicity
        matrix[edge.u, edge.u] += edge.multiplicity
        matrix[edge.v, edge.v] += edge.multiplicity
    return matrix


def fiedler(g: MultiGraph) -> tuple[float, np.ndarray]:
    """Second-smallest Laplacian eigenvalue and an eigenvector for it."""
    values, vectors = np.linalg.eigh(laplacian(g))
    value = float(values[1])
    if abs(value) < settings.EIGEN_TOLERANCE:
        value = 0.0
    return value, vectors[:, 1]


def cheeger_sweep(g: MultiGraph) -> CutCertificate:
    """Best prefix cut along the Fiedler order; the smaller side of each prefix is evaluated."""
    _require_cuttable(g)
    _require_connected(g)
    n = g.vertex_count
    _, vector = fiedler(g)
    order = [int(i) for i in np.argsort(vector, kind="stable")]
    everyone = set(range(n))
    best: Optional[tuple[Fraction, tuple[int, ...]]] = None
    for k in range(1, n):
        prefix = set(order[:k])
        candidate = prefix if k <= n // 2 else everyone - prefix
        if not 0 < len(candidate) <= n // 2:
            continue
        key = (Fraction(boundary_size(g, candidate), len(candidate)), tuple(sorted(candidate)))
        if best is None or key < best:
            best = key
    cut = make_cut(g, best[1], optimal=False)
    logger.debug(f"Sweep cut on {n} vertices: ratio {cut.ratio}")
    return cut


def cheeger_best(g: MultiGraph, limit: Optional[int] = None) -> CutCertificate:
    if limit is None:
        limit = settings.EXACT_LIMIT
    if g.vertex_count <= limit:
        return cheeger_exact(g, limit)
    logger.warning(
        f"Graph has {g.vertex_count} vertices (limit {limit}); using the spectral sweep, result not optimal."
    )
    return cheeger_sweep(g)


def spectral_brackets(g: MultiGraph) -> tuple[float, float]:
    """Discrete Cheeger inequalities: lambda2/2 <= h <= sqrt(2 * dmax * lambda2)."""
    _require_connected(g)
    value, _ = fiedler(g)
    degrees = np.diag(laplacian(g))
    dmax = float(degrees.max()) if g.vertex_count else 0.0
    return value / 2, sqrt(2 * dmax * value)


def within_brackets(g: MultiGraph, cut: CutCertificate) -> bool:
    lower, upper = spectral_brackets(g)
    ratio = float(cut.ratio)
    tolerance = settings.BRACKET_TOLERANCE
    return lower - tolerance <= ratio <= upper + tolerance


def threshold_value(vertex_count: int) -> float:
    return sqrt(2 / (3 * vertex_count))


def theorem11_threshold(g: MultiGraph) -> float:
    """sqrt(2 / (3|V|)); for display only, decisions go through ``threshold_holds``."""
    return threshold_value(g.vertex_count)


def threshold_holds(cut: CutCertificate) -> bool:
    """Exact test of ratio < sqrt(2 / (3|V|)), i.e. ratio^2 * 3|V| < 2."""
    return cut.ratio * cut.ratio * 3 * cut.vertex_count < 2
