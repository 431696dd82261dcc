from collections import Counter
from fractions import Fraction
from typing import Iterator, Optional, Sequence

import networkx as nx
from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from covercert.config import settings
from covercert.exceptions import (
    CoverInvariantError, DisconnectedTriangulation, DomainMismatch, PreconditionViolation,
    SupportTooLarge
)
from covercert.models import Verdict
from covercert.schemas import (
    CheckResult, CoboundaryResult, Cocycle, CoverTriangulation, CutCertificate, MultiGraph, Report,
    Skeleton, Triangulation
)
from covercert.services.cheeger_service import cayley_graph, threshold_holds, threshold_value
from covercert.services.cover_service import edge_endpoints, vertex_cut_edges
from covercert.services.triangulation_service import build_skeleton, homology
import logging

logger = logging.getLogger(__name__)


def _check_domain(s: Skeleton, c: Cocycle) -> None:
    if len(c.values) != s.edge_count:
        raise DomainMismatch(f"Cochain has {len(c.values)} values; triangulation has {s.edge_count} edge classes.")


def face_sums(s: Skeleton, c: Cocycle) -> list[int]:
    return [sum(sign * c.values[e] for e, sign in word) for word in s.face_words]


def is_cocycle(t: Triangulation, c: Cocycle, skeleton: Optional[Skeleton] = None) -> bool:
    s = skeleton or build_skeleton(t)
    _check_domain(s, c)
    return not any(face_sums(s, c))


def coboundary_of(s: Skeleton, potential: Sequence[int]) -> Cocycle:
    """delta f: value f(head) - f(tail) on every oriented edge class."""
    return Cocycle(values=[potential[head] - potential[tail] for tail, head in s.oriented_edges])


def one_skeleton(s: Skeleton) -> nx.MultiGraph:
    graph = nx.MultiGraph()
    graph.add_nodes_from(range(s.vertex_count))
    for edge, (tail, head) in enumerate(s.oriented_edges):
        graph.add_edge(tail, head, key=edge)
    return graph


def is_coboundary(t: Triangulation, c: Cocycle, skeleton: Optional[Skeleton] = None) -> CoboundaryResult:
    """Integrate c along a BFS spanning tree; any inconsistent edge closes a witness cycle."""
    s = skeleton or build_skeleton(t)
    _check_domain(s, c)
    if any(face_sums(s, c)):
        raise PreconditionViolation("is_coboundary needs a cocycle.")
    graph = one_skeleton(s)
    if not nx.is_connected(graph):
        raise DisconnectedTriangulation("is_coboundary needs a connected triangulation.")

    potential = [0] * s.vertex_count
    parent_edge: dict[int, tuple[int, int]] = {}
    for parent, child in nx.bfs_edges(graph, 0):
        edge = _edge_between(s, graph, parent, child)
        tail, head = s.oriented_edges[edge]
        direction = 1 if (tail, head) == (parent, child) else -1
        potential[child] = potential[parent] + direction * c.values[edge]
        parent_edge[child] = (edge, direction)

    for edge, (tail, head) in enumerate(s.oriented_edges):
        if potential[head] - potential[tail] == c.values[edge]:
            continue
        witness = _witness_cycle(s, parent_edge, edge)
        total = sum(direction * c.values[e] for e, direction in witness)
        logger.debug(f"Cocycle is not a coboundary: edge {edge} closes a cycle with sum {total}")
        return CoboundaryResult(is_coboundary=False, witness=witness, witness_sum=total)
    return CoboundaryResult(is_coboundary=True, potential=potential)


def _edge_between(s: Skeleton, graph: nx.MultiGraph, u: int, v: int) -> int:
    return min(graph.get_edge_data(u, v))


def _path_to_root(parent_edge, s: Skeleton, vertex: int) -> list[tuple[int, int]]:
    """Tree edges from the root down to ``vertex``, each with its traversal direction."""
    path = []
    while vertex in parent_edge:
        edge, direction = parent_edge[vertex]
        path.append((edge, direction))
        tail, head = s.oriented_edges[edge]
        vertex = tail if direction == 1 else head
    return list(reversed(path))


def _witness_cycle(s: Skeleton, parent_edge, edge: int) -> list[tuple[int, int]]:
    """Closed walk root -> tail, across ``edge``, head -> root."""
    tail, head = s.oriented_edges[edge]
    down_to_tail = _path_to_root(parent_edge, s, tail)
    down_to_head = _path_to_root(parent_edge, s, head)
    back_from_head = [(e, -direction) for e, direction in reversed(down_to_head)]
    return [*down_to_tail, (edge, 1), *back_from_head]


def check_cayley_identification(cover: CoverTriangulation, graph: Optional[MultiGraph] = None) -> None:
    """The lifted 1-skeleton, labelled by group elements, must be the Cayley graph."""
    graph = graph or cayley_graph(cover.quotient)
    expected = Counter()
    for edge in graph.edges:
        expected[(edge.u, edge.v)] += edge.multiplicity
    lifted = Counter()
    for edge in range(cover.skeleton.edge_count):
        tail, head = edge_endpoints(cover, edge)
        lifted[(min(tail, head), max(tail, head))] += 1
    if expected != lifted:
        raise CoverInvariantError("Lifted 1-skeleton differs from the Cayley graph of the quotient.")


def _restricted_system(s: Skeleton, support: list[int]) -> list[list[int]]:
    column = {edge: index for index, edge in enumerate(support)}
    rows = []
    for word in s.face_words:
        row = [0] * len(support)
        touched = False
        for e, sign in word:
            if e in column:
                row[column[e]] += sign
                touched = True
        if touched and any(row):
            rows.append(row)
    return rows


def _solve_order(rows: list[list[int]], width: int) -> dict[int, list[tuple[int, Fraction]]]:
    """Express pivot variables through earlier free variables.

    The system is reduced with its columns reversed, so every pivot sits at the latest
    variable of its row; the result maps a pivot to [(free variable, coefficient)] with
    ``x_pivot = sum(coefficient * x_free)``.
    """
    if not rows:
        return {}
    reversed_rows = [[QQ(row[width - 1 - j]) for j in range(width)] for row in rows]
    matrix = DomainMatrix(reversed_rows, (len(rows), width), QQ)
    reduced, pivots = matrix.rref()
    dense = reduced.to_Matrix()
    solved: dict[int, list[tuple[int, Fraction]]] = {}
    for r, pivot_column in enumerate(pivots):
        pivot = width - 1 - pivot_column
        terms = []
        for j in range(pivot_column + 1, width):
            entry = dense[r, j]
            if entry != 0:
                terms.append((width - 1 - j, -Fraction(int(entry.p), int(entry.q))))
        solved[pivot] = terms
    return solved


def enumerate_cocycles(s: Skeleton, support: list[int]) -> Iterator[Cocycle]:
    """All {-1,0,1} cocycles supported on ``support``, lexicographic in support order."""
    width = len(support)
    solved = _solve_order(_restricted_system(s, support), width)
    values = [0] * width

    def assign(position: int) -> Iterator[list[int]]:
        if position == width:
            yield list(values)
            return
        if position in solved:
            forced = sum(coefficient * values[j] for j, coefficient in solved[position])
            if forced.denominator == 1 and -1 <= forced <= 1:
                values[position] = int(forced)
                yield from assign(position + 1)
            values[position] = 0
            return
        for value in (-1, 0, 1):
            values[position] = value
            yield from assign(position + 1)
        values[position] = 0

    for assignment in assign(0):
        full = [0] * s.edge_count
        for edge, value in zip(support, assignment):
            full[edge] = value
        yield Cocycle(values=full)


def search_certificate(
    cover: CoverTriangulation,
    cut: CutCertificate,
    cap: Optional[int] = None,
    force: bool = False,
) -> Optional[Cocycle]:
    """First {-1,0,1} cocycle supported on the lifts of dA that is not a coboundary, or None."""
    if cap is None:
        cap = settings.SUPPORT_CAP
    if cut.vertex_count != cover.degree:
        raise PreconditionViolation(
            f"Cut is on {cut.vertex_count} vertices but the cover has degree {cover.degree}."
        )
    check_cayley_identification(cover)
    support = vertex_cut_edges(cover, cut.vertices)
    if len(support) > cap:
        raise SupportTooLarge(f"|dA| = {len(support)} exceeds the support cap {cap}.")
    if not threshold_holds(cut):
        if not force:
            raise PreconditionViolation(
                f"Cut ratio {cut.ratio} does not meet the threshold for {cut.vertex_count} vertices; use force to override."
            )
        logger.warning(
            f"PreconditionOverridden: ratio {cut.ratio} is not below sqrt(2/(3*{cut.vertex_count})); searching anyway"
        )

    s = cover.skeleton
    examined = 0
    for candidate in enumerate_cocycles(s, support):
        examined += 1
        if any(face_sums(s, candidate)):
            raise CoverInvariantError("Enumerated assignment violates the cocycle condition.")
        if not is_coboundary(cover.lifted, candidate, s).is_coboundary:
            logger.info(f"Certificate found after {examined} cocycles on |dA|={len(support)} edges")
            return candidate
    logger.info(f"No certificate among {examined} cocycles on |dA|={len(support)} edges")
    return None


def verify_theorem11(
    cover: CoverTriangulation,
    cut: CutCertificate,
    cap: Optional[int] = None,
) -> Report:
    """Run the search (threshold overridden) and compare against the homology oracle."""
    holds = threshold_holds(cut)
    b1 = homology(cover.lifted, cover.skeleton).b1
    support = vertex_cut_edges(cover, cut.vertices)
    fields = {
        "degree": cover.degree,
        "cut": list(cut.vertices),
        "boundary": cut.boundary_size,
        "ratio": cut.ratio,
        "threshold": threshold_value(cut.vertex_count),
        "threshold_holds": holds,
        "support": len(support),
    }
    notes = []
    certificate = None
    searched = True
    try:
        certificate = search_certificate(cover, cut, cap=cap, force=True)
    except SupportTooLarge as e:
        searched = False
        notes.append(e.detail)
    found = certificate is not None
    fields.update({"found": found if searched else "skipped", "b1": b1})

    if searched and holds and not found:
        verdict = Verdict.theorem_violation
    elif found and b1 == 0:
        verdict = Verdict.unsound
    elif found or (searched and b1 == 0):
        verdict = Verdict.agree
    else:
        verdict = Verdict.inconclusive
    fields["verdict"] = verdict.value

    checks = [
        CheckResult(name="soundness", passed=not (found and b1 == 0),
                    detail="certificate found on a cover with b1 = 0" if found and b1 == 0 else ""),
        CheckResult(name="threshold_implication", passed=verdict != Verdict.theorem_violation,
                    detail="threshold holds but no certificate exists" if verdict == Verdict.theorem_violation else ""),
    ]
    if verdict in (Verdict.theorem_violation, Verdict.unsound):
        logger.error(f"Certificate check failed on degree-{cover.degree} cover: {verdict.value}")
    report = Report(kind="certify", fields=fields, checks=checks, verdict=verdict, notes=notes)
    if certificate is not None:
        report.fields["certificate"] = {e: certificate.values[e] for e in certificate.support}
    return report
