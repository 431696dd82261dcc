from typing import Iterable, Optional

from covercert.exceptions import CoverInvariantError, CovercertException, UnknownElement
from covercert.models import CellKind
from covercert.schemas import (
    Cell, Cocycle, CoverTriangulation, EdgeLift, FiniteQuotient, Gluing, Skeleton, Triangulation
)
from covercert.services.presentation_service import presentation_from, require_valid_quotient
from covercert.services.triangulation_service import (
    EDGES, build_skeleton, edge_index, face_vertices, require_valid, validate, vertex_map
)
import logging

logger = logging.getLogger(__name__)


def _corner_offsets(t: Triangulation, s: Skeleton, q: FiniteQuotient) -> list[list[int]]:
    """offsets[tet][j]: group element read along the edge from corner 0 to corner j."""
    offsets = []
    for tet in range(t.tet_count):
        row = [0]
        for j in (1, 2, 3):
            e = edge_index(0, j)
            image = q.image(s.edge_of[tet][e])
            if s.edge_sign[tet][e] < 0:
                image = q.inverse(image)
            row.append(image)
        offsets.append(row)
    return offsets


def build_cover(t: Triangulation, q: FiniteQuotient, skeleton: Optional[Skeleton] = None) -> CoverTriangulation:
    """Regular cover of a one-vertex triangulation defined by a finite quotient.

    Lifted tetrahedron ``tet * n + g`` carries label ``(tet, g)``; its corner j is the
    group element ``g * offsets[tet][j]``. Crossing a face keeps corner labels fixed.
    """
    require_valid(t)
    s = skeleton or build_skeleton(t)
    presentation = presentation_from(t, s)
    require_valid_quotient(presentation, q)

    n = q.degree
    offsets = _corner_offsets(t, s, q)

    def corner_label(tet: int, g: int, corner: int) -> int:
        return q.multiply(g, offsets[tet][corner])

    gluings: dict[tuple[int, int], Gluing] = {}
    for (tet, face), gluing in sorted(t.gluings.items()):
        image = vertex_map(face, gluing)
        anchor = face_vertices(face)[0]
        shift = q.multiply(offsets[tet][anchor], q.inverse(offsets[gluing.tet][image[anchor]]))
        for g in range(n):
            target = q.multiply(g, shift)
            for corner in face_vertices(face):
                if corner_label(tet, g, corner) != corner_label(gluing.tet, target, image[corner]):
                    raise CoverInvariantError(
                        f"Corner labels disagree across base face ({tet}, {face}) at element {g}."
                    )
            gluings[(tet * n + g, face)] = Gluing(tet=gluing.tet * n + target, face=gluing.face, perm=gluing.perm)

    lifted = Triangulation(tet_count=t.tet_count * n, gluings=gluings)
    labels = [(tet, g) for tet in range(t.tet_count) for g in range(n)]

    report = validate(lifted)
    if not report.passed:
        failed = [check.name for check in report.checks if not check.passed]
        raise CoverInvariantError(f"Lifted triangulation fails validation: {failed}.")
    lifted_skeleton = build_skeleton(lifted)

    vertex_elements = []
    for members in lifted_skeleton.vertex_classes:
        found = {corner_label(*labels[k], corner) for k, corner in members}
        if len(found) != 1:
            raise CoverInvariantError(f"Lifted vertex class carries several group labels {sorted(found)}.")
        vertex_elements.append(found.pop())
    if sorted(vertex_elements) != list(range(n)):
        raise CoverInvariantError("Lifted vertex classes are not in bijection with group elements.")

    edge_lifts = []
    for members in lifted_skeleton.edge_classes:
        k, e = members[0]
        tet, g = labels[k]
        a, b = EDGES[e]
        if s.edge_sign[tet][e] > 0:
            edge_lifts.append(EdgeLift(base_class=s.edge_of[tet][e], element=corner_label(tet, g, a), sign=1))
        else:
            edge_lifts.append(EdgeLift(base_class=s.edge_of[tet][e], element=corner_label(tet, g, b), sign=-1))

    logger.info(
        f"Built degree-{n} cover: {lifted.tet_count} tetrahedra, "
        f"{lifted_skeleton.edge_count} edges, {lifted_skeleton.face_count} faces"
    )
    return CoverTriangulation(
        base=t,
        quotient=q,
        lifted=lifted,
        labels=labels,
        skeleton=lifted_skeleton,
        vertex_elements=vertex_elements,
        edge_lifts=edge_lifts,
    )


def require_element(c: CoverTriangulation, g: int) -> None:
    if not isinstance(g, int) or not 0 <= g < c.degree:
        raise UnknownElement(f"{g!r} is not an element of the order-{c.degree} deck group.")


def translate_tet(c: CoverTriangulation, g: int, k: int) -> int:
    tet, h = c.labels[k]
    return c.lifted_index(tet, c.quotient.multiply(g, h))


def deck_translate(c: CoverTriangulation, g: int, cell: Cell) -> Cell:
    """Left action of the deck group: (tet, h) goes to (tet, g h), corners fixed."""
    require_element(c, g)
    s = c.skeleton
    if cell.kind == CellKind.tet:
        if cell.index >= c.lifted.tet_count:
            raise CovercertException(f"No lifted tetrahedron {cell.index}.")
        return Cell(kind=cell.kind, index=translate_tet(c, g, cell.index))
    classes = {
        CellKind.vertex: (s.vertex_classes, s.vertex_of),
        CellKind.edge: (s.edge_classes, s.edge_of),
        CellKind.face: (s.face_classes, s.face_of),
    }[cell.kind]
    members, lookup = classes
    if cell.index >= len(members):
        raise CovercertException(f"No lifted {cell.kind.value} class {cell.index}.")
    k, local = members[cell.index][0]
    return Cell(kind=cell.kind, index=lookup[translate_tet(c, g, k)][local])


def project(c: CoverTriangulation, cell: Cell, base_skeleton: Optional[Skeleton] = None) -> Cell:
    """Image of a lifted cell in the base triangulation."""
    s = c.skeleton
    if cell.kind == CellKind.tet:
        return Cell(kind=cell.kind, index=c.labels[cell.index][0])
    base = base_skeleton or build_skeleton(c.base)
    members, lookup, base_lookup = {
        CellKind.vertex: (s.vertex_classes, s.vertex_of, base.vertex_of),
        CellKind.edge: (s.edge_classes, s.edge_of, base.edge_of),
        CellKind.face: (s.face_classes, s.face_of, base.face_of),
    }[cell.kind]
    k, local = members[cell.index][0]
    return Cell(kind=cell.kind, index=base_lookup[c.labels[k][0]][local])


def translate_cocycle(c: CoverTriangulation, g: int, cocycle: Cocycle) -> Cocycle:
    require_element(c, g)
    s = c.skeleton
    values = [0] * s.edge_count
    for class_id, members in enumerate(s.edge_classes):
        k, e = members[0]
        k2 = translate_tet(c, g, k)
        image = s.edge_of[k2][e]
        values[image] = s.edge_sign[k][e] * s.edge_sign[k2][e] * cocycle.values[class_id]
    return Cocycle(values=values)


def translate_vertices(c: CoverTriangulation, g: int, elements: Iterable[int]) -> list[int]:
    require_element(c, g)
    return sorted(c.quotient.multiply(g, h) for h in elements)


def edge_endpoints(c: CoverTriangulation, edge: int) -> tuple[int, int]:
    """Group elements at the tail and head of a lifted edge class."""
    tail, head = c.skeleton.oriented_edges[edge]
    return c.vertex_elements[tail], c.vertex_elements[head]


def vertex_cut_edges(c: CoverTriangulation, elements: Iterable[int]) -> list[int]:
    """Lifted edge classes with exactly one endpoint labelled by an element of ``elements``."""
    chosen = set(elements)
    boundary = []
    for edge in range(c.skeleton.edge_count):
        tail, head = edge_endpoints(c, edge)
        if (tail in chosen) != (head in chosen):
            boundary.append(edge)
    return boundary
