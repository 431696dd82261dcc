"""Normal surfaces dual to {-1,0,1} cocycles.

Disc conventions: a triangle is indexed by the corner it cuts off; quad type q separates
``QUAD_SIDES[q][0]`` (the side holding vertex 0) from ``QUAD_SIDES[q][1]``. The positive
side of a disc is the side its transverse orientation points into, which for a dual surface
is the side where the cocycle's heights are larger.
"""
from collections import deque
from fractions import Fraction
from typing import Optional

import networkx as nx
from networkx.utils import UnionFind

from covercert.exceptions import (
    CoverInvariantError, DomainMismatch, MatchingViolation, NotACocycle, OrientationMissing,
    ValueOutOfRange
)
from covercert.models import DiscKind
from covercert.schemas import (
    CheckResult, Cocycle, CoverTriangulation, CutCertificate, Disc, NormalSurface, Report, Skeleton,
    SurfaceComponent, SurfaceProfile, Triangulation
)
from covercert.services.certificate_service import face_sums, is_coboundary
from covercert.services.cover_service import translate_tet, require_element
from covercert.services.triangulation_service import (
    EDGES, build_skeleton, edge_index, face_vertices, vertex_map
)
import logging

logger = logging.getLogger(__name__)

QUAD_SIDES = {
    0: ((0, 1), (2, 3)),
    1: ((0, 2), (1, 3)),
    2: ((0, 3), (1, 2)),
}


def quad_type(side) -> int:
    wanted = set(side)
    for q, (first, second) in QUAD_SIDES.items():
        if wanted in (set(first), set(second)):
            return q
    raise ValueError(f"{sorted(wanted)} is not one side of a quad.")


def positive_side(disc: Disc) -> frozenset[int]:
    """Corners on the positive side; unoriented discs use the +1 convention."""
    sign = disc.orientation or 1
    if disc.kind == DiscKind.triangle:
        lone = frozenset({disc.index})
        return lone if sign > 0 else frozenset(range(4)) - lone
    first, second = QUAD_SIDES[disc.index]
    return frozenset(first if sign > 0 else second)


def disc_corners(disc: Disc) -> list[tuple[int, int]]:
    """Tetrahedron edges met by a disc."""
    if disc.kind == DiscKind.triangle:
        return [(disc.index, u) for u in range(4) if u != disc.index]
    first, second = QUAD_SIDES[disc.index]
    return [(a, b) for a in first for b in second]


def _arc_corner(disc: Disc, face: int) -> Optional[int]:
    """Corner of ``face`` cut off by the disc's arc on that face, or None when it misses the face."""
    if disc.kind == DiscKind.triangle:
        return None if disc.index == face else disc.index
    for side in QUAD_SIDES[disc.index]:
        if face in side:
            return side[0] if side[1] == face else side[1]
    return None


def face_arcs(surface: NormalSurface, tet: int, face: int) -> dict[int, list[int]]:
    """Discs meeting a face, grouped by the corner their arc cuts off, ordered outward from it."""
    arcs: dict[int, list[int]] = {v: [] for v in face_vertices(face)}
    tet_discs = surface.discs[tet]
    for index, disc in enumerate(tet_discs):
        if disc.kind == DiscKind.triangle and _arc_corner(disc, face) is not None:
            arcs[disc.index].append(index)
    for index, disc in enumerate(tet_discs):
        if disc.kind == DiscKind.quad:
            arcs[_arc_corner(disc, face)].append(index)
    return arcs


def check_matching(surface: NormalSurface) -> None:
    t = surface.ambient
    for tet, tet_discs in enumerate(surface.discs):
        types = {disc.index for disc in tet_discs if disc.kind == DiscKind.quad}
        if len(types) > 1:
            raise MatchingViolation(f"Tetrahedron {tet} carries incompatible quad types {sorted(types)}.")
    for (tet, face), gluing in sorted(t.gluings.items()):
        image = vertex_map(face, gluing)
        ours = face_arcs(surface, tet, face)
        theirs = face_arcs(surface, gluing.tet, gluing.face)
        for corner, discs in ours.items():
            if len(discs) != len(theirs[image[corner]]):
                raise MatchingViolation(
                    f"Arc counts differ across face ({tet}, {face}) at corner {corner}: "
                    f"{len(discs)} vs {len(theirs[image[corner]])}."
                )


def _heights(s: Skeleton, c: Cocycle, tet: int) -> list[int]:
    heights = [0, 0, 0, 0]
    for j in (1, 2, 3):
        e = edge_index(0, j)
        heights[j] = c.values[s.edge_of[tet][e]] * s.edge_sign[tet][e]
    for a, b in EDGES:
        e = edge_index(a, b)
        if heights[b] - heights[a] != c.values[s.edge_of[tet][e]] * s.edge_sign[tet][e]:
            raise NotACocycle(f"Heights are inconsistent in tetrahedron {tet}.")
    return heights


def discs_for_heights(heights: list[int]) -> list[Disc]:
    low = min(heights)
    high = {v for v in range(4) if heights[v] > low}
    if not high:
        return []
    if len(high) == 1:
        return [Disc(kind=DiscKind.triangle, index=next(iter(high)), orientation=1)]
    if len(high) == 3:
        lone = ({0, 1, 2, 3} - high).pop()
        return [Disc(kind=DiscKind.triangle, index=lone, orientation=-1)]
    return [Disc(kind=DiscKind.quad, index=quad_type(high), orientation=1 if 0 in high else -1)]


def dual_surface(t: Triangulation, c: Cocycle, skeleton: Optional[Skeleton] = None) -> NormalSurface:
    s = skeleton or build_skeleton(t)
    if len(c.values) != s.edge_count:
        raise DomainMismatch(f"Cochain has {len(c.values)} values; triangulation has {s.edge_count} edge classes.")
    bad = [v for v in c.values if v not in (-1, 0, 1)]
    if bad:
        raise ValueOutOfRange(f"Cocycle values must lie in {{-1, 0, 1}}; found {sorted(set(bad))}.")
    if any(face_sums(s, c)):
        raise NotACocycle("Cochain fails the cocycle condition.")
    discs = [discs_for_heights(_heights(s, c, tet)) for tet in range(t.tet_count)]
    surface = NormalSurface(ambient=t, discs=discs)
    check_matching(surface)
    logger.debug(f"Dual surface has {surface.disc_count} discs in {t.tet_count} tetrahedra")
    return surface


def _components(surface: NormalSurface) -> tuple[list[list[tuple[int, int]]], list[tuple[tuple[int, int], tuple[int, int], bool]]]:
    """Disc components and, for every matched arc pair, whether their positive sides agree."""
    t = surface.ambient
    nodes = [(tet, i) for tet, tet_discs in enumerate(surface.discs) for i in range(len(tet_discs))]
    pieces = UnionFind(nodes)
    relations = []
    for (tet, face), gluing in sorted(t.gluings.items()):
        if (gluing.tet, gluing.face) < (tet, face):
            continue
        image = vertex_map(face, gluing)
        ours = face_arcs(surface, tet, face)
        theirs = face_arcs(surface, gluing.tet, gluing.face)
        for corner, discs in ours.items():
            for i, j in zip(discs, theirs[image[corner]]):
                a, b = (tet, i), (gluing.tet, j)
                pieces.union(a, b)
                side_a = {image[v] for v in positive_side(surface.discs[tet][i]) if v != face}
                side_b = {v for v in positive_side(surface.discs[gluing.tet][j]) if v != gluing.face}
                relations.append((a, b, side_a == side_b))
    groups = sorted((sorted(group) for group in pieces.to_sets()), key=lambda group: group[0])
    return groups, relations


def profile(surface: NormalSurface, skeleton: Optional[Skeleton] = None) -> SurfaceProfile:
    """Induced cell structure: vertices on edges, arcs on faces, discs as 2-cells."""
    check_matching(surface)
    if surface.is_empty:
        return SurfaceProfile(components=[])
    s = skeleton or build_skeleton(surface.ambient)
    groups, relations = _components(surface)

    adjacency: dict[tuple[int, int], list[tuple[tuple[int, int], bool]]] = {}
    for a, b, same in relations:
        adjacency.setdefault(a, []).append((b, same))
        adjacency.setdefault(b, []).append((a, same))

    components = []
    for group in groups:
        triangles = quads = 0
        vertices = Fraction(0)
        for tet, i in group:
            disc = surface.discs[tet][i]
            if disc.kind == DiscKind.triangle:
                triangles += 1
            else:
                quads += 1
            for a, b in disc_corners(disc):
                vertices += Fraction(1, s.edge_valence[s.edge_of[tet][edge_index(a, b)]])
        arcs = 3 * triangles + 4 * quads
        if arcs % 2 or vertices.denominator != 1:
            raise CoverInvariantError("Surface cell counts are not integral; the disc gluing is inconsistent.")
        edges = arcs // 2
        faces = len(group)
        chi = int(vertices) - edges + faces
        orientable = _two_colourable(group, adjacency)
        genus = (2 - chi) // 2 if orientable else None
        components.append(SurfaceComponent(
            discs=group,
            vertices=int(vertices),
            edges=edges,
            faces=faces,
            euler_characteristic=chi,
            orientable=orientable,
            genus=genus,
            triangles=triangles,
            quads=quads,
        ))
    logger.info(
        f"Surface profile: {len(components)} components, "
        f"chi={[c.euler_characteristic for c in components]}"
    )
    return SurfaceProfile(components=components)


def _two_colourable(group, adjacency) -> bool:
    parity = {group[0]: 0}
    queue = deque([group[0]])
    while queue:
        node = queue.popleft()
        for other, same in adjacency.get(node, []):
            expected = parity[node] if same else 1 - parity[node]
            if other not in parity:
                parity[other] = expected
                queue.append(other)
            elif parity[other] != expected:
                return False
    return True


def _drop(surface: NormalSurface, discs: set[tuple[int, int]]) -> NormalSurface:
    kept = [
        [disc for i, disc in enumerate(tet_discs) if (tet, i) not in discs]
        for tet, tet_discs in enumerate(surface.discs)
    ]
    return NormalSurface(ambient=surface.ambient, discs=kept)


def remove_spheres(surface: NormalSurface, summary: Optional[SurfaceProfile] = None) -> NormalSurface:
    summary = summary or profile(surface)
    spheres = [c for c in summary.components if c.is_sphere]
    if not spheres:
        return surface
    remaining = _drop(surface, {disc for c in spheres for disc in c.discs})
    logger.info(f"Removed {len(spheres)} sphere components")
    if surface.transversely_oriented:
        s = build_skeleton(surface.ambient)
        before = is_coboundary(surface.ambient, rebuild_cocycle(surface, s), s).is_coboundary
        after = is_coboundary(surface.ambient, rebuild_cocycle(remaining, s), s).is_coboundary
        if not before and after:
            logger.warning(
                "Sphere removal discarded the homologically non-trivial part of the surface; "
                "the ambient manifold contains essential spheres"
            )
    return remaining


def rebuild_cocycle(surface: NormalSurface, skeleton: Optional[Skeleton] = None) -> Cocycle:
    """Signed intersection numbers of the surface with every oriented edge class."""
    if not surface.transversely_oriented:
        raise OrientationMissing("Every disc needs a transverse orientation to define a cocycle.")
    s = skeleton or build_skeleton(surface.ambient)
    values = []
    for members in s.edge_classes:
        tet, e = members[0]
        a, b = EDGES[e]
        crossing = 0
        for disc in surface.discs[tet]:
            side = positive_side(disc)
            crossing += (b in side) - (a in side)
        values.append(crossing * s.edge_sign[tet][e])
    return Cocycle(values=values)


def surface_edge_weights(surface: NormalSurface, skeleton: Optional[Skeleton] = None) -> list[int]:
    s = skeleton or build_skeleton(surface.ambient)
    weights = []
    for members in s.edge_classes:
        tet, e = members[0]
        a, b = EDGES[e]
        weights.append(sum(1 for disc in surface.discs[tet] if (a in positive_side(disc)) != (b in positive_side(disc))))
    return weights


def separates(surface: NormalSurface, skeleton: Optional[Skeleton] = None) -> bool:
    """True when the surface is empty or cutting the crossed edges disconnects the 1-skeleton."""
    if surface.is_empty:
        return True
    s = skeleton or build_skeleton(surface.ambient)
    weights = surface_edge_weights(surface, s)
    graph = nx.MultiGraph()
    graph.add_nodes_from(range(s.vertex_count))
    for edge, (tail, head) in enumerate(s.oriented_edges):
        if weights[edge] == 0:
            graph.add_edge(tail, head)
    return not nx.is_connected(graph)


def translate_surface(cover: CoverTriangulation, g: int, surface: NormalSurface) -> NormalSurface:
    require_element(cover, g)
    discs: list[list[Disc]] = [[] for _ in range(cover.lifted.tet_count)]
    for k, tet_discs in enumerate(surface.discs):
        discs[translate_tet(cover, g, k)] = list(tet_discs)
    return NormalSurface(ambient=surface.ambient, discs=discs)


def combine(first: NormalSurface, second: NormalSurface) -> NormalSurface:
    if first.ambient.tet_count != second.ambient.tet_count:
        raise MatchingViolation("Surfaces live in different triangulations.")
    merged = NormalSurface(
        ambient=first.ambient,
        discs=[a + b for a, b in zip(first.discs, second.discs)],
    )
    check_matching(merged)
    return merged


def verify_counting_bounds(
    surface: NormalSurface,
    cut: CutCertificate,
    k3: int,
    summary: Optional[SurfaceProfile] = None,
) -> Report:
    summary = summary or profile(surface)
    v, e, chi = summary.vertex_count, summary.edge_count, summary.euler_characteristic
    checks = [
        CheckResult(name="vertices_vs_boundary", passed=v <= cut.boundary_size,
                    detail=f"|V(S)|={v} <= |dA|={cut.boundary_size}"),
        CheckResult(name="edges_vs_valence", passed=2 * e <= v * k3,
                    detail=f"|E(S)|={e} <= |V(S)|*k3/2={Fraction(v * k3, 2)}"),
    ]
    notes = []
    if e > 0:
        checks.append(CheckResult(name="euler_vs_edges", passed=abs(chi) < e,
                                  detail=f"|chi(S)|={abs(chi)} < |E(S)|={e}"))
    else:
        checks.append(CheckResult(name="euler_vs_edges", passed=True, detail="vacuous: E(S)=0"))
        notes.append("degenerate: surface has no edges, bounds are vacuous")
    report = Report(
        kind="counting",
        fields={
            "vertices": v, "edges": e, "faces": summary.face_count, "chi": chi,
            "boundary": cut.boundary_size, "k3": k3, "components": summary.component_count,
        },
        checks=checks,
        notes=notes,
    )
    for check in report.checks:
        if not check.passed:
            logger.error(f"Counting bound {check.name} fails: {check.detail}")
    return report
