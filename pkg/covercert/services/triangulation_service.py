from collections import deque
from typing import Optional

import networkx as nx
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import invariant_factors

from covercert.exceptions import DisconnectedTriangulation, InvalidTriangulation
from covercert.schemas import (
    CheckResult, Gluing, HomologyProfile, Skeleton, Triangulation, ValidationReport
)
import logging

logger = logging.getLogger(__name__)

EDGES = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
EDGE_INDEX = {pair: index for index, pair in enumerate(EDGES)}
NOT_EVALUATED = "not evaluated: gluing table is incomplete or inconsistent"


def face_vertices(face: int) -> tuple[int, int, int]:
    return tuple(v for v in range(4) if v != face)


def edge_index(a: int, b: int) -> int:
    return EDGE_INDEX[(min(a, b), max(a, b))]


def vertex_map(face: int, gluing: Gluing) -> tuple[int, int, int, int]:
    """Corner correspondence of a gluing; the opposite vertex goes to the opposite vertex."""
    source = face_vertices(face)
    target = face_vertices(gluing.face)
    image = [0, 0, 0, 0]
    for position, vertex in enumerate(source):
        image[vertex] = target[gluing.perm[position]]
    image[face] = gluing.face
    return tuple(image)


def permutation_sign(perm) -> int:
    sign = 1
    items = list(perm)
    for i in range(len(items)):
        for j in range(i + 1, len(items)):
            if items[i] > items[j]:
                sign = -sign
    return sign


def gluing_from_map(face: int, target_tet: int, target_face: int, image) -> Gluing:
    """Inverse of ``vertex_map``: encode a corner correspondence as a gluing."""
    target = face_vertices(target_face)
    perm = tuple(target.index(image[v]) for v in face_vertices(face))
    return Gluing(tet=target_tet, face=target_face, perm=perm)


# --- validation ---

def _missing_faces(t: Triangulation) -> list[tuple[int, int]]:
    return [(tet, face) for tet in range(t.tet_count) for face in range(4)
            if (tet, face) not in t.gluings]


def _involution_failures(t: Triangulation) -> list[tuple[int, int]]:
    failures = []
    for (tet, face), gluing in sorted(t.gluings.items()):
        partner = t.gluing(gluing.tet, gluing.face)
        if (gluing.tet, gluing.face) == (tet, face) or partner is None:
            failures.append((tet, face))
            continue
        if (partner.tet, partner.face) != (tet, face):
            failures.append((tet, face))
            continue
        forward = vertex_map(face, gluing)
        backward = vertex_map(gluing.face, partner)
        if any(backward[forward[v]] != v for v in face_vertices(face)):
            failures.append((tet, face))
    return failures


def orientation(t: Triangulation) -> Optional[list[int]]:
    """Per-tetrahedron signs making every gluing orientation-reversing, or None."""
    signs, _ = _orient(t)
    return signs


def _orient(t: Triangulation) -> tuple[Optional[list[int]], list[tuple[int, int]]]:
    signs: list[Optional[int]] = [None] * t.tet_count
    conflicts = []
    for start in range(t.tet_count):
        if signs[start] is not None:
            continue
        signs[start] = 1
        queue = deque([start])
        while queue:
            tet = queue.popleft()
            for face in range(4):
                gluing = t.gluing(tet, face)
                if gluing is None:
                    continue
                required = -signs[tet] * permutation_sign(vertex_map(face, gluing))
                if signs[gluing.tet] is None:
                    signs[gluing.tet] = required
                    queue.append(gluing.tet)
                elif signs[gluing.tet] != required:
                    conflicts.append((tet, face))
    if conflicts:
        return None, sorted(set(conflicts))
    return [int(s) for s in signs], []


def tet_graph(t: Triangulation) -> nx.Graph:
    graph = nx.Graph()
    graph.add_nodes_from(range(t.tet_count))
    for (tet, _face), gluing in t.gluings.items():
        graph.add_edge(tet, gluing.tet)
    return graph


def is_connected(t: Triangulation) -> bool:
    return t.tet_count > 0 and nx.is_connected(tet_graph(t))


def validate(t: Triangulation) -> ValidationReport:
    checks: list[CheckResult] = []

    missing = _missing_faces(t)
    checks.append(CheckResult(
        name="closedness",
        passed=not missing,
        detail=f"{len(missing)} unglued faces" if missing else "",
        offending=missing,
    ))

    broken = _involution_failures(t)
    checks.append(CheckResult(
        name="involution",
        passed=not broken,
        detail=f"{len(broken)} gluings without an inverse partner" if broken else "",
        offending=broken,
    ))

    consistent = not missing and not broken
    if consistent:
        skeleton, reversed_edges = _skeleton(t)
        checks.append(CheckResult(
            name="edge_validity",
            passed=not reversed_edges,
            detail=f"{len(reversed_edges)} edges identified with their reverse" if reversed_edges else "",
            offending=reversed_edges,
        ))
        _, conflicts = _orient(t)
        checks.append(CheckResult(
            name="orientability",
            passed=not conflicts,
            detail="orientation-preserving gluings found" if conflicts else "",
            offending=conflicts,
        ))
    else:
        skeleton = None
        checks.append(CheckResult(name="edge_validity", passed=False, detail=NOT_EVALUATED))
        checks.append(CheckResult(name="orientability", passed=False, detail=NOT_EVALUATED))

    graph = tet_graph(t)
    components = sorted((sorted(c) for c in nx.connected_components(graph)), key=lambda c: c[0])
    stray = [(tet, 0) for component in components[1:] for tet in component]
    checks.append(CheckResult(
        name="connectedness",
        passed=len(components) == 1,
        detail=f"{len(components)} components" if len(components) != 1 else "",
        offending=stray,
    ))

    if skeleton is not None:
        chi = euler_characteristic(skeleton)
        checks.append(CheckResult(
            name="euler",
            passed=chi == 0,
            detail=f"V-E+F-T = {chi}",
        ))
    else:
        checks.append(CheckResult(name="euler", passed=False, detail=NOT_EVALUATED))

    report = ValidationReport(
        fields={"tets": t.tet_count},
        checks=checks,
    )
    if skeleton is not None:
        report.fields.update({
            "vertices": skeleton.vertex_count,
            "edges": skeleton.edge_count,
            "faces": skeleton.face_count,
        })
    if not report.passed:
        failed = [check.name for check in checks if not check.passed]
        logger.info(f"Triangulation with {t.tet_count} tetrahedra failed checks: {failed}")
    return report


def require_valid(t: Triangulation, connected: bool = True) -> None:
    report = validate(t)
    failed = [check for check in report.checks if not check.passed]
    if connected is False:
        failed = [check for check in failed if check.name != "connectedness"]
    if failed:
        names = ", ".join(check.name for check in failed)
        if [check.name for check in failed] == ["connectedness"]:
            raise DisconnectedTriangulation(f"Triangulation is disconnected ({failed[0].detail}).")
        raise InvalidTriangulation(f"Triangulation failed checks: {names}.")


# --- skeleton ---

def _sorted_components(graph) -> list[list]:
    return sorted((sorted(c) for c in nx.connected_components(graph)), key=lambda c: c[0])


def _skeleton(t: Triangulation) -> tuple[Skeleton, list[tuple[int, int]]]:
    n = t.tet_count
    maps = {key: vertex_map(key[1], gluing) for key, gluing in t.gluings.items()}

    corners = nx.Graph()
    corners.add_nodes_from((tet, v) for tet in range(n) for v in range(4))
    edges = nx.MultiGraph()
    edges.add_nodes_from((tet, e) for tet in range(n) for e in range(6))
    for (tet, face), gluing in t.gluings.items():
        image = maps[(tet, face)]
        for v in face_vertices(face):
            corners.add_edge((tet, v), (gluing.tet, image[v]))
        for a, b in EDGES:
            if face in (a, b):
                continue
            ia, ib = image[a], image[b]
            edges.add_edge((tet, edge_index(a, b)), (gluing.tet, edge_index(ia, ib)), flip=ia > ib)

    vertex_classes = _sorted_components(corners)
    vertex_of = [[0] * 4 for _ in range(n)]
    for class_id, members in enumerate(vertex_classes):
        for tet, v in members:
            vertex_of[tet][v] = class_id

    edge_classes = _sorted_components(edges)
    edge_of = [[0] * 6 for _ in range(n)]
    edge_sign = [[1] * 6 for _ in range(n)]
    reversed_edges: list[tuple[int, int]] = []
    for class_id, members in enumerate(edge_classes):
        root = members[0]
        edge_sign[root[0]][root[1]] = 1
        for parent, child in nx.bfs_edges(edges, root):
            flip = edges.get_edge_data(parent, child)[0]["flip"]
            edge_sign[child[0]][child[1]] = -edge_sign[parent[0]][parent[1]] if flip else edge_sign[parent[0]][parent[1]]
        for tet, e in members:
            edge_of[tet][e] = class_id
        for u, v, flip in edges.subgraph(members).edges(data="flip"):
            expected = -edge_sign[u[0]][u[1]] if flip else edge_sign[u[0]][u[1]]
            if edge_sign[v[0]][v[1]] != expected:
                reversed_edges.append(u)
    edge_valence = [len(members) for members in edge_classes]

    face_reps: dict[tuple[int, int], tuple[int, int]] = {}
    for key, gluing in t.gluings.items():
        face_reps[key] = min(key, (gluing.tet, gluing.face))
    face_classes_map: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for key in sorted(t.gluings):
        face_classes_map.setdefault(face_reps[key], []).append(key)
    face_classes = [sorted(members) for _, members in sorted(face_classes_map.items())]
    face_of = [[0] * 4 for _ in range(n)]
    face_sign = [[1] * 4 for _ in range(n)]
    for class_id, members in enumerate(face_classes):
        rep = members[0]
        gluing = t.gluings[rep]
        for tet, face in members:
            face_of[tet][face] = class_id
        partner = (gluing.tet, gluing.face)
        if partner != rep:
            face_sign[partner[0]][partner[1]] = permutation_sign(gluing.perm)

    oriented_edges = []
    for members in edge_classes:
        tet, e = members[0]
        a, b = EDGES[e]
        oriented_edges.append((vertex_of[tet][a], vertex_of[tet][b]))

    face_words = []
    for members in face_classes:
        tet, face = members[0]
        a, b, c = face_vertices(face)
        word = []
        for x, y in ((a, b), (b, c), (c, a)):
            e = edge_index(x, y)
            direction = 1 if x < y else -1
            word.append((edge_of[tet][e], direction * edge_sign[tet][e]))
        face_words.append(word)

    skeleton = Skeleton(
        tet_count=n,
        vertex_of=vertex_of,
        edge_of=edge_of,
        edge_sign=edge_sign,
        face_of=face_of,
        face_sign=face_sign,
        vertex_classes=vertex_classes,
        edge_classes=edge_classes,
        face_classes=face_classes,
        edge_valence=edge_valence,
        oriented_edges=oriented_edges,
        face_words=face_words,
    )
    return skeleton, sorted(set(reversed_edges))


def build_skeleton(t: Triangulation) -> Skeleton:
    if _missing_faces(t) or _involution_failures(t):
        raise InvalidTriangulation("Cannot build a skeleton: gluing table is not a closed involution.")
    skeleton, reversed_edges = _skeleton(t)
    if reversed_edges:
        raise InvalidTriangulation(f"Edges identified with their reverse at {reversed_edges[:5]}.")
    return skeleton


def euler_characteristic(s: Skeleton) -> int:
    return s.vertex_count - s.edge_count + s.face_count - s.tet_count


def max_edge_valence(s: Skeleton) -> int:
    """The constant k3: the largest number of tetrahedron edges in one edge class."""
    return max(s.edge_valence, default=0)


# --- homology ---

def boundary_matrices(s: Skeleton) -> tuple[list[list[int]], list[list[int]], list[list[int]]]:
    """Integer boundary matrices (rows = (k-1)-cells, columns = k-cells) for k = 1, 2, 3."""
    d1 = [[0] * s.edge_count for _ in range(s.vertex_count)]
    for e, (tail, head) in enumerate(s.oriented_edges):
        d1[head][e] += 1
        d1[tail][e] -= 1

    d2 = [[0] * s.face_count for _ in range(s.edge_count)]
    for f, word in enumerate(s.face_words):
        for e, sign in word:
            d2[e][f] += sign

    d3 = [[0] * s.tet_count for _ in range(s.face_count)]
    for tet in range(s.tet_count):
        for face in range(4):
            d3[s.face_of[tet][face]][tet] += (-1) ** face * s.face_sign[tet][face]
    return d1, d2, d3


def elementary_divisors(rows: list[list[int]], columns: int) -> list[int]:
    """Nonzero Smith-normal-form divisors of an integer matrix, each dividing the next."""
    if not rows or columns == 0:
        return []
    factors = [abs(int(f)) for f in invariant_factors(Matrix(rows), domain=ZZ)]
    return [f for f in factors if f]


def homology(t: Triangulation, skeleton: Optional[Skeleton] = None) -> HomologyProfile:
    require_valid(t)
    s = skeleton or build_skeleton(t)
    d1, d2, d3 = boundary_matrices(s)
    div1 = elementary_divisors(d1, s.edge_count)
    div2 = elementary_divisors(d2, s.face_count)
    div3 = elementary_divisors(d3, s.tet_count)
    r1, r2, r3 = len(div1), len(div2), len(div3)
    betti = (
        s.vertex_count - r1,
        s.edge_count - r1 - r2,
        s.face_count - r2 - r3,
        s.tet_count - r3,
    )
    torsion = [[], [d for d in div2 if d > 1], [d for d in div3 if d > 1], []]
    logger.info(f"Homology of {s.tet_count}-tetrahedron triangulation: betti={betti}, torsion={torsion}")
    return HomologyProfile(betti=betti, torsion=torsion)
