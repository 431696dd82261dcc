"""Standard closed orientable triangulations used by the CLI and the test corpus."""
from itertools import combinations, permutations
from typing import Callable, Hashable, Sequence

from covercert.schemas import Gluing, Triangulation
from covercert.services.triangulation_service import face_vertices, gluing_from_map, vertex_map
import logging

logger = logging.getLogger(__name__)


def _from_table(tet_count: int, rows: Sequence[tuple[int, int, int, int, str]]) -> Triangulation:
    gluings = {
        (tet, face): Gluing(tet=target, face=target_face, perm=tuple(int(ch) for ch in perm))
        for tet, face, target, target_face, perm in rows
    }
    return Triangulation(tet_count=tet_count, gluings=gluings)


def sphere_one_vertex() -> Triangulation:
    return _from_table(1, [
        (0, 3, 0, 0, "012"), (0, 0, 0, 3, "012"),
        (0, 1, 0, 2, "012"), (0, 2, 0, 1, "012"),
    ])


def sphere_two_vertex() -> Triangulation:
    return _from_table(1, [
        (0, 0, 0, 1, "012"), (0, 1, 0, 0, "012"),
        (0, 2, 0, 3, "012"), (0, 3, 0, 2, "012"),
    ])


def lens_one_vertex(p: int) -> Triangulation:
    """One-tetrahedron layered lens spaces: L(4,1) and L(5,2)."""
    folds = {
        4: [(0, 1, 0, 2, "120"), (0, 2, 0, 1, "201")],
        5: [(0, 1, 0, 2, "201"), (0, 2, 0, 1, "120")],
    }
    if p not in folds:
        raise ValueError(f"No one-tetrahedron lens space with p={p} in the census.")
    return _from_table(1, [(0, 3, 0, 0, "012"), (0, 0, 0, 3, "012"), *folds[p]])


def _from_maps(tet_count: int, rows: Sequence[tuple[int, int, int, Sequence[int]]]) -> Triangulation:
    """Build from one direction of each gluing, given as full corner maps; the inverse is added."""
    gluings = {}
    for tet, face, target, image in rows:
        inverse = [image.index(v) for v in range(4)]
        gluings[(tet, face)] = gluing_from_map(face, target, image[face], image)
        gluings[(target, image[face])] = gluing_from_map(image[face], tet, face, inverse)
    return Triangulation(tet_count=tet_count, gluings=gluings)


def s2xs1() -> Triangulation:
    """One-vertex S2 x S1 whose generator cocycle takes values in {0, 1}.

    Tetrahedra 0 and 1 are folded cones below a level sphere, 2 and 3 folded cones above it,
    and 4 joins them. The dual surface of the generator is a single sphere.
    """
    return _from_maps(5, [
        (0, 0, 0, (1, 0, 2, 3)), (1, 0, 1, (1, 0, 2, 3)),
        (2, 1, 2, (0, 2, 1, 3)), (3, 1, 3, (0, 2, 1, 3)),
        (0, 2, 4, (0, 1, 3, 2)), (1, 2, 4, (1, 0, 2, 3)),
        (2, 3, 4, (0, 3, 2, 1)), (3, 3, 4, (1, 2, 3, 0)),
        (0, 3, 2, (3, 1, 2, 0)), (1, 3, 3, (3, 1, 2, 0)),
    ])


def solid_torus_double() -> Triangulation:
    """Two one-tetrahedron solid tori glued by the identity along their boundary: S2 x S1."""
    return _from_table(2, [
        (0, 3, 0, 0, "012"), (0, 0, 0, 3, "012"),
        (1, 3, 1, 0, "012"), (1, 0, 1, 3, "012"),
        (0, 1, 1, 1, "012"), (1, 1, 0, 1, "012"),
        (0, 2, 1, 2, "012"), (1, 2, 0, 2, "012"),
    ])


def quotient_of_complex(
    simplices: Sequence[tuple[Hashable, Hashable, Hashable, Hashable]],
    actions: Sequence[Callable[[Hashable], Hashable]],
) -> Triangulation:
    """Glue orbit representatives of a group acting freely on a closed simplicial 3-complex.

    ``actions`` lists every group element (identity included) as a map on vertex labels.
    Representatives are taken in the order ``simplices`` lists them.
    """
    owner: dict[frozenset, tuple[int, dict]] = {}
    representatives: list[tuple] = []
    for simplex in simplices:
        if frozenset(simplex) in owner:
            continue
        index = len(representatives)
        representatives.append(tuple(simplex))
        for act in actions:
            image = frozenset(act(label) for label in simplex)
            if image in owner:
                raise ValueError(f"Action is not free on tetrahedra: {simplex} meets an earlier orbit.")
            owner[image] = (index, {act(label): position for position, label in enumerate(simplex)})

    containing: dict[frozenset, list[frozenset]] = {}
    for key in owner:
        for triangle in combinations(sorted(key, key=repr), 3):
            containing.setdefault(frozenset(triangle), []).append(key)

    gluings: dict[tuple[int, int], Gluing] = {}
    for index, simplex in enumerate(representatives):
        key = frozenset(simplex)
        for face in range(4):
            labels = [simplex[v] for v in face_vertices(face)]
            holders = containing[frozenset(labels)]
            if len(holders) != 2:
                raise ValueError(f"Triangle {labels} lies in {len(holders)} tetrahedra; expected 2.")
            other = holders[0] if holders[1] == key else holders[1]
            target, positions = owner[other]
            image = [0, 0, 0, 0]
            for v in face_vertices(face):
                image[v] = positions[simplex[v]]
            target_face = ({0, 1, 2, 3} - {image[v] for v in face_vertices(face)}).pop()
            image[face] = target_face
            gluings[(index, face)] = gluing_from_map(face, target, target_face, image)
    logger.debug(f"Quotient complex with {len(representatives)} tetrahedra built")
    return Triangulation(tet_count=len(representatives), gluings=gluings)


def three_torus() -> Triangulation:
    """Six-tetrahedron one-vertex 3-torus: the Kuhn triangulation of the cubic lattice modulo 3."""
    period = 3

    def shift(point, offset):
        return tuple((x + d) % period for x, d in zip(point, offset))

    unit = ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    simplices = []
    for base in [(x, y, z) for x in range(period) for y in range(period) for z in range(period)]:
        for order in permutations(range(3)):
            path = [base]
            for axis in order:
                path.append(shift(path[-1], unit[axis]))
            simplices.append(tuple(path))
    translations = [
        (lambda offset: (lambda point: shift(point, offset)))((a, b, c))
        for a in range(period) for b in range(period) for c in range(period)
    ]
    return quotient_of_complex(simplices, translations)


def lens_space(p: int, q: int) -> Triangulation:
    """L(p, q) as the quotient of the join of two n-cycles by a free Z/p rotation."""
    if p < 2:
        raise ValueError("p must be at least 2.")
    step = max(1, -(-3 // p))
    n = p * step
    simplices = [
        (("a", i), ("a", (i + 1) % n), ("b", j), ("b", (j + 1) % n))
        for i in range(n) for j in range(n)
    ]

    def rotation(k):
        def act(label):
            side, index = label
            if side == "a":
                return side, (index + k * step) % n
            return side, (index + k * q * step) % n
        return act

    return quotient_of_complex(simplices, [rotation(k) for k in range(p)])


def real_projective_space() -> Triangulation:
    return lens_space(2, 1)


def disjoint_union(a: Triangulation, b: Triangulation) -> Triangulation:
    shift = a.tet_count
    gluings = dict(a.gluings)
    for (tet, face), gluing in b.gluings.items():
        gluings[(tet + shift, face)] = Gluing(tet=gluing.tet + shift, face=gluing.face, perm=gluing.perm)
    return Triangulation(tet_count=a.tet_count + b.tet_count, gluings=gluings)


def relabel(t: Triangulation, order: Sequence[int]) -> Triangulation:
    """Renumber tetrahedra: old tetrahedron i becomes ``order[i]``."""
    gluings = {
        (order[tet], face): Gluing(tet=order[gluing.tet], face=gluing.face, perm=gluing.perm)
        for (tet, face), gluing in t.gluings.items()
    }
    return Triangulation(tet_count=t.tet_count, gluings=gluings)


def relabel_vertices(t: Triangulation, tet: int, image: Sequence[int]) -> Triangulation:
    """Renumber the corners of one tetrahedron by the permutation ``image``."""
    gluings = {}
    for (source, face), gluing in t.gluings.items():
        corner_map = list(vertex_map(face, gluing))
        new_face = face
        if source == tet:
            new_face = image[face]
            corner_map = [corner_map[image.index(v)] for v in range(4)]
        target_tet, target_face = gluing.tet, gluing.face
        if target_tet == tet:
            target_face = image[target_face]
            corner_map = [image[c] for c in corner_map]
        gluings[(source, new_face)] = gluing_from_map(new_face, target_tet, target_face, corner_map)
    return Triangulation(tet_count=t.tet_count, gluings=gluings)


CENSUS: dict[str, Callable[[], Triangulation]] = {
    "s3": sphere_one_vertex,
    "s3-two-vertex": sphere_two_vertex,
    "l41": lambda: lens_one_vertex(4),
    "l52": lambda: lens_one_vertex(5),
    "s2xs1": s2xs1,
    "s2xs1-double": solid_torus_double,
    "t3": three_torus,
    "rp3": real_projective_space,
}


def by_name(name: str) -> Triangulation:
    if name.startswith("lens-"):
        try:
            p, q = (int(x) for x in name[len("lens-"):].split("-"))
        except ValueError as e:
            raise ValueError(f"Expected lens-<p>-<q>, got {name!r}.") from e
        return lens_space(p, q)
    if name not in CENSUS:
        raise ValueError(f"Unknown census triangulation {name!r}; choose from {sorted(CENSUS)} or lens-<p>-<q>.")
    return CENSUS[name]()
