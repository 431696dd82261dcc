"""Plain-text readers and writers for triangulations, quotients, graphs, cuts, cocycles and surfaces."""
from fractions import Fraction
from typing import Iterator, Optional

from pydantic import ValidationError

from covercert.exceptions import FormatError
from covercert.models import DiscKind
from covercert.schemas import (
    CoverTriangulation, CutCertificate, Cocycle, Disc, FiniteQuotient, Gluing, GraphEdge, MultiGraph,
    NormalSurface, Triangulation
)
import logging

logger = logging.getLogger(__name__)

SIGN_TOKENS = {"+": 1, "-": -1, "0": 0}


def _lines(text: str) -> Iterator[tuple[int, list[str]]]:
    """Non-blank lines with comments stripped, as (1-based line number, tokens)."""
    for number, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("#", 1)[0].strip()
        if content:
            yield number, content.split()


def _int(token: str, line: int, source: Optional[str], what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise FormatError(f"Expected an integer {what}, got {token!r}.", line=line, source=source)


def _first_error(e: ValidationError) -> str:
    error = e.errors()[0]
    return str(error.get("msg", e))


# Triangulations
def parse_triangulation(text: str, source: Optional[str] = None) -> Triangulation:
    lines = list(_lines(text))
    if not lines:
        raise FormatError("Empty triangulation file; expected a 'tets N' header.", line=1, source=source)
    number, tokens = lines[0]
    if len(tokens) != 2 or tokens[0] != "tets":
        raise FormatError(f"Expected header 'tets N', got {' '.join(tokens)!r}.", line=number, source=source)
    tet_count = _int(tokens[1], number, source, "tetrahedron count")
    if tet_count < 0:
        raise FormatError("Tetrahedron count must be non-negative.", line=number, source=source)

    gluings: dict[tuple[int, int], Gluing] = {}
    for number, tokens in lines[1:]:
        if len(tokens) != 7 or tokens[0] != "g" or tokens[3] != "->":
            raise FormatError(
                f"Expected 'g <tet> <face> -> <tet'> <face'> <perm>', got {' '.join(tokens)!r}.",
                line=number, source=source,
            )
        tet, face = _int(tokens[1], number, source, "tetrahedron"), _int(tokens[2], number, source, "face")
        target, target_face = _int(tokens[4], number, source, "tetrahedron"), _int(tokens[5], number, source, "face")
        perm_text = tokens[6]
        if len(perm_text) != 3 or sorted(perm_text) != ["0", "1", "2"]:
            raise FormatError(f"{perm_text!r} is not a permutation of 012.", line=number, source=source)
        for value, what in ((tet, "tetrahedron"), (target, "tetrahedron")):
            if not 0 <= value < tet_count:
                raise FormatError(f"{what.capitalize()} {value} is out of range 0..{tet_count - 1}.", line=number, source=source)
        for value in (face, target_face):
            if not 0 <= value <= 3:
                raise FormatError(f"Face {value} is out of range 0..3.", line=number, source=source)
        gluing = Gluing(tet=target, face=target_face, perm=tuple(int(ch) for ch in perm_text))
        if (tet, face) in gluings:
            kind = "Duplicate" if gluings[(tet, face)] == gluing else "Conflicting"
            raise FormatError(f"{kind} gluing for tetrahedron {tet} face {face}.", line=number, source=source)
        gluings[(tet, face)] = gluing

    try:
        return Triangulation(tet_count=tet_count, gluings=gluings)
    except ValidationError as e:
        raise FormatError(f"Invalid triangulation: {_first_error(e)}", source=source) from e


def write_triangulation(t: Triangulation) -> str:
    lines = [f"tets {t.tet_count}"]
    for (tet, face), gluing in sorted(t.gluings.items()):
        perm = "".join(str(x) for x in gluing.perm)
        lines.append(f"g {tet} {face} -> {gluing.tet} {gluing.face} {perm}")
    return "\n".join(lines) + "\n"


def write_cover_labels(c: CoverTriangulation) -> str:
    return "".join(f"lift {k} = {tet} {element}\n" for k, (tet, element) in enumerate(c.labels))


def parse_cover_labels(text: str, source: Optional[str] = None) -> list[tuple[int, int]]:
    labels: dict[int, tuple[int, int]] = {}
    for number, tokens in _lines(text):
        if len(tokens) != 5 or tokens[0] != "lift" or tokens[2] != "=":
            raise FormatError(f"Expected 'lift <tet'> = <base-tet> <element>'.", line=number, source=source)
        k = _int(tokens[1], number, source, "lifted tetrahedron")
        if k in labels:
            raise FormatError(f"Duplicate label for lifted tetrahedron {k}.", line=number, source=source)
        labels[k] = (_int(tokens[3], number, source, "base tetrahedron"), _int(tokens[4], number, source, "element"))
    if sorted(labels) != list(range(len(labels))):
        raise FormatError("Lifted tetrahedron labels are not numbered 0..N-1.", source=source)
    return [labels[k] for k in range(len(labels))]


# Quotients
def parse_quotient(text: str, source: Optional[str] = None) -> FiniteQuotient:
    lines = list(_lines(text))
    if not lines or lines[0][1][0] != "group" or len(lines[0][1]) != 2:
        raise FormatError("Expected header 'group N'.", line=lines[0][0] if lines else 1, source=source)
    header_line, header = lines[0]
    n = _int(header[1], header_line, source, "group order")
    if n < 1:
        raise FormatError("Group order must be positive.", line=header_line, source=source)
    if len(lines) < n + 2:
        raise FormatError(f"Expected {n} table rows followed by 'images'.", source=source)

    table = []
    for number, tokens in lines[1:n + 1]:
        if len(tokens) != n:
            raise FormatError(f"Table row has {len(tokens)} entries; expected {n}.", line=number, source=source)
        table.append([_int(token, number, source, "table entry") for token in tokens])

    number, tokens = lines[n + 1]
    if tokens != ["images"]:
        raise FormatError(f"Expected 'images', got {' '.join(tokens)!r}.", line=number, source=source)

    images: dict[int, int] = {}
    for number, tokens in lines[n + 2:]:
        if len(tokens) != 4 or tokens[0] != "gen" or tokens[2] != "->":
            raise FormatError("Expected 'gen <edge-class-id> -> <element>'.", line=number, source=source)
        generator = _int(tokens[1], number, source, "generator")
        if generator in images:
            raise FormatError(f"Duplicate image for generator {generator}.", line=number, source=source)
        images[generator] = _int(tokens[3], number, source, "element")

    try:
        return FiniteQuotient(table=table, images=images)
    except ValidationError as e:
        raise FormatError(f"Invalid group: {_first_error(e)}", source=source) from e


def write_quotient(q: FiniteQuotient) -> str:
    lines = [f"group {q.degree}"]
    lines.extend(" ".join(str(x) for x in row) for row in q.table)
    lines.append("images")
    lines.extend(f"gen {generator} -> {element}" for generator, element in sorted(q.images.items()))
    return "\n".join(lines) + "\n"


# Graphs and cuts
def write_graph(g: MultiGraph) -> str:
    lines = [f"graph {g.vertex_count} {len(g.edges)}"]
    lines.extend(f"e {edge.u} {edge.v} {edge.multiplicity}" for edge in g.edges)
    return "\n".join(lines) + "\n"


def parse_graph(text: str, source: Optional[str] = None) -> MultiGraph:
    lines = list(_lines(text))
    if not lines or lines[0][1][0] != "graph" or len(lines[0][1]) != 3:
        raise FormatError("Expected header 'graph N M'.", line=lines[0][0] if lines else 1, source=source)
    number, header = lines[0]
    n, m = _int(header[1], number, source, "vertex count"), _int(header[2], number, source, "edge count")
    if len(lines) - 1 != m:
        raise FormatError(f"Header announces {m} edges; found {len(lines) - 1}.", source=source)
    edges = []
    for number, tokens in lines[1:]:
        if len(tokens) != 4 or tokens[0] != "e":
            raise FormatError("Expected 'e u v mult'.", line=number, source=source)
        try:
            edges.append(GraphEdge(
                u=_int(tokens[1], number, source, "vertex"),
                v=_int(tokens[2], number, source, "vertex"),
                multiplicity=_int(tokens[3], number, source, "multiplicity"),
            ))
        except ValidationError as e:
            raise FormatError(f"Invalid edge: {_first_error(e)}", line=number, source=source) from e
    try:
        return MultiGraph(vertex_count=n, edges=edges)
    except ValidationError as e:
        raise FormatError(f"Invalid graph: {_first_error(e)}", source=source) from e


def write_cut(cut: CutCertificate) -> str:
    lines = [f"cut {len(cut.vertices)}"]
    lines.extend(str(v) for v in cut.vertices)
    lines.append(f"boundary {cut.boundary_size} ratio {cut.ratio.numerator}/{cut.ratio.denominator}")
    return "\n".join(lines) + "\n"


def parse_cut(text: str, vertex_count: int, source: Optional[str] = None) -> CutCertificate:
    lines = list(_lines(text))
    if not lines or lines[0][1][0] != "cut" or len(lines[0][1]) != 2:
        raise FormatError("Expected header 'cut k'.", line=lines[0][0] if lines else 1, source=source)
    number, header = lines[0]
    k = _int(header[1], number, source, "cut size")
    vertices: list[int] = []
    index = 1
    while len(vertices) < k and index < len(lines):
        number, tokens = lines[index]
        vertices.extend(_int(token, number, source, "vertex") for token in tokens)
        index += 1
    if len(vertices) != k or index != len(lines) - 1:
        raise FormatError(f"Expected {k} vertex indices followed by a boundary line.", source=source)
    number, tokens = lines[index]
    if len(tokens) != 4 or tokens[0] != "boundary" or tokens[2] != "ratio":
        raise FormatError("Expected 'boundary B ratio p/q'.", line=number, source=source)
    try:
        ratio = Fraction(tokens[3])
    except (ValueError, ZeroDivisionError):
        raise FormatError(f"{tokens[3]!r} is not a rational number.", line=number, source=source)
    try:
        return CutCertificate(
            vertices=tuple(sorted(vertices)),
            vertex_count=vertex_count,
            boundary_size=_int(tokens[1], number, source, "boundary size"),
            ratio=ratio,
            optimal=False,
        )
    except ValidationError as e:
        raise FormatError(f"Invalid cut: {_first_error(e)}", source=source) from e


# Cochains
def write_cocycle(c: Cocycle) -> str:
    lines = ["cocycle"]
    lines.extend(f"edge {edge} {c.values[edge]}" for edge in c.support)
    return "\n".join(lines) + "\n"


def parse_cocycle(text: str, edge_count: int, source: Optional[str] = None) -> Cocycle:
    """Unlisted edge classes carry 0."""
    lines = list(_lines(text))
    if not lines or lines[0][1] != ["cocycle"]:
        raise FormatError("Expected header 'cocycle'.", line=lines[0][0] if lines else 1, source=source)
    values = [0] * edge_count
    seen: set[int] = set()
    for number, tokens in lines[1:]:
        if len(tokens) != 3 or tokens[0] != "edge":
            raise FormatError("Expected 'edge <class-id> <value>'.", line=number, source=source)
        edge = _int(tokens[1], number, source, "edge class")
        if not 0 <= edge < edge_count:
            raise FormatError(f"Edge class {edge} is out of range 0..{edge_count - 1}.", line=number, source=source)
        if edge in seen:
            raise FormatError(f"Duplicate value for edge class {edge}.", line=number, source=source)
        seen.add(edge)
        values[edge] = _int(tokens[2], number, source, "value")
    return Cocycle(values=values)


# Normal surfaces
def _sign_token(sign: int) -> str:
    return {1: "+", -1: "-", 0: "0"}[sign]


def write_surface(surface: NormalSurface) -> str:
    """One line per tetrahedron; signs follow the discs, triangles by corner and then quads."""
    lines = []
    for tet in range(surface.ambient.tet_count):
        triangles, quads = surface.coordinates(tet)
        ordered = sorted(surface.discs[tet], key=lambda d: (d.kind != DiscKind.triangle, d.index))
        signs = " ".join(_sign_token(d.orientation) for d in ordered)
        line = f"tet {tet} tri {' '.join(map(str, triangles))} quad {' '.join(map(str, quads))} signs"
        lines.append(f"{line} {signs}" if signs else line)
    return "\n".join(lines) + "\n"


def parse_surface(text: str, ambient: Triangulation, source: Optional[str] = None) -> NormalSurface:
    discs: list[Optional[list[Disc]]] = [None] * ambient.tet_count
    for number, tokens in _lines(text):
        if len(tokens) < 12 or tokens[0] != "tet" or tokens[2] != "tri" or tokens[7] != "quad" or tokens[11] != "signs":
            raise FormatError("Expected 'tet <i> tri <a b c d> quad <p q r> signs ...'.", line=number, source=source)
        tet = _int(tokens[1], number, source, "tetrahedron")
        if not 0 <= tet < ambient.tet_count:
            raise FormatError(f"Tetrahedron {tet} is out of range.", line=number, source=source)
        if discs[tet] is not None:
            raise FormatError(f"Duplicate line for tetrahedron {tet}.", line=number, source=source)
        triangles = [_int(x, number, source, "triangle count") for x in tokens[3:7]]
        quads = [_int(x, number, source, "quad count") for x in tokens[8:11]]
        if min(triangles + quads) < 0:
            raise FormatError("Disc counts must be non-negative.", line=number, source=source)
        signs = tokens[12:]
        if len(signs) != sum(triangles) + sum(quads) or any(token not in SIGN_TOKENS for token in signs):
            raise FormatError("Expected one sign (+, - or 0) per disc.", line=number, source=source)
        kinds = [(DiscKind.triangle, i) for i, count in enumerate(triangles) for _ in range(count)]
        kinds += [(DiscKind.quad, i) for i, count in enumerate(quads) for _ in range(count)]
        discs[tet] = [
            Disc(kind=kind, index=index, orientation=SIGN_TOKENS[token])
            for (kind, index), token in zip(kinds, signs)
        ]
    return NormalSurface(ambient=ambient, discs=[tet_discs or [] for tet_discs in discs])
