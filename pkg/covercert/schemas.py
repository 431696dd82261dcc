from fractions import Fraction
from functools import cached_property
from pathlib import Path
import random
from typing import Any, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from covercert.config import settings
from covercert.models import CellKind, DiscKind, OutputFormat, Subcommand, Verdict


# Triangulations
class Gluing(BaseModel):
    """Target of a face gluing. ``perm[k]`` is the position, among the target face's
    ascending vertices, of the image of the source face's k-th ascending vertex."""
    model_config = ConfigDict(frozen=True)

    tet: int = Field(ge=0)
    face: int = Field(ge=0, le=3)
    perm: tuple[int, int, int]

    @field_validator("perm")
    @classmethod
    def check_perm(cls, value: tuple[int, int, int]) -> tuple[int, int, int]:
        if sorted(value) != [0, 1, 2]:
            raise ValueError(f"{value} is not a permutation of 012")
        return value


class Triangulation(BaseModel):
    model_config = ConfigDict(frozen=True)

    tet_count: int = Field(ge=0)
    gluings: dict[tuple[int, int], Gluing] = Field(default_factory=dict)

    @model_validator(mode="after")
    def check_indices(self) -> "Triangulation":
        for (tet, face), gluing in self.gluings.items():
            if not (0 <= tet < self.tet_count and 0 <= face <= 3):
                raise ValueError(f"Gluing source ({tet}, {face}) is out of range.")
            if gluing.tet >= self.tet_count:
                raise ValueError(f"Gluing target tetrahedron {gluing.tet} is out of range.")
        return self

    def gluing(self, tet: int, face: int) -> Optional[Gluing]:
        return self.gluings.get((tet, face))


class CheckResult(BaseModel):
    name: str
    passed: bool
    detail: str = ""
    offending: list[tuple[int, int]] = Field(default_factory=list)


class Report(BaseModel):
    """Generic report: ordered fields plus named pass/fail checks."""
    kind: str
    fields: dict[str, Any] = Field(default_factory=dict)
    checks: list[CheckResult] = Field(default_factory=list)
    verdict: Optional[Verdict] = None
    notes: list[str] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def check(self, name: str) -> Optional[CheckResult]:
        for result in self.checks:
            if result.name == name:
                return result
        return None


class ValidationReport(Report):
    kind: str = "validation"


class Skeleton(BaseModel):
    """Vertex, edge and face classes of a triangulation.

    Edge ``i`` of a tetrahedron is ``EDGES[i]``; ``edge_sign`` is +1 when the tetrahedron's
    low-to-high direction agrees with the class orientation. ``face_words`` reads each face
    class around the boundary of its lowest representative, a -> b -> c -> a.
    """
    model_config = ConfigDict(frozen=True)

    tet_count: int
    vertex_of: list[list[int]]
    edge_of: list[list[int]]
    edge_sign: list[list[int]]
    face_of: list[list[int]]
    face_sign: list[list[int]]
    vertex_classes: list[list[tuple[int, int]]]
    edge_classes: list[list[tuple[int, int]]]
    face_classes: list[list[tuple[int, int]]]
    edge_valence: list[int]
    oriented_edges: list[tuple[int, int]]
    face_words: list[list[tuple[int, int]]]

    @property
    def vertex_count(self) -> int:
        return len(self.vertex_classes)

    @property
    def edge_count(self) -> int:
        return len(self.edge_classes)

    @property
    def face_count(self) -> int:
        return len(self.face_classes)


class AbelianInvariants(BaseModel):
    rank: int = Field(ge=0)
    torsion: list[int] = Field(default_factory=list)


class HomologyProfile(BaseModel):
    betti: tuple[int, int, int, int]
    torsion: list[list[int]]

    @property
    def b1(self) -> int:
        return self.betti[1]

    @property
    def h1(self) -> AbelianInvariants:
        return AbelianInvariants(rank=self.betti[1], torsion=self.torsion[1])


# Presentations and quotients
class Presentation(BaseModel):
    """Generators are edge classes; a relator is a list of (generator, exponent +-1)."""
    generators: list[int]
    relators: list[list[tuple[int, int]]]

    @model_validator(mode="after")
    def check_letters(self) -> "Presentation":
        declared = set(self.generators)
        for index, relator in enumerate(self.relators):
            for generator, exponent in relator:
                if generator not in declared:
                    raise ValueError(f"Relator {index} uses undeclared generator {generator}.")
                if exponent not in (1, -1):
                    raise ValueError(f"Relator {index} has exponent {exponent}; expected +1 or -1.")
        return self


class FiniteQuotient(BaseModel):
    """A finite group as a multiplication table (identity 0, row = left factor)
    together with the images of the presentation's generators."""
    model_config = ConfigDict(frozen=True)

    table: list[list[int]]
    images: dict[int, int]

    @model_validator(mode="after")
    def check_group_axioms(self) -> "FiniteQuotient":
        n = len(self.table)
        if n == 0:
            raise ValueError("Group table is empty.")
        for row in self.table:
            if len(row) != n:
                raise ValueError("Group table is not square.")
            if any(not 0 <= x < n for x in row):
                raise ValueError("Group table entry out of range.")
        for a in range(n):
            if self.table[0][a] != a or self.table[a][0] != a:
                raise ValueError("Element 0 is not the identity.")
            if 0 not in self.table[a]:
                raise ValueError(f"Element {a} has no inverse.")
        if n <= settings.ASSOCIATIVITY_EXHAUSTIVE_LIMIT:
            triples = ((a, b, c) for a in range(n) for b in range(n) for c in range(n))
        else:
            rng = random.Random(n)
            triples = (
                (rng.randrange(n), rng.randrange(n), rng.randrange(n))
                for _ in range(settings.ASSOCIATIVITY_SAMPLES)
            )
        table = self.table
        for a, b, c in triples:
            if table[table[a][b]][c] != table[a][table[b][c]]:
                raise ValueError(f"Group table is not associative at ({a}, {b}, {c}).")
        for generator, element in self.images.items():
            if not 0 <= element < n:
                raise ValueError(f"Image {element} of generator {generator} is not a group element.")
        return self

    @property
    def degree(self) -> int:
        return len(self.table)

    @cached_property
    def inverses(self) -> list[int]:
        return [row.index(0) for row in self.table]

    def multiply(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inverse(self, a: int) -> int:
        return self.inverses[a]

    def image(self, generator: int) -> int:
        return self.images.get(generator, 0)


# Covers
class EdgeLift(BaseModel):
    """A lifted edge class: it covers ``base_class`` and, read along the base orientation,
    starts at the vertex labelled ``element``; ``sign`` compares the two orientations."""
    base_class: int
    element: int
    sign: int


class CoverTriangulation(BaseModel):
    model_config = ConfigDict(frozen=True)

    base: Triangulation
    quotient: FiniteQuotient
    lifted: Triangulation
    labels: list[tuple[int, int]]
    skeleton: Skeleton
    vertex_elements: list[int]
    edge_lifts: list[EdgeLift]

    @property
    def degree(self) -> int:
        return self.quotient.degree

    def lifted_index(self, base_tet: int, element: int) -> int:
        return base_tet * self.degree + element


class Cell(BaseModel):
    """A cell of a lifted triangulation: a tetrahedron index or a skeleton class id."""
    model_config = ConfigDict(frozen=True)

    kind: CellKind
    index: int = Field(ge=0)


# Graphs and cuts
class GraphEdge(BaseModel):
    model_config = ConfigDict(frozen=True)

    u: int = Field(ge=0)
    v: int = Field(ge=0)
    multiplicity: int = Field(default=1, ge=1)

    @property
    def is_loop(self) -> bool:
        return self.u == self.v


class MultiGraph(BaseModel):
    vertex_count: int = Field(ge=0)
    edges: list[GraphEdge] = Field(default_factory=list)

    @model_validator(mode="after")
    def check_vertices(self) -> "MultiGraph":
        for edge in self.edges:
            if edge.u >= self.vertex_count or edge.v >= self.vertex_count:
                raise ValueError(f"Edge ({edge.u}, {edge.v}) has an endpoint out of range.")
        return self

    @property
    def edge_total(self) -> int:
        return sum(edge.multiplicity for edge in self.edges)


class CutCertificate(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    vertices: tuple[int, ...]
    vertex_count: int
    boundary_size: int = Field(ge=0)
    ratio: Fraction
    optimal: bool

    @model_validator(mode="after")
    def check_admissible(self) -> "CutCertificate":
        size = len(self.vertices)
        if not 0 < size <= self.vertex_count // 2:
            raise ValueError(f"|A| = {size} is not admissible for {self.vertex_count} vertices.")
        if self.ratio != Fraction(self.boundary_size, size):
            raise ValueError("Cut ratio does not match |dA|/|A|.")
        return self


# Cochains
class Cocycle(BaseModel):
    """Integer values on the oriented edge classes of a triangulation (index = class id)."""
    values: list[int]

    @property
    def support(self) -> list[int]:
        return [edge for edge, value in enumerate(self.values) if value]

    @property
    def is_zero(self) -> bool:
        return not any(self.values)


class CoboundaryResult(BaseModel):
    is_coboundary: bool
    potential: Optional[list[int]] = None
    witness: Optional[list[tuple[int, int]]] = None
    witness_sum: int = 0


# Normal surfaces
class Disc(BaseModel):
    """A normal disc. Triangles are indexed by the corner they cut off, quads by type
    (0 = 01|23, 1 = 02|13, 2 = 03|12). ``orientation`` +1 means the transverse
    orientation points into the lone corner (triangles) or the side holding vertex 0 (quads);
    0 means unoriented."""
    model_config = ConfigDict(frozen=True)

    kind: DiscKind
    index: int = Field(ge=0, le=3)
    orientation: int = Field(default=0, ge=-1, le=1)

    @model_validator(mode="after")
    def check_quad_type(self) -> "Disc":
        if self.kind == DiscKind.quad and self.index > 2:
            raise ValueError("Quad type must be 0, 1 or 2.")
        return self


class NormalSurface(BaseModel):
    model_config = ConfigDict(frozen=True)

    ambient: Triangulation
    discs: list[list[Disc]]

    @model_validator(mode="after")
    def check_shape(self) -> "NormalSurface":
        if len(self.discs) != self.ambient.tet_count:
            raise ValueError("Disc lists do not match the tetrahedron count.")
        return self

    def coordinates(self, tet: int) -> tuple[list[int], list[int]]:
        triangles = [0, 0, 0, 0]
        quads = [0, 0, 0]
        for disc in self.discs[tet]:
            if disc.kind == DiscKind.triangle:
                triangles[disc.index] += 1
            else:
                quads[disc.index] += 1
        return triangles, quads

    @property
    def disc_count(self) -> int:
        return sum(len(tet_discs) for tet_discs in self.discs)

    @property
    def is_empty(self) -> bool:
        return self.disc_count == 0

    @property
    def transversely_oriented(self) -> bool:
        return all(disc.orientation != 0 for tet_discs in self.discs for disc in tet_discs)


class SurfaceComponent(BaseModel):
    discs: list[tuple[int, int]]
    vertices: int
    edges: int
    faces: int
    euler_characteristic: int
    orientable: bool
    genus: Optional[int] = None
    triangles: int
    quads: int

    @property
    def is_sphere(self) -> bool:
        return self.euler_characteristic == 2


class SurfaceProfile(BaseModel):
    components: list[SurfaceComponent] = Field(default_factory=list)

    @property
    def component_count(self) -> int:
        return len(self.components)

    @property
    def vertex_count(self) -> int:
        return sum(c.vertices for c in self.components)

    @property
    def edge_count(self) -> int:
        return sum(c.edges for c in self.components)

    @property
    def face_count(self) -> int:
        return sum(c.faces for c in self.components)

    @property
    def euler_characteristic(self) -> int:
        return sum(c.euler_characteristic for c in self.components)


# Splitting arithmetic
class SplittingProfile(BaseModel):
    chi_list: list[int] = Field(min_length=1)
    chi_F: int


class CompressionBodyStats(BaseModel):
    """Euler characteristics of the two boundaries; ``minus_empty`` marks a handlebody."""
    chi_minus: int
    chi_plus: int
    boundary_components: int = Field(ge=0)
    minus_empty: bool = False

    @model_validator(mode="after")
    def check_empty_minus(self) -> "CompressionBodyStats":
        if self.minus_empty and self.chi_minus != 0:
            raise ValueError("An empty negative boundary has chi_minus = 0.")
        return self

    @property
    def is_ball(self) -> bool:
        return self.minus_empty and self.chi_plus == 2


# Command line
CENSUS_PREFIX = "census:"


class RunConfig(BaseModel):
    """Options of one CLI invocation. Inputs are file paths or ``census:<name>``."""
    subcommand: Subcommand
    inputs: list[str] = Field(default_factory=list)
    limit: int = Field(default_factory=lambda: settings.EXACT_LIMIT, gt=0)
    cap: int = Field(default_factory=lambda: settings.SUPPORT_CAP, gt=0)
    force: bool = False
    output_format: OutputFormat = Field(default_factory=lambda: OutputFormat(settings.OUTPUT_FORMAT))
    out: Optional[Path] = None
    export_path: Optional[Path] = None
    quotient_path: Optional[Path] = None
    cyclic: Optional[int] = Field(default=None, ge=1)
    choice: int = Field(default=0, ge=0)
    start: int = Field(default=2, ge=1)
    stop: int = Field(default=8, ge=1)
    jobs: int = Field(default_factory=lambda: settings.JOBS, gt=0)
    cocycle_path: Optional[Path] = None
    surface_path: Optional[Path] = None
    cut_path: Optional[Path] = None
    labels_path: Optional[Path] = None
    translate: Optional[int] = Field(default=None, ge=0)
    remove_spheres: bool = False
    ledger_lines: list[str] = Field(default_factory=list)
    arguments: list[int] = Field(default_factory=list)

    @model_validator(mode="after")
    def check_paths(self) -> "RunConfig":
        paths = [Path(item) for item in self.inputs if not item.startswith(CENSUS_PREFIX)]
        extra = [self.quotient_path, self.cocycle_path, self.surface_path, self.cut_path, self.labels_path]
        for path in [*paths, *extra]:
            if path is not None and not path.exists():
                raise ValueError(f"Input path {path} does not exist.")
        if self.quotient_path is not None and self.cyclic is not None:
            raise ValueError("Use either --quotient or --cyclic, not both.")
        if self.cocycle_path is not None and self.surface_path is not None:
            raise ValueError("Use either --cocycle or --surface-file, not both.")
        if self.stop < self.start:
            raise ValueError("--stop must not be smaller than --start.")
        return self
