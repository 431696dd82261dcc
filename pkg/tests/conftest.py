import pytest

from covercert.schemas import Cocycle, CoverTriangulation
from covercert.services import census_service
from covercert.services.cover_service import build_cover
from covercert.services.presentation_service import cyclic_quotients, presentation_from, quotient_from_images

# Edge classes x, y, z of the doubled solid torus satisfy y = 2x and z = 3x.
DOUBLE_STEPS = {0: 1, 1: 2, 2: 3}


def signed_steps(t) -> dict[int, int]:
    """Integer generator values of a one-vertex triangulation with H1 = Z and values in {-1, 0, 1}."""
    (q,) = cyclic_quotients(presentation_from(t), 7)
    return {gen: value if value <= 1 else value - 7 for gen, value in q.images.items()}


@pytest.fixture
def s3():
    return census_service.sphere_one_vertex()


@pytest.fixture
def s2xs1():
    return census_service.s2xs1()


@pytest.fixture
def torus_double():
    return census_service.solid_torus_double()


@pytest.fixture
def t3():
    return census_service.three_torus()


@pytest.fixture
def l41():
    return census_service.lens_one_vertex(4)


@pytest.fixture(scope="session")
def s2xs1_steps():
    return signed_steps(census_service.s2xs1())


@pytest.fixture
def s2xs1_cover(s2xs1, s2xs1_steps):
    """Factory for the Z/n cover of the one-vertex S2 x S1 along its generator."""
    built: dict[int, CoverTriangulation] = {}

    def build(n: int) -> CoverTriangulation:
        if n not in built:
            built[n] = build_cover(s2xs1, quotient_from_images(n, s2xs1_steps))
        return built[n]

    return build


@pytest.fixture
def double_cover(torus_double):
    """Factory for the Z/n cover of the doubled solid torus with generator images (1, 2, 3)."""
    built: dict[int, CoverTriangulation] = {}

    def build(n: int) -> CoverTriangulation:
        if n not in built:
            built[n] = build_cover(torus_double, quotient_from_images(n, DOUBLE_STEPS))
        return built[n]

    return build


@pytest.fixture
def carry():
    """Wrap-around cocycle on a Z/n cover of S2 x S1: the number of times a lift passes n-1 -> 0.

    ``steps`` gives the integer generator value of every base edge class; the default fits the
    doubled solid torus for n >= 4.
    """

    def build(c: CoverTriangulation, steps: dict[int, int] = DOUBLE_STEPS) -> Cocycle:
        return Cocycle(values=[
            lift.sign * ((lift.element + steps[lift.base_class]) // c.degree) for lift in c.edge_lifts
        ])

    return build
