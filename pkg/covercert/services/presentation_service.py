from math import gcd
from typing import Optional, Sequence

from covercert.exceptions import InvalidQuotient, MultipleVertices
from covercert.schemas import (
    AbelianInvariants, CheckResult, FiniteQuotient, Presentation, Skeleton, Triangulation,
    ValidationReport
)
from covercert.services.triangulation_service import build_skeleton, elementary_divisors
import logging

logger = logging.getLogger(__name__)


def presentation_from(t: Triangulation, s: Optional[Skeleton] = None) -> Presentation:
    """Edge-class generators with one length-3 relator per face class."""
    s = s or build_skeleton(t)
    if s.vertex_count != 1:
        raise MultipleVertices(
            f"Presentation needs a one-vertex triangulation; this one has {s.vertex_count} vertices."
        )
    return Presentation(
        generators=list(range(s.edge_count)),
        relators=[list(word) for word in s.face_words],
    )


def exponent_matrix(p: Presentation) -> list[list[int]]:
    column = {generator: index for index, generator in enumerate(p.generators)}
    rows = []
    for relator in p.relators:
        row = [0] * len(p.generators)
        for generator, exponent in relator:
            row[column[generator]] += exponent
        rows.append(row)
    return rows


def abelianization(p: Presentation) -> AbelianInvariants:
    divisors = elementary_divisors(exponent_matrix(p), len(p.generators))
    return AbelianInvariants(
        rank=len(p.generators) - len(divisors),
        torsion=[d for d in divisors if d > 1],
    )


def cyclic_table(n: int) -> list[list[int]]:
    return [[(a + b) % n for b in range(n)] for a in range(n)]


def quotient_from_images(n: int, images: dict[int, int]) -> FiniteQuotient:
    return FiniteQuotient(table=cyclic_table(n), images={g: v % n for g, v in images.items()})


def trivial_quotient(p: Presentation) -> FiniteQuotient:
    return FiniteQuotient(table=[[0]], images={generator: 0 for generator in p.generators})


def evaluate_word(q: FiniteQuotient, word: Sequence[tuple[int, int]]) -> int:
    element = 0
    for generator, exponent in word:
        image = q.image(generator)
        if exponent < 0:
            image = q.inverse(image)
        element = q.multiply(element, image)
    return element


def _is_canonical(values: tuple[int, ...], n: int) -> bool:
    for unit in range(2, n):
        if gcd(unit, n) != 1:
            continue
        if tuple(unit * v % n for v in values) < values:
            return False
    return True


def cyclic_quotients(p: Presentation, n: int) -> list[FiniteQuotient]:
    """Surjections onto Z/n, one per orbit of Aut(Z/n), listed by their canonical image vector."""
    if n < 2:
        raise InvalidQuotient(f"Cyclic quotients need n >= 2, got {n}.")
    generators = list(p.generators)
    rows = exponent_matrix(p)
    # Each relator is checked as soon as its last generator is assigned.
    last_needed: dict[int, list[int]] = {}
    for index, row in enumerate(rows):
        used = [col for col, coefficient in enumerate(row) if coefficient]
        if used:
            last_needed.setdefault(max(used), []).append(index)

    found: list[tuple[int, ...]] = []
    values = [0] * len(generators)

    def extend(depth: int) -> None:
        if depth == len(generators):
            g = n
            for v in values:
                g = gcd(g, v)
            candidate = tuple(values)
            if g == 1 and _is_canonical(candidate, n):
                found.append(candidate)
            return
        for value in range(n):
            values[depth] = value
            if all(sum(c * x for c, x in zip(rows[r], values)) % n == 0 for r in last_needed.get(depth, [])):
                extend(depth + 1)
        values[depth] = 0

    extend(0)
    quotients = [
        quotient_from_images(n, {generators[i]: v for i, v in enumerate(candidate)})
        for candidate in found
    ]
    logger.info(f"Found {len(quotients)} cyclic quotients of order {n} over {len(generators)} generators")
    return quotients


def validate_quotient(p: Presentation, q: FiniteQuotient) -> ValidationReport:
    checks = []

    unknown = sorted(set(q.images) - set(p.generators))
    missing = sorted(set(p.generators) - set(q.images))
    detail = []
    if unknown:
        detail.append(f"images given for unknown generators {unknown}")
    if missing:
        detail.append(f"no image for generators {missing}")
    checks.append(CheckResult(
        name="generators",
        passed=not unknown and not missing,
        detail="; ".join(detail),
    ))

    failing = None
    for index, relator in enumerate(p.relators):
        if evaluate_word(q, relator) != 0:
            failing = index
            break
    checks.append(CheckResult(
        name="relators",
        passed=failing is None,
        detail=f"relator {failing} maps to {evaluate_word(q, p.relators[failing])}" if failing is not None else "",
        offending=[(failing, 0)] if failing is not None else [],
    ))

    reached = _generated_subgroup(q, [q.image(g) for g in p.generators])
    checks.append(CheckResult(
        name="surjectivity",
        passed=len(reached) == q.degree,
        detail=f"images generate {len(reached)} of {q.degree} elements" if len(reached) != q.degree else "",
    ))
    return ValidationReport(
        kind="quotient",
        fields={"degree": q.degree, "generators": len(p.generators), "relators": len(p.relators)},
        checks=checks,
    )


def _generated_subgroup(q: FiniteQuotient, elements: list[int]) -> set[int]:
    reached = {0}
    frontier = [0]
    while frontier:
        current = frontier.pop()
        for element in elements:
            for step in (element, q.inverse(element)):
                nxt = q.multiply(current, step)
                if nxt not in reached:
                    reached.add(nxt)
                    frontier.append(nxt)
    return reached


def require_valid_quotient(p: Presentation, q: FiniteQuotient) -> None:
    report = validate_quotient(p, q)
    if not report.passed:
        failed = "; ".join(f"{c.name}: {c.detail}" for c in report.checks if not c.passed)
        raise InvalidQuotient(f"Quotient rejected ({failed}).")
