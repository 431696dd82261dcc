"""Arithmetic of generalised Heegaard splittings and the translate-counting bounds."""
from fractions import Fraction
from math import ceil, comb
import random
import re
from typing import Union

from pydantic import ValidationError

from covercert.exceptions import InvalidProfile, PreconditionViolation
from covercert.schemas import CheckResult, CompressionBodyStats, Report, SplittingProfile
import logging

logger = logging.getLogger(__name__)

PROFILE_LINE = re.compile(r"^splitting\s+chiF=(-?\d+)\s+chis=(-?\d+(?:,-?\d+)*)\s*$")
COMPRESSION_LINE = re.compile(
    r"^compression\s+chiminus=(-?\d+)\s+chiplus=(-?\d+)\s+boundary=(\d+)(\s+minus=empty)?\s*$"
)


def parse_profile(line: str) -> SplittingProfile:
    match = PROFILE_LINE.match(line.strip())
    if not match:
        raise InvalidProfile(f"Expected 'splitting chiF=<int> chis=<int,...>', got {line.strip()!r}.")
    try:
        return SplittingProfile(
            chi_F=int(match.group(1)),
            chi_list=[int(x) for x in match.group(2).split(",")],
        )
    except ValidationError as e:
        raise InvalidProfile(f"Invalid splitting profile: {e.errors()[0]['msg']}") from e


def format_profile(p: SplittingProfile) -> str:
    return f"splitting chiF={p.chi_F} chis={','.join(str(x) for x in p.chi_list)}"


def star_terms(chi_list: list[int]) -> list[Fraction]:
    """The n+1 summands of the telescoped identity for |chi(F)|; positions are 1-based."""
    n = len(chi_list)
    terms = [Fraction(-chi_list[0], 2)]
    for j in range(1, n):
        left, right = chi_list[j - 1], chi_list[j]
        if j % 2 == 1:
            terms.append(Fraction(right - left, 2))
        else:
            terms.append(Fraction(left - right, 2))
    terms.append(Fraction(-chi_list[-1], 2))
    return terms


def verify_star(p: SplittingProfile) -> Report:
    chis = p.chi_list
    n = len(chis)
    target = abs(p.chi_F)
    terms = star_terms(chis)
    total = sum(terms, Fraction(0))
    alternating = sum(((-1) ** j) * chi for j, chi in enumerate(chis, start=1))

    zero_or_less = [i for i, term in enumerate(terms) if term < 1]
    fractional = [i for i, term in enumerate(terms) if term.denominator != 1]
    spheres = [j for j, chi in enumerate(chis, start=1) if chi > 0]
    too_big = [j for j, chi in enumerate(chis, start=1) if abs(chi) > target]

    checks = [
        CheckResult(name="odd_length", passed=n % 2 == 1, detail=f"n={n}"),
        CheckResult(name="no_spheres", passed=not spheres,
                    detail=f"positive chi at positions {spheres}" if spheres else ""),
        CheckResult(name="terms_integral", passed=not fractional,
                    detail=f"non-integral terms at {fractional}" if fractional else ""),
        CheckResult(name="terms_positive", passed=not zero_or_less,
                    detail=f"terms below one at {zero_or_less}" if zero_or_less else ""),
        CheckResult(name="sum_identity", passed=total == target, detail=f"sum={total} |chiF|={target}"),
        CheckResult(name="alternating_sum", passed=alternating == target,
                    detail=f"sum (-1)^j chi_j={alternating}"),
        CheckResult(name="surface_bounds", passed=not too_big,
                    detail=f"|chi_j| > |chiF| at {too_big}" if too_big else ""),
        CheckResult(name="term_count", passed=n + 1 <= target, detail=f"n+1={n + 1} <= {target}"),
    ]
    report = Report(
        kind="star",
        fields={"n": n, "chiF": p.chi_F, "terms": terms, "sum": total},
        checks=checks,
    )
    if not report.passed:
        logger.info(f"Splitting profile {format_profile(p)} violates {[c.name for c in checks if not c.passed]}")
    return report


def corollary4_bounds(p: SplittingProfile) -> Report:
    target = abs(p.chi_F)
    n = len(p.chi_list)
    star = verify_star(p)
    total = sum(abs(chi) for chi in p.chi_list)
    checks = [
        CheckResult(name="star_precondition", passed=star.passed,
                    detail="" if star.passed else "profile fails the telescoped identity"),
        CheckResult(name="in_model", passed=target > 1,
                    detail="" if target > 1 else "|chiF| <= 1 is outside the model (needs genus >= 1 splittings)"),
        CheckResult(name="surface_total", passed=total <= n * target,
                    detail=f"sum |chi_j|={total} <= n|chiF|={n * target}"),
        CheckResult(name="square_bound", passed=n * target < target * target,
                    detail=f"n|chiF|={n * target} < |chiF|^2={target * target}"),
    ]
    return Report(
        kind="corollary4",
        fields={
            "surface_total": total,
            "linear_bound": n * target,
            "square_bound": target * target,
            "component_bound": (3 * target) // 2,
        },
        checks=checks,
    )


def parse_compression(line: str) -> CompressionBodyStats:
    match = COMPRESSION_LINE.match(line.strip())
    if not match:
        raise InvalidProfile(
            f"Expected 'compression chiminus=<int> chiplus=<int> boundary=<int> [minus=empty]', got {line.strip()!r}."
        )
    try:
        return CompressionBodyStats(
            chi_minus=int(match.group(1)),
            chi_plus=int(match.group(2)),
            boundary_components=int(match.group(3)),
            minus_empty=match.group(4) is not None,
        )
    except ValidationError as e:
        raise InvalidProfile(f"Invalid compression body: {e.errors()[0]['msg']}") from e


def parse_ledger_line(line: str) -> Union[SplittingProfile, CompressionBodyStats]:
    if line.strip().startswith("compression"):
        return parse_compression(line)
    return parse_profile(line)


def compression_body_check(stats: CompressionBodyStats) -> Report:
    difference = stats.chi_minus - stats.chi_plus
    checks = [
        CheckResult(name="difference_even", passed=difference % 2 == 0, detail=f"chi- - chi+ = {difference}"),
    ]
    notes = []
    if stats.is_ball:
        notes.append("3-ball: empty negative boundary, difference and boundary bounds not applicable")
    elif difference == 0:
        checks.append(CheckResult(name="difference_nonnegative", passed=True, detail="chi- - chi+ = 0"))
        notes.append("product or solid torus: boundary bound not applicable")
    else:
        checks.append(CheckResult(name="difference_nonnegative", passed=difference > 0,
                                  detail=f"chi- - chi+ = {difference}"))
        checks.append(CheckResult(
            name="boundary_bound",
            passed=2 * stats.boundary_components <= 3 * difference,
            detail=f"|dH|={stats.boundary_components} <= 3/2*{difference}={Fraction(3 * difference, 2)}",
        ))
    return Report(
        kind="compression_body",
        fields={"chi_minus": stats.chi_minus, "chi_plus": stats.chi_plus,
                "boundary_components": stats.boundary_components, "minus_empty": stats.minus_empty},
        checks=checks,
        notes=notes,
    )


def pigeonhole_bound(m: int, c_size: int, d_size: int) -> int:
    """Largest deck-group order for which m translates can fail to be pairwise disjoint."""
    if m < 2 or c_size < 0 or d_size < 0:
        raise PreconditionViolation(f"pigeonhole_bound needs m >= 2 and sizes >= 0; got {m}, {c_size}, {d_size}.")
    return comb(m, 2) * c_size * c_size + m * c_size * d_size


def fibring_degree_bound(x: int, k4: int, k6: int) -> int:
    """Degree beyond which a cover holds ceil(9x/2) pairwise disjoint translates of a surface."""
    if x < 1 or k4 < 1 or k6 < 1:
        raise PreconditionViolation("fibring_degree_bound needs positive arguments.")
    m = ceil(Fraction(9 * x, 2))
    return pigeonhole_bound(m, k6 * k4 * x, k6 * x * x)


def translate_intersection_bound(chi_surface: int, chi_heegaard: int, k4: int, k6: int) -> int:
    """Number of translates of a surface that can meet one given surface."""
    return (k6 * abs(chi_surface)) * (k6 * k4 * abs(chi_heegaard))


def random_admissible_profile(rng: random.Random, n_max: int = 7, step_max: int = 3) -> SplittingProfile:
    """Random positional profile whose telescoped terms are all at least one."""
    n = rng.choice(range(1, n_max + 1, 2))
    chis = [0] * n
    for j in range(1, n, 2):
        chis[j] = -2 * rng.randint(0, step_max)
    for j in range(0, n, 2):
        neighbours = [chis[i] for i in (j - 1, j + 1) if 0 <= i < n]
        chis[j] = min([*neighbours, 0]) - 2 * rng.randint(1, step_max)
    total = sum(star_terms(chis), Fraction(0))
    return SplittingProfile(chi_list=chis, chi_F=-int(total))
