from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from covercert import formats
from covercert.commands.covers import cover_from_config
from covercert.dependencies import (
    load_cocycle, load_cut, load_surface, load_valid_triangulation, require_single_input
)
from covercert.exceptions import EXIT_INVARIANT, EXIT_OK, EXIT_VALIDATION, CovercertException, TheoremViolation
from covercert.models import Verdict
from covercert.schemas import (
    CheckResult, Cocycle, CoverTriangulation, CutCertificate, Report, RunConfig, Triangulation
)
from covercert.services.certificate_service import (
    check_cayley_identification, is_coboundary, search_certificate, verify_theorem11
)
from covercert.services.cheeger_service import cayley_graph, cheeger_best, make_cut, threshold_holds
from covercert.services.cover_service import build_cover, translate_cocycle, translate_vertices
from covercert.services.presentation_service import cyclic_quotients, presentation_from
from covercert.services.report_service import render, render_table
from covercert.services.surface_service import (
    check_matching, dual_surface, profile, rebuild_cocycle, remove_spheres, separates, translate_surface,
    verify_counting_bounds
)
from covercert.services.triangulation_service import max_edge_valence
import logging

logger = logging.getLogger(__name__)

FAILED_VERDICTS = (Verdict.theorem_violation, Verdict.unsound)


def _best_cut(c: CoverTriangulation, limit: int) -> CutCertificate:
    graph = cayley_graph(c.quotient)
    check_cayley_identification(c, graph)
    return cheeger_best(graph, limit)


def _certificate_from(report: Report, edge_count: int) -> Cocycle:
    values = [0] * edge_count
    for edge, value in report.fields["certificate"].items():
        values[edge] = value
    return Cocycle(values=values)


def handle_certify(config: RunConfig) -> tuple[str, int]:
    c = cover_from_config(config)
    cut = _best_cut(c, config.limit)
    report = verify_theorem11(c, cut, cap=config.cap)
    if config.export_path is not None and "certificate" in report.fields:
        certificate = _certificate_from(report, c.skeleton.edge_count)
        config.export_path.write_text(formats.write_cocycle(certificate), encoding="utf-8")
        logger.info(f"Wrote certificate to {config.export_path}")
    code = EXIT_INVARIANT if report.verdict in FAILED_VERDICTS else EXIT_OK
    return render(report, config.output_format), code


def _cut_from_file(c: CoverTriangulation, path: Path) -> CutCertificate:
    graph = cayley_graph(c.quotient)
    check_cayley_identification(c, graph)
    return load_cut(path, graph)


def handle_surface(config: RunConfig) -> tuple[str, int]:
    c = cover_from_config(config)
    s = c.skeleton
    cut = _cut_from_file(c, config.cut_path) if config.cut_path is not None else None
    if config.cocycle_path is not None:
        cocycle = load_cocycle(config.cocycle_path, s.edge_count)
    elif config.surface_path is not None:
        loaded = load_surface(config.surface_path, c.lifted)
        check_matching(loaded)
        cocycle = rebuild_cocycle(loaded, s)
    else:
        if cut is None:
            cut = _best_cut(c, config.limit)
        cocycle = search_certificate(c, cut, cap=config.cap, force=config.force)
        if cocycle is None:
            if threshold_holds(cut):
                raise TheoremViolation(
                    f"Cut ratio {cut.ratio} meets the threshold but no certificate is supported on dA."
                )
            report = Report(kind="surface", fields={"degree": c.degree, "found": False},
                            notes=["no {-1,0,1} certificate is supported on the chosen cut"])
            return render(report, config.output_format), EXIT_OK

    surface = dual_surface(c.lifted, cocycle, s)
    translation_checks = []
    if config.translate is not None:
        g = config.translate
        moved = translate_surface(c, g, surface)
        cocycle = translate_cocycle(c, g, cocycle)
        surface = dual_surface(c.lifted, cocycle, s)
        translation_checks.append(CheckResult(name="translation", passed=moved == surface,
                                  detail=f"deck element {g} moves discs and cocycle alike"))
        if cut is not None:
            cut = make_cut(cayley_graph(c.quotient), translate_vertices(c, g, cut.vertices))

    summary = profile(surface, s)
    rebuilt = rebuild_cocycle(surface, s)
    nontrivial = not is_coboundary(c.lifted, cocycle, s).is_coboundary
    splits = separates(surface, s)
    checks = [
        CheckResult(name="round_trip", passed=rebuilt.values == cocycle.values),
        CheckResult(name="separation", passed=nontrivial or splits,
                    detail="" if nontrivial or splits else "dual of a coboundary does not separate"),
        CheckResult(name="euler_identity", passed=all(
            not component.orientable or component.euler_characteristic == 2 - 2 * component.genus
            for component in summary.components
        )),
        *translation_checks,
    ]
    kept = surface
    kept_summary = summary
    if config.remove_spheres:
        kept = remove_spheres(surface, summary)
        kept_summary = profile(kept, s)
        removed = sum(1 for component in summary.components if component.is_sphere)
        checks.append(CheckResult(
            name="sphere_removal",
            passed=kept_summary.component_count == summary.component_count - removed,
            detail=f"removed {removed} spheres",
        ))

    report = Report(
        kind="surface",
        fields={
            "degree": c.degree,
            "found": True,
            "support": len(cocycle.support),
            "discs": kept.disc_count,
            "components": kept_summary.component_count,
            "vertices": kept_summary.vertex_count,
            "edges": kept_summary.edge_count,
            "faces": kept_summary.face_count,
            "chi": kept_summary.euler_characteristic,
            "nontrivial": nontrivial,
            "separates": splits,
        },
        checks=checks,
    )
    rows = [
        {
            "component": index,
            "chi": component.euler_characteristic,
            "orientable": component.orientable,
            "genus": component.genus,
            "triangles": component.triangles,
            "quads": component.quads,
        }
        for index, component in enumerate(kept_summary.components)
    ]
    outputs = [render(report, config.output_format), render_table("component", rows, config.output_format)]
    passed = report.passed
    if cut is not None:
        counting = verify_counting_bounds(surface, cut, max_edge_valence(s), summary)
        outputs.append(render(counting, config.output_format))
        passed = passed and counting.passed
    if config.export_path is not None:
        config.export_path.write_text(formats.write_surface(kept), encoding="utf-8")
        logger.info(f"Wrote surface to {config.export_path}")
    return "".join(outputs), EXIT_OK if passed else EXIT_INVARIANT


def sweep_row(task: tuple[Triangulation, int, int, int, int]) -> dict:
    """One row of a cyclic sweep; module level so worker processes can run it."""
    t, n, choice, limit, cap = task
    row = {"n": n, "degree": None, "ratio": None, "optimal": None, "threshold_holds": None,
           "found": None, "b1": None, "verdict": None}
    try:
        options = cyclic_quotients(presentation_from(t), n)
        if choice >= len(options):
            row["verdict"] = "NO_QUOTIENT"
            return row
        c = build_cover(t, options[choice])
        cut = _best_cut(c, limit)
        report = verify_theorem11(c, cut, cap=cap)
    except CovercertException as e:
        if e.status_code == EXIT_INVARIANT:
            raise
        logger.warning(f"Sweep row n={n} failed: {e.detail}")
        row["verdict"] = "ERROR"
        return row
    row.update({
        "degree": c.degree,
        "ratio": cut.ratio,
        "optimal": cut.optimal,
        "threshold_holds": report.fields["threshold_holds"],
        "found": report.fields["found"],
        "b1": report.fields["b1"],
        "verdict": report.verdict.value,
    })
    return row


def handle_sweep(config: RunConfig) -> tuple[str, int]:
    t = load_valid_triangulation(require_single_input(config))
    tasks = [(t, n, config.choice, config.limit, config.cap) for n in range(config.start, config.stop + 1)]
    logger.info(f"Sweeping cyclic covers of order {config.start}..{config.stop} with {config.jobs} workers")
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            rows = list(pool.map(sweep_row, tasks))
    else:
        rows = [sweep_row(task) for task in tasks]

    verdicts = {row["verdict"] for row in rows}
    if {v.value for v in FAILED_VERDICTS} & verdicts:
        code = EXIT_INVARIANT
    elif "ERROR" in verdicts:
        code = EXIT_VALIDATION
    else:
        code = EXIT_OK
    return render_table("sweep", rows, config.output_format), code
