from pathlib import Path

from covercert import formats
from covercert.config import settings
from covercert.dependencies import (
    is_graph_file, load_cover_labels, load_graph, load_valid_triangulation, require_single_input,
    select_quotient
)
from covercert.exceptions import EXIT_OK, EXIT_VALIDATION
from covercert.schemas import CheckResult, CoverTriangulation, MultiGraph, Report, RunConfig
from covercert.services.certificate_service import check_cayley_identification
from covercert.services.cheeger_service import (
    cayley_graph, cheeger_best, fiedler, spectral_brackets, threshold_holds, threshold_value,
    within_brackets
)
from covercert.services.cover_service import build_cover
from covercert.services.report_service import render
from covercert.services.triangulation_service import build_skeleton, euler_characteristic, max_edge_valence
import logging

logger = logging.getLogger(__name__)


def cover_from_config(config: RunConfig) -> CoverTriangulation:
    t = load_valid_triangulation(require_single_input(config))
    s = build_skeleton(t)
    q = select_quotient(t, s, config)
    return build_cover(t, q, s)


def _export(path: Path, text: str) -> None:
    path.write_text(text, encoding="utf-8")
    logger.info(f"Wrote {path}")


def handle_cover(config: RunConfig) -> tuple[str, int]:
    c = cover_from_config(config)
    s = c.skeleton
    report = Report(
        kind="cover",
        fields={
            "degree": c.degree,
            "tets": c.lifted.tet_count,
            "vertices": s.vertex_count,
            "edges": s.edge_count,
            "faces": s.face_count,
            "euler": euler_characteristic(s),
            "k3": max_edge_valence(s),
        },
    )
    if config.labels_path is not None:
        expected = load_cover_labels(config.labels_path)
        mismatched = [k for k, (a, b) in enumerate(zip(expected, c.labels)) if a != b]
        report.checks.append(CheckResult(
            name="labels",
            passed=len(expected) == len(c.labels) and not mismatched,
            detail=f"{len(expected)} labels read, {len(c.labels)} built, first mismatch at "
                   f"{mismatched[0] if mismatched else '-'}",
        ))
    if config.export_path is not None:
        _export(config.export_path, formats.write_triangulation(c.lifted))
        _export(Path(f"{config.export_path}.labels"), formats.write_cover_labels(c))
        _export(Path(f"{config.export_path}.quotient"), formats.write_quotient(c.quotient))
    return render(report, config.output_format), EXIT_OK if report.passed else EXIT_VALIDATION


def _graph_from_config(config: RunConfig) -> MultiGraph:
    item = require_single_input(config)
    if is_graph_file(item):
        return load_graph(item)
    c = cover_from_config(config)
    graph = cayley_graph(c.quotient)
    check_cayley_identification(c, graph)
    return graph


def handle_cheeger(config: RunConfig) -> tuple[str, int]:
    graph = _graph_from_config(config)
    cut = cheeger_best(graph, config.limit)
    lambda2, _ = fiedler(graph)
    lower, upper = spectral_brackets(graph)
    ratio = float(cut.ratio)
    report = Report(
        kind="cheeger",
        fields={
            "vertices": graph.vertex_count,
            "edges": graph.edge_total,
            "cut": list(cut.vertices),
            "boundary": cut.boundary_size,
            "ratio": cut.ratio,
            "optimal": cut.optimal,
            "lambda2": lambda2,
            "lower": lower,
            "upper": upper,
            "threshold": threshold_value(cut.vertex_count),
            "threshold_holds": threshold_holds(cut),
        },
        checks=[CheckResult(
            name="spectral_brackets",
            passed=within_brackets(graph, cut) if cut.optimal else ratio >= lower - settings.BRACKET_TOLERANCE,
            detail=f"{lower:.6g} <= {ratio:.6g} <= {upper:.6g}",
        )],
    )
    if config.export_path is not None:
        _export(config.export_path, formats.write_graph(graph))
        _export(Path(f"{config.export_path}.cut"), formats.write_cut(cut))
    return render(report, config.output_format), EXIT_OK
