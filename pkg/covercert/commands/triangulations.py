from covercert import formats
from covercert.dependencies import (
    load_triangulation, load_valid_triangulation, require_single_input
)
from covercert.exceptions import EXIT_OK, EXIT_VALIDATION, FormatError
from covercert.schemas import Report, RunConfig
from covercert.services.presentation_service import (
    abelianization, cyclic_quotients, presentation_from
)
from covercert.services.report_service import render, render_table
from covercert.services.triangulation_service import (
    build_skeleton, euler_characteristic, homology, max_edge_valence, validate
)
import logging

logger = logging.getLogger(__name__)


def _word(relator) -> str:
    return "*".join(f"x{g}" if exponent == 1 else f"x{g}^-1" for g, exponent in relator)


def handle_validate(config: RunConfig) -> tuple[str, int]:
    item = require_single_input(config)
    report = validate(load_triangulation(item))
    logger.info(f"Validated {item}: {'passed' if report.passed else 'failed'}")
    return render(report, config.output_format), EXIT_OK if report.passed else EXIT_VALIDATION


def handle_homology(config: RunConfig) -> tuple[str, int]:
    t = load_valid_triangulation(require_single_input(config))
    s = build_skeleton(t)
    result = homology(t, s)
    fields = {f"b{i}": b for i, b in enumerate(result.betti)}
    fields.update({f"torsion{i}": torsion for i, torsion in enumerate(result.torsion)})
    fields.update({"euler": euler_characteristic(s), "k3": max_edge_valence(s)})
    return render(Report(kind="homology", fields=fields), config.output_format), EXIT_OK


def handle_presentation(config: RunConfig) -> tuple[str, int]:
    t = load_valid_triangulation(require_single_input(config))
    p = presentation_from(t)
    h1 = abelianization(p)
    report = Report(
        kind="presentation",
        fields={
            "generators": len(p.generators),
            "relators": [_word(relator) for relator in p.relators],
            "h1_rank": h1.rank,
            "h1_torsion": h1.torsion,
        },
    )
    return render(report, config.output_format), EXIT_OK


def handle_quotients(config: RunConfig) -> tuple[str, int]:
    t = load_valid_triangulation(require_single_input(config))
    if config.cyclic is None:
        raise FormatError("quotients needs the order n.")
    options = cyclic_quotients(presentation_from(t), config.cyclic)
    rows = [
        {"choice": index, "order": q.degree, "images": dict(sorted(q.images.items()))}
        for index, q in enumerate(options)
    ]
    return render_table("quotient", rows, config.output_format), EXIT_OK


def handle_census(config: RunConfig) -> tuple[str, int]:
    return formats.write_triangulation(load_triangulation(require_single_input(config))), EXIT_OK
