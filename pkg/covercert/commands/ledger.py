from covercert.dependencies import load_ledger_entries
from covercert.exceptions import EXIT_OK, EXIT_VALIDATION, FormatError
from covercert.schemas import CompressionBodyStats, Report, RunConfig
from covercert.services.ledger_service import (
    compression_body_check, corollary4_bounds, fibring_degree_bound, pigeonhole_bound,
    translate_intersection_bound, verify_star
)
from covercert.services.report_service import render_all
import logging

logger = logging.getLogger(__name__)


def handle_ledger(config: RunConfig) -> tuple[str, int]:
    entries = load_ledger_entries(config)
    if not entries:
        raise FormatError("ledger needs at least one 'splitting ...' or 'compression ...' line.")
    reports = []
    for entry in entries:
        if isinstance(entry, CompressionBodyStats):
            reports.append(compression_body_check(entry))
        else:
            reports.append(verify_star(entry))
            reports.append(corollary4_bounds(entry))
    failed = sum(1 for report in reports if not report.passed)
    logger.info(f"Checked {len(entries)} ledger entries, {failed} reports with violations")
    return render_all(reports, config.output_format), EXIT_VALIDATION if failed else EXIT_OK


def handle_pigeonhole(config: RunConfig) -> tuple[str, int]:
    if len(config.arguments) != 3:
        raise FormatError("pigeonhole needs three integers: m |C| |D|.")
    m, c_size, d_size = config.arguments
    report = Report(
        kind="pigeonhole",
        fields={"m": m, "c": c_size, "d": d_size, "bound": pigeonhole_bound(m, c_size, d_size)},
    )
    return render_all([report], config.output_format), EXIT_OK


def handle_fibring(config: RunConfig) -> tuple[str, int]:
    if len(config.arguments) not in (3, 5):
        raise FormatError("fibring needs x k4 k6, optionally followed by chi(S) chi(F).")
    x, k4, k6 = config.arguments[:3]
    fields = {"x": x, "k4": k4, "k6": k6, "degree_bound": fibring_degree_bound(x, k4, k6)}
    if len(config.arguments) == 5:
        chi_surface, chi_heegaard = config.arguments[3:]
        fields.update({
            "chi_surface": chi_surface,
            "chi_heegaard": chi_heegaard,
            "meeting_translates": translate_intersection_bound(chi_surface, chi_heegaard, k4, k6),
        })
    return render_all([Report(kind="fibring", fields=fields)], config.output_format), EXIT_OK
