"""Rendering of reports as human tables or line-oriented ``record=<kind> key=value`` text."""
from enum import Enum
from fractions import Fraction
from typing import Any, Iterable

from covercert.models import OutputFormat
from covercert.schemas import Report
import logging

logger = logging.getLogger(__name__)


def format_value(value: Any) -> str:
    """Single token with no spaces; rationals as p/q and floats with 12 significant digits."""
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, Fraction):
        return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"
    if isinstance(value, float):
        return format(value, ".12g")
    if isinstance(value, dict):
        return ",".join(f"{format_value(k)}:{format_value(v)}" for k, v in value.items()) or "-"
    if isinstance(value, (list, tuple, set, frozenset)):
        items = sorted(value) if isinstance(value, (set, frozenset)) else value
        return ",".join(format_value(item) for item in items) or "-"
    return "_".join(str(value).split()) or "-"


def record_line(kind: str, fields: dict[str, Any]) -> str:
    parts = [f"record={kind}"]
    parts.extend(f"{key}={format_value(value)}" for key, value in fields.items())
    return " ".join(parts)


def _records(report: Report) -> list[str]:
    fields = dict(report.fields)
    if report.verdict is not None:
        fields["verdict"] = report.verdict
    if report.checks:
        fields["passed"] = report.passed
    lines = [record_line(report.kind, fields)]
    for check in report.checks:
        entry = {"report": report.kind, "name": check.name, "passed": check.passed}
        if check.detail:
            entry["detail"] = check.detail
        if check.offending:
            entry["offending"] = [f"{a}.{b}" for a, b in check.offending]
        lines.append(record_line("check", entry))
    for note in report.notes:
        lines.append(record_line("note", {"report": report.kind, "text": note}))
    return lines


def _human(report: Report) -> list[str]:
    lines = [f"== {report.kind} =="]
    width = max((len(key) for key in report.fields), default=0)
    for key, value in report.fields.items():
        lines.append(f"  {key.ljust(width)}  {format_value(value)}")
    for check in report.checks:
        status = "PASS" if check.passed else "FAIL"
        line = f"  [{status}] {check.name}"
        if check.detail:
            line += f": {check.detail}"
        if check.offending:
            line += f" (at {', '.join(f'tet {a} face {b}' for a, b in check.offending)})"
        lines.append(line)
    if report.verdict is not None:
        lines.append(f"  verdict: {report.verdict.value}")
    for note in report.notes:
        lines.append(f"  note: {note}")
    return lines


def render(report: Report, output_format: OutputFormat) -> str:
    lines = _records(report) if output_format == OutputFormat.records else _human(report)
    return "\n".join(lines) + "\n"


def render_all(reports: Iterable[Report], output_format: OutputFormat) -> str:
    return "".join(render(report, output_format) for report in reports)


def render_table(kind: str, rows: list[dict[str, Any]], output_format: OutputFormat) -> str:
    if output_format == OutputFormat.records:
        return "".join(record_line(kind, row) + "\n" for row in rows)
    if not rows:
        return f"== {kind} ==\n  (no rows)\n"
    columns = list(rows[0])
    cells = [[format_value(row.get(column)) for column in columns] for row in rows]
    widths = [max(len(column), *(len(line[i]) for line in cells)) for i, column in enumerate(columns)]
    lines = [f"== {kind} ==", "  ".join(column.ljust(w) for column, w in zip(columns, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines.extend("  ".join(cell.ljust(w) for cell, w in zip(line, widths)).rstrip() for line in cells)
    return "\n".join(lines) + "\n"
