"""Loaders shared by the commands: read inputs, validate them and raise domain errors."""
from pathlib import Path
from typing import Union

from covercert import formats
from covercert.exceptions import FormatError, InvalidQuotient
from covercert.schemas import (
    CENSUS_PREFIX, Cocycle, CompressionBodyStats, CutCertificate, FiniteQuotient, MultiGraph, NormalSurface,
    RunConfig, Skeleton, SplittingProfile, Triangulation
)
from covercert.services import census_service, ledger_service
from covercert.services.cheeger_service import make_cut
from covercert.services.presentation_service import (
    cyclic_quotients, presentation_from, trivial_quotient
)
from covercert.services.triangulation_service import require_valid
import logging

logger = logging.getLogger(__name__)


def read_text(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        logger.warning(f"Could not read {path}: {e}")
        raise FormatError(f"Cannot read file: {e}", source=str(path)) from e


def load_triangulation(item: str) -> Triangulation:
    if item.startswith(CENSUS_PREFIX):
        name = item[len(CENSUS_PREFIX):]
        try:
            return census_service.by_name(name)
        except ValueError as e:
            raise FormatError(str(e), source=item) from e
    return formats.parse_triangulation(read_text(Path(item)), source=item)


def load_valid_triangulation(item: str) -> Triangulation:
    t = load_triangulation(item)
    require_valid(t)
    return t


def is_graph_file(item: str) -> bool:
    if item.startswith(CENSUS_PREFIX):
        return False
    for line in read_text(Path(item)).splitlines():
        content = line.split("#", 1)[0].strip()
        if content:
            return content.split()[0] == "graph"
    return False


def load_graph(item: str) -> MultiGraph:
    return formats.parse_graph(read_text(Path(item)), source=item)


def require_single_input(config: RunConfig) -> str:
    if len(config.inputs) != 1:
        raise FormatError(f"Expected exactly one input, got {len(config.inputs)}.")
    return config.inputs[0]


def select_quotient(t: Triangulation, s: Skeleton, config: RunConfig) -> FiniteQuotient:
    """``--quotient`` file, else the ``--choice``-th cyclic quotient of order ``--cyclic``, else trivial."""
    presentation = presentation_from(t, s)
    if config.quotient_path is not None:
        return formats.parse_quotient(read_text(config.quotient_path), source=str(config.quotient_path))
    if config.cyclic is not None:
        options = cyclic_quotients(presentation, config.cyclic)
        if config.choice >= len(options):
            logger.warning(
                f"Requested cyclic quotient {config.choice} of order {config.cyclic}; only {len(options)} exist"
            )
            raise InvalidQuotient(
                f"There are {len(options)} surjections onto Z/{config.cyclic}; choice {config.choice} is out of range."
            )
        return options[config.choice]
    return trivial_quotient(presentation)


def load_cocycle(path: Path, edge_count: int) -> Cocycle:
    return formats.parse_cocycle(read_text(path), edge_count, source=str(path))


def load_ledger_entries(config: RunConfig) -> list[Union[SplittingProfile, CompressionBodyStats]]:
    """Each ledger argument is a splitting or compression line, or a file of such lines."""
    entries = []
    for entry in config.ledger_lines:
        candidate = Path(entry)
        if not entry.lstrip().startswith(("splitting", "compression")) and candidate.exists():
            lines = [line for line in read_text(candidate).splitlines() if line.strip() and not line.startswith("#")]
        else:
            lines = [entry]
        entries.extend(ledger_service.parse_ledger_line(line) for line in lines)
    return entries


def load_cut(path: Path, graph: MultiGraph) -> CutCertificate:
    """A cut file, re-evaluated on ``graph``; its declared boundary must match."""
    declared = formats.parse_cut(read_text(path), graph.vertex_count, source=str(path))
    cut = make_cut(graph, declared.vertices)
    if (declared.boundary_size, declared.ratio) != (cut.boundary_size, cut.ratio):
        raise FormatError(
            f"Cut declares boundary {declared.boundary_size} ratio {declared.ratio}; "
            f"the graph gives {cut.boundary_size} and {cut.ratio}.",
            source=str(path),
        )
    return cut


def load_surface(path: Path, ambient: Triangulation) -> NormalSurface:
    return formats.parse_surface(read_text(path), ambient, source=str(path))


def load_cover_labels(path: Path) -> list[tuple[int, int]]:
    return formats.parse_cover_labels(read_text(path), source=str(path))
