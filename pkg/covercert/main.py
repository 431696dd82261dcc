from pathlib import Path
import sys
from typing import Callable, Optional

import click
from pydantic import ValidationError

from covercert.config import settings
from covercert.exceptions import EXIT_INVARIANT, EXIT_USAGE, CovercertException
from covercert.models import OutputFormat, Subcommand
from covercert.schemas import CENSUS_PREFIX, RunConfig

# Subcommand handlers
from covercert.commands import certificates, covers, ledger, triangulations
import logging

logger = logging.getLogger(__name__)

HANDLERS: dict[Subcommand, Callable[[RunConfig], tuple[str, int]]] = {
    Subcommand.validate: triangulations.handle_validate,
    Subcommand.homology: triangulations.handle_homology,
    Subcommand.presentation: triangulations.handle_presentation,
    Subcommand.quotients: triangulations.handle_quotients,
    Subcommand.census: triangulations.handle_census,
    Subcommand.cover: covers.handle_cover,
    Subcommand.cheeger: covers.handle_cheeger,
    Subcommand.certify: certificates.handle_certify,
    Subcommand.surface: certificates.handle_surface,
    Subcommand.sweep: certificates.handle_sweep,
    Subcommand.ledger: ledger.handle_ledger,
    Subcommand.pigeonhole: ledger.handle_pigeonhole,
    Subcommand.fibring: ledger.handle_fibring,
}


def configure_logging(level: str) -> None:
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
        stream=sys.stderr,
    )


def run(config: RunConfig) -> int:
    """Run one subcommand, write its report and return the exit code."""
    handler = HANDLERS[config.subcommand]
    logger.info(f"Running {config.subcommand.value} on {config.inputs or config.arguments or config.ledger_lines}")
    try:
        output, code = handler(config)
    except CovercertException as e:
        logger.error(f"{config.subcommand.value} failed: {e.detail}")
        click.echo(f"error: {e.detail}", err=True)
        return e.status_code
    except Exception as e:
        logger.exception(f"Unexpected error in {config.subcommand.value}: {e}")
        click.echo(f"internal error: {e}", err=True)
        return EXIT_INVARIANT

    if config.out is not None:
        config.out.write_text(output, encoding="utf-8")
        logger.info(f"Report written to {config.out}")
    else:
        click.echo(output, nl=False)
    return code


class CovercertGroup(click.Group):
    """Usage errors exit with 64 so that 2 stays reserved for invariant violations."""

    def make_context(self, *args, **kwargs):
        try:
            return super().make_context(*args, **kwargs)
        except click.UsageError as e:
            e.exit_code = EXIT_USAGE
            raise

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except click.UsageError as e:
            e.exit_code = EXIT_USAGE
            raise


def _execute(subcommand: Subcommand, **options) -> None:
    values = {key: value for key, value in options.items() if value is not None}
    try:
        config = RunConfig(subcommand=subcommand, **values)
    except ValidationError as e:
        message = "; ".join(error["msg"] for error in e.errors())
        raise click.UsageError(message)
    click.get_current_context().exit(run(config))


# --- Shared options ---
def output_options(f):
    f = click.option("--out", type=click.Path(dir_okay=False, path_type=Path), help="Write the report here.")(f)
    f = click.option(
        "--format", "output_format",
        type=click.Choice([member.value for member in OutputFormat]),
        help="human table or line-oriented records.",
    )(f)
    return f


def quotient_options(f):
    f = click.option("--quotient", "quotient_path", type=click.Path(path_type=Path),
                     help="Quotient file: group table and generator images.")(f)
    f = click.option("--cyclic", type=int, help="Use a cyclic quotient of this order.")(f)
    f = click.option("--choice", type=int, help="Index among the cyclic quotients (default 0).")(f)
    return f


def search_options(f):
    f = click.option("--limit", type=int, help="Vertex limit for the exact Cheeger search.")(f)
    f = click.option("--cap", type=int, help="Largest |dA| the certificate search accepts.")(f)
    return f


def export_option(f):
    return click.option("--export", "export_path", type=click.Path(dir_okay=False, path_type=Path),
                        help="Write the constructed object in its file format.")(f)


@click.group(cls=CovercertGroup)
@click.option("--log-level", default=settings.LOG_LEVEL, show_default=True, help="Logging level (logs go to stderr).")
def cli(log_level: str) -> None:
    """Finite covers, Cheeger cuts and cocycle certificates for triangulated 3-manifolds."""
    configure_logging(log_level)


@cli.command()
@click.argument("triangulation")
@output_options
def validate(triangulation: str, **options) -> None:
    """Check closedness, involution, edge validity, orientability, connectedness and Euler."""
    _execute(Subcommand.validate, inputs=[triangulation], **options)


@cli.command()
@click.argument("triangulation")
@output_options
def homology(triangulation: str, **options) -> None:
    """Betti numbers and torsion via integer Smith normal form."""
    _execute(Subcommand.homology, inputs=[triangulation], **options)


@cli.command()
@click.argument("triangulation")
@output_options
def presentation(triangulation: str, **options) -> None:
    """Edge-class presentation of the fundamental group and its abelianization."""
    _execute(Subcommand.presentation, inputs=[triangulation], **options)


@cli.command()
@click.argument("triangulation")
@click.argument("order", type=int)
@output_options
def quotients(triangulation: str, order: int, **options) -> None:
    """List surjections onto Z/ORDER up to units."""
    _execute(Subcommand.quotients, inputs=[triangulation], cyclic=order, **options)


@cli.command()
@click.argument("name")
@output_options
def census(name: str, **options) -> None:
    """Print a standard triangulation (s3, s2xs1, t3, rp3, l41, l52, lens-p-q, ...)."""
    item = name if name.startswith(CENSUS_PREFIX) else f"{CENSUS_PREFIX}{name}"
    _execute(Subcommand.census, inputs=[item], **options)


@cli.command()
@click.argument("triangulation")
@quotient_options
@click.option("--labels", "labels_path", type=click.Path(path_type=Path),
              help="Compare the lifted tetrahedron labels with this exported file.")
@export_option
@output_options
def cover(triangulation: str, **options) -> None:
    """Build the regular cover defined by a finite quotient."""
    _execute(Subcommand.cover, inputs=[triangulation], **options)


@cli.command()
@click.argument("source")
@quotient_options
@search_options
@export_option
@output_options
def cheeger(source: str, **options) -> None:
    """Cheeger constant of a graph file, or of the Cayley graph of a cover."""
    _execute(Subcommand.cheeger, inputs=[source], **options)


@cli.command()
@click.argument("triangulation")
@quotient_options
@search_options
@export_option
@output_options
def certify(triangulation: str, **options) -> None:
    """Cover, Cayley graph, cut, threshold, certificate search and homology cross-check."""
    _execute(Subcommand.certify, inputs=[triangulation], **options)


@cli.command()
@click.argument("triangulation")
@quotient_options
@search_options
@click.option("--force", is_flag=True, help="Search even when the cut misses the threshold.")
@click.option("--cocycle", "cocycle_path", type=click.Path(path_type=Path), help="Profile this cocycle instead of searching.")
@click.option("--remove-spheres", is_flag=True, help="Drop 2-sphere components.")
@click.option("--surface-file", "surface_path", type=click.Path(path_type=Path),
              help="Profile this exported surface instead of searching.")
@click.option("--cut-file", "cut_path", type=click.Path(path_type=Path),
              help="Search on this exported cut instead of the Cheeger cut.")
@click.option("--translate", type=int, help="Move the surface by this deck-group element first.")
@export_option
@output_options
def surface(triangulation: str, **options) -> None:
    """Dual normal surface of a certificate: components, Euler characteristic and counting bounds."""
    _execute(Subcommand.surface, inputs=[triangulation], **options)


@cli.command()
@click.argument("triangulation")
@click.option("--start", type=int, help="First cyclic order (default 2).")
@click.option("--stop", type=int, help="Last cyclic order (default 8).")
@click.option("--jobs", type=int, help="Worker processes.")
@click.option("--choice", type=int, help="Index among the cyclic quotients of each order.")
@search_options
@output_options
def sweep(triangulation: str, **options) -> None:
    """Run the certificate pipeline over a family of cyclic covers."""
    _execute(Subcommand.sweep, inputs=[triangulation], **options)


@cli.command(name="ledger")
@click.argument("profiles", nargs=-1, required=True)
@output_options
def ledger_command(profiles: tuple[str, ...], **options) -> None:
    """Check splitting profiles and compression bodies (lines or files of them).

    Lines read 'splitting chiF=<int> chis=<int,...>' or
    'compression chiminus=<int> chiplus=<int> boundary=<int> [minus=empty]'.
    """
    _execute(Subcommand.ledger, ledger_lines=list(profiles), **options)


@cli.command()
@click.argument("m", type=int)
@click.argument("c", type=int)
@click.argument("d", type=int)
@output_options
def pigeonhole(m: int, c: int, d: int, **options) -> None:
    """Largest cover degree for which M translates can fail to be disjoint."""
    _execute(Subcommand.pigeonhole, arguments=[m, c, d], **options)


@cli.command()
@click.argument("x", type=int)
@click.argument("k4", type=int)
@click.argument("k6", type=int)
@click.option("--chi-surface", type=int, help="chi of a surface whose meeting translates are counted.")
@click.option("--chi-heegaard", type=int, help="chi of the Heegaard surface it is compared against.")
@output_options
def fibring(x: int, k4: int, k6: int, chi_surface: Optional[int], chi_heegaard: Optional[int], **options) -> None:
    """Cover degree beyond which ceil(9X/2) translates of a surface are pairwise disjoint."""
    if (chi_surface is None) != (chi_heegaard is None):
        raise click.UsageError("--chi-surface and --chi-heegaard go together.")
    extra = [] if chi_surface is None else [chi_surface, chi_heegaard]
    _execute(Subcommand.fibring, arguments=[x, k4, k6, *extra], **options)


def main() -> None:
    cli()
