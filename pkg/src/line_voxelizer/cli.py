"""
CLI interface for the line voxelizer
"""

import logging
import math
from typing import Optional

import click
from pydantic import ValidationError
from rich import box
from rich.console import Console
from rich.logging import RichHandler
from rich.markup import escape
from rich.progress import Progress, SpinnerColumn, TextColumn
from rich.table import Table

from line_voxelizer import __version__
from line_voxelizer.batch import BatchEngine
from line_voxelizer.bench import (
    BenchHarness,
    child_seed,
    gen_arbitrary_batch,
    gen_segment_of_length,
    report_metadata,
)
from line_voxelizer.errors import VoxelizerError
from line_voxelizer.formats import (
    read_segments,
    write_chains,
    write_report_csv,
    write_report_json,
    write_segments,
)
from line_voxelizer.models import (
    BenchSettings,
    PartitionConfig,
    Point3,
    ScenarioKind,
    Segment,
    VoxelFormat,
    VoxelMethod,
)
from line_voxelizer.oracle import (
    chain_violations,
    interior_violations,
    random_segments,
    run_oracle_survey,
)
from line_voxelizer.parametric import voxelize_parametric
from line_voxelizer.reference import voxelize_walk


console = Console()
err_console = Console(stderr=True)

EXIT_FAILED = 1
EXIT_BAD_INPUT = 2
EXIT_IO = 3

SCENARIOS = {
    "single": ScenarioKind.SINGLE_SEGMENT,
    "fixed-batch": ScenarioKind.FIXED_BATCH,
    "arbitrary": ScenarioKind.ARBITRARY_BATCH,
}


class PointType(click.ParamType):
    """A point given as `x,y,z`"""
    name = "x,y,z"

    def convert(self, value, param, ctx):
        if isinstance(value, Point3):
            return value
        parts = str(value).split(",")
        if len(parts) != 3:
            self.fail(f"expected three comma-separated numbers, got {value!r}", param, ctx)
        try:
            coords = [float(p) for p in parts]
        except ValueError:
            self.fail(f"malformed coordinates {value!r}", param, ctx)
        if not all(math.isfinite(c) for c in coords):
            self.fail(f"coordinates must be finite, got {value!r}", param, ctx)
        return Point3(*coords)


POINT = PointType()


def fail(message: str, code: int):
    """Print an error to standard error and exit with `code`"""
    err_console.print("[red]Error:[/red]", escape(message), soft_wrap=True)
    click.get_current_context().exit(code)


def configure_logging(verbose: bool):
    """Route library logging through rich on standard error"""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(message)s",
        handlers=[RichHandler(console=err_console, show_path=False)],
        force=True,
    )


def spinner() -> Progress:
    return Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        console=err_console,
        transient=True,
    )


def partition(workers: Optional[int], group_size: int) -> PartitionConfig:
    if workers is None:
        return PartitionConfig(group_size=group_size)
    return PartitionConfig(group_size=group_size, worker_count=workers)


@click.group()
@click.version_option(version=__version__)
@click.option("--verbose", "-v", is_flag=True, help="Show debug logging on stderr")
def main(verbose: bool):
    """
    Line Voxelizer - 3D line segment voxelization

    Voxelize segments with the parametric method or the candidate walk, run
    data-parallel batches, and benchmark both execution methods.
    """
    configure_logging(verbose)


@main.command()
@click.option("--start", required=True, type=POINT, help="Start point S as x,y,z")
@click.option("--end", required=True, type=POINT, help="End point E as x,y,z")
@click.option("--method", "-m", type=click.Choice([m.value for m in VoxelMethod]), default="parametric", show_default=True)
@click.option("--out", "-o", required=True, type=click.Path(dir_okay=False), help="Output file")
@click.option("--format", "-f", "fmt", type=click.Choice([f.value for f in VoxelFormat]), default="xyz", show_default=True)
def voxelize(start: Point3, end: Point3, method: str, out: str, fmt: str):
    """Voxelize a single segment"""
    seg = Segment(start=start, end=end)

    try:
        if VoxelMethod(method) == VoxelMethod.WALK:
            chain = voxelize_walk(seg)
        else:
            chain = voxelize_parametric(seg)
    except VoxelizerError as e:
        fail(str(e), EXIT_BAD_INPUT)

    try:
        write_chains([chain], out, fmt)
    except OSError as e:
        fail(f"cannot write {out}: {e}", EXIT_IO)

    console.print(f"[green]Wrote {len(chain)} voxels to {out}[/green] [dim]({method}, {fmt})[/dim]")


@main.command()
@click.option("--input", "-i", "input_path", required=True, type=click.Path(exists=True, dir_okay=False), help="Segment CSV")
@click.option("--out", "-o", required=True, type=click.Path(dir_okay=False), help="Output file")
@click.option("--format", "-f", "fmt", type=click.Choice([f.value for f in VoxelFormat]), default="xyz", show_default=True)
@click.option("--workers", "-w", type=click.IntRange(min=1), default=None, help="Worker threads [default: CPU count]")
@click.option("--group-size", "-g", type=click.IntRange(min=1), default=64, show_default=True, help="Segments per work-group")
def batch(input_path: str, out: str, fmt: str, workers: Optional[int], group_size: int):
    """Voxelize every segment of a CSV file with the batch engine"""
    try:
        segments = read_segments(input_path)
    except VoxelizerError as e:
        fail(f"{input_path}: {e}", EXIT_BAD_INPUT)
    except OSError as e:
        fail(f"cannot read {input_path}: {e}", EXIT_BAD_INPUT)

    if not segments:
        fail(f"{input_path} contains no segments", EXIT_BAD_INPUT)

    engine = BatchEngine(partition(workers, group_size))
    try:
        result = engine.run(segments)
    except VoxelizerError as e:
        fail(str(e), EXIT_BAD_INPUT)

    try:
        write_chains(result.chains, out, fmt, batch=True)
    except OSError as e:
        fail(f"cannot write {out}: {e}", EXIT_IO)

    timing = result.timing
    err_console.print(
        f"preprocess {timing.preprocess_ns / 1e6:.3f} ms | "
        f"kernel {timing.kernel_ns / 1e6:.3f} ms | "
        f"assemble {timing.assemble_ns / 1e6:.3f} ms"
    )
    err_console.print(
        f"[dim]{engine.config.worker_count} workers, group size {engine.config.group_size}, "
        f"{result.items.live} live / {result.items.redundant} redundant items[/dim]"
    )
    console.print(f"[green]Wrote {len(result.chains)} chains ({result.total_voxels} voxels) to {out}[/green]")


@main.command()
@click.option("--scenario", "-s", "scenario_name", required=True, type=click.Choice(list(SCENARIOS)), help="Workload shape")
@click.option("--seed", default=0, show_default=True, type=click.IntRange(min=0))
@click.option("--reps", default=5, show_default=True, type=click.IntRange(min=1), help="Measured repetitions")
@click.option("--warmup", default=2, show_default=True, type=click.IntRange(min=0), help="Discarded warm-up runs")
@click.option("--scale", default=1.0, show_default=True, type=float, help="Multiplier for the default parameter points")
@click.option("--report", required=True, type=click.Path(dir_okay=False), help="CSV report path")
@click.option("--report-json", required=True, type=click.Path(dir_okay=False), help="JSON report path")
@click.option("--workers", "-w", type=click.IntRange(min=1), default=None, help="Worker threads [default: CPU count]")
@click.option("--group-size", "-g", type=click.IntRange(min=1), default=64, show_default=True)
def bench(
    scenario_name: str,
    seed: int,
    reps: int,
    warmup: int,
    scale: float,
    report: str,
    report_json: str,
    workers: Optional[int],
    group_size: int,
):
    """Benchmark sequential against batch voxelization"""
    try:
        settings = BenchSettings(scale=scale)
        scenario = settings.scenario(SCENARIOS[scenario_name], seed=seed, repetitions=reps, warmup=warmup)
        cfg = partition(workers, group_size)
    except ValidationError as e:
        fail(str(e), EXIT_BAD_INPUT)

    with spinner() as progress:
        task = progress.add_task(f"Running {scenario.label}...", total=None)

        def on_record(record):
            progress.update(
                task,
                description=f"{scenario.label}: {record.method.value} @ {record.parameter} "
                            f"-> {record.mvps:.2f} MVps",
            )

        try:
            records = BenchHarness(cfg, on_record=on_record).run_scenario(scenario)
        except VoxelizerError as e:
            fail(str(e), EXIT_BAD_INPUT)

    try:
        write_report_csv(records, report)
        write_report_json(records, report_json, report_metadata(scenario, cfg, scale))
    except OSError as e:
        fail(f"cannot write report: {e}", EXIT_IO)

    table = Table(
        title=f"Benchmark: {scenario.label}",
        box=box.ROUNDED,
        title_style="bold magenta",
    )
    table.add_column("Parameter", justify="right", style="cyan")
    table.add_column("Method")
    table.add_column("Workers", justify="right")
    table.add_column("Group", justify="right")
    table.add_column("Median ms", justify="right")
    table.add_column("Voxels", justify="right")
    table.add_column("MVps", justify="right", style="bold")

    for record in records:
        table.add_row(
            str(record.parameter),
            record.method.value,
            str(record.workers),
            str(record.group_size),
            f"{record.median_ms:.3f}",
            str(record.total_voxels),
            f"{record.mvps:.2f}",
        )

    console.print(table)
    console.print(f"\n[dim]Reports written to {report} and {report_json}[/dim]")


@main.command()
@click.option("--count", "-n", required=True, type=click.IntRange(min=1), help="Number of segments")
@click.option("--length", "-l", type=click.IntRange(min=1), default=None, help="Step count of every segment")
@click.option("--total", "-t", type=click.IntRange(min=1), default=None, help="Total step count, spread log-uniformly")
@click.option("--seed", default=0, show_default=True, type=click.IntRange(min=0))
@click.option("--out", "-o", required=True, type=click.Path(dir_okay=False), help="Segment CSV to write")
def generate(count: int, length: Optional[int], total: Optional[int], seed: int, out: str):
    """Generate a seeded segment CSV for the batch command"""
    if (length is None) == (total is None):
        fail("give exactly one of --length and --total", EXIT_BAD_INPUT)

    try:
        if length is not None:
            segments = [gen_segment_of_length(length, child_seed(seed, i)) for i in range(count)]
            comment = f"{count} segments of length {length}, seed {seed}"
        else:
            segments = gen_arbitrary_batch(total, count, seed)
            comment = f"{count} segments totalling {total} steps, seed {seed}"
    except VoxelizerError as e:
        fail(str(e), EXIT_BAD_INPUT)

    try:
        write_segments(segments, out, comment=comment)
    except OSError as e:
        fail(f"cannot write {out}: {e}", EXIT_IO)

    console.print(f"[green]Wrote {len(segments)} segments to {out}[/green]")


@main.command()
@click.option("--samples", "-n", default=1000, show_default=True, type=click.IntRange(min=1))
@click.option("--seed", default=0, show_default=True, type=click.IntRange(min=0))
@click.option("--bound", "-b", default=50.0, show_default=True, type=click.FloatRange(min=0.0, min_open=True), help="Endpoints are drawn from [-B, B]^3")
def verify(samples: int, seed: int, bound: float):
    """Check chain invariants and compare the parametric method against the walk"""
    segments = random_segments(samples, seed, bound)
    parametric_failures = 0
    walk_failures = 0
    interior_failures = 0

    with spinner() as progress:
        progress.add_task(f"Checking {samples} segments...", total=None)

        for seg in segments:
            if chain_violations(voxelize_parametric(seg)):
                parametric_failures += 1
            walk = voxelize_walk(seg)
            if chain_violations(walk):
                walk_failures += 1
            if interior_violations(walk):
                interior_failures += 1

        survey = run_oracle_survey(segments)

    table = Table(title="Verification", box=box.ROUNDED, title_style="bold magenta")
    table.add_column("Check")
    table.add_column("Result", justify="right")

    def status(failures: int) -> str:
        return "[green]pass[/green]" if failures == 0 else f"[red]{failures} failed[/red]"

    table.add_row("Parametric chain invariants", status(parametric_failures))
    table.add_row("Walk chain invariants", status(walk_failures))
    table.add_row("Walk interior two-neighbour property", status(interior_failures))
    table.add_row("Identical chains", f"{survey.identical}/{survey.samples}")
    table.add_row("Equivalent within ties", f"{survey.acceptable}/{survey.samples}")
    table.add_row("Counterexamples", str(len(survey.counterexamples)))
    table.add_row("Parametric skippable voxels", str(survey.parametric_skippable))
    table.add_row("Walk distance-bound excursions", str(survey.walk_distance_excursions))
    table.add_row("Walk length-bound excursions", str(survey.walk_length_excursions))
    console.print(table)

    if parametric_failures or walk_failures or interior_failures:
        fail("chain invariants violated", EXIT_FAILED)


if __name__ == "__main__":
    main()
