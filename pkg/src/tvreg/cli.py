"""CLI interface for the TV reconstruction benchmark."""

import logging
import sys
from pathlib import Path
from typing import Any

import click
import numpy as np
from dotenv import dotenv_values
from rich.console import Console
from rich.logging import RichHandler
from rich.progress import BarColumn, MofNCompleteColumn, Progress, SpinnerColumn, TextColumn
from rich.table import Table

from . import __version__
from .analysis import ConvergenceAnalyzer
from .bench import ReferenceNotConvergedError, compute_reference, run_experiment, save_reference
from .config import settings
from .linalg.volume import check_dims
from .models import Algorithm, ExperimentConfig, ProblemSpec, RunRecord, SolverConfig, StopReason
from .objective.problem import theory_params
from .objective.quadratic import random_box_quadratic
from .reporters import verify_manifest
from .solvers import solve
from .tomo import (
    PRESETS,
    ProjectionGeometry,
    build_system_matrix,
    generate_test_problem,
    get_preset,
    lebedev_directions,
    load_problem_source,
    shepp_logan_3d,
)

console = Console()

# Configure logging
logging.basicConfig(
    level=logging.WARNING,
    format="%(message)s",
    datefmt="[%X]",
    handlers=[RichHandler(rich_tracebacks=True, console=console)],
)
logger = logging.getLogger("tvreg")

ALGORITHMS = [a.value for a in Algorithm]

# Exit codes
EXIT_CONVERGED = 0
EXIT_ERROR = 1
EXIT_MAX_ITERS = 2


def setup_logging(verbose: bool) -> None:
    """Configure logging based on verbosity."""
    level = logging.DEBUG if verbose else settings.log_level.upper()
    logging.getLogger("tvreg").setLevel(level)


def _fail(e: BaseException, verbose: bool) -> None:
    console.print(f"[red]Error: {e}[/red]")
    if verbose:
        console.print_exception()
    sys.exit(EXIT_ERROR)


def _parse_dims(value: str) -> tuple[int, int, int]:
    try:
        parts = tuple(int(v) for v in value.split(","))
    except ValueError:
        raise click.BadParameter(f"expected m,n,l integers, got {value!r}")
    return check_dims(parts)


def _progress() -> Progress:
    return Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        MofNCompleteColumn(),
        console=console,
    )


def _print_records(records: list[RunRecord]) -> None:
    analyzer = ConvergenceAnalyzer()
    table = Table(title="Runs")
    for column in ("Solver", "alpha", "tau", "Stop", "Iterations", "Rel. subopt.", "||G||", "f-evals"):
        table.add_column(column)
    for record in records:
        last = record.history[-1]
        style = "green" if record.stop_reason.converged else "yellow"
        table.add_row(
            record.algorithm.value,
            f"{record.alpha:g}",
            f"{record.tau:g}",
            f"[{style}]{record.stop_reason.value}[/{style}]",
            str(record.iterations),
            f"{analyzer.rel_subopt(record)[-1]:.3e}",
            f"{last.grad_map_norm:.3e}",
            str(last.fevals),
        )
    console.print(table)


def _exit_code(records: list[RunRecord]) -> int:
    if any(r.stop_reason is StopReason.MAX_ITERS for r in records):
        return EXIT_MAX_ITERS
    return EXIT_CONVERGED


def _run(config: ExperimentConfig, title: str) -> list[RunRecord]:
    n_cells = len(config.alphas) * len(config.taus) * len(config.solvers)
    with _progress() as progress:
        task = progress.add_task(title, total=n_cells)
        result = run_experiment(config, on_cell_done=lambda _: progress.advance(task))
    console.print(f"\n[bold]Output:[/bold] {config.out} ({len(result.files)} files)")
    console.print(f"  - Manifest: {result.manifest}")
    return result.records


@click.group()
@click.version_option(version=__version__)
def cli():
    """Projected gradient solvers for TV-regularized tomographic reconstruction."""
    pass


@cli.command(name="solve")
@click.option("--problem", "-p", default="T1-desk", help="Preset name or problem bundle (.npz)")
@click.option("--algorithm", "-a", type=click.Choice(ALGORITHMS), default="upn")
@click.option("--alpha", type=float, default=1.0, help="Regularization weight")
@click.option("--tau", type=float, default=1e-4, help="Huber threshold")
@click.option("--eps-bar", type=float, default=1e-6, help="Gradient-map tolerance")
@click.option("--max-iters", type=int, default=5000)
@click.option("--seed", type=int, default=None, help="Noise seed of a preset problem")
@click.option("--out", "-o", type=click.Path(), default=None, help="Output directory")
@click.option(
    "--reference",
    "reference_path",
    type=click.Path(exists=True),
    default=None,
    help="Precomputed reference (.npz); computed and cached otherwise",
)
@click.option("--save-solution", is_flag=True, help="Write the final x as a binary volume")
@click.option("--timing", is_flag=True, help="Record wall-clock time per iteration")
@click.option("--verbose", "-v", is_flag=True, help="Enable verbose output")
def solve_problem(
    problem: str,
    algorithm: str,
    alpha: float,
    tau: float,
    eps_bar: float,
    max_iters: int,
    seed: int | None,
    out: str | None,
    reference_path: str | None,
    save_solution: bool,
    timing: bool,
    verbose: bool,
):
    """Run one solver on one test problem."""
    setup_logging(verbose)
    try:
        config = ExperimentConfig(
            problem=problem,
            solvers=[algorithm],
            alphas=[alpha],
            taus=[tau],
            eps_bar=eps_bar,
            max_iters=max_iters,
            seed=seed,
            out=Path(out) if out else settings.output_dir,
            reference_path=reference_path,
            save_solution=save_solution,
            timing=timing,
        )
        records = _run(config, f"Solving with {algorithm}")
        _print_records(records)
        sys.exit(_exit_code(records))
    except Exception as e:
        _fail(e, verbose)


@cli.command()
@click.option("--problem", "-p", default="T1-desk", help="Preset name or problem bundle (.npz)")
@click.option("--alpha", type=float, default=1.0)
@click.option("--tau", type=float, default=1e-4)
@click.option("--eps-bar", type=float, default=1e-6, help="Experiment tolerance (reference uses 1e-4 of it)")
@click.option("--max-iters", type=int, default=100000)
@click.option("--cgls-iters", type=int, default=5)
@click.option("--seed", type=int, default=None, help="Noise seed of a preset problem")
@click.option("--out", "-o", type=click.Path(), default=None, help="Also write the reference here (.npz)")
@click.option("--recompute", is_flag=True, help="Ignore the reference cache")
@click.option("--verbose", "-v", is_flag=True, help="Enable verbose output")
def reference(
    problem: str,
    alpha: float,
    tau: float,
    eps_bar: float,
    max_iters: int,
    cgls_iters: int,
    seed: int | None,
    out: str | None,
    recompute: bool,
    verbose: bool,
):
    """Compute a high-accuracy reference solution."""
    setup_logging(verbose)
    try:
        test = load_problem_source(problem, seed=seed)
        objective = test.to_problem(alpha, tau)
        with console.status("Computing reference..."):
            ref = compute_reference(
                objective,
                eps_bar,
                x0=test.warm_start(cgls_iters),
                max_iters=max_iters,
                use_cache=not recompute,
            )
        console.print(f"phi* = {ref.phi_star:.17g}" + (" (cached)" if ref.cached else ""))
        if out:
            save_reference(out, ref)
            console.print(f"Reference written to {out}")
    except ReferenceNotConvergedError as e:
        console.print(f"[yellow]Partial result: phi = {e.phi:.17g}[/yellow]")
        _fail(e, verbose)
    except Exception as e:
        _fail(e, verbose)


@cli.command()
@click.option("--dims", "-d", required=True, help="Grid size m,n,l")
@click.option("--out", "-o", type=click.Path(), required=True)
@click.option("--format", "fmt", type=click.Choice(["text", "binary"]), default="text")
@click.option("--verbose", "-v", is_flag=True, help="Enable verbose output")
def phantom(dims: str, out: str, fmt: str, verbose: bool):
    """Write the 3D Shepp-Logan phantom."""
    setup_logging(verbose)
    try:
        volume = shepp_logan_3d(*_parse_dims(dims))
        if fmt == "binary":
            volume.save_binary(out)
        else:
            volume.save_text(out)
        values = ", ".join(f"{v:g}" for v in np.unique(volume.data))
        console.print(f"Phantom {volume.dims} written to {out} (values: {values})")
    except click.BadParameter:
        raise
    except Exception as e:
        _fail(e, verbose)


@cli.command()
@click.option("--preset", type=click.Choice(list(PRESETS)), required=True)
@click.option("--out", "-o", type=click.Path(), required=True, help="Matrix Market file (.mtx)")
@click.option("--geometry", type=click.Path(), default=None, help="Also write the direction manifest")
@click.option("--verbose", "-v", is_flag=True, help="Enable verbose output")
def matrix(preset: str, out: str, geometry: str | None, verbose: bool):
    """Export the system matrix of a preset."""
    setup_logging(verbose)
    try:
        spec = get_preset(preset)
        geom = ProjectionGeometry.for_grid(
            lebedev_directions(spec.n_proj), spec.p, spec.dims, spec.detector_width
        )
        with console.status(f"Assembling {preset}..."):
            A = build_system_matrix(geom, spec.dims)
        A.save_matrix_market(out, comment=f"{preset}: dims={spec.dims} p={spec.p} n_proj={spec.n_proj}")
        if geometry:
            geom.write_manifest(geometry)
        console.print(f"A: {A.rows} x {A.cols}, nnz={A.nnz} written to {out}")
    except Exception as e:
        _fail(e, verbose)


@cli.command()
@click.option("--preset", type=click.Choice(list(PRESETS)), default=None)
@click.option("--dims", "-d", default=None, help="Custom grid m,n,l")
@click.option("--p", "p", type=int, default=None, help="Detector pixels per side")
@click.option("--n-proj", type=int, default=None, help="Number of projections (13 or 37)")
@click.option("--noise", type=float, default=None, help="Relative noise level")
@click.option("--seed", type=int, default=None, help="Noise seed")
@click.option("--out", "-o", type=click.Path(), required=True, help="Bundle file (.npz)")
@click.option("--verbose", "-v", is_flag=True, help="Enable verbose output")
def build(
    preset: str | None,
    dims: str | None,
    p: int | None,
    n_proj: int | None,
    noise: float | None,
    seed: int | None,
    out: str,
    verbose: bool,
):
    """Generate a test problem and save it as a bundle."""
    setup_logging(verbose)
    try:
        base = get_preset(preset) if preset else ProblemSpec()
        overrides: dict[str, Any] = {
            "dims": _parse_dims(dims) if dims else None,
            "p": p,
            "n_proj": n_proj,
            "noise": noise,
            "seed": seed,
        }
        overrides = {k: v for k, v in overrides.items() if v is not None}
        if overrides:
            overrides["name"] = "custom"
        spec = ProblemSpec(**{**base.model_dump(), **overrides})
        with console.status("Building test problem..."):
            test = generate_test_problem(spec)
        test.save(out)
        console.print(f"{spec.name}: A {test.A.rows} x {test.A.cols}, nnz={test.A.nnz} written to {out}")
    except click.BadParameter:
        raise
    except Exception as e:
        _fail(e, verbose)


def merge_experiment_config(config_file: str | None, overrides: dict[str, Any]) -> ExperimentConfig:
    """Command line over config file over defaults."""
    values: dict[str, Any] = {}
    if config_file:
        values.update({k: v for k, v in dotenv_values(config_file).items() if v is not None})
    values.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig.model_validate(values)


@cli.command()
@click.option("--config", "config_file", type=click.Path(exists=True), default=None, help="key=value file")
@click.option("--problem", "-p", default=None)
@click.option("--solvers", default=None, help="Comma-separated solver list")
@click.option("--alphas", default=None, help="Comma-separated alpha grid")
@click.option("--taus", default=None, help="Comma-separated tau grid")
@click.option("--eps-bar", type=float, default=None)
@click.option("--max-iters", type=int, default=None)
@click.option("--seed", type=int, default=None, help="Noise seed of a preset problem")
@click.option("--out", "-o", type=click.Path(), default=None)
@click.option("--reference", type=click.Choice(["cached", "recompute"]), default=None)
@click.option("--save-solution/--no-save-solution", default=None)
@click.option("--timing/--no-timing", default=None)
@click.option("--verbose", "-v", is_flag=True, help="Enable verbose output")
def experiment(config_file: str | None, verbose: bool, **overrides: Any):
    """Run every (alpha, tau, solver) combination on one problem."""
    setup_logging(verbose)
    try:
        config = merge_experiment_config(config_file, overrides)
        records = _run(config, f"Experiment on {config.problem}")
        _print_records(records)
        sys.exit(_exit_code(records))
    except Exception as e:
        _fail(e, verbose)


@cli.command()
@click.option("--conds", default="1e2,1e3,1e4", help="Comma-separated condition numbers")
@click.option("--n", "n", type=int, default=50, help="Number of variables")
@click.option("--eps-bar", type=float, default=1e-8)
@click.option("--max-iters", type=int, default=100000)
@click.option("--seed", type=int, default=0)
@click.option("--verbose", "-v", is_flag=True, help="Enable verbose output")
def scaling(conds: str, n: int, eps_bar: float, max_iters: int, seed: int, verbose: bool):
    """Iteration growth of UPN and GPBB with the condition number."""
    setup_logging(verbose)
    try:
        conditions = [float(c) for c in conds.split(",")]
        analyzer = ConvergenceAnalyzer()
        table = Table(title=f"Iterations on random quadratics (n={n})")
        table.add_column("Q")
        counts: dict[Algorithm, list[int]] = {Algorithm.UPN: [], Algorithm.GPBB: []}
        for algorithm in counts:
            table.add_column(algorithm.value)
        for cond in conditions:
            f = random_box_quadratic(n, cond, seed)
            for algorithm in counts:
                config = SolverConfig(algorithm=algorithm, eps_bar=eps_bar, max_iters=max_iters)
                _, history, _ = solve(f, config, np.zeros(n))
                counts[algorithm].append(history.iterations)
            table.add_row(f"{cond:g}", *(str(counts[a][-1]) for a in counts))
        console.print(table)
        if len(conditions) > 1:
            for algorithm, values in counts.items():
                exponent = analyzer.growth_exponent(conditions, values)
                console.print(f"  {algorithm.value}: iterations ~ Q^{exponent:.3f}")
    except Exception as e:
        _fail(e, verbose)


@cli.command()
@click.option("--norm-a-sq", type=float, required=True, help="||A||_2^2")
@click.option("--sigma-min-sq", type=float, default=0.0, help="sigma_min(A)^2")
@click.option("--alpha", type=float, required=True)
@click.option("--tau", type=float, required=True)
def theory(norm_a_sq: float, sigma_min_sq: float, alpha: float, tau: float):
    """Print the strong convexity and Lipschitz bounds of the objective."""
    try:
        params = theory_params(norm_a_sq, sigma_min_sq, alpha, tau)
    except Exception as e:
        _fail(e, False)
    console.print(f"mu = {params.mu:.17g}")
    console.print(f"L  = {params.L:.17g}")
    console.print(f"Q  = {params.Q:.17g}" if params.Q is not None else "Q  = inf (mu = 0)")


@cli.command()
@click.argument("manifest", type=click.Path(exists=True))
def verify(manifest: str):
    """Check the hashes listed in an experiment manifest."""
    mismatched = verify_manifest(manifest)
    if mismatched:
        for name in mismatched:
            console.print(f"[red]mismatch: {name}[/red]")
        sys.exit(EXIT_ERROR)
    console.print("[green]All files match the manifest[/green]")


if __name__ == "__main__":
    cli()
