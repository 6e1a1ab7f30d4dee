"""Benchmark experiments: every (alpha, tau, solver) cell on one test problem."""

import logging
import time
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import NamedTuple

import numpy as np

from ..config import settings
from ..linalg.volume import Volume
from ..models import Algorithm, ExperimentConfig, RunRecord, SolverConfig
from ..objective.problem import TvRegProblem, theory_params
from ..reporters.history_reporter import emit_gnuplot_dat, emit_history_csv, write_manifest
from ..reporters.summary_reporter import SummaryReporter
from ..solvers import solve
from ..tomo.system import TestProblem, load_problem_source
from .reference import Reference, compute_reference, load_reference

logger = logging.getLogger(__name__)

# Allowed excess of the reference value over the best logged value, relative to |phi*|
REFERENCE_SLACK = 1e-12


class ExperimentResult(NamedTuple):
    records: list[RunRecord]
    files: list[Path]
    manifest: Path


def cell_stem(problem: str, alpha: float, tau: float, algorithm: Algorithm) -> str:
    """File stem of one cell, e.g. ``T1-desk_a1_t0.0001_upn``."""
    return f"{Path(problem).stem}_a{alpha:g}_t{tau:g}_{algorithm.value}"


def solver_config_for(
    config: ExperimentConfig,
    algorithm: Algorithm,
    problem: TvRegProblem,
) -> SolverConfig:
    """Solver parameters of one cell; Nesterov gets the global mu and L bounds."""
    params = {
        "algorithm": algorithm,
        "eps_bar": config.eps_bar,
        "max_iters": config.max_iters,
    }
    if algorithm is Algorithm.NESTEROV:
        theory = theory_params(problem.norm_A_sq(), config.sigma_min_sq, problem.alpha, problem.tau)
        params.update(mu=theory.mu, L=theory.L)
    return SolverConfig(**params)


def run_cell(
    config: ExperimentConfig,
    problem_name: str,
    problem: TvRegProblem,
    x0: np.ndarray,
    reference: Reference,
    algorithm: Algorithm,
) -> tuple[RunRecord, list[Path]]:
    """
    Run one solver on one (alpha, tau) instance and write its files.

    Args:
        config: Experiment configuration
        problem_name: Preset name or bundle path
        problem: Objective shared by all cells of this (alpha, tau)
        x0: Shared starting point
        reference: Reference solution for this (alpha, tau)
        algorithm: Solver to run

    Returns:
        (run record, written files)
    """
    solver_config = solver_config_for(config, algorithm, problem)
    logger.info(
        f"Running {algorithm.value} on {problem_name} "
        f"(alpha={problem.alpha:g}, tau={problem.tau:g})"
    )
    start = time.perf_counter()
    x, history, stop_reason = solve(problem, solver_config, x0, config.timing)
    elapsed = time.perf_counter() - start

    best = min(r.phi for r in history)
    violation = None
    if reference.phi_star > best + REFERENCE_SLACK * abs(reference.phi_star):
        violation = (reference.phi_star - best) / abs(reference.phi_star)
        logger.warning(
            f"{algorithm.value}: logged phi {best:.17g} is below the reference "
            f"{reference.phi_star:.17g}; tighten the reference tolerance"
        )

    stem = cell_stem(problem_name, problem.alpha, problem.tau, algorithm)
    out = Path(config.out)
    solution_path = None
    files: list[Path] = []
    if config.save_solution:
        solution_path = out / f"{stem}.vol"
        Volume(dims=problem.dims, data=x).save_binary(solution_path)
        files.append(solution_path)

    record = RunRecord(
        problem=problem_name,
        algorithm=algorithm,
        alpha=problem.alpha,
        tau=problem.tau,
        config=solver_config.model_dump(mode="json"),
        history=list(history),
        restart_events=list(history.restarts),
        stop_reason=stop_reason,
        phi_star=reference.phi_star,
        reference_violation=violation,
        solution_path=str(solution_path) if solution_path else None,
        timings={"solve_s": elapsed},
    )
    files.insert(0, emit_gnuplot_dat(record, out / f"{stem}.dat"))
    files.insert(0, emit_history_csv(record, out / f"{stem}.csv"))
    logger.info(
        f"{algorithm.value}: {stop_reason.value} after {record.iterations} iterations "
        f"({elapsed:.2f}s)"
    )
    return record, files


def resolve_reference(
    config: ExperimentConfig,
    problem: TvRegProblem,
    x0: np.ndarray,
) -> Reference:
    if config.reference_path is not None:
        reference = load_reference(config.reference_path)
        if reference.x_star.size != problem.dim:
            raise ValueError(
                f"reference has {reference.x_star.size} entries, problem has {problem.dim}"
            )
        return reference
    return compute_reference(
        problem,
        config.eps_bar,
        x0=x0,
        max_iters=config.reference_max_iters,
        use_cache=config.reference == "cached",
    )


def run_experiment(
    config: ExperimentConfig,
    test_problem: TestProblem | None = None,
    threads: int | None = None,
    on_cell_done: Callable[[RunRecord], None] | None = None,
) -> ExperimentResult:
    """
    Run every (alpha, tau, solver) cell of an experiment.

    All cells share the test problem, the CGLS starting point and, per (alpha, tau),
    the reference solution. Cells run concurrently on worker threads; each cell
    writes its own CSV and gnuplot files. A failing cell does not discard the
    files of the others: the manifest is written before the error propagates.

    Args:
        config: Experiment configuration
        test_problem: Pre-built instance (built from ``config.problem`` otherwise)
        threads: Worker threads (defaults to the configured thread count)
        on_cell_done: Called with each record as its cell finishes

    Returns:
        ExperimentResult(records in grid order, emitted files, manifest path)
    """
    test = test_problem or load_problem_source(config.problem, threads, config.seed)
    x0 = test.warm_start(config.cgls_iters)
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    workers = threads or settings.threads

    instances = []
    for alpha in config.alphas:
        for tau in config.taus:
            problem = test.to_problem(alpha, tau)
            # cached before the cells share the problem across threads
            problem.norm_A_sq()
            instances.append((problem, resolve_reference(config, problem, x0)))

    records: list[RunRecord] = []
    files: list[Path] = []
    error: BaseException | None = None
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(run_cell, config, config.problem, problem, x0, reference, algorithm)
            for problem, reference in instances
            for algorithm in config.solvers
        ]
        for future in futures:
            try:
                record, cell_files = future.result()
            except Exception as e:
                logger.error(f"Experiment cell failed: {e}")
                error = error or e
                continue
            records.append(record)
            files.extend(cell_files)
            if on_cell_done is not None:
                on_cell_done(record)

    if records:
        files.extend(SummaryReporter().save(records, out, title=config.problem))
    violations = {
        cell_stem(r.problem, r.alpha, r.tau, r.algorithm): r.reference_violation
        for r in records
        if r.reference_violation is not None
    }
    manifest = write_manifest(out, files, config.model_dump(mode="json"), violations)
    if error is not None:
        raise error
    return ExperimentResult(records, files, manifest)
