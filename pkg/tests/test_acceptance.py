"""Desk-scale experiments; run with ``pytest --runslow``."""

import numpy as np
import pytest

from tvreg.analysis import ConvergenceAnalyzer
from tvreg.bench import run_experiment
from tvreg.config import settings
from tvreg.models import Algorithm, ExperimentConfig, SolverConfig
from tvreg.objective import random_box_quadratic
from tvreg.solvers import solve
from tvreg.tomo import PRESETS, generate_test_problem

pytestmark = pytest.mark.slow

# References are solved to 1e-4 of this; step lengths of 1e-8 / L stay well above
# the rounding level of the desk-scale iterates
DESK_EPS_BAR = 1e-4


@pytest.fixture(scope="module", autouse=True)
def isolated_cache(tmp_path_factory):
    """One reference cache for the module, so each (problem, alpha, tau) is solved once."""
    previous = settings.cache_dir
    settings.cache_dir = tmp_path_factory.mktemp("reference-cache")
    yield settings.cache_dir
    settings.cache_dir = previous


@pytest.fixture(scope="module")
def t1_desk():
    return generate_test_problem(PRESETS["T1-desk"])


@pytest.fixture(scope="module")
def t2_desk():
    return generate_test_problem(PRESETS["T2-desk"])


def by_algorithm(records):
    return {r.algorithm: r for r in records}


def experiment(tmp_path, problem, solvers, alpha=1.0, tau=1e-4, **overrides):
    values = {"eps_bar": DESK_EPS_BAR, "max_iters": 20000, **overrides}
    return ExperimentConfig(
        problem=problem,
        solvers=solvers,
        alphas=[alpha],
        taus=[tau],
        out=tmp_path / problem,
        **values,
    )


class TestRestarts:
    def test_strong_regularization_restarts(self, t1_desk, tmp_path):
        config = experiment(tmp_path, "T1-desk", [Algorithm.UPN], alpha=100.0)
        record = run_experiment(config, test_problem=t1_desk).records[0]
        assert record.restart_events
        for event in record.restart_events:
            assert event.mu_bar == pytest.approx(0.7 * event.mu_k, rel=1e-15)

    def test_no_restart_at_unit_alpha(self, t1_desk, tmp_path):
        config = experiment(tmp_path, "T1-desk", [Algorithm.UPN])
        record = run_experiment(config, test_problem=t1_desk).records[0]
        assert record.restart_events == []


def test_upn_linear_convergence_on_t1(t1_desk, tmp_path):
    solvers = [Algorithm.GP, Algorithm.GPBB, Algorithm.UPN, Algorithm.UPN0]
    result = run_experiment(experiment(tmp_path, "T1-desk", solvers), test_problem=t1_desk)
    analyzer = ConvergenceAnalyzer()
    records = by_algorithm(result.records)
    rel = {a: analyzer.rel_subopt(r) for a, r in records.items()}

    fit = analyzer.tail_fit(rel[Algorithm.UPN])
    assert fit is not None and fit.r_squared >= 0.95

    def k_at(algorithm, level):
        k = analyzer.iterations_to_level(rel[algorithm], level)
        return np.inf if k is None else k

    assert k_at(Algorithm.UPN, 1e-6) < k_at(Algorithm.UPN0, 1e-6)
    assert k_at(Algorithm.UPN, 1e-6) < k_at(Algorithm.GPBB, 1e-6)

    coarse = [k_at(a, 1e-2) for a in solvers]
    assert max(coarse) <= 3 * max(min(coarse), 1)


def test_upn_linear_convergence_without_full_rank(t2_desk, tmp_path):
    solvers = [Algorithm.GP, Algorithm.GPBB, Algorithm.UPN]
    result = run_experiment(experiment(tmp_path, "T2-desk", solvers), test_problem=t2_desk)
    analyzer = ConvergenceAnalyzer()
    records = by_algorithm(result.records)

    upn = analyzer.rel_subopt(records[Algorithm.UPN])
    k_upn = analyzer.iterations_to_level(upn, 1e-6)
    assert k_upn is not None
    fit = analyzer.tail_fit(upn)
    assert fit is not None and fit.r_squared >= 0.95

    for algorithm in (Algorithm.GP, Algorithm.GPBB):
        k = analyzer.iterations_to_level(analyzer.rel_subopt(records[algorithm]), 1e-6)
        assert k is None or k > k_upn


def test_iteration_growth_with_condition_number():
    conditions = [1e2, 1e3, 1e4]
    analyzer = ConvergenceAnalyzer()
    exponents = {}
    for algorithm in (Algorithm.UPN, Algorithm.GPBB):
        config = SolverConfig(algorithm=algorithm, eps_bar=1e-8, max_iters=200000)
        counts = []
        for cond in conditions:
            per_seed = []
            for seed in range(3):
                f = random_box_quadratic(50, cond, seed=seed, interior=False)
                _, history, reason = solve(f, config, np.full(50, 0.5))
                assert reason.converged
                per_seed.append(history.iterations)
            counts.append(float(np.mean(per_seed)))
        exponents[algorithm] = analyzer.growth_exponent(conditions, counts)
    assert exponents[Algorithm.UPN] <= 0.6
    assert exponents[Algorithm.GPBB] >= 0.8


def test_desk_experiment_is_byte_identical(t2_desk, tmp_path):
    solvers = [Algorithm.GPBB, Algorithm.UPN]
    first = run_experiment(
        experiment(tmp_path / "a", "T2-desk", solvers, max_iters=300), test_problem=t2_desk
    )
    second = run_experiment(
        experiment(tmp_path / "b", "T2-desk", solvers, max_iters=300),
        test_problem=t2_desk,
        threads=2,
    )
    csvs = [(a, b) for a, b in zip(first.files, second.files) if a.suffix == ".csv"]
    assert csvs
    for a, b in csvs:
        assert a.read_bytes() == b.read_bytes()
