"""Shared fixtures and the --runslow switch."""

import numpy as np
import pytest
from scipy import sparse

from tvreg.config import settings
from tvreg.linalg import SparseMatrix
from tvreg.models import ProblemSpec
from tvreg.objective import random_box_quadratic
from tvreg.tomo import generate_test_problem


def pytest_addoption(parser):
    parser.addoption(
        "--runslow", action="store_true", default=False, help="run long desk-scale experiments"
    )


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(autouse=True)
def isolated_cache(tmp_path, monkeypatch):
    """Keep reference solutions out of the working tree."""
    cache = tmp_path / "reference-cache"
    monkeypatch.setattr(settings, "cache_dir", cache)
    return cache


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def random_sparse(rng):
    """Factory for random sparse matrices with nonnegative entries."""

    def make(rows: int, cols: int, density: float = 0.3) -> SparseMatrix:
        dense = rng.uniform(0.0, 1.0, (rows, cols))
        dense[rng.uniform(size=(rows, cols)) > density] = 0.0
        return SparseMatrix(sparse.csr_matrix(dense))

    return make


@pytest.fixture
def quadratic():
    return random_box_quadratic


@pytest.fixture(scope="session")
def tiny_tomo():
    """A 5x5x5 grid seen from 13 directions."""
    return generate_test_problem(ProblemSpec(name="tiny", dims=(5, 5, 5), p=7, n_proj=13))
