"""System matrix assembly and test-problem generation."""

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np
from scipy import sparse

from ..config import settings
from ..linalg.operators import cgls_warm_start
from ..linalg.sparse import SparseMatrix, spmv
from ..linalg.volume import Volume, check_dims
from ..models import ProblemSpec
from ..objective.problem import TvRegProblem
from .geometry import ProjectionGeometry, trace_ray
from .lebedev import lebedev_directions
from .phantom import shepp_logan_3d

logger = logging.getLogger(__name__)

PRESETS: dict[str, ProblemSpec] = {
    "T1": ProblemSpec(name="T1", dims=(43, 43, 43), p=63, n_proj=37),
    "T2": ProblemSpec(name="T2", dims=(43, 43, 43), p=63, n_proj=13),
    "T1-desk": ProblemSpec(name="T1-desk", dims=(21, 21, 21), p=31, n_proj=37),
    "T2-desk": ProblemSpec(name="T2-desk", dims=(21, 21, 21), p=31, n_proj=13),
}

# Full-scale presets take minutes to assemble
LONG_RUNNING_PRESETS = frozenset({"T1", "T2"})


def get_preset(name: str) -> ProblemSpec:
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; available: {', '.join(PRESETS)}")
    return PRESETS[name]


def _trace_direction(
    geometry: ProjectionGeometry, dims: tuple[int, int, int], index: int
) -> list[tuple[np.ndarray, np.ndarray]]:
    direction = geometry.directions[index]
    rows = []
    for origin in geometry.ray_origins(index):
        cols, lengths = trace_ray(dims, origin, direction)
        if cols.size:
            rows.append((cols, lengths))
    return rows


def build_system_matrix(
    geometry: ProjectionGeometry,
    dims: tuple[int, ...],
    threads: int | None = None,
) -> SparseMatrix:
    """
    Assemble the path-length matrix A with a_ij = length of ray i in voxel j.

    Rows are ordered by direction, then detector row (v), then detector column
    (u). Rays that miss the cube are purged.

    Args:
        geometry: Projection geometry
        dims: Grid shape
        threads: Worker threads (defaults to the configured thread count)

    Returns:
        SparseMatrix with one row per intersecting ray
    """
    dims = check_dims(dims)
    n_voxels = dims[0] * dims[1] * dims[2]
    workers = threads or settings.threads

    with ThreadPoolExecutor(max_workers=workers) as pool:
        per_direction = list(
            pool.map(lambda i: _trace_direction(geometry, dims, i), range(geometry.n_proj))
        )

    rows = [row for direction_rows in per_direction for row in direction_rows]
    A, _ = SparseMatrix.from_rows(rows, n_voxels).purge_zero_rows()
    logger.info(
        f"Assembled A: {A.rows} x {A.cols}, nnz={A.nnz} "
        f"({geometry.n_rays - A.rows} of {geometry.n_rays} rays purged)"
    )
    return A


def add_noise(b: np.ndarray, rel_level: float, seed: int = 0) -> np.ndarray:
    """
    Add Gaussian white noise scaled so that ||e|| / ||b|| = rel_level exactly.

    Args:
        b: Noise-free data
        rel_level: Relative noise level (>= 0)
        seed: Random seed

    Returns:
        b + e
    """
    if rel_level < 0:
        raise ValueError(f"noise level must be nonnegative, got {rel_level}")
    b = np.asarray(b, dtype=np.float64)
    if rel_level == 0:
        return b.copy()
    b_norm = float(np.linalg.norm(b))
    if b_norm == 0.0:
        raise ValueError("relative noise level is undefined for b = 0")
    e = np.random.default_rng(seed).standard_normal(b.size)
    e *= rel_level * b_norm / np.linalg.norm(e)
    return b + e


@dataclass
class TestProblem:
    """A generated tomography instance."""

    __test__ = False

    A: SparseMatrix
    b: np.ndarray
    x_exact: Volume
    spec: ProblemSpec

    def __post_init__(self) -> None:
        if self.b.size != self.A.rows:
            raise ValueError(f"b has length {self.b.size}, A has {self.A.rows} rows")

    def to_problem(self, alpha: float, tau: float) -> TvRegProblem:
        return TvRegProblem(self.A, self.b, alpha, tau, self.spec.dims)

    def warm_start(self, iters: int = 5) -> np.ndarray:
        return cgls_warm_start(self.A, self.b, iters)

    def save(self, path: Path | str) -> None:
        """Write an .npz bundle with the CSR arrays, b, x_exact and the spec."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        np.savez_compressed(
            path,
            indptr=self.A.indptr,
            indices=self.A.indices,
            values=self.A.values,
            shape=np.asarray(self.A.shape),
            b=self.b,
            x_exact=self.x_exact.data,
            spec=np.array(self.spec.model_dump_json()),
        )

    @classmethod
    def load(cls, path: Path | str) -> "TestProblem":
        with np.load(path) as data:
            spec = ProblemSpec.model_validate(json.loads(str(data["spec"])))
            csr = sparse.csr_matrix(
                (data["values"], data["indices"], data["indptr"]),
                shape=tuple(int(s) for s in data["shape"]),
            )
            return cls(
                A=SparseMatrix(csr),
                b=np.array(data["b"]),
                x_exact=Volume(dims=spec.dims, data=np.array(data["x_exact"])),
                spec=spec,
            )


class BuiltProblem(NamedTuple):
    test: TestProblem
    problem: TvRegProblem
    x0: np.ndarray


def generate_test_problem(spec: ProblemSpec, threads: int | None = None) -> TestProblem:
    """Phantom, geometry, matrix and noisy data for a problem spec."""
    x_exact = shepp_logan_3d(*spec.dims)
    geometry = ProjectionGeometry.for_grid(
        lebedev_directions(spec.n_proj), spec.p, spec.dims, spec.detector_width
    )
    A = build_system_matrix(geometry, spec.dims, threads)
    b = add_noise(spmv(A, x_exact.data), spec.noise, spec.seed)
    return TestProblem(A=A, b=b, x_exact=x_exact, spec=spec)


def make_test_problem(
    spec: ProblemSpec,
    alpha: float,
    tau: float,
    cgls_iters: int = 5,
    threads: int | None = None,
) -> BuiltProblem:
    """
    Build a complete TV reconstruction instance.

    Args:
        spec: Grid, detector, projection count, noise level and seed
        alpha: Regularization weight
        tau: Huber threshold
        cgls_iters: CGLS steps for the starting point
        threads: Worker threads for matrix assembly

    Returns:
        BuiltProblem(test problem, objective, CGLS warm start)
    """
    test = generate_test_problem(spec, threads)
    return BuiltProblem(test, test.to_problem(alpha, tau), test.warm_start(cgls_iters))


def load_problem_source(
    source: str,
    threads: int | None = None,
    seed: int | None = None,
) -> TestProblem:
    """
    A preset name or the path of a saved bundle.

    Args:
        source: Preset name or bundle path
        threads: Worker threads for matrix assembly
        seed: Noise seed replacing the preset's; a bundle's noise is fixed, so
            a seed other than the one it was built with is an error

    Returns:
        TestProblem
    """
    if source in PRESETS:
        if source in LONG_RUNNING_PRESETS:
            logger.warning(f"Preset {source} is full scale; assembly may take minutes")
        spec = PRESETS[source]
        if seed is not None:
            spec = spec.model_copy(update={"seed": seed})
        return generate_test_problem(spec, threads)
    path = Path(source)
    if not path.exists():
        raise ValueError(f"{source!r} is neither a preset ({', '.join(PRESETS)}) nor a file")
    test = TestProblem.load(path)
    if seed is not None and seed != test.spec.seed:
        raise ValueError(
            f"bundle {path.name} was built with noise seed {test.spec.seed}, not {seed}; "
            "rebuild it with 'tvreg build --seed'"
        )
    return test
