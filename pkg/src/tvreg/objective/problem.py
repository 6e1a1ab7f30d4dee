"""The TV-regularized least-squares objective."""

import hashlib
import logging
from dataclasses import dataclass

import numpy as np

from ..linalg.operators import power_iter_norm_sq
from ..linalg.sparse import SparseMatrix, spmv, spmv_t
from ..linalg.volume import Volume, check_dims
from ..models import TheoryParams
from ..tv.difference import D_NORM_SQ_BOUND, DiffOperator
from ..tv.huber import huber_of_norms, tv_value_grad
from .base import SmoothObjective

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ObjEval:
    """Value, gradient and squared residual norm of phi at a point."""

    value: float
    gradient: np.ndarray
    residual_norm_sq: float


class TvRegProblem(SmoothObjective):
    """
    phi(x) = 1/2 ||A x - b||^2 + alpha * T_tau(x) over the box [0, 1]^N.

    Args:
        A: System matrix with N = m*n*l columns
        b: Data vector with one entry per row of A
        alpha: Regularization weight (>= 0; 0 gives plain least squares)
        tau: Huber threshold (> 0)
        dims: Grid shape (m, n, l)
    """

    def __init__(
        self,
        A: SparseMatrix,
        b: np.ndarray,
        alpha: float,
        tau: float,
        dims: tuple[int, ...],
    ):
        self.dims = check_dims(dims)
        self.diff = DiffOperator(self.dims)
        n_voxels = self.diff.n_voxels
        if A.cols != n_voxels:
            raise ValueError(f"A has {A.cols} columns, grid {self.dims} has {n_voxels} voxels")
        b = np.asarray(b, dtype=np.float64).ravel()
        if b.size != A.rows:
            raise ValueError(f"b has length {b.size}, A has {A.rows} rows")
        if not alpha >= 0:
            raise ValueError(f"alpha must be nonnegative, got {alpha}")
        if not tau > 0:
            raise ValueError(f"tau must be positive, got {tau}")

        self.A = A
        self.b = b
        self.alpha = float(alpha)
        self.tau = float(tau)
        self._norm_A_sq: float | None = None

    @property
    def dim(self) -> int:
        return self.diff.n_voxels

    def _vector(self, x: Volume | np.ndarray) -> np.ndarray:
        if isinstance(x, Volume):
            if x.dims != self.dims:
                raise ValueError(f"volume dims {x.dims} do not match problem dims {self.dims}")
            return x.data
        x = np.asarray(x, dtype=np.float64).ravel()
        if x.size != self.dim:
            raise ValueError(f"x has length {x.size}, problem has {self.dim} variables")
        return x

    def evaluate(self, x: Volume | np.ndarray) -> ObjEval:
        """One spmv, one spmv_t and one TV pass."""
        x = self._vector(x)
        residual = spmv(self.A, x) - self.b
        residual_norm_sq = float(residual @ residual)
        gradient = spmv_t(self.A, residual)
        value = 0.5 * residual_norm_sq
        if self.alpha != 0.0:
            tv = tv_value_grad(self.diff, x, self.tau)
            value += self.alpha * tv.value
            gradient += self.alpha * tv.gradient
        return ObjEval(value=value, gradient=gradient, residual_norm_sq=residual_norm_sq)

    def value(self, x: np.ndarray) -> float:
        x = self._vector(x)
        residual = spmv(self.A, x) - self.b
        value = 0.5 * float(residual @ residual)
        if self.alpha != 0.0:
            Dx = self.diff.apply(x).reshape(-1, 3)
            norms = np.sqrt(np.einsum("ij,ij->i", Dx, Dx))
            value += self.alpha * float(np.sum(huber_of_norms(norms, self.tau)))
        return value

    def value_and_gradient(self, x: np.ndarray) -> tuple[float, np.ndarray]:
        ev = self.evaluate(x)
        return ev.value, ev.gradient

    def norm_A_sq(self) -> float:
        """Power-iteration estimate of ||A||_2^2 (computed once)."""
        if self._norm_A_sq is None:
            self._norm_A_sq = power_iter_norm_sq(self.A)
            logger.debug(f"||A||^2 estimate: {self._norm_A_sq:.6g}")
        return self._norm_A_sq

    def curvature_estimate(self) -> float:
        return self.norm_A_sq()

    def fingerprint(self) -> str:
        h = hashlib.sha256()
        h.update(np.asarray(self.dims, dtype="<i8").tobytes())
        h.update(np.asarray(self.A.shape, dtype="<i8").tobytes())
        h.update(self.A.indptr.astype("<i8").tobytes())
        h.update(self.A.indices.astype("<i8").tobytes())
        h.update(self.A.values.astype("<f8").tobytes())
        h.update(self.b.astype("<f8").tobytes())
        h.update(np.array([self.alpha, self.tau], dtype="<f8").tobytes())
        return h.hexdigest()

    def __repr__(self) -> str:
        return (
            f"TvRegProblem(dims={self.dims}, A={self.A.shape}, "
            f"alpha={self.alpha:g}, tau={self.tau:g})"
        )


def phi_value_grad(p: TvRegProblem, x: Volume | np.ndarray) -> ObjEval:
    return p.evaluate(x)


def theory_params(
    norm_A_sq: float,
    sigma_min_sq: float,
    alpha: float,
    tau: float,
) -> TheoryParams:
    """
    Strong convexity and Lipschitz bounds of phi.

    mu = sigma_min(A)^2, L = ||A||^2 + 12 alpha / tau, Q = L / mu when mu > 0.
    These are bounds; no tightness is claimed.
    """
    if not norm_A_sq > 0:
        raise ValueError(f"norm_A_sq must be positive, got {norm_A_sq}")
    if sigma_min_sq < 0:
        raise ValueError(f"sigma_min_sq must be nonnegative, got {sigma_min_sq}")
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    mu = float(sigma_min_sq)
    L = float(norm_A_sq) + alpha * D_NORM_SQ_BOUND / tau
    return TheoryParams(mu=mu, L=L, Q=L / mu if mu > 0 else None)
