"""Huber function and the smoothed total variation."""

from dataclasses import dataclass

import numpy as np

from ..linalg.volume import Volume
from .difference import DiffOperator


def _check_tau(tau: float) -> None:
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")


def huber(z: np.ndarray, tau: float) -> float:
    """
    Huber smoothing of the Euclidean norm of a 3-vector.

    ||z|| - tau/2 when ||z|| >= tau, else ||z||^2 / (2 tau).
    """
    _check_tau(tau)
    r = float(np.linalg.norm(np.asarray(z, dtype=np.float64)))
    if r >= tau:
        return r - 0.5 * tau
    return r * r / (2.0 * tau)


def huber_of_norms(norms: np.ndarray, tau: float) -> np.ndarray:
    """Vectorized Huber function applied to precomputed norms."""
    _check_tau(tau)
    return np.where(norms >= tau, norms - 0.5 * tau, norms * norms / (2.0 * tau))


@dataclass(frozen=True)
class TvEval:
    """Value and gradient of T_tau at a point."""

    value: float
    gradient: np.ndarray


def tv_value_grad(op: DiffOperator, x: Volume | np.ndarray, tau: float) -> TvEval:
    """
    Evaluate the smoothed TV and its gradient in one pass.

    value = sum_j huber(D_j x), gradient = sum_j D_j^T D_j x / max(tau, ||D_j x||).

    Args:
        op: Difference operator of the grid
        x: Point (volume or flat vector of length N)
        tau: Huber threshold (> 0)

    Returns:
        TvEval with value and gradient
    """
    _check_tau(tau)
    Dx = op.apply(x).reshape(-1, 3)
    norms = np.sqrt(np.einsum("ij,ij->i", Dx, Dx))
    value = float(np.sum(huber_of_norms(norms, tau)))
    scaled = Dx / np.maximum(norms, tau)[:, None]
    return TvEval(value=value, gradient=op.apply_adjoint(scaled.ravel()))
