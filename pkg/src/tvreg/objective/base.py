"""Smooth objective interface over the unit box and the formulas built on it."""

from abc import ABC, abstractmethod

import numpy as np


def project_box(x: np.ndarray) -> np.ndarray:
    """Clamp entrywise to [0, 1]."""
    return np.clip(np.asarray(x, dtype=np.float64), 0.0, 1.0)


class SmoothObjective(ABC):
    """A convex function with Lipschitz gradient minimized over Q = [0, 1]^N."""

    @property
    @abstractmethod
    def dim(self) -> int:
        """Number of variables N."""

    @abstractmethod
    def value(self, x: np.ndarray) -> float:
        """Function value only."""

    @abstractmethod
    def value_and_gradient(self, x: np.ndarray) -> tuple[float, np.ndarray]:
        """Function value and gradient in one evaluation."""

    @abstractmethod
    def fingerprint(self) -> str:
        """Content hash identifying the objective (used as a cache key)."""

    @abstractmethod
    def curvature_estimate(self) -> float:
        """Cheap estimate of the largest curvature of the smooth data term."""

    def project(self, x: np.ndarray) -> np.ndarray:
        return project_box(x)


def gradient_map(
    f: SmoothObjective,
    x: np.ndarray,
    nu: float,
    grad: np.ndarray | None = None,
) -> np.ndarray:
    """
    Gradient map G_nu(x) = nu * (x - P_Q(x - grad f(x) / nu)).

    Args:
        f: Objective
        x: Point
        nu: Inverse step (> 0)
        grad: Gradient at x, if already known

    Returns:
        G_nu(x)
    """
    if not nu > 0:
        raise ValueError(f"nu must be positive, got {nu}")
    if grad is None:
        _, grad = f.value_and_gradient(x)
    return nu * (x - f.project(x - grad / nu))


def local_mu(
    f_x: float,
    f_y: float,
    grad_y: np.ndarray,
    x: np.ndarray,
    y: np.ndarray,
) -> float:
    """
    Local strong-convexity estimate M(x, y).

    (f(x) - f(y) - grad f(y)^T (x - y)) / (||x - y||^2 / 2), or +inf when x == y.
    Negative values from cancellation are returned unchanged.
    """
    d = x - y
    d_sq = float(d @ d)
    if d_sq == 0.0:
        return float("inf")
    return (f_x - f_y - float(grad_y @ d)) / (0.5 * d_sq)
