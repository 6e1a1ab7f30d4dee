"""Box-constrained quadratics with known spectra."""

import hashlib

import numpy as np

from .base import SmoothObjective


class BoxQuadratic(SmoothObjective):
    """f(x) = 1/2 (x - c)^T H (x - c) over [0, 1]^N, H symmetric positive semidefinite."""

    def __init__(self, H: np.ndarray, c: np.ndarray):
        H = np.atleast_2d(np.asarray(H, dtype=np.float64))
        c = np.asarray(c, dtype=np.float64).ravel()
        if H.shape != (c.size, c.size):
            raise ValueError(f"H has shape {H.shape}, expected ({c.size}, {c.size})")
        self.H = 0.5 * (H + H.T)
        self.c = c
        self._eigenvalues: np.ndarray | None = None

    @classmethod
    def isotropic(cls, scale: float, c: np.ndarray) -> "BoxQuadratic":
        c = np.asarray(c, dtype=np.float64).ravel()
        return cls(scale * np.eye(c.size), c)

    @property
    def dim(self) -> int:
        return int(self.c.size)

    @property
    def eigenvalues(self) -> np.ndarray:
        if self._eigenvalues is None:
            self._eigenvalues = np.linalg.eigvalsh(self.H)
        return self._eigenvalues

    @property
    def mu(self) -> float:
        return max(float(self.eigenvalues[0]), 0.0)

    @property
    def L(self) -> float:
        return float(self.eigenvalues[-1])

    def value(self, x: np.ndarray) -> float:
        d = np.asarray(x, dtype=np.float64) - self.c
        return 0.5 * float(d @ (self.H @ d))

    def value_and_gradient(self, x: np.ndarray) -> tuple[float, np.ndarray]:
        d = np.asarray(x, dtype=np.float64) - self.c
        g = self.H @ d
        return 0.5 * float(d @ g), g

    def curvature_estimate(self) -> float:
        return self.L

    def fingerprint(self) -> str:
        h = hashlib.sha256()
        h.update(self.H.astype("<f8").tobytes())
        h.update(self.c.astype("<f8").tobytes())
        return h.hexdigest()


def random_box_quadratic(
    n: int,
    cond: float,
    seed: int = 0,
    interior: bool = True,
) -> BoxQuadratic:
    """
    Random quadratic with eigenvalues log-spaced in [1, cond].

    Args:
        n: Number of variables
        cond: Condition number lambda_max / lambda_min (>= 1)
        seed: Random seed
        interior: Center c inside the box (so the minimizer is c and f* = 0);
            otherwise c is drawn from [-0.5, 1.5]^n and the bounds are active

    Returns:
        BoxQuadratic with mu = 1 and L = cond
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if cond < 1:
        raise ValueError(f"cond must be >= 1, got {cond}")
    rng = np.random.default_rng(seed)
    eigenvalues = np.geomspace(1.0, cond, n) if n > 1 else np.array([1.0])
    basis, _ = np.linalg.qr(rng.standard_normal((n, n)))
    H = (basis * eigenvalues) @ basis.T
    if interior:
        c = rng.uniform(0.2, 0.8, n)
    else:
        c = rng.uniform(-0.5, 1.5, n)
    return BoxQuadratic(H, c)
