"""Operator-level routines: spectral norm estimate and CGLS."""

import logging
from typing import Any

import numpy as np
from scipy.sparse.linalg import LinearOperator, aslinearoperator

logger = logging.getLogger(__name__)


def as_operator(op: Any) -> LinearOperator:
    """Convert a SparseMatrix, scipy sparse/dense matrix or LinearOperator."""
    if hasattr(op, "as_linear_operator"):
        return op.as_linear_operator()
    return aslinearoperator(op)


def power_iter_norm_sq(op: Any, iters: int = 100, seed: int = 0) -> float:
    """
    Estimate lambda_max(A^T A) = ||A||_2^2 by power iteration on A^T A.

    The estimate is the largest Rayleigh quotient ||A v||^2 seen over unit
    vectors v, so it never exceeds the true value and cannot decrease with
    more iterations.

    Args:
        op: Operator with forward and adjoint application
        iters: Number of power iterations (>= 1)
        seed: Seed of the random start vector

    Returns:
        Lower estimate of ||A||_2^2; 0 for the zero operator
    """
    if iters < 1:
        raise ValueError(f"iters must be >= 1, got {iters}")
    A = as_operator(op)
    n = A.shape[1]
    if n == 0:
        return 0.0

    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)

    best = 0.0
    for _ in range(iters):
        w = A.matvec(v)
        best = max(best, float(w @ w))
        z = A.rmatvec(w)
        z_norm = float(np.linalg.norm(z))
        if z_norm == 0.0:
            break
        v = z / z_norm
    return best


def cgls_warm_start(A: Any, b: np.ndarray, iters: int = 5) -> np.ndarray:
    """
    Run CGLS on min ||A x - b||^2 from x = 0.

    CG on the normal equations, applied matrix-free (A^T A is never formed).

    Args:
        A: System operator
        b: Right-hand side
        iters: Number of CGLS steps (>= 0)

    Returns:
        The iterate after ``iters`` steps
    """
    if iters < 0:
        raise ValueError(f"iters must be >= 0, got {iters}")
    op = as_operator(A)
    b = np.asarray(b, dtype=np.float64)
    if b.size != op.shape[0]:
        raise ValueError(f"cgls: rhs length {b.size} does not match {op.shape[0]} rows")

    x = np.zeros(op.shape[1])
    r = b.copy()
    s = op.rmatvec(r)
    p = s.copy()
    gamma = float(s @ s)

    for k in range(iters):
        if gamma == 0.0:
            break
        q = op.matvec(p)
        delta = float(q @ q)
        if delta == 0.0:
            break
        step = gamma / delta
        x += step * p
        r -= step * q
        s = op.rmatvec(r)
        gamma_new = float(s @ s)
        p = s + (gamma_new / gamma) * p
        gamma = gamma_new
        logger.debug(f"CGLS iteration {k + 1}: residual {np.linalg.norm(r):.3e}")

    return x
