"""Gradient projection with Barzilai-Borwein steps and a nonmonotone line search."""

import logging
from collections import deque

import numpy as np

from ..models import SolverConfig, StopReason
from ..objective.base import SmoothObjective
from .base import (
    ROUNDOFF,
    ConvergenceHistory,
    CountingObjective,
    SolverError,
    SolverResult,
    grad_map_norm,
)

logger = logging.getLogger(__name__)

BETA_INIT = 0.95
STEP_MIN = 1e-10
STEP_MAX = 1e10
MAX_LINE_SEARCH = 40


def bb_step(dx: np.ndarray, dg: np.ndarray, previous: float) -> float:
    """
    Barzilai-Borwein step ||dx||^2 / <dx, dg>.

    Falls back to the previous step when the curvature <dx, dg> is not
    positive; the result is clipped to [1e-10, 1e10].
    """
    curvature = float(dx @ dg)
    if curvature > 0 and np.isfinite(curvature):
        step = float(dx @ dx) / curvature
    else:
        step = previous
    return float(np.clip(step, STEP_MIN, STEP_MAX))


def gpbb_solve(
    f: SmoothObjective,
    config: SolverConfig,
    x0: np.ndarray,
    timing: bool = False,
) -> SolverResult:
    """
    Gradient projection with BB step lengths.

    Each iteration starts from beta = 0.95 and squares beta until
    f(x_bar) < f_hat - sigma * grad f(x)^T (x - x_bar), where f_hat is the
    largest of the last K+1 objective values. The stopping test uses the
    gradient map with the first trial constant 1 / (0.95 theta_k).

    Args:
        f: Objective over the box
        config: Solver parameters (eps_bar, max_iters, gpbb_K, gpbb_sigma)
        x0: Starting point (projected on entry)
        timing: Record wall-clock time in the history

    Returns:
        SolverResult(x, history, stop_reason)
    """
    counted = CountingObjective(f)
    history = ConvergenceHistory(timing=timing)
    sigma = config.gpbb_sigma

    x = counted.project(x0)
    f_x, g_x = counted.value_and_gradient(x)
    recent: deque[float] = deque([f_x], maxlen=config.gpbb_K + 1)
    theta = 1.0

    def stopping_norm() -> tuple[float, float]:
        nu = 1.0 / (BETA_INIT * theta)
        return grad_map_norm(nu, x, counted.project(x - g_x / nu)), nu

    gm, nu = stopping_norm()
    history.append(0, f_x, gm, 0.0, nu, counted)
    logger.info(f"GPBB: start phi={f_x:.6e} ||G||={gm:.3e}")
    if gm <= config.eps_bar:
        return SolverResult(x, history, StopReason.GRAD_MAP_AT_X)

    for k in range(1, config.max_iters + 1):
        f_hat = max(recent)
        beta = BETA_INIT
        for _ in range(MAX_LINE_SEARCH):
            x_bar = counted.project(x - beta * theta * g_x)
            f_bar = counted.value(x_bar)
            decrease = sigma * float(g_x @ (x - x_bar))
            if f_bar < f_hat - decrease + ROUNDOFF * abs(f_hat):
                break
            beta *= beta
        else:
            raise SolverError(f"GPBB line search failed after {MAX_LINE_SEARCH} reductions")

        f_new, g_new = counted.value_and_gradient(x_bar)
        theta = bb_step(x_bar - x, g_new - g_x, theta)
        x, f_x, g_x = x_bar, f_new, g_new
        recent.append(f_x)

        gm, nu = stopping_norm()
        history.append(k, f_x, gm, 0.0, nu, counted)
        if gm <= config.eps_bar:
            logger.info(f"GPBB: converged after {k} iterations, phi={f_x:.6e}")
            return SolverResult(x, history, StopReason.GRAD_MAP_AT_X)
        if k % 100 == 0:
            logger.debug(f"GPBB iter {k}: phi={f_x:.6e} ||G||={gm:.3e} theta={theta:.3e}")

    logger.info(f"GPBB: reached max_iters={config.max_iters}, ||G||={gm:.3e}")
    return SolverResult(x, history, StopReason.MAX_ITERS)
