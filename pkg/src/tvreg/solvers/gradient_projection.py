"""Gradient projection with a backtracked step size."""

import logging

import numpy as np

from ..models import SolverConfig, StopReason
from ..objective.base import SmoothObjective
from .base import (
    ConvergenceHistory,
    CountingObjective,
    SolverResult,
    bt_step,
    grad_map_norm,
    resolve_estimates,
)

logger = logging.getLogger(__name__)


def gp_solve(
    f: SmoothObjective,
    config: SolverConfig,
    x0: np.ndarray,
    timing: bool = False,
) -> SolverResult:
    """
    Run x <- P(x - grad f(x) / L_k) with L_k found by backtracking.

    The step computed at the current iterate doubles as its stopping test
    ||G_L(x)|| <= eps_bar, so the returned point is always the last logged one.

    Args:
        f: Objective over the box
        config: Solver parameters (eps_bar, max_iters, L_init, rho_L)
        x0: Starting point (projected on entry)
        timing: Record wall-clock time in the history

    Returns:
        SolverResult(x, history, stop_reason)
    """
    counted = CountingObjective(f)
    history = ConvergenceHistory(timing=timing)
    _, L = resolve_estimates(f, config)

    x = counted.project(x0)
    bt = bt_step(counted, x, L, config.rho_L, max_backtracks=config.max_backtracks)
    gm = grad_map_norm(bt.L_tilde, x, bt.x)
    history.append(0, bt.f_y, gm, 0.0, bt.L_tilde, counted)
    logger.info(f"GP: start phi={bt.f_y:.6e} ||G||={gm:.3e}")

    if gm <= config.eps_bar:
        return SolverResult(x, history, StopReason.GRAD_MAP_AT_X)

    for k in range(1, config.max_iters + 1):
        x = bt.x
        if bt.grad_x is not None:
            f_x, g_x = bt.f_x, bt.grad_x
        else:
            f_x, g_x = counted.value_and_gradient(x)
        bt = bt_step(
            counted,
            x,
            bt.L_tilde,
            config.rho_L,
            f_y=f_x,
            grad_y=g_x,
            max_backtracks=config.max_backtracks,
        )
        gm = grad_map_norm(bt.L_tilde, x, bt.x)
        history.append(k, f_x, gm, 0.0, bt.L_tilde, counted)

        if gm <= config.eps_bar:
            logger.info(f"GP: converged after {k} iterations, phi={f_x:.6e}")
            return SolverResult(x, history, StopReason.GRAD_MAP_AT_X)
        if k % 100 == 0:
            logger.debug(f"GP iter {k}: phi={f_x:.6e} ||G||={gm:.3e} L={bt.L_tilde:.3e}")

    logger.info(f"GP: reached max_iters={config.max_iters}, ||G||={gm:.3e}")
    return SolverResult(x, history, StopReason.MAX_ITERS)
