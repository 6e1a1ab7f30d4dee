"""Nesterov's optimal method with known strong convexity and Lipschitz constants."""

import logging
import math

import numpy as np

from ..models import SolverConfig, StopReason
from ..objective.base import SmoothObjective
from .base import ConvergenceHistory, CountingObjective, SolverResult, grad_map_norm

logger = logging.getLogger(__name__)


def theta_next(theta_k: float, ratio: float) -> float:
    """
    Positive root of theta^2 = (1 - theta) theta_k^2 + ratio * theta.

    Written as theta^2 + b theta - theta_k^2 = 0 with b = theta_k^2 - ratio; the
    root is evaluated in the form that avoids cancellation for either sign of b.
    """
    c = theta_k * theta_k
    b = c - ratio
    disc = math.sqrt(b * b + 4.0 * c)
    if b > 0:
        return 2.0 * c / (b + disc)
    return 0.5 * (disc - b)


def momentum(theta_k: float, theta_k1: float) -> float:
    """beta_k = theta_k (1 - theta_k) / (theta_k^2 + theta_{k+1})."""
    return theta_k * (1.0 - theta_k) / (theta_k * theta_k + theta_k1)


def initial_gamma(theta0: float, mu: float, L: float) -> float:
    """
    gamma_0 = theta0 (theta0 L - mu) / (1 - theta0).

    The rate bound that uses gamma_0 needs theta0 < 1. At theta0 = 1 the value is
    0 when mu = L (the method is plain gradient projection) and +inf otherwise.
    """
    numerator = theta0 * (theta0 * L - mu)
    if theta0 >= 1.0:
        return 0.0 if numerator == 0 else math.inf
    return numerator / (1.0 - theta0)


def nesterov_solve(
    f: SmoothObjective,
    config: SolverConfig,
    x0: np.ndarray,
    timing: bool = False,
) -> SolverResult:
    """
    Accelerated projected gradient with fixed step 1/L and momentum from mu/L.

    Args:
        f: Objective over the box
        config: Solver parameters; ``mu`` and ``L`` are required, ``theta0``
            defaults to sqrt(mu/L) (1 when mu = 0) and must be below 1 unless
            mu = 0 or mu = L
        x0: Starting point (projected on entry)
        timing: Record wall-clock time in the history

    Returns:
        SolverResult(x, history, stop_reason); a gradient-map stop is reported
        as GRAD_MAP_AT_Y since the test is ||G_L(y_k)|| <= eps_bar
    """
    if config.mu is None or config.L is None:
        raise ValueError("nesterov_solve requires known mu and L")
    mu, L = config.mu, config.L
    if mu > L:
        raise ValueError(f"mu ({mu}) must not exceed L ({L})")
    ratio = mu / L
    theta = config.theta0 if config.theta0 is not None else (math.sqrt(ratio) or 1.0)
    # theta0 = 1 is forced when mu = L and is the merely convex start when mu = 0
    unit_allowed = ratio == 0.0 or ratio == 1.0
    below_range = theta < math.sqrt(ratio) * (1.0 - 1e-12)
    if below_range or theta > 1.0 or (theta == 1.0 and not unit_allowed):
        raise ValueError(f"theta0 must lie in [sqrt(mu/L), 1) = [{math.sqrt(ratio):.6g}, 1)")

    counted = CountingObjective(f)
    history = ConvergenceHistory(timing=timing)

    x = counted.project(x0)
    y = x
    f_y, g_y = counted.value_and_gradient(y)
    x_new = counted.project(y - g_y / L)
    gm = grad_map_norm(L, y, x_new)
    history.append(0, f_y, gm, mu, L, counted)
    logger.info(f"Nesterov: start phi={f_y:.6e} mu={mu:.3e} L={L:.3e} theta0={theta:.4f}")

    for k in range(1, config.max_iters + 1):
        if k > 1:
            f_y, g_y = counted.value_and_gradient(y)
            x_new = counted.project(y - g_y / L)
            gm = grad_map_norm(L, y, x_new)
        history.append(k, counted.monitor_value(x_new), gm, mu, L, counted)
        if gm <= config.eps_bar:
            logger.info(f"Nesterov: converged after {k} iterations")
            return SolverResult(x_new, history, StopReason.GRAD_MAP_AT_Y)

        theta_new = theta_next(theta, ratio)
        y = x_new + momentum(theta, theta_new) * (x_new - x)
        x, theta = x_new, theta_new
        if k % 100 == 0:
            logger.debug(f"Nesterov iter {k}: phi={history.last.phi:.6e} ||G||={gm:.3e}")

    logger.info(f"Nesterov: reached max_iters={config.max_iters}, ||G||={gm:.3e}")
    return SolverResult(x, history, StopReason.MAX_ITERS)
