"""Nesterov's method with estimated strong convexity and Lipschitz parameters.

Each iteration backtracks on L at y_k, takes a second backtracked step from
x_{k+1} for the stopping test, lowers the running mu estimate with the local
curvature M(x_k, y_k) and checks the restart bound. A violated bound restarts
the method from x_{k+1} with mu_bar = rho_mu * mu_k and L_bar = L_k.
"""

import logging
import math

import numpy as np

from ..models import RestartEvent, SolverConfig, StopReason
from ..objective.base import SmoothObjective, local_mu
from .base import (
    ConvergenceHistory,
    CountingObjective,
    SolverError,
    SolverResult,
    SolverState,
    bt_step,
    grad_map_norm,
    resolve_estimates,
)
from .nesterov import initial_gamma, momentum, theta_next

logger = logging.getLogger(__name__)

# Relative size of f below which the numerator of M(x, y) is taken as cancellation noise
MU_NUMERATOR_TOL = 1e-12


def update_mu(
    mu_prev: float,
    f_x: float,
    f_y: float,
    grad_y: np.ndarray,
    x: np.ndarray,
    y: np.ndarray,
    L_k: float,
) -> float:
    """
    mu_k = min(mu_{k-1}, max(M(x, y), 0), L_k).

    When f(x) - f(y) - grad f(y)^T (x - y) is no larger than the rounding error
    of f, M carries no information and mu_{k-1} is kept (capped by L_k).
    """
    numerator = f_x - f_y - float(grad_y @ (x - y))
    if abs(numerator) <= MU_NUMERATOR_TOL * max(abs(f_x), abs(f_y)):
        return min(mu_prev, L_k)
    M = local_mu(f_x, f_y, grad_y, x, y)
    return min(mu_prev, max(M, 0.0), L_k)


def restart_check(state: SolverState, G_new_norm_sq: float) -> bool:
    """
    Whether the stage's convergence bound is violated.

    Tests
        ||G||^2 / (2 L_tilde) <= prod_i (1 - sqrt(mu_i/L_i))
                                 * (2/mu_k - 1/(2 L_0) + 2 gamma_1 / mu_k^2) * ||G_0||^2
    and returns True (restart) only when mu_k != 0 and the inequality fails.
    """
    mu = state.mu_k
    if mu == 0.0:
        return False
    factor = 2.0 / mu - 1.0 / (2.0 * state.L0) + 2.0 * state.gamma_1 / (mu * mu)
    if not math.isfinite(factor):
        return False
    lhs = 0.5 * G_new_norm_sq / state.L_tilde
    rhs = state.prod_factor * factor * state.G0_norm_sq
    return lhs > rhs


def _run(
    f: SmoothObjective,
    config: SolverConfig,
    x0: np.ndarray,
    timing: bool,
    estimate_mu: bool,
) -> SolverResult:
    counted = CountingObjective(f)
    history = ConvergenceHistory(timing=timing)
    name = "UPN" if estimate_mu else "UPN0"
    rho_L = config.rho_L
    eps_bar = config.eps_bar

    mu_bar, L_bar = resolve_estimates(f, config)
    if not estimate_mu:
        mu_bar = 0.0

    x_start = counted.project(x0)
    f_start, g_start = counted.value_and_gradient(x_start)
    it = 0
    restarts = 0

    while True:
        # Stage start: projected gradient step x_1 = BT(x_0)
        bt = bt_step(
            counted, x_start, L_bar, rho_L, f_start, g_start, max_backtracks=config.max_backtracks
        )
        L0 = bt.L_tilde
        mu0 = min(mu_bar, L0)
        G0_norm = grad_map_norm(L0, x_start, bt.x)
        if it == 0:
            history.append(0, f_start, G0_norm, mu0, L0, counted)
            logger.info(
                f"{name}: start phi={f_start:.6e} mu_bar={mu_bar:.3e} L_bar={L_bar:.3e}"
            )
        if it >= config.max_iters:
            return SolverResult(x_start, history, StopReason.MAX_ITERS)
        it += 1
        history.append(it, bt.f_x, G0_norm, mu0, L0, counted)
        if G0_norm <= eps_bar:
            logger.info(f"{name}: converged at stage start, iteration {it}")
            return SolverResult(bt.x, history, StopReason.GRAD_MAP_AT_X)

        if config.theta0 is not None:
            theta1 = config.theta0
        elif estimate_mu:
            theta1 = math.sqrt(mu0 / L0)
        else:
            theta1 = 1.0

        state = SolverState(
            x=bt.x,
            y=bt.x,
            theta_k=theta1,
            mu_k=mu0,
            L_k=L0,
            L_tilde=L0,
            L0=L0,
            G0_norm_sq=G0_norm * G0_norm,
            iter=it,
            f_x=bt.f_x,
        )
        restarted = False
        k = 1

        while not restarted:
            if it >= config.max_iters:
                logger.info(f"{name}: reached max_iters={config.max_iters}")
                return SolverResult(state.x, history, StopReason.MAX_ITERS)

            f_y, g_y = counted.value_and_gradient(state.y)
            bt_y = bt_step(
                counted, state.y, state.L_k, rho_L, f_y, g_y, max_backtracks=config.max_backtracks
            )
            x_next, L_k = bt_y.x, bt_y.L_tilde
            if bt_y.grad_x is not None:
                f_next, g_next = bt_y.f_x, bt_y.grad_x
            else:
                f_next, g_next = counted.value_and_gradient(x_next)
            bt_x = bt_step(
                counted, x_next, L_k, rho_L, f_next, g_next, max_backtracks=config.max_backtracks
            )
            G_x_norm = grad_map_norm(bt_x.L_tilde, x_next, bt_x.x)
            G_y_norm = grad_map_norm(L_k, state.y, x_next)
            it += 1
            state.iter = it

            if G_x_norm <= eps_bar:
                history.append(it, bt_x.f_x, G_x_norm, state.mu_k, L_k, counted)
                logger.info(f"{name}: converged after {it} iterations, {restarts} restarts")
                return SolverResult(bt_x.x, history, StopReason.GRAD_MAP_AT_X)
            if G_y_norm <= eps_bar:
                history.append(it, f_next, G_y_norm, state.mu_k, L_k, counted)
                logger.info(f"{name}: converged after {it} iterations, {restarts} restarts")
                return SolverResult(x_next, history, StopReason.GRAD_MAP_AT_Y)

            if estimate_mu:
                mu_k = update_mu(state.mu_k, state.f_x, f_y, g_y, state.x, state.y, L_k)
            else:
                mu_k = 0.0
            state.mu_k = mu_k
            state.L_k = L_k
            state.L_tilde = bt_x.L_tilde
            history.append(it, f_next, G_x_norm, mu_k, L_k, counted)

            if k == 1:
                state.gamma_1 = initial_gamma(state.theta_k, mu_k, L_k)
            state.accumulate_rate()

            if estimate_mu and restart_check(state, G_x_norm * G_x_norm):
                restarts += 1
                if restarts > config.max_restarts:
                    raise SolverError(f"{name}: exceeded {config.max_restarts} restarts")
                mu_bar = config.rho_mu * mu_k
                L_bar = L_k
                history.add_restart(
                    RestartEvent(iter=it, mu_k=mu_k, mu_bar=mu_bar, L_k=L_k)
                )
                logger.debug(f"{name}: restart {restarts} at iter {it}, mu_bar={mu_bar:.3e}")
                x_start, f_start, g_start = x_next, f_next, g_next
                restarted = True
                continue

            theta_new = theta_next(state.theta_k, mu_k / L_k)
            beta = momentum(state.theta_k, theta_new)
            state.y = x_next + beta * (x_next - state.x)
            state.x, state.f_x = x_next, f_next
            state.theta_k = theta_new
            k += 1
            if it % 100 == 0:
                logger.debug(
                    f"{name} iter {it}: phi={f_next:.6e} ||G||={G_x_norm:.3e} "
                    f"mu={mu_k:.3e} L={L_k:.3e}"
                )


def upn_solve(
    f: SmoothObjective,
    config: SolverConfig,
    x0: np.ndarray,
    timing: bool = False,
) -> SolverResult:
    """
    Run UPN with mu/L estimation, backtracking and restarts.

    Args:
        f: Objective over the box
        config: Solver parameters (eps_bar, max_iters, mu_init, L_init, rho_L,
            rho_mu, max_restarts; theta0 overrides theta_1 = sqrt(mu_0/L_0))
        x0: Starting point (projected on entry)
        timing: Record wall-clock time in the history

    Returns:
        SolverResult(x, history, stop_reason); restart events are in history.restarts
    """
    return _run(f, config, x0, timing, estimate_mu=True)


def upn0_solve(
    f: SmoothObjective,
    config: SolverConfig,
    x0: np.ndarray,
    timing: bool = False,
) -> SolverResult:
    """UPN with mu_k = 0 throughout, theta_1 = 1 and no restarts."""
    return _run(f, config.model_copy(update={"theta0": None}), x0, timing, estimate_mu=False)
