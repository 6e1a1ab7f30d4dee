"""First-order solvers for smooth objectives over the unit box."""

from collections.abc import Callable

import numpy as np

from ..models import Algorithm, SolverConfig
from ..objective.base import SmoothObjective
from .base import (
    BtResult,
    ConvergenceHistory,
    CountingObjective,
    SolverError,
    SolverResult,
    SolverState,
    bt_step,
    descent_condition_holds,
    gradient_condition_holds,
    resolve_estimates,
)
from .gpbb import bb_step, gpbb_solve
from .gradient_projection import gp_solve
from .nesterov import initial_gamma, momentum, nesterov_solve, theta_next
from .upn import restart_check, update_mu, upn0_solve, upn_solve

SolverFn = Callable[[SmoothObjective, SolverConfig, np.ndarray, bool], SolverResult]

SOLVERS: dict[Algorithm, SolverFn] = {
    Algorithm.GP: gp_solve,
    Algorithm.GPBB: gpbb_solve,
    Algorithm.NESTEROV: nesterov_solve,
    Algorithm.UPN: upn_solve,
    Algorithm.UPN0: upn0_solve,
}


def solve(
    f: SmoothObjective,
    config: SolverConfig,
    x0: np.ndarray,
    timing: bool = False,
) -> SolverResult:
    """Run the solver named by ``config.algorithm``."""
    return SOLVERS[config.algorithm](f, config, x0, timing)


__all__ = [
    "SOLVERS",
    "BtResult",
    "ConvergenceHistory",
    "CountingObjective",
    "SolverError",
    "SolverResult",
    "SolverState",
    "bb_step",
    "bt_step",
    "descent_condition_holds",
    "gp_solve",
    "gradient_condition_holds",
    "gpbb_solve",
    "initial_gamma",
    "momentum",
    "nesterov_solve",
    "resolve_estimates",
    "restart_check",
    "solve",
    "theta_next",
    "update_mu",
    "upn0_solve",
    "upn_solve",
]
