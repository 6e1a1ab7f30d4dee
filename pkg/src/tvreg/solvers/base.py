"""Shared solver machinery: evaluation accounting, history, backtracking."""

import logging
import math
import time
from collections.abc import Iterator
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ..models import HistoryRecord, RestartEvent, SolverConfig, StopReason
from ..objective.base import SmoothObjective

logger = logging.getLogger(__name__)

# Relative roundoff allowance in sufficient-decrease tests
ROUNDOFF = 10.0 * np.finfo(np.float64).eps

# Below this relative change in f, function differences carry no curvature information
CHANGE_TOL = 1e-10


class SolverError(RuntimeError):
    """Raised when a solver cannot continue (broken objective or exhausted safeguards)."""


class CountingObjective:
    """Wrap an objective, count evaluations and reject non-finite results."""

    def __init__(self, f: SmoothObjective):
        self.f = f
        self.fevals = 0
        self.gevals = 0

    @property
    def dim(self) -> int:
        return self.f.dim

    def project(self, x: np.ndarray) -> np.ndarray:
        return self.f.project(x)

    def value(self, x: np.ndarray) -> float:
        self.fevals += 1
        value = self.f.value(x)
        if not math.isfinite(value):
            raise SolverError(f"objective value is not finite ({value})")
        return value

    def value_and_gradient(self, x: np.ndarray) -> tuple[float, np.ndarray]:
        self.fevals += 1
        self.gevals += 1
        value, grad = self.f.value_and_gradient(x)
        if not math.isfinite(value) or not np.all(np.isfinite(grad)):
            raise SolverError("objective value or gradient is not finite")
        return value, grad

    def gradient(self, x: np.ndarray) -> np.ndarray:
        """Gradient only, counted as a gradient evaluation."""
        self.gevals += 1
        _, grad = self.f.value_and_gradient(x)
        if not np.all(np.isfinite(grad)):
            raise SolverError("objective gradient is not finite")
        return grad

    def monitor_value(self, x: np.ndarray) -> float:
        """Uncounted evaluation used only for logging."""
        return self.f.value(x)


class ConvergenceHistory:
    """Append-only per-iteration log of a solver run."""

    def __init__(self, timing: bool = False):
        self.records: list[HistoryRecord] = []
        self.restarts: list[RestartEvent] = []
        self.timing = timing
        self._start = time.perf_counter()

    def append(
        self,
        iter: int,
        phi: float,
        grad_map_norm: float,
        mu_k: float,
        L_k: float,
        counter: CountingObjective,
    ) -> None:
        if self.records and iter <= self.records[-1].iter:
            raise ValueError(f"history iteration {iter} does not follow {self.records[-1].iter}")
        self.records.append(
            HistoryRecord(
                iter=iter,
                phi=phi,
                grad_map_norm=grad_map_norm,
                mu_k=mu_k,
                L_k=L_k,
                restarts=len(self.restarts),
                fevals=counter.fevals,
                gevals=counter.gevals,
                wall_s=time.perf_counter() - self._start if self.timing else 0.0,
            )
        )

    def add_restart(self, event: RestartEvent) -> None:
        self.restarts.append(event)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[HistoryRecord]:
        return iter(self.records)

    def __getitem__(self, index: int) -> HistoryRecord:
        return self.records[index]

    @property
    def last(self) -> HistoryRecord:
        return self.records[-1]

    @property
    def iterations(self) -> int:
        return max(len(self.records) - 1, 0)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records], dtype=np.float64)


class SolverResult(NamedTuple):
    x: np.ndarray
    history: ConvergenceHistory
    stop_reason: StopReason


@dataclass
class SolverState:
    """Iteration state of the accelerated solvers within one restart stage."""

    x: np.ndarray
    y: np.ndarray
    theta_k: float
    mu_k: float
    L_k: float
    L_tilde: float
    L0: float
    G0_norm_sq: float
    gamma_1: float = 0.0
    log_prod: float = 0.0
    iter: int = 0
    f_x: float = 0.0

    @property
    def prod_factor(self) -> float:
        """Running product of (1 - sqrt(mu_i / L_i)) over the stage."""
        return math.exp(self.log_prod)

    def accumulate_rate(self) -> None:
        ratio = self.mu_k / self.L_k
        if ratio >= 1.0:
            self.log_prod = -math.inf
        elif ratio > 0.0:
            self.log_prod += math.log1p(-math.sqrt(ratio))


class BtResult(NamedTuple):
    x: np.ndarray
    L_tilde: float
    n_backtracks: int
    f_x: float
    f_y: float
    grad_y: np.ndarray
    grad_x: np.ndarray | None = None


def at_roundoff_level(f_x: float, f_y: float) -> bool:
    """Whether f(x) - f(y) is too small relative to |f| to be resolved in floating point."""
    return abs(f_x - f_y) < CHANGE_TOL * max(abs(f_x), abs(f_y))


def descent_condition_holds(
    f_x: float,
    f_y: float,
    grad_y: np.ndarray,
    d: np.ndarray,
    L: float,
) -> bool:
    """f(x) <= f(y) + grad f(y)^T d + L/2 ||d||^2 with d = x - y, up to roundoff in f."""
    bound = f_y + float(grad_y @ d) + 0.5 * L * float(d @ d)
    return f_x <= bound + ROUNDOFF * max(abs(f_x), abs(f_y))


def gradient_condition_holds(
    grad_x: np.ndarray,
    grad_y: np.ndarray,
    x: np.ndarray,
    y: np.ndarray,
    L: float,
) -> bool:
    """
    <grad f(x) - grad f(y), x - y> <= L ||x - y||^2, up to roundoff in the gradients.

    Gradients carry absolute errors of order eps * (||grad f|| + L ||x||) before
    their difference is formed.
    """
    d = x - y
    d_norm = float(np.linalg.norm(d))
    scale = (
        float(np.linalg.norm(grad_x))
        + float(np.linalg.norm(grad_y))
        + L * (float(np.linalg.norm(x)) + float(np.linalg.norm(y)))
    )
    return float((grad_x - grad_y) @ d) <= L * d_norm * d_norm + ROUNDOFF * scale * d_norm


def bt_step(
    f: CountingObjective,
    y: np.ndarray,
    L_bar: float,
    rho_L: float,
    f_y: float | None = None,
    grad_y: np.ndarray | None = None,
    max_backtracks: int = 100,
) -> BtResult:
    """
    Projected gradient step with backtracking on the Lipschitz estimate.

    A trial constant L is accepted by the descent inequality on f. When f(x)
    and f(y) agree to within roundoff the inequality cannot be evaluated
    reliably, and the curvature test on gradients is used instead; the
    gradient at x is then returned in ``grad_x``.

    Args:
        f: Counted objective
        y: Point to step from
        L_bar: Initial Lipschitz estimate (> 0)
        rho_L: Increase factor (> 1)
        f_y: f(y), if already known
        grad_y: grad f(y), if already known
        max_backtracks: Hard cap on increases

    Returns:
        BtResult with x = P(y - grad f(y) / L_tilde) and L_tilde = L_bar * rho_L**n
    """
    if not L_bar > 0:
        raise ValueError(f"L_bar must be positive, got {L_bar}")
    if not rho_L > 1:
        raise ValueError(f"rho_L must exceed 1, got {rho_L}")
    if f_y is None or grad_y is None:
        f_y, grad_y = f.value_and_gradient(y)

    L = L_bar
    for n in range(max_backtracks + 1):
        x = f.project(y - grad_y / L)
        f_x = f.value(x)
        grad_x = None
        if np.any(x != y) and at_roundoff_level(f_x, f_y):
            grad_x = f.gradient(x)
            accepted = gradient_condition_holds(grad_x, grad_y, x, y, L)
        else:
            accepted = descent_condition_holds(f_x, f_y, grad_y, x - y, L)
        if accepted:
            return BtResult(
                x=x, L_tilde=L, n_backtracks=n, f_x=f_x, f_y=f_y, grad_y=grad_y, grad_x=grad_x
            )
        L *= rho_L
    raise SolverError(
        f"backtracking exceeded {max_backtracks} increases (L reached {L:.3e}); "
        "the objective gradient is likely inconsistent"
    )


def resolve_estimates(f: SmoothObjective, config: SolverConfig) -> tuple[float, float]:
    """
    Fill in the initial (mu_bar, L_bar).

    L_bar defaults to a tenth of the objective's curvature estimate (BT repairs
    underestimates) and mu_bar to a tenth of L_bar.
    """
    L_init = config.L_init
    if L_init is None:
        L_init = f.curvature_estimate() / 10.0
        if not L_init > 0:
            L_init = 1.0
    mu_init = config.mu_init if config.mu_init is not None else 0.1 * L_init
    return mu_init, L_init


def grad_map_norm(nu: float, x: np.ndarray, x_plus: np.ndarray) -> float:
    """||G_nu(x)|| given the projected step x_plus = P(x - grad f(x) / nu)."""
    return nu * float(np.linalg.norm(x - x_plus))
