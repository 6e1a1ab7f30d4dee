"""Data models for solvers, problems and experiments."""

from enum import Enum
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, Field, computed_field, field_validator, model_validator


class Algorithm(str, Enum):
    """Solvers available to the benchmark."""

    GP = "gp"
    GPBB = "gpbb"
    NESTEROV = "nesterov"
    UPN = "upn"
    UPN0 = "upn0"


class StopReason(str, Enum):
    """Why a solver run terminated; exactly one per run."""

    GRAD_MAP_AT_X = "grad_map_at_x"  # ||G_{L~}(x)|| <= eps_bar
    GRAD_MAP_AT_Y = "grad_map_at_y"  # ||G_L(y)|| <= eps_bar
    MAX_ITERS = "max_iters"

    @property
    def converged(self) -> bool:
        """True for the gradient-map stops."""
        return self is not StopReason.MAX_ITERS


class SolverConfig(BaseModel):
    """Parameters shared by all solvers.

    Unset initial estimates (``mu_init``, ``L_init``) are resolved from the objective
    before a run: ``L_init`` is a power-iteration curvature estimate divided by 10 and
    ``mu_init`` is ``L_init / 10``.
    """

    algorithm: Algorithm = Algorithm.UPN
    eps_bar: float = Field(default=1e-6, gt=0)
    max_iters: int = Field(default=5000, ge=0)
    mu_init: float | None = Field(default=None, ge=0)
    L_init: float | None = Field(default=None, gt=0)
    rho_L: float = Field(default=1.5, gt=1)
    rho_mu: float = Field(default=0.7, gt=0, lt=1)
    gpbb_K: int = Field(default=2, ge=0)
    gpbb_sigma: float = Field(default=1e-4, ge=0, le=1)

    # Known parameters for the Nesterov baseline; theta0 also overrides UPN's theta_1
    mu: float | None = Field(default=None, ge=0)
    L: float | None = Field(default=None, gt=0)
    theta0: float | None = Field(default=None, gt=0, le=1)

    max_backtracks: int = Field(default=100, ge=1)
    max_restarts: int = Field(default=200, ge=0)


class HistoryRecord(BaseModel):
    """One row of a convergence history."""

    iter: int
    phi: float
    grad_map_norm: float
    mu_k: float
    L_k: float
    restarts: int = 0
    fevals: int = 0
    gevals: int = 0
    wall_s: float = 0.0


class RestartEvent(BaseModel):
    """A restart of UPN: the stage is reset with mu_bar = rho_mu * mu_k."""

    iter: int
    mu_k: float
    mu_bar: float
    L_k: float


class TheoryParams(BaseModel):
    """Strong convexity and Lipschitz bounds for the TV objective."""

    mu: float = Field(ge=0)
    L: float = Field(gt=0)
    Q: float | None = None

    @computed_field
    @property
    def strongly_convex(self) -> bool:
        """Whether Q is defined (mu > 0)."""
        return self.mu > 0


class LogLinearFit(BaseModel):
    """Least-squares line through log10 values."""

    slope: float
    intercept: float
    r_squared: float
    n_points: int


class ProblemSpec(BaseModel):
    """Parameters of a tomography test problem."""

    name: str = "custom"
    dims: tuple[int, int, int] = (21, 21, 21)
    p: int = Field(default=31, ge=1)
    n_proj: int = 13
    noise: float = Field(default=0.01, ge=0)
    seed: int = 0
    detector_width: float | None = Field(default=None, gt=0)

    @field_validator("dims")
    @classmethod
    def _positive_dims(cls, value: tuple[int, int, int]) -> tuple[int, int, int]:
        if any(d < 1 for d in value):
            raise ValueError(f"grid dimensions must be positive, got {value}")
        return value

    @property
    def n_voxels(self) -> int:
        """Number of voxels N = m*n*l."""
        m, n, l = self.dims
        return m * n * l


def _split_list(value: Any) -> Any:
    """Accept comma-separated strings for list fields coming from key=value files."""
    if isinstance(value, str):
        return [item.strip() for item in value.split(",") if item.strip()]
    return value


class ExperimentConfig(BaseModel):
    """A benchmark experiment: every (alpha, tau, solver) cell on one problem."""

    problem: str = "T1-desk"
    solvers: list[Algorithm] = Field(
        default_factory=lambda: [Algorithm.GP, Algorithm.GPBB, Algorithm.UPN, Algorithm.UPN0]
    )
    alphas: list[float] = Field(default_factory=lambda: [1.0])
    taus: list[float] = Field(default_factory=lambda: [1e-4])
    eps_bar: float = Field(default=1e-6, gt=0)
    max_iters: int = Field(default=5000, ge=1)
    # Noise seed of a preset problem; None keeps the preset's own seed
    seed: int | None = Field(default=None, ge=0)
    out: Path = Path("./results")
    reference: Literal["cached", "recompute"] = "cached"
    reference_path: Path | None = None
    reference_max_iters: int = Field(default=100000, ge=1)
    cgls_iters: int = Field(default=5, ge=0)
    sigma_min_sq: float = Field(default=0.0, ge=0)
    save_solution: bool = False
    timing: bool = False

    @field_validator("solvers", "alphas", "taus", mode="before")
    @classmethod
    def _parse_lists(cls, value: Any) -> Any:
        return _split_list(value)

    @field_validator("solvers")
    @classmethod
    def _at_least_one_solver(cls, value: list[Algorithm]) -> list[Algorithm]:
        if not value:
            raise ValueError("at least one solver is required")
        return value

    @field_validator("alphas", "taus")
    @classmethod
    def _positive_grid(cls, value: list[float]) -> list[float]:
        if not value:
            raise ValueError("parameter grid must not be empty")
        if any(v <= 0 for v in value):
            raise ValueError(f"alpha and tau values must be positive, got {value}")
        return value

    @model_validator(mode="after")
    def _reference_source(self) -> "ExperimentConfig":
        if self.reference_path is not None and len(self.alphas) * len(self.taus) > 1:
            raise ValueError("a reference file can only serve a single (alpha, tau) cell")
        return self


class RunRecord(BaseModel):
    """Outcome of one (problem, alpha, tau, solver) cell."""

    problem: str
    algorithm: Algorithm
    alpha: float
    tau: float
    config: dict[str, Any] = Field(default_factory=dict)
    history: list[HistoryRecord] = Field(default_factory=list)
    restart_events: list[RestartEvent] = Field(default_factory=list)
    stop_reason: StopReason
    phi_star: float
    # (phi* - min logged phi) / |phi*| when the reference is not a lower bound
    reference_violation: float | None = None
    solution_path: str | None = None
    timings: dict[str, float] = Field(default_factory=dict)

    @computed_field
    @property
    def iterations(self) -> int:
        """Number of solver iterations (history rows minus the initial point)."""
        return max(len(self.history) - 1, 0)
