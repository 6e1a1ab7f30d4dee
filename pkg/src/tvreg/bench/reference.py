"""High-accuracy reference solutions with an on-disk cache."""

import hashlib
import logging
from pathlib import Path
from typing import NamedTuple

import numpy as np

from ..config import settings
from ..models import SolverConfig, StopReason
from ..objective.base import SmoothObjective
from ..solvers.base import SolverError
from ..solvers.upn import upn_solve

logger = logging.getLogger(__name__)

# References are solved to this factor times the experiment tolerance
REFERENCE_FACTOR = 1e-4


class ReferenceNotConvergedError(SolverError):
    """The reference run hit its iteration cap; the partial result is attached."""

    def __init__(self, message: str, x: np.ndarray, phi: float):
        super().__init__(message)
        self.x = x
        self.phi = phi


class Reference(NamedTuple):
    x_star: np.ndarray
    phi_star: float
    cached: bool = False


def reference_key(f: SmoothObjective, eps_bar: float) -> str:
    """Cache key from the objective's content hash and the tolerance."""
    h = hashlib.sha256()
    h.update(f.fingerprint().encode())
    h.update(f"{eps_bar!r}".encode())
    return h.hexdigest()


def load_reference(path: Path | str) -> Reference:
    with np.load(path) as data:
        return Reference(np.array(data["x_star"]), float(data["phi_star"]), cached=True)


def save_reference(path: Path | str, reference: Reference) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savez(path, x_star=reference.x_star, phi_star=np.float64(reference.phi_star))


def compute_reference(
    f: SmoothObjective,
    eps_bar: float,
    x0: np.ndarray | None = None,
    max_iters: int = 100000,
    cache_dir: Path | None = None,
    use_cache: bool = True,
) -> Reference:
    """
    Solve with UPN to tolerance eps_bar * 1e-4.

    Args:
        f: Objective
        eps_bar: Experiment tolerance
        x0: Starting point (defaults to the zero vector)
        max_iters: Iteration cap of the reference run
        cache_dir: Cache directory (defaults to the configured one)
        use_cache: Read and write the cache

    Returns:
        Reference(x_star, phi_star, cached)

    Raises:
        ReferenceNotConvergedError: If the cap is reached before the tolerance
    """
    if not eps_bar > 0:
        raise ValueError(f"eps_bar must be positive, got {eps_bar}")
    cache_dir = Path(cache_dir) if cache_dir is not None else settings.cache_dir
    cache_path = cache_dir / f"{reference_key(f, eps_bar)}.npz"

    if use_cache and cache_path.exists():
        logger.info(f"Reference served from cache: {cache_path.name}")
        return load_reference(cache_path)

    tolerance = eps_bar * REFERENCE_FACTOR
    logger.info(f"Computing reference solution to tolerance {tolerance:.1e}")
    start = np.zeros(f.dim) if x0 is None else x0
    config = SolverConfig(eps_bar=tolerance, max_iters=max_iters)
    x, history, stop_reason = upn_solve(f, config, start)
    phi = f.value(x)

    if stop_reason is StopReason.MAX_ITERS:
        raise ReferenceNotConvergedError(
            f"reference did not reach {tolerance:.1e} in {max_iters} iterations "
            f"(||G||={history.last.grad_map_norm:.3e})",
            x=x,
            phi=phi,
        )

    reference = Reference(x, phi)
    if use_cache:
        save_reference(cache_path, reference)
        logger.debug(f"Reference cached at {cache_path}")
    return Reference(x, phi, cached=False)
