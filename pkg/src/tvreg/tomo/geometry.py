"""Parallel-beam projection geometry and exact ray-voxel traversal."""

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..linalg.volume import check_dims

logger = logging.getLogger(__name__)

CUBE_CENTER = np.array([0.5, 0.5, 0.5])


def detector_basis(direction: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    Orthonormal in-plane basis (u, v) of the detector orthogonal to ``direction``.

    u starts from the coordinate axis least aligned with the direction (lowest
    index on ties) and is orthonormalized against it; v = direction x u.
    """
    d = np.asarray(direction, dtype=np.float64)
    axis = int(np.argmin(np.abs(d)))
    u = np.zeros(3)
    u[axis] = 1.0
    u -= (u @ d) * d
    u /= np.linalg.norm(u)
    v = np.cross(d, u)
    v /= np.linalg.norm(v)
    return u, v


@dataclass
class ProjectionGeometry:
    """
    p x p parallel rays per direction through a detector centred on the cube.

    Args:
        directions: (n_proj, 3) unit vectors, no two equal or antipodal
        p: Detector pixels per side
        pixel_pitch: Pixel spacing; the detector spans p * pixel_pitch
    """

    directions: np.ndarray
    p: int
    pixel_pitch: float
    center: np.ndarray = field(default_factory=lambda: CUBE_CENTER.copy())

    def __post_init__(self) -> None:
        self.directions = np.atleast_2d(np.asarray(self.directions, dtype=np.float64))
        norms = np.linalg.norm(self.directions, axis=1)
        if not np.allclose(norms, 1.0, rtol=0.0, atol=1e-12):
            raise ValueError("projection directions must be unit vectors")
        if self.p < 1:
            raise ValueError(f"p must be positive, got {self.p}")
        if not self.pixel_pitch > 0:
            raise ValueError(f"pixel pitch must be positive, got {self.pixel_pitch}")
        cosines = np.abs(self.directions @ self.directions.T)
        np.fill_diagonal(cosines, 0.0)
        if np.any(cosines > 1.0 - 1e-12):
            raise ValueError("projection directions contain duplicate or antipodal vectors")

    @classmethod
    def for_grid(
        cls,
        directions: np.ndarray,
        p: int,
        dims: tuple[int, ...],
        detector_width: float | None = None,
    ) -> "ProjectionGeometry":
        """Pixel pitch defaults to the voxel width 1/max(dims)."""
        m, n, l = check_dims(dims)
        pitch = detector_width / p if detector_width is not None else 1.0 / max(m, n, l)
        return cls(directions=directions, p=p, pixel_pitch=pitch)

    @property
    def n_proj(self) -> int:
        return len(self.directions)

    @property
    def n_rays(self) -> int:
        return self.n_proj * self.p * self.p

    def ray_origins(self, index: int) -> np.ndarray:
        """
        Pixel centres of one direction's detector, shape (p*p, 3).

        Row-major over the detector: v is the outer (row) coordinate, u the fastest.
        """
        u, v = detector_basis(self.directions[index])
        offsets = (np.arange(self.p) - (self.p - 1) / 2.0) * self.pixel_pitch
        ov, ou = np.meshgrid(offsets, offsets, indexing="ij")
        return self.center + ou.ravel()[:, None] * u + ov.ravel()[:, None] * v

    def write_manifest(self, path: Path | str) -> None:
        """Write the directions, one per line with 17 significant digits."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w") as f:
            f.write(f"# p={self.p} pixel_pitch={self.pixel_pitch:.17g} n_proj={self.n_proj}\n")
            for d in self.directions:
                f.write("{:.17g} {:.17g} {:.17g}\n".format(*d))

    @classmethod
    def read_manifest(cls, path: Path | str) -> "ProjectionGeometry":
        lines = Path(path).read_text().splitlines()
        header = dict(item.split("=") for item in lines[0].lstrip("# ").split())
        directions = np.array([[float(t) for t in line.split()] for line in lines[1:] if line])
        return cls(directions=directions, p=int(header["p"]), pixel_pitch=float(header["pixel_pitch"]))


def _slab_interval(
    origin: np.ndarray, direction: np.ndarray
) -> tuple[float, float] | None:
    """Parameter interval where origin + t*direction lies in [0, 1]^3."""
    t_min, t_max = -np.inf, np.inf
    for axis in range(3):
        o, d = origin[axis], direction[axis]
        if d == 0.0:
            if o < 0.0 or o > 1.0:
                return None
            continue
        t0, t1 = -o / d, (1.0 - o) / d
        t_min = max(t_min, min(t0, t1))
        t_max = min(t_max, max(t0, t1))
    if not t_max > t_min:
        return None
    return t_min, t_max


def chord_length(origin: np.ndarray, direction: np.ndarray) -> float:
    """Length of the line origin + t*direction inside the unit cube."""
    origin = np.asarray(origin, dtype=np.float64)
    direction = np.asarray(direction, dtype=np.float64)
    interval = _slab_interval(origin, direction)
    if interval is None:
        return 0.0
    return (interval[1] - interval[0]) * float(np.linalg.norm(direction))


def trace_ray(
    dims: tuple[int, ...],
    origin: np.ndarray,
    direction: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Voxel indices and path lengths of the line origin + t*direction.

    Siddon-style traversal: the line is cut at every voxel plane crossing inside
    the cube and each segment is assigned to the voxel containing its midpoint.
    On an axis the ray is parallel to, a ray lying exactly on a voxel face is
    assigned to the lower-index voxel.

    Args:
        dims: Grid shape (m, n, l) on [0, 1]^3
        origin: Any point on the ray
        direction: Unit direction

    Returns:
        (indices, lengths) sorted by voxel index; both empty if the ray misses
    """
    dims = check_dims(dims)
    origin = np.asarray(origin, dtype=np.float64)
    direction = np.asarray(direction, dtype=np.float64)
    interval = _slab_interval(origin, direction)
    if interval is None:
        return np.zeros(0, dtype=np.int64), np.zeros(0)
    t_min, t_max = interval

    crossings = [np.array([t_min, t_max])]
    for axis in range(3):
        d = direction[axis]
        if d == 0.0:
            continue
        planes = np.arange(dims[axis] + 1) / dims[axis]
        t = (planes - origin[axis]) / d
        crossings.append(t[(t > t_min) & (t < t_max)])
    ts = np.unique(np.concatenate(crossings))

    lengths = np.diff(ts)
    mids = 0.5 * (ts[:-1] + ts[1:])
    points = origin + mids[:, None] * direction

    idx = np.empty((len(mids), 3), dtype=np.int64)
    for axis in range(3):
        n_axis = dims[axis]
        if direction[axis] == 0.0:
            fixed = int(np.clip(np.ceil(origin[axis] * n_axis) - 1, 0, n_axis - 1))
            idx[:, axis] = fixed
        else:
            idx[:, axis] = np.clip(np.floor(points[:, axis] * n_axis), 0, n_axis - 1)

    m, n, _ = dims
    linear = idx[:, 0] + m * (idx[:, 1] + n * idx[:, 2])
    voxels, inverse = np.unique(linear, return_inverse=True)
    totals = np.bincount(inverse.ravel(), weights=lengths, minlength=len(voxels))
    scale = float(np.linalg.norm(direction))
    keep = totals > 0
    return voxels[keep], totals[keep] * scale
