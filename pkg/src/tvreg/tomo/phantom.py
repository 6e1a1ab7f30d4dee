"""3D Shepp-Logan phantom built from superimposed ellipsoids."""

import math
from dataclasses import dataclass

import numpy as np

from ..linalg.volume import Volume, check_dims

# Modified Shepp-Logan ellipsoids in [-1, 1]^3 coordinates:
# (intensity, a, b, c, x0, y0, z0, phi, theta, psi), angles in degrees
SHEPP_LOGAN_TABLE: tuple[tuple[float, ...], ...] = (
    (1.0, 0.6900, 0.920, 0.810, 0.00, 0.0000, 0.00, 0.0, 0.0, 0.0),
    (-0.8, 0.6624, 0.874, 0.780, 0.00, -0.0184, 0.00, 0.0, 0.0, 0.0),
    (-0.2, 0.1100, 0.310, 0.220, 0.22, 0.0000, 0.00, -18.0, 0.0, 10.0),
    (-0.2, 0.1600, 0.410, 0.280, -0.22, 0.0000, 0.00, 18.0, 0.0, 10.0),
    (0.1, 0.2100, 0.250, 0.410, 0.00, 0.3500, -0.15, 0.0, 0.0, 0.0),
    (0.1, 0.0460, 0.046, 0.050, 0.00, 0.1000, 0.25, 0.0, 0.0, 0.0),
    (0.1, 0.0460, 0.046, 0.050, 0.00, -0.1000, 0.25, 0.0, 0.0, 0.0),
    (0.1, 0.0460, 0.023, 0.050, -0.08, -0.6050, 0.00, 0.0, 0.0, 0.0),
    (0.1, 0.0230, 0.023, 0.020, 0.00, -0.6060, 0.00, 0.0, 0.0, 0.0),
    (0.1, 0.0230, 0.046, 0.020, 0.06, -0.6050, 0.00, 0.0, 0.0, 0.0),
)


def euler_rotation(phi: float, theta: float, psi: float) -> np.ndarray:
    """z-x-z Euler rotation matrix (radians)."""
    cphi, sphi = math.cos(phi), math.sin(phi)
    ctheta, stheta = math.cos(theta), math.sin(theta)
    cpsi, spsi = math.cos(psi), math.sin(psi)
    return np.array(
        [
            [
                cpsi * cphi - ctheta * sphi * spsi,
                cpsi * sphi + ctheta * cphi * spsi,
                spsi * stheta,
            ],
            [
                -spsi * cphi - ctheta * sphi * cpsi,
                -spsi * sphi + ctheta * cphi * cpsi,
                cpsi * stheta,
            ],
            [stheta * sphi, -stheta * cphi, ctheta],
        ]
    )


@dataclass(frozen=True)
class Ellipsoid:
    """An ellipsoid in [0, 1]^3 domain coordinates with an additive intensity."""

    center: tuple[float, float, float]
    semi_axes: tuple[float, float, float]
    angles: tuple[float, float, float]
    intensity: float

    def __post_init__(self) -> None:
        if min(self.semi_axes) <= 0:
            raise ValueError(f"semi-axes must be positive, got {self.semi_axes}")

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Boolean mask of the (K, 3) points lying inside or on the ellipsoid."""
        rotation = euler_rotation(*self.angles)
        local = (points - np.asarray(self.center)) @ rotation.T
        scaled = local / np.asarray(self.semi_axes)
        return np.einsum("ij,ij->i", scaled, scaled) <= 1.0


def shepp_logan_ellipsoids() -> list[Ellipsoid]:
    """The phantom's ellipsoids mapped from [-1, 1]^3 to the unit cube."""
    ellipsoids = []
    for A, a, b, c, x0, y0, z0, phi, theta, psi in SHEPP_LOGAN_TABLE:
        ellipsoids.append(
            Ellipsoid(
                center=((x0 + 1.0) / 2.0, (y0 + 1.0) / 2.0, (z0 + 1.0) / 2.0),
                semi_axes=(a / 2.0, b / 2.0, c / 2.0),
                angles=(math.radians(phi), math.radians(theta), math.radians(psi)),
                intensity=A,
            )
        )
    return ellipsoids


def voxel_centers(dims: tuple[int, ...]) -> np.ndarray:
    """Voxel centers of the grid on [0, 1]^3 as an (N, 3) array in vec order."""
    m, n, l = check_dims(dims)
    axes = [(np.arange(k) + 0.5) / k for k in (m, n, l)]
    grid = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel(order="F") for g in grid], axis=1)


def shepp_logan_3d(m: int, n: int, l: int) -> Volume:
    """
    Rasterize the 3D Shepp-Logan phantom.

    Each voxel gets the summed intensity of the ellipsoids containing its
    center; sums are rounded to 12 decimals and clipped to [0, 1], so the
    attained values are 0, 0.2, 0.3 and 1.
    """
    dims = check_dims((m, n, l))
    centers = voxel_centers(dims)
    values = np.zeros(len(centers))
    for ellipsoid in shepp_logan_ellipsoids():
        values[ellipsoid.contains(centers)] += ellipsoid.intensity
    values = np.clip(np.round(values, 12) + 0.0, 0.0, 1.0)
    return Volume(dims=dims, data=values)
