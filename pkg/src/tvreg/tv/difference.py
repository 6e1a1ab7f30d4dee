"""Matrix-free forward-difference operator with periodic boundaries."""

import numpy as np
from scipy.sparse.linalg import LinearOperator

from ..linalg.volume import Volume, check_dims

# Bound on ||D||_2^2 for the 3D periodic forward-difference operator
D_NORM_SQ_BOUND = 12.0


class DiffOperator:
    """
    The stacked difference operator D in R^{3N x N}.

    Row block j (three contiguous entries) holds D_j x, the forward
    differences at voxel j along the first, second and third axis, with
    periodic wrap and unit spacing. Nothing is stored besides the grid shape.
    """

    def __init__(self, dims: tuple[int, ...]):
        self.dims = check_dims(dims)
        m, n, l = self.dims
        self.n_voxels = m * n * l

    @property
    def shape(self) -> tuple[int, int]:
        return (3 * self.n_voxels, self.n_voxels)

    def _as_grid(self, x: Volume | np.ndarray) -> np.ndarray:
        if isinstance(x, Volume):
            if x.dims != self.dims:
                raise ValueError(f"volume dims {x.dims} do not match operator dims {self.dims}")
            data = x.data
        else:
            data = np.asarray(x, dtype=np.float64).ravel()
            if data.size != self.n_voxels:
                raise ValueError(
                    f"vector length {data.size} does not match {self.n_voxels} voxels"
                )
        return data.reshape(self.dims, order="F")

    def apply(self, x: Volume | np.ndarray) -> np.ndarray:
        """Return D x as a vector of length 3N."""
        X = self._as_grid(x)
        out = np.empty((self.n_voxels, 3))
        for axis in range(3):
            out[:, axis] = (np.roll(X, -1, axis=axis) - X).ravel(order="F")
        return out.ravel()

    def apply_adjoint(self, u: np.ndarray) -> np.ndarray:
        """Return D^T u for u of length 3N."""
        u = np.asarray(u, dtype=np.float64).ravel()
        if u.size != 3 * self.n_voxels:
            raise ValueError(f"vector length {u.size} does not match 3N = {3 * self.n_voxels}")
        blocks = u.reshape(self.n_voxels, 3)
        out = np.zeros(self.dims)
        for axis in range(3):
            C = blocks[:, axis].reshape(self.dims, order="F")
            out += np.roll(C, 1, axis=axis) - C
        return out.ravel(order="F")

    def as_linear_operator(self) -> LinearOperator:
        return LinearOperator(
            shape=self.shape,
            matvec=self.apply,
            rmatvec=self.apply_adjoint,
            dtype=np.float64,
        )

    def __repr__(self) -> str:
        return f"DiffOperator(dims={self.dims})"


def apply_D(op: DiffOperator, x: Volume | np.ndarray) -> np.ndarray:
    return op.apply(x)


def apply_D_t(op: DiffOperator, u: np.ndarray) -> np.ndarray:
    return op.apply_adjoint(u)
