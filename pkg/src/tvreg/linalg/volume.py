"""Voxel volumes flattened to vectors.

A volume X of shape (m, n, l) is stored as x = vec(X) with the first index varying
fastest (Fortran order), so voxel (i, j, k) sits at ``i + m*(j + n*k)``. The difference
operator and the ray tracer both rely on this order.
"""

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

Dims = tuple[int, int, int]

_BINARY_HEADER = struct.Struct("<3Q")


def check_dims(dims: tuple[int, ...]) -> Dims:
    """Validate a grid shape and return it as a plain int triple."""
    if len(dims) != 3:
        raise ValueError(f"expected three grid dimensions, got {dims}")
    m, n, l = (int(d) for d in dims)
    if min(m, n, l) < 1:
        raise ValueError(f"grid dimensions must be positive, got {dims}")
    return m, n, l


@dataclass(frozen=True)
class Volume:
    """A 3D voxel grid and its flattened data vector."""

    dims: Dims
    data: np.ndarray

    def __post_init__(self) -> None:
        dims = check_dims(self.dims)
        data = np.ascontiguousarray(self.data, dtype=np.float64).ravel()
        expected = dims[0] * dims[1] * dims[2]
        if data.size != expected:
            raise ValueError(
                f"volume data has {data.size} entries, dims {dims} require {expected}"
            )
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "data", data)

    @property
    def size(self) -> int:
        return int(self.data.size)

    @classmethod
    def from_array(cls, array: np.ndarray) -> "Volume":
        """Flatten a 3D array (first axis fastest)."""
        array = np.asarray(array, dtype=np.float64)
        if array.ndim != 3:
            raise ValueError(f"expected a 3D array, got shape {array.shape}")
        return cls(dims=array.shape, data=array.ravel(order="F"))

    @classmethod
    def constant(cls, dims: tuple[int, ...], value: float = 0.0) -> "Volume":
        m, n, l = check_dims(dims)
        return cls(dims=(m, n, l), data=np.full(m * n * l, float(value)))

    def to_array(self) -> np.ndarray:
        """Un-flatten to an (m, n, l) array."""
        return self.data.reshape(self.dims, order="F")

    def save_text(self, path: Path | str) -> None:
        """Write the "m n l" header line followed by one value per line."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w") as f:
            f.write("{} {} {}\n".format(*self.dims))
            for value in self.data:
                f.write(f"{value:.17g}\n")

    @classmethod
    def load_text(cls, path: Path | str) -> "Volume":
        tokens = Path(path).read_text().split()
        if len(tokens) < 3:
            raise ValueError(f"{path}: missing volume header")
        dims = tuple(int(t) for t in tokens[:3])
        data = np.array([float(t) for t in tokens[3:]], dtype=np.float64)
        return cls(dims=dims, data=data)

    def save_binary(self, path: Path | str) -> None:
        """Write three little-endian uint64 dims followed by little-endian float64 data."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("wb") as f:
            f.write(_BINARY_HEADER.pack(*self.dims))
            f.write(self.data.astype("<f8").tobytes())

    @classmethod
    def load_binary(cls, path: Path | str) -> "Volume":
        raw = Path(path).read_bytes()
        if len(raw) < _BINARY_HEADER.size:
            raise ValueError(f"{path}: truncated volume header")
        dims = _BINARY_HEADER.unpack_from(raw)
        data = np.frombuffer(raw, dtype="<f8", offset=_BINARY_HEADER.size)
        return cls(dims=dims, data=data.astype(np.float64))
