"""Volumes, sparse matrices and operator routines."""

from .operators import as_operator, cgls_warm_start, power_iter_norm_sq
from .sparse import SparseMatrix, spmv, spmv_t
from .volume import Dims, Volume, check_dims

__all__ = [
    "Dims",
    "SparseMatrix",
    "Volume",
    "as_operator",
    "cgls_warm_start",
    "check_dims",
    "power_iter_norm_sq",
    "spmv",
    "spmv_t",
]
