"""Compressed sparse row system matrices."""

import logging
from collections.abc import Sequence
from pathlib import Path

import numpy as np
from scipy import io as spio
from scipy import sparse
from scipy.sparse.linalg import LinearOperator, aslinearoperator

logger = logging.getLogger(__name__)


class SparseMatrix:
    """A CSR matrix with sorted column indices and no stored zeros.

    Wraps :class:`scipy.sparse.csr_matrix`; construction always runs the
    assembly cleanup (duplicate summation, explicit-zero removal, index sort)
    and rejects non-finite values.
    """

    def __init__(self, matrix: sparse.spmatrix | sparse.sparray | np.ndarray):
        csr = sparse.csr_matrix(matrix, dtype=np.float64)
        csr.sum_duplicates()
        csr.eliminate_zeros()
        csr.sort_indices()
        if not np.all(np.isfinite(csr.data)):
            raise ValueError("sparse matrix contains non-finite values")
        self._csr = csr

    @classmethod
    def from_rows(
        cls,
        rows: Sequence[tuple[np.ndarray, np.ndarray]],
        n_cols: int,
    ) -> "SparseMatrix":
        """
        Assemble a matrix from per-row (column indices, values) pairs.

        Args:
            rows: One (indices, values) pair per row, in row order
            n_cols: Number of columns

        Returns:
            The assembled matrix; rows keep their order
        """
        counts = np.fromiter((len(idx) for idx, _ in rows), dtype=np.int64, count=len(rows))
        indptr = np.zeros(len(rows) + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        if rows:
            indices = np.concatenate([np.asarray(idx, dtype=np.int64) for idx, _ in rows])
            values = np.concatenate([np.asarray(val, dtype=np.float64) for _, val in rows])
        else:
            indices = np.zeros(0, dtype=np.int64)
            values = np.zeros(0, dtype=np.float64)
        csr = sparse.csr_matrix((values, indices, indptr), shape=(len(rows), n_cols))
        return cls(csr)

    @property
    def csr(self) -> sparse.csr_matrix:
        return self._csr

    @property
    def shape(self) -> tuple[int, int]:
        return self._csr.shape

    @property
    def rows(self) -> int:
        return int(self._csr.shape[0])

    @property
    def cols(self) -> int:
        return int(self._csr.shape[1])

    @property
    def nnz(self) -> int:
        return int(self._csr.nnz)

    @property
    def indptr(self) -> np.ndarray:
        return self._csr.indptr

    @property
    def indices(self) -> np.ndarray:
        return self._csr.indices

    @property
    def values(self) -> np.ndarray:
        return self._csr.data

    def row_sums(self) -> np.ndarray:
        return np.asarray(self._csr.sum(axis=1)).ravel()

    def purge_zero_rows(self) -> tuple["SparseMatrix", np.ndarray]:
        """
        Drop rows without stored entries.

        Returns:
            The purged matrix and the indices of the kept rows
        """
        kept = np.flatnonzero(np.diff(self._csr.indptr) > 0)
        if kept.size < self.rows:
            logger.debug(f"Purged {self.rows - kept.size} empty rows of {self.rows}")
        return SparseMatrix(self._csr[kept]), kept

    def as_linear_operator(self) -> LinearOperator:
        return aslinearoperator(self._csr)

    def to_dense(self) -> np.ndarray:
        return self._csr.toarray()

    def save_matrix_market(self, path: Path | str, comment: str = "") -> None:
        """Write Matrix Market coordinate format (1-based indices)."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        spio.mmwrite(str(path), self._csr.tocoo(), comment=comment, field="real", precision=17)

    @classmethod
    def load_matrix_market(cls, path: Path | str) -> "SparseMatrix":
        return cls(spio.mmread(str(path)))

    def __repr__(self) -> str:
        return f"SparseMatrix(shape={self.shape}, nnz={self.nnz})"


def _as_vector(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1:
        raise ValueError(f"expected a 1D vector, got shape {v.shape}")
    return v


def spmv(A: SparseMatrix, x: np.ndarray) -> np.ndarray:
    """Return A @ x."""
    x = _as_vector(x)
    if x.size != A.cols:
        raise ValueError(f"spmv: vector length {x.size} does not match {A.cols} columns")
    return A.csr @ x


def spmv_t(A: SparseMatrix, y: np.ndarray) -> np.ndarray:
    """Return A.T @ y."""
    y = _as_vector(y)
    if y.size != A.rows:
        raise ValueError(f"spmv_t: vector length {y.size} does not match {A.rows} rows")
    return A.csr.T @ y
