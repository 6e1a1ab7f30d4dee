"""Tests for volumes, sparse matrices and operator routines."""

import numpy as np
import pytest
from scipy import sparse

from tvreg.linalg import (
    SparseMatrix,
    Volume,
    cgls_warm_start,
    power_iter_norm_sq,
    spmv,
    spmv_t,
)
from tvreg.tv import DiffOperator


class TestSpmv:
    def test_identity(self):
        A = SparseMatrix(np.eye(1))
        np.testing.assert_array_equal(spmv(A, np.array([0.5])), [0.5])

    def test_single_row(self):
        A = SparseMatrix(np.array([[1.0, 2.0, 0.0]]))
        np.testing.assert_array_equal(spmv(A, np.ones(3)), [3.0])

    def test_diagonal(self):
        A = SparseMatrix(np.diag([2.0, 3.0]))
        np.testing.assert_array_equal(spmv(A, np.ones(2)), [2.0, 3.0])

    def test_dimension_mismatch(self):
        A = SparseMatrix(np.eye(3))
        with pytest.raises(ValueError, match="does not match"):
            spmv(A, np.ones(2))

    def test_linearity(self, random_sparse, rng):
        A = random_sparse(30, 20)
        x, y = rng.standard_normal(20), rng.standard_normal(20)
        lhs = spmv(A, 2.5 * x - 0.75 * y)
        rhs = 2.5 * spmv(A, x) - 0.75 * spmv(A, y)
        np.testing.assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-12)


class TestSpmvTranspose:
    def test_identity(self, rng):
        y = rng.standard_normal(4)
        np.testing.assert_array_equal(spmv_t(SparseMatrix(np.eye(4)), y), y)

    def test_row_vector(self):
        A = SparseMatrix(np.array([[1.0, 2.0]]))
        np.testing.assert_array_equal(spmv_t(A, np.array([3.0])), [3.0, 6.0])

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="rows"):
            spmv_t(SparseMatrix(np.ones((2, 3))), np.ones(3))

    def test_adjoint_consistency(self, random_sparse, rng):
        for _ in range(5):
            A = random_sparse(25, 17)
            x, y = rng.standard_normal(17), rng.standard_normal(25)
            lhs = float(spmv(A, x) @ y)
            rhs = float(x @ spmv_t(A, y))
            assert abs(lhs - rhs) <= 1e-12 * (1 + abs(lhs))


class TestSparseMatrix:
    def test_assembly_cleanup(self):
        rows = [
            (np.array([2, 0, 2]), np.array([1.0, 3.0, 0.5])),
            (np.array([1]), np.array([0.0])),
        ]
        A = SparseMatrix.from_rows(rows, 3)
        np.testing.assert_array_equal(A.to_dense(), [[3.0, 0.0, 1.5], [0.0, 0.0, 0.0]])
        np.testing.assert_array_equal(A.indices, [0, 2])
        assert A.nnz == 2

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError, match="non-finite"):
            SparseMatrix(np.array([[1.0, np.nan]]))

    def test_purge_zero_rows(self):
        A = SparseMatrix(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 0.0], [0.0, 2.0]]))
        purged, kept = A.purge_zero_rows()
        np.testing.assert_array_equal(kept, [1, 3])
        assert purged.shape == (2, 2)
        np.testing.assert_array_equal(purged.to_dense(), [[1.0, 0.0], [0.0, 2.0]])

    def test_strictly_increasing_columns(self, random_sparse):
        A = random_sparse(40, 30)
        for i in range(A.rows):
            cols = A.indices[A.indptr[i] : A.indptr[i + 1]]
            assert np.all(np.diff(cols) > 0)

    def test_matrix_market_round_trip(self, random_sparse, tmp_path):
        A = random_sparse(12, 9)
        path = tmp_path / "A.mtx"
        A.save_matrix_market(path, comment="test")
        B = SparseMatrix.load_matrix_market(path)
        assert B.shape == A.shape
        np.testing.assert_array_equal(B.to_dense(), A.to_dense())


class TestVolume:
    def test_length_must_match(self):
        with pytest.raises(ValueError, match="require"):
            Volume(dims=(2, 2, 2), data=np.zeros(7))

    def test_first_axis_fastest(self):
        X = np.arange(24, dtype=float).reshape(2, 3, 4)
        v = Volume.from_array(X)
        m, n = 2, 3
        for i, j, k in [(1, 0, 0), (0, 2, 1), (1, 1, 3)]:
            assert v.data[i + m * (j + n * k)] == X[i, j, k]
        np.testing.assert_array_equal(v.to_array(), X)

    def test_text_format(self, tmp_path):
        v = Volume(dims=(2, 1, 1), data=np.array([0.1, 1.0]))
        path = tmp_path / "v.txt"
        v.save_text(path)
        assert path.read_text().splitlines() == ["2 1 1", "0.10000000000000001", "1"]
        np.testing.assert_array_equal(Volume.load_text(path).data, v.data)

    def test_binary_format(self, tmp_path, rng):
        v = Volume(dims=(3, 2, 2), data=rng.uniform(size=12))
        path = tmp_path / "v.bin"
        v.save_binary(path)
        raw = path.read_bytes()
        assert len(raw) == 24 + 8 * 12
        assert np.frombuffer(raw[:24], dtype="<u8").tolist() == [3, 2, 2]
        loaded = Volume.load_binary(path)
        assert loaded.dims == (3, 2, 2)
        np.testing.assert_array_equal(loaded.data, v.data)


class TestPowerIteration:
    def test_identity(self):
        assert power_iter_norm_sq(np.eye(5)) == pytest.approx(1.0, abs=1e-10)

    def test_diagonal(self):
        assert power_iter_norm_sq(np.diag([1.0, 2.0, 3.0])) == pytest.approx(9.0, abs=1e-6)

    def test_never_exceeds_true_value(self, rng):
        for _ in range(5):
            d = rng.uniform(0.1, 4.0, 10)
            estimate = power_iter_norm_sq(np.diag(d), iters=7, seed=3)
            assert estimate <= float(np.max(d) ** 2) + 1e-9

    def test_nondecreasing_in_iters(self, random_sparse):
        A = random_sparse(20, 15)
        estimates = [power_iter_norm_sq(A, iters=k, seed=1) for k in (1, 2, 5, 20)]
        assert estimates == sorted(estimates)

    def test_deterministic_given_seed(self, random_sparse):
        A = random_sparse(20, 15)
        assert power_iter_norm_sq(A, seed=7) == power_iter_norm_sq(A, seed=7)

    def test_zero_operator(self):
        assert power_iter_norm_sq(sparse.csr_matrix((3, 3))) == 0.0

    def test_requires_one_iteration(self):
        with pytest.raises(ValueError):
            power_iter_norm_sq(np.eye(2), iters=0)

    @pytest.mark.parametrize("dims", [(2, 2, 2), (5, 5, 5), (8, 5, 3)])
    def test_difference_operator_bound(self, dims):
        estimate = power_iter_norm_sq(DiffOperator(dims), iters=200)
        assert estimate <= 12.0 + 1e-9


class TestCgls:
    def test_zero_iterations(self, random_sparse, rng):
        A = random_sparse(10, 6)
        np.testing.assert_array_equal(cgls_warm_start(A, rng.standard_normal(10), 0), np.zeros(6))

    def test_identity_one_step(self, rng):
        b = rng.standard_normal(6)
        np.testing.assert_allclose(cgls_warm_start(np.eye(6), b, 1), b, rtol=1e-14)

    def test_zero_rhs(self, random_sparse):
        A = random_sparse(10, 6)
        np.testing.assert_array_equal(cgls_warm_start(A, np.zeros(10), 5), np.zeros(6))

    def test_residual_nonincreasing(self, rng):
        A = rng.standard_normal((30, 8))
        b = rng.standard_normal(30)
        residuals = [np.linalg.norm(b - A @ cgls_warm_start(A, b, k)) for k in range(9)]
        assert all(r1 <= r0 + 1e-12 for r0, r1 in zip(residuals, residuals[1:]))

    def test_reaches_least_squares_solution(self, rng):
        A = rng.standard_normal((20, 5)) + 3.0 * np.eye(20, 5)
        b = rng.standard_normal(20)
        expected = np.linalg.lstsq(A, b, rcond=None)[0]
        np.testing.assert_allclose(cgls_warm_start(A, b, 5), expected, rtol=1e-8, atol=1e-10)

    def test_rhs_length_checked(self):
        with pytest.raises(ValueError, match="rhs length"):
            cgls_warm_start(np.eye(3), np.ones(4))
