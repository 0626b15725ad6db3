"""Tests for sparse assembly and direct factorization."""

import numpy as np
import pytest
import scipy.io
import scipy.sparse as sp

from stokesbddc.errors import DimensionError, IndexBoundsError, SingularMatrixError, ValidationError
from stokesbddc.linalg.factor import factor
from stokesbddc.linalg.sparse import SparseMatrix, assemble, assemble_elements, stack_saddle


def _laplacian_2d(k: int) -> SparseMatrix:
    one = sp.diags([-np.ones(k - 1), 2 * np.ones(k), -np.ones(k - 1)], [-1, 0, 1])
    eye = sp.identity(k)
    return SparseMatrix(sp.kron(one, eye) + sp.kron(eye, one), symmetric=True)


def test_assemble_sums_duplicates():
    """Repeated positions are summed."""
    M = assemble([(0, 0, 1.0), (0, 0, 2.0), (1, 0, 3.0)], 2, 2)

    np.testing.assert_array_equal(M.toarray(), [[3.0, 0.0], [3.0, 0.0]])
    assert M.nnz == 2


def test_assemble_from_arrays():
    rows = np.array([0, 1, 2])
    cols = np.array([2, 1, 0])
    M = assemble((rows, cols, np.array([1.0, 2.0, 3.0])), 3, 3)

    np.testing.assert_array_equal(M.matvec(np.array([1.0, 1.0, 1.0])), [1.0, 2.0, 3.0])


def test_assemble_empty():
    M = assemble([], 3, 4)
    assert M.shape == (3, 4)
    assert M.nnz == 0


def test_assemble_out_of_bounds():
    with pytest.raises(IndexBoundsError) as exc:
        assemble([(0, 0, 1.0), (0, 5, 1.0)], 2, 2)
    assert exc.value.index == 5
    assert exc.value.bound == 2


def test_symmetric_flag_is_verified():
    """A matrix flagged symmetric must be symmetric."""
    with pytest.raises(ValidationError):
        assemble([(0, 1, 1.0)], 2, 2, symmetric=True)


def test_matvec_dimension_mismatch():
    M = assemble([(0, 0, 1.0)], 2, 2)
    with pytest.raises(DimensionError):
        M.matvec(np.ones(3))


def test_submatrix_and_norms():
    M = SparseMatrix(sp.csr_matrix(np.array([[4.0, -1.0, 0.0], [-1.0, 4.0, -2.0], [0.0, -2.0, 4.0]])), symmetric=True)
    sub = M.submatrix(np.array([0, 2]))

    np.testing.assert_array_equal(sub.toarray(), [[4.0, 0.0], [0.0, 4.0]])
    assert sub.symmetric
    assert M.norm_inf() == 7.0
    assert M.max_abs() == 4.0
    np.testing.assert_array_equal(M.diagonal(), [4.0, 4.0, 4.0])


def test_assemble_elements_skips_fixed():
    """Connectivity entries of -1 are left out."""
    K_e = np.array([[1.0, -1.0], [-1.0, 1.0]])
    conn = np.array([[0, 1], [1, 2], [2, -1]])
    M = assemble_elements(K_e, conn, 3)

    expected = np.array([[1.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 2.0]])
    np.testing.assert_array_equal(M.toarray(), expected)


def test_stack_saddle():
    M = _laplacian_2d(3)
    C = SparseMatrix(sp.csr_matrix(np.ones((1, 9)) / 9.0))
    block = stack_saddle(M, C)

    assert block.shape == (10, 10)
    assert block.is_symmetric()
    assert stack_saddle(M, SparseMatrix(sp.csr_matrix((0, 9)))) is M


def test_write_matrix_market(tmp_path):
    M = _laplacian_2d(3)
    path = tmp_path / "lap.mtx"
    M.write_matrix_market(path)

    loaded = scipy.io.mmread(str(path))
    np.testing.assert_allclose(loaded.toarray(), M.toarray())


@pytest.mark.parametrize("kind", ["spd", "symmetric-indefinite", "general"])
def test_factor_solves(kind):
    """All factorization kinds solve an SPD system to round-off."""
    M = _laplacian_2d(6)
    rng = np.random.default_rng(0)
    b = rng.standard_normal(M.n_rows)
    x = factor(M, kind).solve(b)

    assert np.linalg.norm(M.matvec(x) - b) <= 1e-10 * np.linalg.norm(b)


def test_factor_saddle_point():
    """A symmetric indefinite matrix with a zero diagonal entry."""
    A = np.array([[2.0, 0.0, 1.0], [0.0, 2.0, 1.0], [1.0, 1.0, 0.0]])
    M = SparseMatrix(sp.csr_matrix(A), symmetric=True)
    b = np.array([1.0, 2.0, 3.0])
    x = factor(M, "symmetric-indefinite").solve(b)

    np.testing.assert_allclose(x, np.linalg.solve(A, b))


def test_factor_multiple_rhs():
    M = _laplacian_2d(4)
    B = np.eye(M.n_rows)[:, :3]
    X = factor(M, "spd").solve(B)
    np.testing.assert_allclose(M.toarray() @ X, B, atol=1e-12)


def test_factor_singular():
    M = SparseMatrix(sp.csr_matrix(np.array([[1.0, 1.0], [1.0, 1.0]])), symmetric=True)
    with pytest.raises(SingularMatrixError):
        factor(M, "symmetric-indefinite")


def test_factor_rejects_nonsymmetric_kind():
    M = SparseMatrix(sp.csr_matrix(np.array([[2.0, 1.0], [0.0, 2.0]])))
    with pytest.raises(ValidationError):
        factor(M, "spd")
    with pytest.raises(ValidationError):
        factor(M, "cholesky")

    x = factor(M, "general").solve(np.array([3.0, 2.0]))
    np.testing.assert_allclose(x, [1.0, 1.0])


def test_matvec_is_linear():
    M = _laplacian_2d(5)
    rng = np.random.default_rng(4)
    for _ in range(5):
        x, y = rng.standard_normal(M.n_cols), rng.standard_normal(M.n_cols)
        a, b = rng.standard_normal(2)
        np.testing.assert_allclose(
            M.matvec(a * x + b * y), a * M.matvec(x) + b * M.matvec(y), rtol=1e-12, atol=1e-12
        )
    assert M.matvecs == 15


def test_factor_permutation_matrix():
    """[[0, 1], [1, 0]] has no usable diagonal pivot."""
    M = SparseMatrix(sp.csr_matrix(np.array([[0.0, 1.0], [1.0, 0.0]])), symmetric=True)
    x = factor(M, "symmetric-indefinite").solve(np.array([1.0, 0.0]))
    np.testing.assert_allclose(x, [0.0, 1.0], atol=1e-15)


def test_factor_random_symmetric_indefinite():
    rng = np.random.default_rng(20)
    B = rng.standard_normal((20, 20))
    A = B + B.T
    eigenvalues = np.linalg.eigvalsh(A)
    assert eigenvalues.min() < 0.0 < eigenvalues.max()

    M = SparseMatrix(sp.csr_matrix(A), symmetric=True)
    b = rng.standard_normal(20)
    x = factor(M, "symmetric-indefinite").solve(b)
    expected = np.linalg.solve(A, b)
    np.testing.assert_allclose(x, expected, atol=1e-9 * np.abs(expected).max())


def test_factor_block_diagonal_matches_blocks():
    """Each block of a block-diagonal matrix is solved independently."""
    rng = np.random.default_rng(9)
    G = rng.standard_normal((5, 5))
    blocks = [
        G @ G.T + 5.0 * np.eye(5),
        np.array([[2.0, 0.0, 1.0], [0.0, 2.0, 1.0], [1.0, 1.0, 0.0]]),
        np.array([[0.0, 3.0], [3.0, 1.0]]),
    ]
    M = SparseMatrix(sp.block_diag(blocks), symmetric=True)
    b = rng.standard_normal(M.n_rows)
    x = factor(M, "symmetric-indefinite").solve(b)

    start = 0
    for block in blocks:
        stop = start + block.shape[0]
        np.testing.assert_allclose(x[start:stop], np.linalg.solve(block, b[start:stop]), rtol=1e-12, atol=1e-12)
        start = stop


@pytest.mark.parametrize("kind", ["symmetric-indefinite", "general"])
def test_factor_of_explicit_transpose_agrees(kind):
    """A symmetric saddle matrix and its explicit transpose factor to the same solves."""
    M = stack_saddle(_laplacian_2d(4), SparseMatrix(sp.csr_matrix(np.ones((1, 16)))))
    Mt = SparseMatrix(M.csr.T, symmetric=True)
    b = np.random.default_rng(1).standard_normal(M.n_rows)

    x = factor(M, kind).solve(b)
    xt = factor(Mt, kind).solve(b)
    np.testing.assert_allclose(xt, x, rtol=1e-12, atol=1e-12 * np.abs(x).max())


def test_factor_nonsymmetric_transpose():
    """Solving with the explicit transpose of a nonsymmetric matrix matches the dense transpose solve."""
    rng = np.random.default_rng(6)
    N = 6.0 * np.eye(12) + rng.standard_normal((12, 12))
    b = rng.standard_normal(12)
    x = factor(SparseMatrix(sp.csr_matrix(N).T), "general").solve(b)
    np.testing.assert_allclose(x, np.linalg.solve(N.T, b), rtol=1e-12, atol=1e-12)
