"""Tests for the ILUT preconditioner."""

import numpy as np
import pytest
import scipy.sparse as sp

from stokesbddc.errors import DimensionError, IlutFactorError, ValidationError
from stokesbddc.fem.stokes import assemble_system, define_problem_2
from stokesbddc.krylov import gmres
from stokesbddc.linalg.ilut import ilut_apply, ilut_factor
from stokesbddc.linalg.sparse import SparseMatrix


def _convection_diffusion(k: int) -> SparseMatrix:
    """Nonsymmetric 2D five-point operator; its LU fills in."""
    one = sp.diags([-1.3 * np.ones(k - 1), 2 * np.ones(k), -0.7 * np.ones(k - 1)], [-1, 0, 1])
    eye = sp.identity(k)
    return SparseMatrix(sp.kron(one, eye) + sp.kron(eye, one))


def test_zero_tau_is_exact_lu():
    M = _convection_diffusion(6)
    precon = ilut_factor(M, tau=0.0)
    L = precon.lower.toarray() + np.eye(M.n_rows)
    U = precon.upper.toarray()

    np.testing.assert_allclose(L @ U, M.toarray(), atol=1e-12)
    assert np.all(np.triu(precon.lower.toarray()) == 0.0)
    assert np.all(np.tril(U, -1) == 0.0)

    b = np.arange(M.n_rows, dtype=float)
    np.testing.assert_allclose(precon.apply(b), np.linalg.solve(M.toarray(), b), rtol=1e-10)


def test_dropping_reduces_fill():
    M = _convection_diffusion(10)
    exact = ilut_factor(M, tau=0.0)
    loose = ilut_factor(M, tau=1e-2)
    looser = ilut_factor(M, tau=1e-1)

    assert looser.nnz <= loose.nnz < exact.nnz


def test_apply_zero_and_dimension():
    M = _convection_diffusion(4)
    precon = ilut_factor(M, tau=1e-3)
    np.testing.assert_array_equal(ilut_apply(precon, np.zeros(16)), 0.0)
    with pytest.raises(DimensionError):
        precon(np.ones(5))


def test_zero_pivot_without_shift():
    M = SparseMatrix(sp.csr_matrix(np.array([[0.0, 1.0], [1.0, 0.0]])))
    with pytest.raises(IlutFactorError) as exc:
        ilut_factor(M, tau=0.0, shift_factor=0.0)
    assert exc.value.row == 0


def test_invalid_tau():
    with pytest.raises(ValidationError):
        ilut_factor(_convection_diffusion(3), tau=-1.0)


def test_saddle_point_rows_are_shifted():
    """Zero pressure diagonals are shifted by -1e-12 ||A||_inf."""
    mesh, problem = define_problem_2(2)
    system = assemble_system(mesh, problem)
    precon = ilut_factor(system.matrix, tau=1e-4)

    np.testing.assert_array_equal(precon.shifted_rows, np.flatnonzero(system.pressure_mask))
    assert precon.shift == pytest.approx(1e-12 * system.matrix.norm_inf())


def test_ilut_accelerates_gmres():
    mesh, problem = define_problem_2(4)
    system = assemble_system(mesh, problem)
    precon = ilut_factor(system.matrix, tau=1e-5, shift_rows=np.flatnonzero(system.pressure_mask))
    A = system.matrix.matvec
    result = gmres(A, precon, system.rhs, tol=1e-8)

    assert result.converged
    assert result.iterations < 30
