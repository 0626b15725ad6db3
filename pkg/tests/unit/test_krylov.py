"""Tests for the Krylov drivers."""

import numpy as np
import pytest

from stokesbddc.config import KrylovConfig, KrylovMethod
from stokesbddc.errors import BreakdownError, DimensionError, DivergenceError, ValidationError
from stokesbddc.krylov import bicgstab, gmres, pcg, solve
from stokesbddc.types import KrylovResult


def _spd(n: int = 40, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    B = rng.standard_normal((n, n))
    return B @ B.T + n * np.eye(n)


def _nonsymmetric(n: int = 40, seed: int = 1) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return 4.0 * np.eye(n) + rng.standard_normal((n, n)) / np.sqrt(n)


def test_pcg_solves_spd_system():
    A = _spd()
    g = np.ones(A.shape[0])
    result = pcg(lambda x: A @ x, None, g, tol=1e-10)

    assert result.converged
    assert result.relative_residual < 1e-10
    np.testing.assert_allclose(result.solution, np.linalg.solve(A, g), rtol=1e-8)
    assert result.residual_history[0] == 1.0
    assert len(result.residual_history) == result.iterations + 1


def test_pcg_continues_through_negative_curvature():
    """An indefinite system: the first step has p^T A p < 0 and the residual rises."""
    A = np.diag([-3.0, 1.0])
    g = np.ones(2)
    result = pcg(lambda x: A @ x, None, g, tol=1e-10, max_iters=10)

    assert result.negative_curvature
    assert not result.breakdown
    assert result.residual_history[1] > result.residual_history[0]
    assert result.converged
    assert result.iterations == 2
    np.testing.assert_allclose(result.solution, [-1.0 / 3.0, 1.0], rtol=1e-12)


def test_pcg_exact_zero_curvature_is_a_breakdown():
    A = np.array([[1.0, 0.0], [0.0, -1.0]])
    result = pcg(lambda x: A @ x, None, np.ones(2), tol=1e-10)

    assert result.breakdown
    assert not result.converged
    assert result.iterations == 0
    assert result.message == "p^T A p vanished"


def test_jacobi_preconditioning_helps_pcg():
    d = np.linspace(1.0, 1e4, 200)
    A = np.diag(d) + 0.1 * (np.eye(200, k=1) + np.eye(200, k=-1))
    g = np.ones(200)
    plain = pcg(lambda x: A @ x, None, g, tol=1e-8)
    jacobi = pcg(lambda x: A @ x, lambda r: r / d, g, tol=1e-8)

    assert jacobi.converged
    assert jacobi.iterations < plain.iterations


@pytest.mark.parametrize("method", [gmres, bicgstab])
def test_nonsymmetric_solvers(method):
    A = _nonsymmetric()
    g = np.arange(1.0, A.shape[0] + 1.0)
    result = method(lambda x: A @ x, None, g, tol=1e-10)

    assert result.converged
    np.testing.assert_allclose(result.solution, np.linalg.solve(A, g), rtol=1e-7)
    true = np.linalg.norm(g - A @ result.solution) / np.linalg.norm(g)
    assert result.relative_residual == pytest.approx(true, rel=1e-6, abs=1e-16)


def test_exact_preconditioner_iteration_counts():
    """With M = A^{-1}: one CG step, one GMRES step, half a BiCGStab step."""
    A = _nonsymmetric()
    S = _spd()
    g = np.ones(A.shape[0])
    A_inv = np.linalg.inv(A)
    S_inv = np.linalg.inv(S)

    assert pcg(lambda x: S @ x, lambda r: S_inv @ r, g, tol=1e-8).iterations == 1
    assert gmres(lambda x: A @ x, lambda r: A_inv @ r, g, tol=1e-8).iterations == 1
    assert bicgstab(lambda x: A @ x, lambda r: A_inv @ r, g, tol=1e-8).iterations == 0.5


def test_zero_rhs_returns_zero():
    for method in (pcg, gmres, bicgstab):
        result = method(lambda x: 2.0 * x, None, np.zeros(5))
        assert result.converged
        assert result.iterations == 0
        np.testing.assert_array_equal(result.solution, 0.0)


def test_gmres_history_is_monotone():
    A = _nonsymmetric(60, seed=4)
    result = gmres(lambda x: A @ x, None, np.ones(60), tol=1e-12)
    history = np.array(result.residual_history)

    assert np.all(np.diff(history) <= 1e-12)


def test_restarted_gmres_converges():
    A = _nonsymmetric(60, seed=5)
    g = np.ones(60)
    result = gmres(lambda x: A @ x, None, g, tol=1e-10, restart=5)

    assert result.converged
    assert result.iterations > 5
    np.testing.assert_allclose(A @ result.solution, g, atol=1e-8)


def test_bicgstab_counts_half_steps():
    A = _nonsymmetric(30, seed=2)
    result = bicgstab(lambda x: A @ x, None, np.ones(30), tol=1e-10)
    assert (2 * result.iterations) == int(2 * result.iterations)


def test_bicgstab_breakdown_carries_partial_result():
    """A skew operator makes r_hat^T A r vanish on the first step."""
    A = np.array([[0.0, 1.0], [-1.0, 0.0]])
    with pytest.raises(BreakdownError) as exc:
        bicgstab(lambda x: A @ x, None, np.array([1.0, 0.0]))
    result = exc.value.result

    assert isinstance(result, KrylovResult)
    assert result.breakdown
    assert not result.converged
    assert result.iterations == 0


def test_iteration_cap():
    A = _spd(50, seed=3)
    result = pcg(lambda x: A @ x, None, np.ones(50), tol=1e-14, max_iters=2)
    assert not result.converged
    assert result.iterations == 2
    assert result.message == "max iterations reached"


@pytest.mark.parametrize("method", [pcg, gmres, bicgstab])
def test_non_finite_operator_raises(method):
    with pytest.raises(DivergenceError):
        method(lambda x: x * np.nan, None, np.ones(4))


@pytest.mark.parametrize("method", [pcg, gmres, bicgstab])
def test_operator_shape_is_checked(method):
    with pytest.raises(DimensionError):
        method(lambda x: np.ones(x.size + 1), None, np.ones(4))


def test_invalid_tolerance():
    with pytest.raises(ValidationError):
        pcg(lambda x: x, None, np.ones(3), tol=0.0)
    with pytest.raises(ValidationError):
        gmres(lambda x: x, None, np.ones(3), restart=0)


def test_solve_dispatch():
    A = _spd(20)
    g = np.ones(20)
    for method in KrylovMethod:
        result = solve(lambda x: A @ x, None, g, KrylovConfig(method=method, tol=1e-9))
        assert result.converged, method
