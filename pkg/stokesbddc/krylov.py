"""Preconditioned Krylov drivers: PCG, GMRES and BiCGStab.

Every driver starts from x0 = 0, stops once the true relative residual
||g - A x|| / ||g|| falls below `tol`, and reports that residual. Operators
are plain callables, so sparse matrices, Schur operators and preconditioners
plug in alike.
"""

from __future__ import annotations

from typing import List, Optional

import numpy as np
import scipy.linalg

from .config import KrylovConfig, KrylovMethod
from .errors import BreakdownError, DimensionError, DivergenceError, ValidationError
from .logging import krylov_logger
from .types import KrylovResult, LinearMap

BREAKDOWN_TOL = 1e-14


def _identity(r: np.ndarray) -> np.ndarray:
    return r.copy()


def _check_finite(method: str, iteration: float, *arrays: np.ndarray) -> None:
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise DivergenceError(method, iteration)


def _prepare(
    method: str,
    g: np.ndarray,
    tol: float,
    max_iters: int,
) -> np.ndarray:
    if tol <= 0.0:
        raise ValidationError(f"tolerance must be positive, got {tol}", "tol")
    if max_iters < 1:
        raise ValidationError(f"max_iters must be at least 1, got {max_iters}", "max_iters")
    g = np.asarray(g, dtype=np.float64)
    if g.ndim != 1:
        raise DimensionError(method, "1-D right-hand side", g.shape)
    return g


def _true_residual(apply_A: LinearMap, g: np.ndarray, x: np.ndarray, g_norm: float) -> float:
    return float(np.linalg.norm(g - apply_A(x)) / g_norm)


def _checked(method: str, apply: LinearMap, v: np.ndarray) -> np.ndarray:
    out = np.asarray(apply(v), dtype=np.float64)
    if out.shape != v.shape:
        raise DimensionError(method, v.shape, out.shape)
    return out


def _trivial(g: np.ndarray) -> KrylovResult:
    return KrylovResult(
        solution=np.zeros_like(g),
        iterations=0,
        relative_residual=0.0,
        converged=True,
        residual_history=[0.0],
        message="zero right-hand side",
    )


def pcg(
    apply_A: LinearMap,
    apply_M: Optional[LinearMap],
    g: np.ndarray,
    tol: float = 1e-6,
    max_iters: int = 1000,
) -> KrylovResult:
    """Preconditioned conjugate gradients.

    Negative curvature (p^T A p < 0) is logged and flagged on the result; the
    iteration carries on. Only an exact p^T A p = 0, a vanishing r^T z,
    non-finite values or the iteration cap stop it early.

    Args:
        apply_A: Operator, expected symmetric
        apply_M: Preconditioner, or None for identity
        g: Right-hand side
        tol: Relative residual tolerance
        max_iters: Iteration cap

    Returns:
        KrylovResult
    """
    method = "pcg"
    g = _prepare(method, g, tol, max_iters)
    g_norm = float(np.linalg.norm(g))
    if g_norm == 0.0:
        return _trivial(g)
    M = apply_M or _identity

    x = np.zeros_like(g)
    r = g.copy()
    z = _checked(method, M, r)
    p = z.copy()
    rz = float(r @ z)
    history: List[float] = [1.0]
    breakdown = False
    negative_curvature = False
    message = "max iterations reached"
    converged = False
    iterations = 0

    for it in range(1, max_iters + 1):
        q = _checked(method, apply_A, p)
        pq = float(p @ q)
        _check_finite(method, it, q)
        if pq == 0.0:
            breakdown = True
            message = "p^T A p vanished"
            break
        if pq < 0.0 and not negative_curvature:
            negative_curvature = True
            krylov_logger.warning(f"pcg: negative curvature at iteration {it}")

        alpha = rz / pq
        x += alpha * p
        r -= alpha * q
        _check_finite(method, it, x)
        iterations = it
        rel = float(np.linalg.norm(r) / g_norm)
        history.append(rel)
        krylov_logger.debug(f"pcg it={it} rel_res={rel:.3e}")

        if rel < tol:
            r = g - apply_A(x)
            if float(np.linalg.norm(r) / g_norm) < tol:
                converged = True
                message = "converged"
                break
        z = _checked(method, M, r)
        rz_new = float(r @ z)
        if rz == 0.0:
            breakdown = True
            message = "r^T z vanished"
            break
        p = z + (rz_new / rz) * p
        rz = rz_new

    return KrylovResult(
        solution=x,
        iterations=iterations,
        relative_residual=_true_residual(apply_A, g, x, g_norm),
        converged=converged,
        residual_history=history,
        breakdown=breakdown,
        negative_curvature=negative_curvature,
        message=message,
    )


def gmres(
    apply_A: LinearMap,
    apply_M: Optional[LinearMap],
    g: np.ndarray,
    tol: float = 1e-8,
    max_iters: int = 1000,
    restart: Optional[int] = None,
) -> KrylovResult:
    """Left-preconditioned GMRES with Givens rotations.

    The Arnoldi process runs on M A; the products A v_j are kept so the true
    residual g - A x_j is available at every step without another operator
    application. Convergence is judged on that true residual.

    Args:
        restart: Cycle length, or None for unrestarted GMRES
    """
    method = "gmres"
    g = _prepare(method, g, tol, max_iters)
    g_norm = float(np.linalg.norm(g))
    if g_norm == 0.0:
        return _trivial(g)
    if restart is not None and restart < 1:
        raise ValidationError(f"restart must be at least 1, got {restart}", "restart")
    M = apply_M or _identity

    x = np.zeros_like(g)
    history: List[float] = [1.0]
    total = 0
    converged = False
    message = "max iterations reached"
    beta0: Optional[float] = None

    while total < max_iters and not converged:
        r = g - apply_A(x) if total else g.copy()
        z = _checked(method, M, r)
        beta = float(np.linalg.norm(z))
        if beta0 is None:
            beta0 = beta
        if beta == 0.0:
            message = "preconditioned residual vanished"
            break
        cycle = min(restart or max_iters, max_iters - total)

        V: List[np.ndarray] = [z / beta]
        AV = np.zeros((min(cycle, 32), g.size))
        H = np.zeros((cycle + 1, cycle))
        cs = np.zeros(cycle)
        sn = np.zeros(cycle)
        s = np.zeros(cycle + 1)
        s[0] = beta
        y = np.zeros(0)
        happy = False

        for j in range(cycle):
            if j == AV.shape[0]:
                AV = np.vstack([AV, np.zeros_like(AV)])
            AV[j] = _checked(method, apply_A, V[j])
            w = _checked(method, M, AV[j])
            _check_finite(method, total + 1, w)
            # modified Gram-Schmidt
            for i in range(j + 1):
                H[i, j] = w @ V[i]
                w -= H[i, j] * V[i]
            H[j + 1, j] = np.linalg.norm(w)
            happy = H[j + 1, j] <= BREAKDOWN_TOL * beta
            if not happy:
                V.append(w / H[j + 1, j])

            for i in range(j):
                hi = H[i, j]
                H[i, j] = cs[i] * hi + sn[i] * H[i + 1, j]
                H[i + 1, j] = -sn[i] * hi + cs[i] * H[i + 1, j]
            mod = np.hypot(H[j, j], H[j + 1, j])
            if mod == 0.0:
                message = "Arnoldi vector vanished"
                happy = True
                break
            cs[j] = H[j, j] / mod
            sn[j] = H[j + 1, j] / mod
            H[j, j] = mod
            H[j + 1, j] = 0.0
            s[j + 1] = -sn[j] * s[j]
            s[j] = cs[j] * s[j]

            total += 1
            history.append(abs(s[j + 1]) / beta0)
            y = scipy.linalg.solve_triangular(H[: j + 1, : j + 1], s[: j + 1])
            rel = float(np.linalg.norm(r - AV[: j + 1].T @ y) / g_norm)
            krylov_logger.debug(f"gmres it={total} rel_res={rel:.3e}")
            if rel < tol:
                converged = True
                message = "converged"
                break
            if happy or total >= max_iters:
                break

        if y.size:
            x = x + np.asarray(V[: y.size]).T @ y
        _check_finite(method, total, x)
        if happy and not converged:
            message = "Krylov space exhausted"
            break

    relative = _true_residual(apply_A, g, x, g_norm)
    return KrylovResult(
        solution=x,
        iterations=total,
        relative_residual=relative,
        converged=converged and relative < tol,
        residual_history=history,
        breakdown=not converged and message == "Krylov space exhausted",
        message=message,
    )


def bicgstab(
    apply_A: LinearMap,
    apply_M: Optional[LinearMap],
    g: np.ndarray,
    tol: float = 1e-8,
    max_iters: int = 1000,
) -> KrylovResult:
    """Right-preconditioned BiCGStab.

    Convergence is checked after each half step, so iteration counts move in
    steps of 0.5.

    Raises:
        BreakdownError: When rho or omega vanish; `result` holds the last iterate
    """
    method = "bicgstab"
    g = _prepare(method, g, tol, max_iters)
    g_norm = float(np.linalg.norm(g))
    if g_norm == 0.0:
        return _trivial(g)
    M = apply_M or _identity

    x = np.zeros_like(g)
    r = g.copy()
    r_hat = g.copy()
    p = np.zeros_like(g)
    v = np.zeros_like(g)
    rho = alpha = omega = 1.0
    history: List[float] = [1.0]
    iterations = 0.0

    def partial(reason: str) -> BreakdownError:
        result = KrylovResult(
            solution=x.copy(),
            iterations=iterations,
            relative_residual=_true_residual(apply_A, g, x, g_norm),
            converged=False,
            residual_history=history,
            breakdown=True,
            message=reason,
        )
        return BreakdownError(method, iterations, result, reason)

    for it in range(1, max_iters + 1):
        rho_new = float(r_hat @ r)
        if abs(rho_new) < BREAKDOWN_TOL * np.linalg.norm(r_hat) * np.linalg.norm(r):
            raise partial("rho vanished")
        if it == 1:
            p = r.copy()
        else:
            p = r + (rho_new / rho) * (alpha / omega) * (p - omega * v)
        p_hat = _checked(method, M, p)
        v = _checked(method, apply_A, p_hat)
        rv = float(r_hat @ v)
        if abs(rv) < BREAKDOWN_TOL * np.linalg.norm(r_hat) * np.linalg.norm(v):
            raise partial("r_hat^T v vanished")
        alpha = rho_new / rv
        s = r - alpha * v
        x_half = x + alpha * p_hat
        _check_finite(method, it - 0.5, x_half)

        rel = float(np.linalg.norm(s) / g_norm)
        history.append(rel)
        if rel < tol and _true_residual(apply_A, g, x_half, g_norm) < tol:
            return KrylovResult(
                solution=x_half,
                iterations=it - 0.5,
                relative_residual=_true_residual(apply_A, g, x_half, g_norm),
                converged=True,
                residual_history=history,
                message="converged",
            )

        s_hat = _checked(method, M, s)
        t = _checked(method, apply_A, s_hat)
        tt = float(t @ t)
        if tt == 0.0:
            x = x_half
            iterations = it - 0.5
            raise partial("t vanished")
        omega = float(t @ s) / tt
        if abs(omega) < BREAKDOWN_TOL:
            x = x_half
            iterations = it - 0.5
            raise partial("omega vanished")

        x = x_half + omega * s_hat
        r = s - omega * t
        rho = rho_new
        iterations = float(it)
        _check_finite(method, it, x)

        rel = float(np.linalg.norm(r) / g_norm)
        history.append(rel)
        krylov_logger.debug(f"bicgstab it={it} rel_res={rel:.3e}")
        if rel < tol:
            true = _true_residual(apply_A, g, x, g_norm)
            if true < tol:
                return KrylovResult(
                    solution=x,
                    iterations=iterations,
                    relative_residual=true,
                    converged=True,
                    residual_history=history,
                    message="converged",
                )
            r = g - apply_A(x)

    return KrylovResult(
        solution=x,
        iterations=iterations,
        relative_residual=_true_residual(apply_A, g, x, g_norm),
        converged=False,
        residual_history=history,
        message="max iterations reached",
    )


def solve(
    apply_A: LinearMap,
    apply_M: Optional[LinearMap],
    g: np.ndarray,
    config: KrylovConfig,
) -> KrylovResult:
    """Dispatch to the Krylov method named in `config`."""
    method = KrylovMethod(config.method)
    if method is KrylovMethod.PCG:
        result = pcg(apply_A, apply_M, g, config.tol, config.max_iters)
    elif method is KrylovMethod.GMRES:
        result = gmres(apply_A, apply_M, g, config.tol, config.max_iters, config.restart)
    else:
        result = bicgstab(apply_A, apply_M, g, config.tol, config.max_iters)
    krylov_logger.info(
        f"{method.value}: {result.iterations:g} iterations, rel_res={result.relative_residual:.3e}, "
        f"{'converged' if result.converged else result.message}"
    )
    return result
