"""Reference-element shape functions, quadrature and Stokes element matrices.

The reference cube is [-1, 1]^3; local node i sits at LOCAL_OFFSETS[i] - 1.
All elements of a uniform mesh are translates of one another, so a single
element matrix serves the whole mesh.
"""

from __future__ import annotations

from typing import Callable, Tuple

import numpy as np

from ..errors import ValidationError
from .mesh import LOCAL_OFFSETS, VERTEX_OFFSETS, ElementFamily

REFERENCE_NODES = (LOCAL_OFFSETS - 1).astype(np.float64)
REFERENCE_VERTICES = (VERTEX_OFFSETS - 1).astype(np.float64)


def gauss_legendre(n_points: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre points and weights on [-1, 1]."""
    if n_points < 1:
        raise ValidationError("quadrature needs at least one point", "n_points")
    return np.polynomial.legendre.leggauss(n_points)


def tensor_quadrature(n_points: int) -> Tuple[np.ndarray, np.ndarray]:
    """Tensor-product Gauss rule on the reference cube.

    Returns:
        points (n^3, 3) and weights (n^3,)
    """
    x, w = gauss_legendre(n_points)
    gx, gy, gz = np.meshgrid(x, x, x, indexing="ij")
    wx, wy, wz = np.meshgrid(w, w, w, indexing="ij")
    points = np.stack([gx.ravel(), gy.ravel(), gz.ravel()], axis=1)
    return points, (wx * wy * wz).ravel()


def _lagrange_1d(t: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Quadratic Lagrange basis at nodes -1, 0, 1 and its derivative.

    Returns arrays of shape (q, 3) indexed by node position 0, 1, 2.
    """
    values = np.stack([0.5 * t * (t - 1.0), 1.0 - t * t, 0.5 * t * (t + 1.0)], axis=1)
    derivs = np.stack([t - 0.5, -2.0 * t, t + 0.5], axis=1)
    return values, derivs


def q2_shape(points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Triquadratic (27-node) shape functions.

    Args:
        points: (q, 3) reference coordinates

    Returns:
        N (q, 27) and dN (q, 27, 3)
    """
    pts = np.atleast_2d(points)
    idx = LOCAL_OFFSETS.astype(np.int64)  # node position per axis in {0, 1, 2}
    vals, ders = [], []
    for d in range(3):
        v, dv = _lagrange_1d(pts[:, d])
        vals.append(v[:, idx[:, d]])
        ders.append(dv[:, idx[:, d]])
    N = vals[0] * vals[1] * vals[2]
    dN = np.stack(
        [ders[0] * vals[1] * vals[2], vals[0] * ders[1] * vals[2], vals[0] * vals[1] * ders[2]],
        axis=2,
    )
    return N, dN


def q2s_shape(points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """20-node serendipity shape functions.

    Returns:
        N (q, 20) and dN (q, 20, 3)
    """
    pts = np.atleast_2d(points)
    nodes = REFERENCE_NODES[:20]
    q = pts.shape[0]
    N = np.empty((q, 20))
    dN = np.empty((q, 20, 3))

    # vertices: (1/8) prod(1 + x_d c_d) (sum_d x_d c_d - 2)
    c = nodes[:8]
    lin = 1.0 + pts[:, None, :] * c[None, :, :]  # (q, 8, 3)
    s = (pts[:, None, :] * c[None, :, :]).sum(axis=2)
    prod = lin.prod(axis=2)
    N[:, :8] = 0.125 * prod * (s - 2.0)
    for d in range(3):
        others = np.prod(np.delete(lin, d, axis=2), axis=2)
        dN[:, :8, d] = 0.125 * c[None, :, d] * others * (s - 2.0) + 0.125 * prod * c[None, :, d]

    # edge midpoints: (1/4)(1 - x_a^2) prod_{d != a}(1 + x_d c_d), a the zero axis
    for i in range(8, 20):
        ci = nodes[i]
        a = int(np.flatnonzero(ci == 0.0)[0])
        rest = [d for d in range(3) if d != a]
        bubble = 1.0 - pts[:, a] ** 2
        f = [1.0 + pts[:, d] * ci[d] for d in rest]
        N[:, i] = 0.25 * bubble * f[0] * f[1]
        dN[:, i, a] = 0.25 * (-2.0 * pts[:, a]) * f[0] * f[1]
        dN[:, i, rest[0]] = 0.25 * bubble * ci[rest[0]] * f[1]
        dN[:, i, rest[1]] = 0.25 * bubble * f[0] * ci[rest[1]]
    return N, dN


def q1_shape(points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Trilinear shape functions at the 8 vertices.

    Returns:
        N (q, 8) and dN (q, 8, 3)
    """
    pts = np.atleast_2d(points)
    c = REFERENCE_VERTICES
    lin = 1.0 + pts[:, None, :] * c[None, :, :]
    N = 0.125 * lin.prod(axis=2)
    dN = np.empty(lin.shape)
    for d in range(3):
        dN[:, :, d] = 0.125 * c[None, :, d] * np.prod(np.delete(lin, d, axis=2), axis=2)
    return N, dN


def velocity_shape(family: ElementFamily, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    if ElementFamily(family) is ElementFamily.Q2Q1:
        return q2_shape(points)
    return q2s_shape(points)


def element_matrices(
    h: float,
    family: ElementFamily,
    viscosity: float,
    n_quad: int = 3,
) -> Tuple[np.ndarray, np.ndarray]:
    """Viscous and divergence matrices of one cubic element of edge h.

    Args:
        h: Element edge length
        family: Element family
        viscosity: Kinematic viscosity (> 0)
        n_quad: Gauss points per direction

    Returns:
        A_e (3k, 3k) with A_e = nu * kron(K, I3), and B_e (8, 3k) with
        B_e[q, 3j + b] = -int psi_q dN_j/dx_b
    """
    if viscosity <= 0.0:
        raise ValidationError(f"viscosity must be positive, got {viscosity}", "viscosity")
    points, weights = tensor_quadrature(n_quad)
    _, dN = velocity_shape(family, points)
    psi, _ = q1_shape(points)
    jac = 2.0 / h
    det = (h / 2.0) ** 3
    grad = dN * jac  # (q, k, 3)
    wq = weights * det

    K = viscosity * np.einsum("q,qid,qjd->ij", wq, grad, grad)
    A_e = np.kron(K, np.eye(3))
    B_e = -np.einsum("q,qp,qjb->pjb", wq, psi, grad).reshape(8, -1)
    return A_e, B_e


def saddle_element_matrix(A_e: np.ndarray, B_e: np.ndarray) -> np.ndarray:
    """Element saddle-point matrix [[A_e, B_e^T], [B_e, 0]]."""
    k3 = A_e.shape[0]
    n_p = B_e.shape[0]
    K_e = np.zeros((k3 + n_p, k3 + n_p))
    K_e[:k3, :k3] = A_e
    K_e[:k3, k3:] = B_e.T
    K_e[k3:, :k3] = B_e
    return K_e


def element_load(
    h: float,
    family: ElementFamily,
    origins: np.ndarray,
    force: Callable[[np.ndarray], np.ndarray],
    n_quad: int = 3,
) -> np.ndarray:
    """Consistent load vectors of many elements.

    Args:
        origins: (n_el, 3) physical coordinates of each element's lower corner
        force: Maps (M, 3) coordinates to (M, 3) body-force values

    Returns:
        (n_el, 3k) element load vectors in node-major order
    """
    points, weights = tensor_quadrature(n_quad)
    N, _ = velocity_shape(family, points)
    physical = origins[:, None, :] + (points[None, :, :] + 1.0) * (h / 2.0)
    f = np.asarray(force(physical.reshape(-1, 3)), dtype=np.float64).reshape(origins.shape[0], -1, 3)
    wq = weights * (h / 2.0) ** 3
    return np.einsum("q,qi,eqb->eib", wq, N, f).reshape(origins.shape[0], -1)
