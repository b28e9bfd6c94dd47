"""Pointwise Kelvin matrix, its derivatives, traction kernel and rigid motions.

Conventions: ``L Gamma = delta I`` with ``L u = mu lap u + (lambda+mu) grad div u``.
Gradient tensors are indexed ``G[..., i, k, m] = d_m Gamma_ik`` and
Hessians ``H[..., i, k, m, n] = d_m d_n Gamma_ik``; the traction of the
k-th column of Gamma is the k-th column of the traction matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .material import LameParams

EYE2 = np.eye(2)


class SingularEvaluationError(ValueError):
    """A kernel was evaluated at the origin."""


def _radii(x, dim):
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != dim:
        raise ValueError(f"expected points of dimension {dim}, got shape {x.shape}")
    r2 = np.sum(x * x, axis=-1)
    if np.any(r2 == 0.0):
        raise SingularEvaluationError("Kelvin matrix is singular at x = 0")
    return x, r2


def kelvin_matrix(p: LameParams, x) -> np.ndarray:
    x, r2 = _radii(x, p.dim)
    xx = x[..., :, None] * x[..., None, :]
    eye = np.eye(p.dim)
    if p.dim == 2:
        a, b = p.alpha / (2 * np.pi), p.beta / (2 * np.pi)
        return a * 0.5 * np.log(r2)[..., None, None] * eye - b * xx / r2[..., None, None]
    # the 3D quadratic term carries beta/(4 pi); this is the choice that makes
    # L Gamma vanish away from the origin
    r = np.sqrt(r2)[..., None, None]
    return -p.alpha / (4 * np.pi) * eye / r - p.beta / (4 * np.pi) * xx / r**3


def _grad2(a, b, x, r2):
    # d_m G_ik = a d_ik x_m / r2 - b[(d_im x_k + d_km x_i)/r2 - 2 x_i x_k x_m / r4]
    inv = 1.0 / r2[..., None, None, None]
    e = EYE2
    xi = x[..., :, None, None]
    xk = x[..., None, :, None]
    xm = x[..., None, None, :]
    t1 = a * e[:, :, None] * xm * inv
    t2 = e[:, None, :] * xk + e[None, :, :] * xi
    return t1 - b * (t2 * inv - 2.0 * xi * xk * xm * inv**2)


def _hess2(a, b, x, r2):
    e = EYE2
    inv = 1.0 / r2[..., None, None, None, None]
    xi = x[..., :, None, None, None]
    xk = x[..., None, :, None, None]
    xm = x[..., None, None, :, None]
    xn = x[..., None, None, None, :]
    d_ik = e[:, :, None, None]
    d_im = e[:, None, :, None]
    d_km = e[None, :, :, None]
    d_in = e[:, None, None, :]
    d_kn = e[None, :, None, :]
    d_mn = e[None, None, :, :]
    log_part = a * d_ik * (d_mn * inv - 2.0 * xm * xn * inv**2)
    q = (
        (d_im * d_kn + d_km * d_in) * inv
        - 2.0 * (d_im * xk + d_km * xi) * xn * inv**2
        - 2.0 * (d_in * xk * xm + d_kn * xi * xm + d_mn * xi * xk) * inv**2
        + 8.0 * xi * xk * xm * xn * inv**3
    )
    return log_part - b * q


def kelvin_derivatives(p: LameParams, x, order: int) -> np.ndarray:
    """Exact first (``order=1``) or second (``order=2``) derivatives of Gamma."""
    if p.dim != 2:
        raise NotImplementedError("derivatives are provided for d = 2 only")
    if order not in (1, 2):
        raise ValueError(f"unsupported derivative order {order}")
    x, r2 = _radii(x, 2)
    a, b = p.alpha / (2 * np.pi), p.beta / (2 * np.pi)
    return _grad2(a, b, x, r2) if order == 1 else _hess2(a, b, x, r2)


def traction_from_gradient(p: LameParams, grad, n) -> np.ndarray:
    """Traction ``lambda div(u) n + mu (grad u + grad u^T) n`` of vector fields.

    ``grad[..., i, k, m]`` is ``d_m u_i`` of the k-th field, so the result's
    k-th column is the traction of field k.  A single field may be passed as
    ``grad[..., i, m]``.
    """
    grad = np.asarray(grad, dtype=float)
    n = np.asarray(n, dtype=float)
    single = grad.ndim == n.ndim + 1
    if single:
        grad = grad[..., :, None, :]
    div = np.einsum("...mkm->...k", grad)
    t = p.lam * n[..., :, None] * div[..., None, :]
    t = t + p.mu * (
        np.einsum("...ikm,...m->...ik", grad, n) + np.einsum("...mki,...m->...ik", grad, n)
    )
    return t[..., 0] if single else t


def traction_kernel(p: LameParams, x, n) -> np.ndarray:
    n = np.asarray(n, dtype=float)
    if np.any(np.abs(np.linalg.norm(n, axis=-1) - 1.0) > 1e-12):
        raise ValueError("normal must be a unit vector")
    return traction_from_gradient(p, kelvin_derivatives(p, x, 1), n)


@dataclass(frozen=True)
class RigidBasis:
    """Translations and the infinitesimal rotation about the origin (d = 2)."""

    dim: int = 2

    def __len__(self):
        return self.dim * (self.dim + 1) // 2

    def values(self, pts) -> np.ndarray:
        """Array of shape (3, M, 2): ``psi_l`` evaluated at each point."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        out = np.zeros((3, len(pts), 2))
        out[0, :, 0] = 1.0
        out[1, :, 1] = 1.0
        out[2, :, 0] = -pts[:, 1]
        out[2, :, 1] = pts[:, 0]
        return out

    def gradients(self, pts) -> np.ndarray:
        """Shape (3, M, 2, 2), ``[l, :, i, m] = d_m psi_l_i``."""
        pts = np.atleast_2d(pts)
        out = np.zeros((3, len(pts), 2, 2))
        out[2, :, 0, 1] = -1.0
        out[2, :, 1, 0] = 1.0
        return out

    def fields(self):
        return [lambda x, l=l: self.values(x)[l] for l in range(3)]


def rigid_basis(d: int = 2) -> RigidBasis:
    if d != 2:
        raise ValueError(f"rigid basis available for d = 2 only, got d = {d}")
    return RigidBasis(2)
