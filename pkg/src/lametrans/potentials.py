"""Nyström discretization of the elastic single layer S and the operator K*.

Self-interaction blocks use spectral quadratures for the two singular
pieces of the 2D kernels:

* the logarithm in Gamma, split off as ``ln(4 sin^2((t-s)/2))`` and
  integrated with the Kress weights;
* the Cauchy part of the traction kernel, ``c0 J (r x n)/|r|^2``, whose
  leading term ``1/2 cot((s-t)/2)`` is integrated exactly on trigonometric
  polynomials (conjugate-function quadrature).

All remaining pieces are smooth on analytic curves and use the trapezoid
rule with analytic diagonal limits.  Densities are (N, 2) arrays; operator
matrices act on the interleaved flattening ``values.reshape(-1)``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _core
from .geometry import TWO_PI, BoundaryGrid
from .kernels import rigid_basis, traction_from_gradient
from .material import LameParams


class NearBoundaryWarning(UserWarning):
    """An evaluation point is closer to the boundary than the trapezoid rule resolves."""


# points closer than this many node spacings are flagged
NEAR_FACTOR = 5.0


@dataclass(frozen=True)
class Density:
    grid: BoundaryGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float).reshape(self.grid.n, 2)
        if not np.all(np.isfinite(v)):
            raise ValueError("density has non-finite values")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def flat(self):
        return self.values.reshape(-1)

    def __add__(self, other):
        return Density(self.grid, self.values + _values(other))

    def __sub__(self, other):
        return Density(self.grid, self.values - _values(other))

    def __mul__(self, c):
        return Density(self.grid, self.values * c)

    __rmul__ = __mul__


def _values(phi):
    return phi.values if isinstance(phi, Density) else np.asarray(phi, dtype=float)


@dataclass(frozen=True)
class DenseOperator:
    source: BoundaryGrid
    target: BoundaryGrid | None
    matrix: np.ndarray
    kind: str

    def apply(self, phi):
        v = self.matrix @ _values(phi).reshape(-1)
        tgt = self.target if self.target is not None else self.source
        return Density(tgt, v.reshape(-1, 2))

    __call__ = apply


def kress_log_weights(n: int) -> np.ndarray:
    """``R[d]`` with ``sum_j R[(i-j) % n] f(t_j) ~ int ln(4 sin^2((t_i-s)/2)) f(s) ds``."""
    h = n // 2
    d = np.arange(n)
    m = np.arange(1, h)
    arg = TWO_PI * d[:, None] * m[None, :] / n
    return -(TWO_PI / h) * np.sum(np.cos(arg) / m, axis=1) - (np.pi / h**2) * np.cos(np.pi * d)


def hilbert_weights(n: int) -> np.ndarray:
    """``T[d]`` with ``sum_j T[(i-j) % n] f(t_j) ~ p.v. int 1/2 cot((s-t_i)/2) f(s) ds``."""
    d = np.arange(n)
    k = np.arange(1, n // 2)
    return -(TWO_PI / n) * np.sum(np.sin(TWO_PI * d[:, None] * k[None, :] / n), axis=1)


def _circulant(v):
    n = len(v)
    idx = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
    return v[idx]


def _expand_scalar(s):
    """Scalar n x n matrix acting as s * I on interleaved 2-vectors."""
    n = s.shape[0]
    out = np.zeros((2 * n, 2 * n))
    out[0::2, 0::2] = s
    out[1::2, 1::2] = s
    return out


def _tdiff(grid):
    return grid.t[:, None] - grid.t[None, :]


@lru_cache(maxsize=24)
def _single_layer_self(lam, mu, curve, n):
    p = LameParams(lam, mu)
    g = BoundaryGrid(curve, n)
    a, b = p.alpha / TWO_PI, p.beta / TWO_PI
    M = _core.single_layer_matrix(lam, mu, g.points, g.points, g.weights)
    dt = _tdiff(g)
    off = ~np.eye(n, dtype=bool)
    log4 = np.zeros((n, n))
    log4[off] = np.log(4.0 * np.sin(0.5 * dt[off]) ** 2)
    # replace ln|r| by the smooth remainder ln|r| - 1/2 ln(4 sin^2) off the diagonal
    corr = -a * 0.5 * log4 * g.weights[None, :]
    R = _circulant(kress_log_weights(n))
    corr += a * 0.5 * R * g.speed[None, :]
    M += _expand_scalar(corr)
    tau = g.dx / g.speed[:, None]
    diag = a * np.log(g.speed)[:, None, None] * np.eye(2) - b * tau[:, :, None] * tau[:, None, :]
    i = np.arange(n)
    for c in range(2):
        for e in range(2):
            M[2 * i + c, 2 * i + e] += g.weights * diag[:, c, e]
    M.setflags(write=False)
    return M


@lru_cache(maxsize=24)
def _kstar_self(lam, mu, curve, n):
    g = BoundaryGrid(curve, n)
    c0 = mu / (TWO_PI * (2 * mu + lam))
    c1 = (mu + lam) / (np.pi * (2 * mu + lam))
    K = _core.traction_matrix(lam, mu, g.points, g.normals, g.points, g.weights)
    dt = _tdiff(g)
    off = ~np.eye(n, dtype=bool)
    cot = np.zeros((n, n))
    cot[off] = 0.5 / np.tan(-0.5 * dt[off])  # 1/2 cot((s - t)/2)
    H = _circulant(hilbert_weights(n)) - (TWO_PI / n) * cot
    sp2 = g.speed**2
    Gdiag = np.sum(g.dx * g.ddx, axis=1) / (2 * sp2)
    H[np.diag_indices(n)] += (TWO_PI / n) * Gdiag
    # J = [[0, 1], [-1, 0]]
    K[0::2, 1::2] += c0 * H
    K[1::2, 0::2] -= c0 * H
    tau = g.dx / g.speed[:, None]
    rn = -np.sum(g.ddx * g.normals, axis=1) / (2 * sp2)
    diag = rn[:, None, None] * (c0 * np.eye(2) + c1 * tau[:, :, None] * tau[:, None, :])
    i = np.arange(n)
    for c in range(2):
        for e in range(2):
            K[2 * i + c, 2 * i + e] += g.weights * diag[:, c, e]
    K.setflags(write=False)
    return K


def single_layer_block(p: LameParams, src: BoundaryGrid, tgt: BoundaryGrid | None = None):
    """Matrix of S from ``src`` densities to values on ``tgt`` (self if None)."""
    if tgt is None or tgt is src:
        return _single_layer_self(p.lam, p.mu, src.curve, src.n)
    return _core.single_layer_matrix(p.lam, p.mu, tgt.points, src.points, src.weights)


def kstar_block(p: LameParams, src: BoundaryGrid, tgt: BoundaryGrid | None = None):
    """Self block: K*.  Cross block: traction of S[.] on another curve (smooth)."""
    if tgt is None or tgt is src:
        return _kstar_self(p.lam, p.mu, src.curve, src.n)
    return _core.traction_matrix(p.lam, p.mu, tgt.points, tgt.normals, src.points, src.weights)


def assemble_single_layer(p: LameParams, src: BoundaryGrid, tgt="self") -> DenseOperator:
    if p.dim != 2:
        raise NotImplementedError("quadrature is implemented for d = 2 only")
    if isinstance(tgt, str):
        if tgt != "self":
            raise ValueError(f"unknown target {tgt!r}")
        return DenseOperator(src, None, single_layer_block(p, src), "single_layer")
    if tgt.curve == src.curve and tgt.n != src.n:
        raise ValueError("self-assembly requires identical source and target grids")
    if tgt.curve == src.curve:
        return DenseOperator(src, None, single_layer_block(p, src), "single_layer")
    return DenseOperator(src, tgt, single_layer_block(p, src, tgt), "single_layer")


def assemble_kstar(p: LameParams, grid: BoundaryGrid) -> DenseOperator:
    if p.dim != 2:
        raise NotImplementedError("quadrature is implemented for d = 2 only")
    return DenseOperator(grid, None, kstar_block(p, grid), "kstar")


def conormal_trace(p: LameParams, grid: BoundaryGrid, phi, side: str, kstar=None) -> Density:
    """``(+-1/2 I + K*)[phi]``: traction of S[phi] from outside (+) or inside (-)."""
    if side not in ("+", "-"):
        raise ValueError("side must be '+' or '-'")
    K = kstar.matrix if kstar is not None else kstar_block(p, grid)
    v = _values(phi).reshape(-1)
    sgn = 0.5 if side == "+" else -0.5
    return Density(grid, (sgn * v + K @ v).reshape(-1, 2))


def fourier_interpolate(values, m: int) -> np.ndarray:
    """Trigonometric interpolation of equispaced periodic samples onto m >= n nodes."""
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    if m == n:
        return values.copy()
    if m < n or m % 2 or n % 2:
        raise ValueError("can only upsample between even node counts")
    c = np.fft.fft(values, axis=0)
    h = n // 2
    out = np.zeros((m,) + values.shape[1:], dtype=complex)
    out[:h] = c[:h]
    out[-h + 1 :] = c[h + 1 :]
    # split the Nyquist mode symmetrically
    out[h] = 0.5 * c[h]
    out[-h] = 0.5 * c[h]
    return np.fft.ifft(out, axis=0).real * (m / n)


def eval_potential(p: LameParams, src: BoundaryGrid, phi, points, order: int = 0,
                   upsample: int | None = None, warn: bool = True):
    """Values (and gradients if ``order == 1``) of S[phi] at off-boundary points.

    ``upsample`` re-samples the curve and interpolates the density onto that
    many nodes first, which extends the accurate region towards the boundary.
    Gradients are indexed ``[..., i, m] = d_m u_i``.
    """
    if order not in (0, 1):
        raise ValueError("order must be 0 or 1")
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    vals = _values(phi).reshape(src.n, 2)
    grid = src
    if upsample and upsample > src.n:
        grid = BoundaryGrid(src.curve, upsample)
        vals = fourier_interpolate(vals, upsample)
    if warn:
        from .geometry import min_distance

        close = min_distance(pts, grid) < NEAR_FACTOR * grid.spacing
        if np.any(close):
            warnings.warn(
                f"{int(close.sum())} point(s) within {NEAR_FACTOR:g} node spacings of the "
                "boundary; trapezoid evaluation is inaccurate there",
                NearBoundaryWarning,
                stacklevel=2,
            )
    v, g = _core.single_layer_apply(p.lam, p.mu, pts, grid.points, grid.weights[:, None] * vals, order == 1)
    return (v, g) if order == 1 else v


def traction_at(p: LameParams, grad, normals) -> np.ndarray:
    return traction_from_gradient(p, grad, normals)


def fourier_coefficients(values) -> tuple[np.ndarray, np.ndarray]:
    """``(k, c)`` with ``c[k] = (1/N) sum_m f(t_m) exp(-i k t_m)``."""
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    return np.fft.fftfreq(n, 1.0 / n), np.fft.fft(values, axis=0) / n


def sobolev_norm(grid: BoundaryGrid, phi, s: float) -> float:
    """Parametric H^s proxy: ``2 pi sum_k (1 + k^2)^s sum_c |c_k|^2``."""
    if s not in (-0.5, 0.5):
        raise ValueError("s must be -1/2 or +1/2")
    k, c = fourier_coefficients(_values(phi).reshape(grid.n, 2))
    w = (1.0 + k**2) ** s
    return float(np.sqrt(TWO_PI * np.sum(w[:, None] * np.abs(c) ** 2)))


def rigid_moments(grid: BoundaryGrid, phi) -> np.ndarray:
    """Weighted pairings ``<phi, psi_l>`` for the three rigid motions."""
    psi = rigid_basis(2).values(grid.points)
    return np.einsum("m,lmc,mc->l", grid.weights, psi, _values(phi).reshape(grid.n, 2))


def rigid_gram(grid: BoundaryGrid) -> np.ndarray:
    psi = rigid_basis(2).values(grid.points)
    return np.einsum("m,lmc,kmc->lk", grid.weights, psi, psi)


def project_psi(grid: BoundaryGrid, phi) -> Density:
    """Remove the weighted-L2 projection of phi onto the rigid motions."""
    vals = _values(phi).reshape(grid.n, 2)
    c = np.linalg.solve(rigid_gram(grid), rigid_moments(grid, vals))
    psi = rigid_basis(2).values(grid.points)
    return Density(grid, vals - np.einsum("l,lmc->mc", c, psi))


def rigid_columns(grid: BoundaryGrid) -> np.ndarray:
    """(2N, 3): the rigid motions sampled at the nodes, interleaved."""
    return rigid_basis(2).values(grid.points).reshape(3, -1).T


def weighted_rigid_columns(grid: BoundaryGrid) -> np.ndarray:
    """(2N, 3): columns c with ``c^T phi_flat = <phi, psi_l>``."""
    return rigid_columns(grid) * np.repeat(grid.weights, 2)[:, None]
