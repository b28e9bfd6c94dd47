"""Neumann problem on a bounded domain with inclusions, and its Neumann function.

The background solution is ``U = S0_Omega[theta] + c . Psi`` with
``(-1/2 + K0*) theta = g`` and ``U|_{dOmega}`` orthogonal to the rigid
motions.  With inclusions the field outside them is
``u = S0_Omega[theta] + c . Psi + sum_a S0_a[phi_a]``, coupled to the
transmission conditions on every inclusion curve in a single bordered
system.

The Neumann function is normalized by ``L N(., y) = -delta_y I``,
``dN/dnu_0 = -sum_l psi~_l(x) psi~_l(y)^T`` on the boundary with
``psi~`` orthonormal rigid motions, and ``N(., y)|_{dOmega}`` orthogonal to
the rigid motions.  This flux is the compatible choice for every pole; it
only differs from ``-I/|dOmega|`` by rigid terms in ``y`` which integrate to
zero against rigid-orthogonal densities.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import _core
from . import potentials as pot
from .fields import BackgroundField
from .freespace import (
    _offsets,
    _rigid_border,
    _single_blocks,
    _split,
    _traction_blocks,
    _validate,
)
from .geometry import BoundaryGrid, min_distance
from .kernels import kelvin_derivatives, kelvin_matrix, rigid_basis, traction_kernel
from .material import ContrastPair, LameParams
from .numerics import BorderedSystem

_PSI = rigid_basis(2)


class IncompatibleDataWarning(UserWarning):
    """Neumann data had a rigid-motion component; it was projected out."""


class GeometryError(ValueError):
    """Inclusions leave the domain or come too close to its boundary."""


def _rigid_vals(pts):
    return _PSI.values(pts)


def check_compatibility(omega: BoundaryGrid, g, tol: float = 1e-10) -> np.ndarray:
    """Project rigid components out of ``g`` (warning when they exceed ``tol``)."""
    g = np.asarray(g, dtype=float).reshape(omega.n, 2)
    mom = pot.rigid_moments(omega, g)
    scale = max(1.0, float(np.sum(omega.weights[:, None] * np.abs(g))))
    if np.max(np.abs(mom)) > tol * scale:
        warnings.warn(
            f"Neumann data is incompatible (rigid moments {np.max(np.abs(mom)):.3g}); projecting",
            IncompatibleDataWarning,
            stacklevel=3,
        )
        # remove the component along G^{-1} psi so that all moments vanish
        coef = np.linalg.solve(pot.rigid_gram(omega), mom)
        g = g - np.einsum("l,lmc->mc", coef, _rigid_vals(omega.points))
    return g


@lru_cache(maxsize=8)
def _background_factor(lam, mu, curve, n):
    p0 = LameParams(lam, mu)
    om = BoundaryGrid(curve, n)
    A = pot.kstar_block(p0, om) - 0.5 * np.eye(2 * n)
    R, W = _rigid_border([om])
    return BorderedSystem(A, R, C=W).factor()


def _interior_neumann_solve(p0, omega, rhs):
    """``theta`` with ``(-1/2 + K0*) theta = rhs`` and ``<theta, Psi> = 0`` (multi-column)."""
    fac = _background_factor(p0.lam, p0.mu, omega.curve, omega.n)
    x, _ = fac.solve(rhs)
    return x


def _normalizing_shift(omega, trace):
    """Coefficients ``c`` with ``trace + c . Psi`` orthogonal to the rigid motions."""
    t = np.asarray(trace).reshape(omega.n, 2, -1)
    mom = np.einsum("m,lmc,mck->lk", omega.weights, _rigid_vals(omega.points), t)
    c = -np.linalg.solve(pot.rigid_gram(omega), mom)
    return c if t.shape[-1] > 1 else c[:, 0]


class LayerField(BackgroundField):
    """``S_Omega[theta] + c . Psi`` evaluated inside Omega."""

    kind = "layer"

    def __init__(self, p0: LameParams, omega: BoundaryGrid, theta, c):
        self.p0, self.omega = p0, omega
        self.theta = np.asarray(theta, dtype=float).reshape(omega.n, 2)
        self.c = np.asarray(c, dtype=float)

    def value(self, pts):
        pts = np.atleast_2d(pts)
        v = pot.eval_potential(self.p0, self.omega, self.theta, pts)
        return v + np.einsum("l,lmc->mc", self.c, _rigid_vals(pts))

    def gradient(self, pts):
        pts = np.atleast_2d(pts)
        _, g = pot.eval_potential(self.p0, self.omega, self.theta, pts, order=1)
        return g + np.einsum("l,lmij->mij", self.c, _PSI.gradients(pts))

    def hessian(self, pts):
        pts = np.atleast_2d(pts)
        wf = self.omega.weights[:, None] * self.theta
        out = np.zeros((len(pts), 2, 2, 2))
        for i, x in enumerate(pts):
            H = kelvin_derivatives(self.p0, x[None, :] - self.omega.points, 2)
            out[i] = np.einsum("jikmn,jk->imn", H, wf)
        return out

    def boundary_trace(self):
        S = pot.single_layer_block(self.p0, self.omega)
        v = (S @ self.theta.reshape(-1)).reshape(-1, 2)
        return v + np.einsum("l,lmc->mc", self.c, _rigid_vals(self.omega.points))


def solve_background(p0: LameParams, omega: BoundaryGrid, g) -> LayerField:
    g = check_compatibility(omega, pot._values(g))
    theta = _interior_neumann_solve(p0, omega, g.reshape(-1)).reshape(-1, 2)
    S = pot.single_layer_block(p0, omega)
    c = _normalizing_shift(omega, S @ theta.reshape(-1))
    return LayerField(p0, omega, theta, c)


@dataclass
class BvpSolution:
    p0: LameParams
    omega: BoundaryGrid
    grids: list
    g: np.ndarray
    theta: np.ndarray
    c: np.ndarray
    phi: list
    mode: str = "finite"
    pair: ContrastPair | None = None
    psi: list = field(default_factory=list)
    d: list = field(default_factory=list)
    cond: float = float("nan")

    @property
    def background(self) -> LayerField:
        """The field ``S0_Omega[theta] + c . Psi`` that plays the role of h."""
        return LayerField(self.p0, self.omega, self.theta, self.c)

    def boundary_trace(self) -> np.ndarray:
        """``u`` at the nodes of dOmega."""
        v = self.background.boundary_trace()
        for gr, f in zip(self.grids, self.phi):
            v = v + (pot.single_layer_block(self.p0, gr, self.omega) @ f.reshape(-1)).reshape(-1, 2)
        return v

    def energy(self) -> float:
        """``1/2 int_Omega C grad^s u : grad^s u`` via ``1/2 <u, g>`` on dOmega."""
        return 0.5 * float(np.sum(self.omega.weights[:, None] * self.boundary_trace() * self.g))

    def value(self, pts) -> np.ndarray:
        """u at interior points outside the inclusions (and inside them for the finite case)."""
        from .freespace import locate

        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        where = locate(self.grids, pts)
        out = np.zeros((len(pts), 2))
        sel = where < 0
        if np.any(sel):
            out[sel] = self.background.value(pts[sel])
            for gr, f in zip(self.grids, self.phi):
                out[sel] += pot.eval_potential(self.p0, gr, f, pts[sel])
        for a, gr in enumerate(self.grids):
            s = where == a
            if not np.any(s):
                continue
            if self.mode != "finite":
                raise ValueError("interior values are only available for finite contrast")
            out[s] = pot.eval_potential(self.pair.inclusion, gr, self.psi[a], pts[s])
            out[s] += np.einsum("l,lmc->mc", self.d[a], _rigid_vals(pts[s]))
        return out


def _check_geometry(omega, grids, min_gap):
    for a, gr in enumerate(grids):
        if not np.all(omega.curve.contains(gr.points)):
            raise GeometryError(f"inclusion {a} is not inside the domain")
        gap = float(np.min(min_distance(gr.points, omega)))
        if gap < min_gap:
            raise GeometryError(f"inclusion {a} is {gap:.3g} from the boundary (need {min_gap:g})")


def solve_with_inclusion(pair, omega: BoundaryGrid, curves, g, mode: str = "finite",
                         min_gap: float | None = None) -> BvpSolution:
    """Coupled Neumann/transmission solve.

    ``pair`` is a :class:`ContrastPair` for ``mode="finite"`` and the
    background :class:`LameParams` for the hard and soft limits.

    Unknowns ``[theta; phi_a; psi_a | c; m_Omega; d_a; m_a]``; the rows are
    the Neumann condition, value and traction continuity on every inclusion,
    then ``<u|dOmega, Psi> = 0``, ``<theta, Psi> = 0``, ``<psi_a, Psi> = 0``
    and ``<phi_a, Psi> = 0``.  In the limits the inclusion rows reduce to the
    vanishing interior (hard) or exterior (soft) traction of ``u``.
    """
    if mode not in ("finite", "hard", "soft"):
        raise ValueError("mode must be finite, hard or soft")
    if mode == "finite":
        if not isinstance(pair, ContrastPair):
            raise TypeError("finite mode needs a ContrastPair")
        p0, p1 = pair.background, pair.inclusion
    else:
        p0 = pair.background if isinstance(pair, ContrastPair) else pair
    grids = _validate(curves)
    if min_gap is None:
        min_gap = 2.0 * max(omega.spacing, max(gr.spacing for gr in grids))
    _check_geometry(omega, grids, min_gap)
    g = check_compatibility(omega, pot._values(g))

    nO = 2 * omega.n
    off = _offsets(grids)
    nD = off[-1]
    finite = mode == "finite"
    n = nO + nD * (2 if finite else 1)
    A = np.zeros((n, n))
    iphi = slice(nO, nO + nD)
    ipsi = slice(nO + nD, nO + 2 * nD)

    # Neumann condition on dOmega
    A[:nO, :nO] = pot.kstar_block(p0, omega) - 0.5 * np.eye(nO)
    SO_D = np.zeros((nO, nD))  # values of S0_D on dOmega
    for a, gr in enumerate(grids):
        A[:nO, nO + off[a] : nO + off[a + 1]] = pot.kstar_block(p0, gr, omega)
        SO_D[:, off[a] : off[a + 1]] = pot.single_layer_block(p0, gr, omega)
    S_DO = np.zeros((nD, nO))
    T_DO = np.zeros((nD, nO))
    for a, gr in enumerate(grids):
        S_DO[off[a] : off[a + 1]] = pot.single_layer_block(p0, omega, gr)
        T_DO[off[a] : off[a + 1]] = pot.kstar_block(p0, omega, gr)

    R_O = pot.rigid_columns(omega)
    W_O = pot.weighted_rigid_columns(omega)
    R_D, W_D = _rigid_border(grids)
    k = len(grids)
    if finite:
        # value rows: S1 psi + d Psi - S0 phi - S0_Omega theta - c Psi = 0
        rv = slice(nO, nO + nD)
        rt = slice(nO + nD, nO + 2 * nD)
        A[rv, iphi] = -_single_blocks(p0, grids)
        A[rv, :nO] = -S_DO
        A[rt, iphi] = -_traction_blocks(p0, grids, +1)
        A[rt, :nO] = -T_DO
        for a, gr in enumerate(grids):
            r = slice(nO + off[a], nO + off[a + 1])
            cols = slice(nO + nD + off[a], nO + nD + off[a + 1])
            A[r, cols] = pot.single_layer_block(p1, gr)
            A[nD + r.start : nD + r.stop, cols] = pot.kstar_block(p1, gr) - 0.5 * np.eye(2 * gr.n)
    else:
        rt = slice(nO, nO + nD)
        A[rt, iphi] = _traction_blocks(p0, grids, -1 if mode == "hard" else +1)
        A[rt, :nO] = T_DO

    # border columns: c, m_Omega, then per inclusion d_a (finite) and m_a
    nb = 6 + (6 if finite else 3) * k
    B = np.zeros((n, nb))
    C = np.zeros((n, nb))
    D = np.zeros((nb, nb))
    B[:nO, 3:6] = R_O  # multiplier on the Neumann rows
    # normalization row <u|dOmega, Psi> = 0
    C[:nO, 0:3] = (pot.single_layer_block(p0, omega).T @ W_O)
    C[iphi, 0:3] = SO_D.T @ W_O
    D[0:3, 0:3] = pot.rigid_gram(omega)
    C[:nO, 3:6] = W_O  # <theta, Psi> = 0
    if finite:
        for a, gr in enumerate(grids):
            rows_v = slice(nO + off[a], nO + off[a + 1])
            rows_t = slice(nO + nD + off[a], nO + nD + off[a + 1])
            Rg = pot.rigid_columns(gr)
            Wg = pot.weighted_rigid_columns(gr)
            B[rows_v, 0:3] = -Rg  # -c Psi on the value rows
            B[rows_v, 6 + 6 * a : 9 + 6 * a] = Rg  # d_a
            B[rows_t, 9 + 6 * a : 12 + 6 * a] = Rg  # m_a
            C[nO + nD + off[a] : nO + nD + off[a + 1], 6 + 6 * a : 9 + 6 * a] = Wg  # <psi_a, Psi>
            C[nO + off[a] : nO + off[a + 1], 9 + 6 * a : 12 + 6 * a] = Wg  # <phi_a, Psi>
    else:
        B[nO:, 6:] = R_D
        C[nO:, 6:] = W_D

    fac = BorderedSystem(A, B, C=C, D=D).factor()
    rhs = np.zeros(n)
    rhs[:nO] = g.reshape(-1)
    x, y = fac.solve(rhs)
    sol = BvpSolution(
        p0=p0,
        omega=omega,
        grids=grids,
        g=g,
        theta=x[:nO].reshape(-1, 2),
        c=y[0:3],
        phi=_split(x[iphi], grids),
        mode=mode,
        pair=pair if finite else None,
        cond=fac.cond,
    )
    if finite:
        sol.psi = _split(x[ipsi], grids)
        sol.d = [y[6 + 6 * a : 9 + 6 * a] for a in range(k)]
    return sol


def _fd_derivatives(f, x, step, order):
    """Gradient (order 1) or Hessian (order 2) of ``f`` by Richardson-extrapolated central differences.

    ``f`` maps (M, 2) points to arrays with leading axis M; derivative axes are appended.
    """
    x = np.atleast_2d(x)
    e = np.eye(2)

    def d1(h, m):
        return (f(x + h * e[m]) - f(x - h * e[m])) / (2 * h)

    def d2(h, m, n):
        if m == n:
            return (f(x + h * e[m]) - 2 * f(x) + f(x - h * e[m])) / h**2
        return (
            f(x + h * (e[m] + e[n])) - f(x + h * (e[m] - e[n]))
            - f(x - h * (e[m] - e[n])) + f(x - h * (e[m] + e[n]))
        ) / (4 * h**2)

    if order == 1:
        parts = [(4 * d1(step, m) - d1(2 * step, m)) / 3 for m in range(2)]
        return np.stack(parts, axis=-1)
    rows = []
    for m in range(2):
        rows.append(np.stack([(4 * d2(step, m, n) - d2(2 * step, m, n)) / 3 for n in range(2)], -1))
    return np.stack(rows, axis=-2)


class DoubleLayerField(BackgroundField):
    """``h(x) = -int Gamma0(x-y) g(y) + int T(y-x, n_y)^T u(y)`` from boundary Cauchy data.

    Gradients and Hessians use high-order central differences of the values.
    """

    kind = "cauchy_data"

    def __init__(self, p0, omega, traction, trace, upsample=None):
        self.p0, self.omega = p0, omega
        self.traction_data = np.asarray(traction, dtype=float).reshape(omega.n, 2)
        self.trace = np.asarray(trace, dtype=float).reshape(omega.n, 2)
        self.upsample = upsample
        self.step = 1e-4 * _diameter(omega)

    def value(self, pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        grid, g, u = self.omega, self.traction_data, self.trace
        if self.upsample and self.upsample > grid.n:
            grid = BoundaryGrid(grid.curve, self.upsample)
            g = pot.fourier_interpolate(g, grid.n)
            u = pot.fourier_interpolate(u, grid.n)
        sl = pot.eval_potential(self.p0, grid, g, pts, warn=False)
        Dm = _core.double_layer_matrix(self.p0.lam, self.p0.mu, pts, grid.points, grid.normals, grid.weights)
        return -sl + (Dm @ u.reshape(-1)).reshape(-1, 2)

    def gradient(self, pts):
        return _fd_derivatives(self.value, pts, self.step, 1)

    def hessian(self, pts):
        return _fd_derivatives(self.value, pts, 10 * self.step, 2)


def _diameter(grid):
    p = grid.points
    return float(np.max(np.linalg.norm(p[:, None, :] - p[None, :, :], axis=2)))


def make_h(sol: BvpSolution, upsample: int | None = None) -> DoubleLayerField:
    """The field built from the Cauchy data ``(u, g)`` of the solution on dOmega."""
    return DoubleLayerField(sol.p0, sol.omega, sol.g, sol.boundary_trace(), upsample)


class NeumannFunction:
    """Columns ``N(., y)`` for a single pole ``y`` together with z-derivatives.

    ``N(x, y) = -Gamma0(x - y) + S0_Omega[theta_y](x) + Psi(x) c_y``.
    """

    def __init__(self, p0: LameParams, omega: BoundaryGrid, y, fd_step: float | None = None):
        self.p0, self.omega = p0, omega
        self.y = np.asarray(y, dtype=float).reshape(2)
        if not omega.curve.contains(self.y[None])[0]:
            raise GeometryError("pole must lie inside the domain")
        if min_distance(self.y[None], omega)[0] < 5 * omega.spacing:
            raise GeometryError("pole is within 5 node spacings of the boundary")
        self.fd_step = fd_step if fd_step is not None else 1e-4 * _diameter(omega)
        self._ginv = np.linalg.inv(pot.rigid_gram(omega))
        self._S = pot.single_layer_block(p0, omega)
        self._cache = {}

    def _rhs(self, ys):
        """Neumann data for the correction at poles ``ys``: shape (2N, M, 2)."""
        om = self.omega
        ys = np.atleast_2d(ys)
        r = om.points[:, None, :] - ys[None, :, :]
        T = traction_kernel(self.p0, r, np.broadcast_to(om.normals[:, None, :], r.shape))
        # -sum_l psi~_l(x) psi~_l(y)^T = -Psi(x)^T G^{-1} Psi(y)
        Px = _rigid_vals(om.points)  # (3, N, 2)
        Py = _rigid_vals(ys)  # (3, M, 2)
        flux = np.einsum("lni,lk,kmj->nmij", Px, self._ginv, Py)
        return (T - flux).reshape(2 * om.n, len(ys), 2)

    def _correction(self, ys):
        """theta (N, M, 2cols, 2) and c (3, M, 2cols) for the poles ``ys``."""
        ys = np.atleast_2d(ys)
        m = len(ys)
        rhs = self._rhs(ys).reshape(2 * self.omega.n, 2 * m)
        theta = _interior_neumann_solve(self.p0, self.omega, rhs)
        trace = self._S @ theta
        # -Gamma0(x - y) part of the trace
        G = kelvin_matrix(self.p0, self.omega.points[:, None, :] - ys[None, :, :])  # (N, M, 2, 2)
        trace = trace - G.transpose(0, 2, 1, 3).reshape(2 * self.omega.n, 2 * m)
        c = _normalizing_shift(self.omega, trace)
        return theta.reshape(self.omega.n, 2, m, 2).transpose(0, 2, 3, 1), c.reshape(3, m, 2)

    def _correction_derivative(self, beta):
        beta = tuple(int(b) for b in beta)
        if beta in self._cache:
            return self._cache[beta]
        order = sum(beta)
        if order == 0:
            th, c = self._correction(self.y)
            out = (th[:, 0], c[:, 0])
        else:
            def f(ys):
                th, c = self._correction(ys)
                # leading axis = pole
                return np.concatenate(
                    [th.transpose(1, 0, 2, 3).reshape(len(ys), -1), c.transpose(1, 0, 2).reshape(len(ys), -1)],
                    axis=1,
                )

            der = _fd_derivatives(f, self.y, self.fd_step, order)[0]
            if order == 1:
                vec = der[:, beta.index(1)]
            else:
                m, nn = _multi_to_pair(beta)
                vec = der[:, m, nn]
            nth = self.omega.n * 4
            out = (vec[:nth].reshape(self.omega.n, 2, 2), vec[nth:].reshape(3, 2))
        self._cache[beta] = out
        return out

    def boundary_values(self, beta=(0, 0)) -> np.ndarray:
        """``d_z^beta N(x_m, y)`` at the nodes of dOmega, shape (N, 2, 2)."""
        order = _check_multi(beta)
        th, c = self._correction_derivative(beta)
        n = self.omega.n
        # theta layout: th[node, col, comp]
        S_th = (self._S @ th.transpose(0, 2, 1).reshape(2 * n, 2)).reshape(n, 2, 2)
        out = S_th + np.einsum("lni,lk->nik", _rigid_vals(self.omega.points), c)
        out -= _kelvin_pole_derivative(self.p0, self.omega.points - self.y, beta, order)
        return out

    def values(self, x, beta=(0, 0)) -> np.ndarray:
        """``d_z^beta N(x, y)`` at interior points, shape (M, 2, 2)."""
        order = _check_multi(beta)
        x = np.atleast_2d(np.asarray(x, dtype=float))
        th, c = self._correction_derivative(beta)
        out = np.zeros((len(x), 2, 2))
        for k in range(2):
            out[:, :, k] = pot.eval_potential(self.p0, self.omega, th[:, k, :], x)
        out += np.einsum("lni,lk->nik", _rigid_vals(x), c)
        out -= _kelvin_pole_derivative(self.p0, x - self.y, beta, order)
        return out

    def flux_residual(self) -> float:
        """Sup residual of ``dN/dnu_0 = -Psi^T G^{-1} Psi(y)`` at the nodes."""
        th, _ = self._correction_derivative((0, 0))
        n = self.omega.n
        K = pot.kstar_block(self.p0, self.omega) - 0.5 * np.eye(2 * n)
        tr = (K @ th.transpose(0, 2, 1).reshape(2 * n, 2)).reshape(n, 2, 2)
        r = self.omega.points - self.y
        tr -= traction_kernel(self.p0, r, self.omega.normals)
        target = -np.einsum("lni,lk,kj->nij", _rigid_vals(self.omega.points), self._ginv,
                            _rigid_vals(self.y[None])[:, 0, :])
        return float(np.max(np.abs(tr - target)))


def _check_multi(beta):
    beta = tuple(int(b) for b in beta)
    if len(beta) != 2 or min(beta) < 0 or sum(beta) > 2:
        raise ValueError(f"multi-index {beta} is not supported (need |beta| <= 2)")
    return sum(beta)


def _multi_to_pair(beta):
    return {(2, 0): (0, 0), (1, 1): (0, 1), (0, 2): (1, 1)}[tuple(beta)]


def _kelvin_pole_derivative(p0, r, beta, order):
    """``d_y^beta Gamma0(x - y)`` with ``r = x - y``: shape (M, 2, 2)."""
    if order == 0:
        return kelvin_matrix(p0, r)
    D = kelvin_derivatives(p0, r, order)
    if order == 1:
        return -D[..., tuple(beta).index(1)]
    m, n = _multi_to_pair(beta)
    return D[..., m, n]


def neumann_function(p0: LameParams, omega: BoundaryGrid, y) -> NeumannFunction:
    return NeumannFunction(p0, omega, y)


def neumann_integral(p0: LameParams, omega: BoundaryGrid, src: BoundaryGrid, phi) -> np.ndarray:
    """``int_{src} N(x, y) phi(y) dsigma(y)`` at the nodes of dOmega.

    Uses linearity: the corrections of all poles combine into one solve
    with data ``T[S0_src phi]`` on dOmega.
    """
    phi = pot._values(phi).reshape(src.n, 2)
    S_src = pot.single_layer_block(p0, src, omega) @ phi.reshape(-1)  # int Gamma(x-y) phi
    T_src = pot.kstar_block(p0, src, omega) @ phi.reshape(-1)
    mom = pot.rigid_moments(src, phi)
    Px = _rigid_vals(omega.points)
    ginv = np.linalg.inv(pot.rigid_gram(omega))
    flux = np.einsum("lni,lk,k->ni", Px, ginv, mom).reshape(-1)
    theta = _interior_neumann_solve(p0, omega, T_src - flux)
    trace = pot.single_layer_block(p0, omega) @ theta - S_src
    c = _normalizing_shift(omega, trace)
    return trace.reshape(-1, 2) + np.einsum("l,lmc->mc", c, Px)


def field_derivatives(fld, z0, alpha) -> np.ndarray:
    """``d^alpha`` of a background field at ``z0`` (vector of length 2), or
    ``d_z^alpha N`` at the boundary nodes when ``fld`` is a :class:`NeumannFunction`.
    """
    order = _check_multi(alpha)
    if isinstance(fld, NeumannFunction):
        if np.linalg.norm(np.asarray(z0, dtype=float) - fld.y) > 0:
            raise ValueError("z0 must be the pole of the Neumann function")
        return fld.boundary_values(alpha)
    z = np.asarray(z0, dtype=float).reshape(1, 2)
    if order == 0:
        return fld.value(z)[0]
    if order == 1:
        return fld.gradient(z)[0][:, tuple(alpha).index(1)]
    m, n = _multi_to_pair(alpha)
    return fld.hessian(z)[0][:, m, n]
