"""Free-space transmission problem, its hard/soft limits, and the energy J.

Outside the inclusions ``u = h + sum_b S0_b[phi_b]`` with each ``phi_b``
orthogonal to the rigid motions on its own curve.  Inside component ``a``
the solution is represented as ``u = S_a[psi_a] + d_a . Psi`` where
``<psi_a, psi_l> = 0``.  The added rigid part removes the degenerate-scale
singularity of the 2D single layer and leaves ``phi`` untouched.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import potentials as pot
from .fields import BackgroundField
from .geometry import BoundaryGrid, check_disjoint
from .kernels import rigid_basis
from .material import ContrastPair, LameParams
from .numerics import BorderedSystem, SingularSystemError

MODES = ("finite", "hard", "soft")


class RigidFitError(RuntimeError):
    """The hard-limit trace is not a rigid motion to the requested tolerance."""


@dataclass
class TransmissionSolution:
    """Discrete densities on each inclusion curve.

    ``psi`` and ``d`` are empty for the hard and soft limits.
    """

    p0: LameParams
    grids: list
    h: BackgroundField
    phi: list
    mode: str = "finite"
    pair: ContrastPair | None = None
    psi: list = field(default_factory=list)
    d: list = field(default_factory=list)
    cond: float = float("nan")

    @property
    def p1(self):
        return self.pair.inclusion if self.pair is not None else None

    def phi_density(self, a: int = 0) -> pot.Density:
        return pot.Density(self.grids[a], self.phi[a])


def _offsets(grids):
    off = np.zeros(len(grids) + 1, dtype=int)
    off[1:] = np.cumsum([2 * g.n for g in grids])
    return off


def _traction_blocks(p0, grids, diag_sign):
    """Block matrix with ``diag_sign/2 I + K0*`` on the diagonal and cross tractions off it."""
    off = _offsets(grids)
    A = np.zeros((off[-1], off[-1]))
    for a, ga in enumerate(grids):
        for b, gb in enumerate(grids):
            blk = pot.kstar_block(p0, gb, None if a == b else ga)
            A[off[a] : off[a + 1], off[b] : off[b + 1]] = blk
        A[off[a] : off[a + 1], off[a] : off[a + 1]] += 0.5 * diag_sign * np.eye(2 * ga.n)
    return A


def _single_blocks(p0, grids):
    off = _offsets(grids)
    A = np.zeros((off[-1], off[-1]))
    for a, ga in enumerate(grids):
        for b, gb in enumerate(grids):
            A[off[a] : off[a + 1], off[b] : off[b + 1]] = pot.single_layer_block(
                p0, gb, None if a == b else ga
            )
    return A


def _rigid_border(grids):
    """Per-curve rigid columns (values) and pairing columns (weighted)."""
    off = _offsets(grids)
    B = np.zeros((off[-1], 3 * len(grids)))
    C = np.zeros_like(B)
    for a, g in enumerate(grids):
        B[off[a] : off[a + 1], 3 * a : 3 * a + 3] = pot.rigid_columns(g)
        C[off[a] : off[a + 1], 3 * a : 3 * a + 3] = pot.weighted_rigid_columns(g)
    return B, C


def _validate(grids):
    grids = list(grids)
    if not grids:
        raise ValueError("at least one inclusion curve is required")
    for g in grids:
        if not isinstance(g, BoundaryGrid):
            raise TypeError("curves must be BoundaryGrid instances")
    check_disjoint(grids)
    return grids


def _split(vec, grids):
    off = _offsets(grids)
    return [vec[off[a] : off[a + 1]].reshape(-1, 2) for a in range(len(grids))]


def _stack_data(h, p0, grids):
    vals = np.concatenate([h.value(g.points).reshape(-1) for g in grids])
    trac = np.concatenate([h.traction(p0, g).reshape(-1) for g in grids])
    return vals, trac


def assemble_transmission(pair: ContrastPair, grids) -> BorderedSystem:
    """Bordered matrix for the unknowns ``[phi; psi | d; m]``.

    Rows: value continuity, traction continuity, ``<psi_a, Psi> = 0`` and
    ``<phi_a, Psi> = 0``.  ``m`` are multipliers on the traction rows.
    """
    p0, p1 = pair.background, pair.inclusion
    off = _offsets(grids)
    n = off[-1]
    S0 = _single_blocks(p0, grids)
    T0 = _traction_blocks(p0, grids, +1)
    S1 = np.zeros((n, n))
    K1 = np.zeros((n, n))
    for a, g in enumerate(grids):
        sl = slice(off[a], off[a + 1])
        S1[sl, sl] = pot.single_layer_block(p1, g)
        K1[sl, sl] = pot.kstar_block(p1, g) - 0.5 * np.eye(2 * g.n)
    A = np.block([[-S0, S1], [-T0, K1]])
    R, W = _rigid_border(grids)
    Z = np.zeros_like(R)
    # columns: d on value rows, multipliers on traction rows
    B = np.concatenate([np.concatenate([R, Z]), np.concatenate([Z, R])], axis=1)
    # constraints: <psi, Psi> (acts on psi block), <phi, Psi> (acts on phi block)
    C = np.concatenate([np.concatenate([Z, W]), np.concatenate([W, Z])], axis=1)
    return BorderedSystem(A, B, C=C)


def solve_transmission(pair: ContrastPair, curves, h: BackgroundField) -> TransmissionSolution:
    return solve_transmission_many(pair, curves, [h])[0]


def solve_transmission_many(pair: ContrastPair, curves, fields) -> list:
    """One factorization shared by several background fields."""
    grids = _validate(curves)
    p0 = pair.background
    sys = assemble_transmission(pair, grids)
    try:
        fac = sys.factor()
    except SingularSystemError as err:
        raise SingularSystemError(f"transmission system is singular: {err}", err.cond) from err
    rhs = np.stack([np.concatenate(_stack_data(h, p0, grids)) for h in fields], axis=1)
    X, Y = fac.solve(rhs)
    n = rhs.shape[0] // 2
    k = len(grids)
    return [
        TransmissionSolution(
            p0=p0,
            grids=grids,
            h=h,
            phi=_split(X[:n, c], grids),
            psi=_split(X[n:, c], grids),
            d=[Y[3 * a : 3 * a + 3, c] for a in range(k)],
            mode="finite",
            pair=pair,
            cond=fac.cond,
        )
        for c, h in enumerate(fields)
    ]


def solve_limit(p0: LameParams, curves, h: BackgroundField, mode: str) -> TransmissionSolution:
    """Hard (``mu -> inf``) or soft (``kappa = mu = 0``) limiting densities."""
    if mode not in ("hard", "soft"):
        raise ValueError("mode must be 'hard' or 'soft'")
    grids = _validate(curves)
    A = _traction_blocks(p0, grids, -1 if mode == "hard" else +1)
    B, C = _rigid_border(grids)
    _, trac = _stack_data(h, p0, grids)
    fac = BorderedSystem(A, B, C=C).factor()
    x, _ = fac.solve(-trac)
    return TransmissionSolution(p0=p0, grids=grids, h=h, phi=_split(x, grids), mode=mode, cond=fac.cond)


def exterior_trace(sol: TransmissionSolution):
    """``u|_+`` on every curve, as a list of (N, 2) arrays."""
    grids = sol.grids
    S0 = _single_blocks(sol.p0, grids)
    v = S0 @ np.concatenate([f.reshape(-1) for f in sol.phi])
    return [hv + sv for hv, sv in zip((sol.h.value(g.points) for g in grids), _split(v, grids))]


def exterior_traction(sol: TransmissionSolution):
    """``d u / d nu_0 |_+`` on every curve."""
    grids = sol.grids
    T0 = _traction_blocks(sol.p0, grids, +1)
    v = T0 @ np.concatenate([f.reshape(-1) for f in sol.phi])
    return [sol.h.traction(sol.p0, g) + tv for g, tv in zip(grids, _split(v, grids))]


@dataclass
class RigidFit:
    coefficients: np.ndarray  # (n_curves, 3)
    residual: np.ndarray  # sup-norm misfit per curve
    orthogonality: np.ndarray  # |<d u/d nu|_+, psi_l>| per curve and l


def recover_rigid_coefficients(sol: TransmissionSolution, tol: float = 1e-4,
                               orth_tol: float = 1e-8) -> RigidFit:
    """Weighted least-squares fit of the hard-limit trace to rigid motions."""
    if sol.mode != "hard":
        raise ValueError("rigid coefficients are defined for the hard limit")
    traces = exterior_trace(sol)
    tracs = exterior_traction(sol)
    psi = rigid_basis(2)
    coefs, res, orth = [], [], []
    for g, u, t in zip(sol.grids, traces, tracs):
        c = np.linalg.solve(pot.rigid_gram(g), pot.rigid_moments(g, u))
        fit = np.einsum("l,lmc->mc", c, psi.values(g.points))
        coefs.append(c)
        res.append(np.max(np.abs(u - fit)))
        orth.append(np.abs(pot.rigid_moments(g, t)))
    fit = RigidFit(np.array(coefs), np.array(res), np.array(orth))
    if np.any(fit.residual > tol):
        raise RigidFitError(f"hard-limit trace is not rigid (misfit {fit.residual.max():.3g})")
    scale = max(1.0, max(np.max(np.abs(t)) for t in tracs))
    if np.any(fit.orthogonality > orth_tol * scale):
        raise RigidFitError(
            f"exterior traction is not rigid-orthogonal ({fit.orthogonality.max():.3g})"
        )
    return fit


def locate(grids, pts) -> np.ndarray:
    """Index of the inclusion containing each point, or -1 outside all of them."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    where = np.full(len(pts), -1)
    for a, g in enumerate(grids):
        where[g.curve.contains(pts)] = a
    return where


def eval_solution(sol: TransmissionSolution, x, order: int = 0, upsample: int | None = None,
                  warn: bool = True):
    """Evaluate u (and its gradient if ``order == 1``) at points off the curves."""
    pts = np.atleast_2d(np.asarray(x, dtype=float))
    where = locate(sol.grids, pts)
    vals = np.zeros((len(pts), 2))
    grads = np.zeros((len(pts), 2, 2))
    out = where < 0
    kw = dict(order=order, upsample=upsample, warn=warn)
    if np.any(out):
        po = pts[out]
        vals[out] = sol.h.value(po)
        if order:
            grads[out] = sol.h.gradient(po)
        for g, phi in zip(sol.grids, sol.phi):
            r = pot.eval_potential(sol.p0, g, phi, po, **kw)
            if order:
                vals[out] += r[0]
                grads[out] += r[1]
            else:
                vals[out] += r
    psi_basis = rigid_basis(2)
    for a, g in enumerate(sol.grids):
        sel = where == a
        if not np.any(sel):
            continue
        pa = pts[sel]
        if sol.mode == "soft":
            raise ValueError("the soft limit has a cavity; interior points are undefined")
        if sol.mode == "hard":
            c = recover_rigid_coefficients(sol).coefficients[a]
            vals[sel] = np.einsum("l,lmc->mc", c, psi_basis.values(pa))
            grads[sel] = np.einsum("l,lmij->mij", c, psi_basis.gradients(pa))
            continue
        r = pot.eval_potential(sol.p1, g, sol.psi[a], pa, **kw)
        rig = np.einsum("l,lmc->mc", sol.d[a], psi_basis.values(pa))
        if order:
            vals[sel] = r[0] + rig
            grads[sel] = r[1] + np.einsum("l,lmij->mij", sol.d[a], psi_basis.gradients(pa))
        else:
            vals[sel] = r + rig
    return (vals, grads) if order else vals


def _outer_circle_term(sol, R, n_r):
    """``1/2 int_{|x|=R} v . dv/dnu`` for the scattered field ``v = u - h``."""
    t = np.arange(n_r) * (2 * np.pi / n_r)
    nr = np.stack([np.cos(t), np.sin(t)], axis=1)
    pts = R * nr
    v = np.zeros((n_r, 2))
    gr = np.zeros((n_r, 2, 2))
    for g, phi in zip(sol.grids, sol.phi):
        a, b = pot.eval_potential(sol.p0, g, phi, pts, order=1, warn=False)
        v += a
        gr += b
    trac = pot.traction_at(sol.p0, gr, nr)
    return 0.5 * np.sum(v * trac) * (2 * np.pi * R / n_r)


def energy_J(sol: TransmissionSolution, R: float | None = None, n_outer: int = 512) -> float:
    """Energy ``1/2 int_D C1 e(u):e(u) + 1/2 int_{D^c cap B_R} C0 e(u-h):e(u-h)``.

    Both volume integrals are reduced to boundary pairings with Green's
    identity, so the result inherits the spectral accuracy of the densities.
    ``R=None`` integrates over the whole exterior.  The hard and soft limits
    carry no interior energy.
    """
    grids = sol.grids
    if R is not None:
        rmax = max(np.max(np.linalg.norm(g.points, axis=1)) for g in grids)
        if R < 2 * max(g.curve.radius() for g in grids) or R <= rmax:
            raise ValueError("R must be at least twice the largest curve radius and enclose all curves")
    phi = np.concatenate([f.reshape(-1) for f in sol.phi])
    v_tr = _split(_single_blocks(sol.p0, grids) @ phi, grids)
    t_tr = _split(_traction_blocks(sol.p0, grids, +1) @ phi, grids)
    J = 0.0
    for g, v, t in zip(grids, v_tr, t_tr):
        J -= 0.5 * np.sum(g.weights[:, None] * v * t)
    if R is not None:
        J += _outer_circle_term(sol, R, n_outer)
    if sol.mode == "finite":
        psi_basis = rigid_basis(2)
        for a, g in enumerate(grids):
            K = pot.kstar_block(sol.p1, g)
            S = pot.single_layer_block(sol.p1, g)
            ps = sol.psi[a].reshape(-1)
            u = (S @ ps).reshape(-1, 2) + np.einsum("l,lmc->mc", sol.d[a], psi_basis.values(g.points))
            t = (K @ ps - 0.5 * ps).reshape(-1, 2)
            J += 0.5 * np.sum(g.weights[:, None] * u * t)
    return float(J)


def decay_profile(sol: TransmissionSolution, radii, n_angles: int = 64) -> np.ndarray:
    """Max of ``|u - h|`` over circles of the given radii."""
    t = np.arange(n_angles) * (2 * np.pi / n_angles)
    out = []
    for r in radii:
        pts = r * np.stack([np.cos(t), np.sin(t)], axis=1)
        v = sum(pot.eval_potential(sol.p0, g, f, pts, warn=False) for g, f in zip(sol.grids, sol.phi))
        out.append(np.max(np.linalg.norm(v, axis=1)))
    return np.array(out)


def density_norm(sol: TransmissionSolution, other: TransmissionSolution | None = None,
                 s: float = -0.5) -> float:
    """Component-summed H^s proxy norm of ``phi`` (or of ``phi - other.phi``)."""
    total = 0.0
    for a, g in enumerate(sol.grids):
        f = sol.phi[a] if other is None else sol.phi[a] - other.phi[a]
        total += pot.sobolev_norm(g, f, s)
    return total


def check_orthogonality(sol: TransmissionSolution, tol: float = 1e-9) -> float:
    """Largest relative ``|<phi_a, psi_l>|``; warns above ``tol``."""
    worst = 0.0
    for g, f in zip(sol.grids, sol.phi):
        scale = max(np.sqrt(np.sum(g.weights[:, None] * f * f)), 1e-300)
        worst = max(worst, float(np.max(np.abs(pot.rigid_moments(g, f)))) / scale)
    if worst > tol:
        warnings.warn(f"phi is not rigid-orthogonal ({worst:.3g})", RuntimeWarning, stacklevel=2)
    return worst
