import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lametrans import potentials as pot
from lametrans.acceptance import jump_relation
from lametrans.geometry import BoundaryGrid, make_curve
from lametrans.material import LameParams
from lametrans.numerics import BorderedSystem, solve_bordered

P = LameParams(0.5, 0.5)


def two_mode(t):
    return np.stack([np.cos(t), np.sin(2 * t)], axis=1)


def test_kress_weights_exact_on_cosines():
    n = 64
    t = np.arange(n) * 2 * np.pi / n
    R = pot._circulant(pot.kress_log_weights(n))
    for m in (0, 1, 5, 31):
        exact = 0.0 * t if m == 0 else -2 * np.pi / m * np.cos(m * t)
        assert np.allclose(R @ np.cos(m * t), exact, atol=1e-12)


def test_hilbert_weights_exact_on_trig():
    n = 64
    t = np.arange(n) * 2 * np.pi / n
    T = pot._circulant(pot.hilbert_weights(n))
    for k in (1, 4, 31):
        assert np.allclose(T @ np.cos(k * t), -np.pi * np.sin(k * t), atol=1e-12)
        assert np.allclose(T @ np.sin(k * t), np.pi * np.cos(k * t), atol=1e-12)


def test_zero_density(ellipse256):
    z = np.zeros((256, 2))
    assert np.all(pot.assemble_single_layer(P, ellipse256).apply(z).values == 0)
    assert np.all(pot.assemble_kstar(P, ellipse256).apply(z).values == 0)
    assert np.all(pot.eval_potential(P, ellipse256, z, [[3.0, 0.0]]) == 0)
    assert pot.sobolev_norm(ellipse256, z, -0.5) == 0.0


def test_single_layer_self_convergence_circle():
    c = make_curve("circle", 1.0)
    g128, g512 = BoundaryGrid(c, 128), BoundaryGrid(c, 512)
    a = pot.assemble_single_layer(P, g128).apply(two_mode(g128.t)).values
    b = pot.assemble_single_layer(P, g512).apply(two_mode(g512.t)).values
    assert np.abs(a - b[::4]).max() <= 1e-10


def test_single_layer_symmetric_on_circle(circle128):
    S = pot.assemble_single_layer(P, circle128).matrix
    assert np.abs(S - S.T).max() <= 1e-12 * np.abs(S).max()


@pytest.mark.parametrize("block", [pot.single_layer_block, pot.kstar_block])
def test_operator_spectral_convergence_on_kite(block):
    kite = make_curve("kite")

    def f(t):
        return np.stack([np.exp(np.cos(t)), np.sin(5 * t)], axis=1)

    ref_grid = BoundaryGrid(kite, 512)
    ref = (block(P, ref_grid) @ f(ref_grid.t).reshape(-1)).reshape(-1, 2)
    err = {}
    for n in (64, 128, 256):
        g = BoundaryGrid(kite, n)
        out = (block(P, g) @ f(g.t).reshape(-1)).reshape(-1, 2)
        err[n] = np.abs(out - ref[:: 512 // n]).max()
    # faster than any fixed algebraic order: each doubling gains > 2^10
    assert err[128] <= err[64] * 2.0**-10
    assert err[256] <= max(err[128] * 2.0**-10, 1e-13)


def test_jump_identity_exact(ellipse256):
    phi = two_mode(ellipse256.t)
    plus = pot.conormal_trace(P, ellipse256, phi, "+").values
    minus = pot.conormal_trace(P, ellipse256, phi, "-").values
    assert np.abs(plus - minus - phi).max() <= 1e-12
    with pytest.raises(ValueError):
        pot.conormal_trace(P, ellipse256, phi, "0")


def test_side_traces_match_off_boundary_extrapolation():
    err, ident = jump_relation()
    assert err <= 1e-4
    assert ident <= 1e-12


def test_interior_traction_of_rigid_single_layer():
    # S[psi] + Psi d = psi_l with <psi, Psi> = 0 makes S[psi] rigid inside
    g = BoundaryGrid(make_curve("ellipse", 1.0, 0.6), 128)
    S = pot.single_layer_block(P, g)
    R, W = pot.rigid_columns(g), pot.weighted_rigid_columns(g)
    for l in range(3):
        A = np.block([[S, R], [W.T, np.zeros((3, 3))]])
        x, _ = solve_bordered(BorderedSystem(A, np.zeros((A.shape[0], 0)), np.r_[R[:, l], np.zeros(3)]))
        psi = x[: 2 * g.n]
        tr = pot.conormal_trace(P, g, psi.reshape(-1, 2), "-").values
        assert np.abs(tr).max() <= 1e-6 * max(1.0, np.abs(psi).max())


def test_gradient_matches_fd(ellipse256):
    phi = two_mode(ellipse256.t)
    x = np.array([[1.5, 0.0], [0.0, 1.1], [-0.3, 0.1]])
    _, grad = pot.eval_potential(P, ellipse256, phi, x, order=1)
    h = 1e-5
    for m in range(2):
        e = np.zeros(2)
        e[m] = h
        fd = (pot.eval_potential(P, ellipse256, phi, x + e) - pot.eval_potential(P, ellipse256, phi, x - e)) / (2 * h)
        assert np.abs(fd - grad[..., m]).max() <= 1e-7 * np.abs(grad).max()


def test_far_field_decay(circle128):
    g = circle128
    d = np.array([1.0, 1.0]) / np.sqrt(2)

    def ratio(phi):
        v = lambda r: np.abs(pot.eval_potential(P, g, phi, [r * d])).max()
        return v(100) / v(10)

    # zero first moments: the field decays like |x|^-2
    assert ratio(np.stack([np.cos(3 * g.t), np.sin(3 * g.t)], axis=1)) <= 1e-2
    # rigid-orthogonal only: dipole decay |x|^-1
    generic = pot.project_psi(g, np.stack([np.cos(g.t) + 0.3, np.sin(2 * g.t)], axis=1))
    assert ratio(generic) == pytest.approx(0.1, rel=0.1)


def test_near_boundary_warning(circle128):
    with pytest.warns(pot.NearBoundaryWarning):
        pot.eval_potential(P, circle128, np.ones((128, 2)), [[1.001, 0.0]])


def test_fourier_interpolate_exact_for_band_limited():
    t16 = np.arange(16) * 2 * np.pi / 16
    t64 = np.arange(64) * 2 * np.pi / 64
    f = lambda t: np.stack([np.cos(3 * t) + 0.2, np.sin(7 * t) + np.cos(8 * t)], axis=1)
    assert np.allclose(pot.fourier_interpolate(f(t16), 64), f(t64), atol=1e-13)


def test_sobolev_examples(circle128):
    g = circle128
    const = np.tile([1.0, 0.0], (128, 1))
    for s in (-0.5, 0.5):
        assert pot.sobolev_norm(g, const, s) == pytest.approx(np.sqrt(2 * np.pi), rel=1e-14)
    cos = np.stack([np.cos(g.t), 0 * g.t], axis=1)
    assert pot.sobolev_norm(g, cos, -0.5) ** 2 == pytest.approx(np.pi / np.sqrt(2), rel=1e-13)
    with pytest.raises(ValueError):
        pot.sobolev_norm(g, cos, 1.0)


densities = st.integers(0, 2**32 - 1).map(lambda s: np.random.default_rng(s).standard_normal((32, 2)))


@settings(max_examples=40, deadline=None)
@given(densities, densities, st.floats(-1e3, 1e3).filter(lambda v: v == 0 or abs(v) > 1e-100), st.sampled_from([-0.5, 0.5]))
def test_sobolev_is_a_norm(a, b, c, s):
    g = BoundaryGrid(make_curve("ellipse", 1.0, 0.6), 32)
    na, nb = pot.sobolev_norm(g, a, s), pot.sobolev_norm(g, b, s)
    assert pot.sobolev_norm(g, c * a, s) == pytest.approx(abs(c) * na, rel=1e-12, abs=1e-300)
    assert pot.sobolev_norm(g, a + b, s) <= (na + nb) * (1 + 1e-12)
    assert na > 0


@settings(max_examples=30, deadline=None)
@given(densities)
def test_project_psi_properties(a):
    g = BoundaryGrid(make_curve("kite"), 32)
    once = pot.project_psi(g, a)
    scale = np.abs(a).max()
    assert np.abs(pot.rigid_moments(g, once)).max() <= 1e-12 * scale
    twice = pot.project_psi(g, once)
    assert np.abs(twice.values - once.values).max() <= 1e-12 * scale
