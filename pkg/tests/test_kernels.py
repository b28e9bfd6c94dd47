import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lametrans.kernels import (
    SingularEvaluationError,
    kelvin_derivatives,
    kelvin_matrix,
    rigid_basis,
    traction_from_gradient,
    traction_kernel,
)
from lametrans.material import LameParams, apply_elasticity_tensor

coords = st.floats(-5, 5).filter(lambda v: abs(v) > 0.05)
points = st.tuples(coords, coords).map(np.array)
params = st.tuples(st.floats(-0.9, 5), st.floats(0.1, 5)).map(lambda t: LameParams(t[0] * t[1], t[1]))


def test_kelvin_hand_value():
    G = kelvin_matrix(LameParams(0.0, 1.0), [1.0, 0.0])
    assert np.allclose(G, [[-1 / (8 * np.pi), 0], [0, 0]], atol=1e-16)


def test_kelvin_unit_vertical():
    for p in (LameParams(0.0, 1.0), LameParams(3.0, 0.2)):
        assert abs(kelvin_matrix(p, [0.0, 1.0])[0, 0]) < 1e-17


def test_kelvin_origin_error():
    with pytest.raises(SingularEvaluationError):
        kelvin_matrix(LameParams(1, 1), [0.0, 0.0])


def test_kelvin_solves_lame_system():
    # L Gamma = 0 away from the origin
    p = LameParams(0.7, 1.3)
    H = kelvin_derivatives(p, np.array([0.4, -0.9]), 2)
    lap = np.einsum("ikmm->ik", H)
    graddiv = np.einsum("mkmi->ik", H)
    assert np.abs(p.mu * lap + (p.lam + p.mu) * graddiv).max() < 1e-14


def test_log_term_gradient():
    p = LameParams(0.0, 1.0)
    x = np.array([2.0, 0.0])
    full = kelvin_derivatives(p, x, 1)[0, 0, 0]
    # the quadratic term x1^2/r^2 is stationary in x1 along the axis
    assert full == pytest.approx(3 / (16 * np.pi), rel=1e-14)


def test_derivative_order_error():
    with pytest.raises(ValueError):
        kelvin_derivatives(LameParams(1, 1), [1.0, 1.0], 3)


def _fd(f, x, h):
    out = []
    for m in range(2):
        e = np.zeros(2)
        e[m] = h
        out.append((f(x + e) - f(x - e)) / (2 * h))
    return np.stack(out, axis=-1)


@given(params, points)
def test_gradient_matches_fd(p, x):
    h = 1e-5 * np.linalg.norm(x)
    fd = _fd(lambda y: kelvin_matrix(p, y), x, h)
    an = kelvin_derivatives(p, x, 1)
    assert np.abs(fd - an).max() <= 1e-7 * (np.abs(an).max() + 1e-12)


@given(params, points)
def test_hessian_matches_fd(p, x):
    h = 1e-5 * np.linalg.norm(x)
    fd = _fd(lambda y: kelvin_derivatives(p, y, 1), x, h)
    an = kelvin_derivatives(p, x, 2)
    assert np.abs(fd - an).max() <= 1e-7 * (np.abs(an).max() + 1e-12)


@given(params, points, st.floats(0, 2 * np.pi))
def test_traction_matches_fd_conormal(p, x, th):
    n = np.array([np.cos(th), np.sin(th)])
    h = 1e-5 * np.linalg.norm(x)
    grad = _fd(lambda y: kelvin_matrix(p, y), x, h)
    T = traction_kernel(p, x, n)
    assert np.abs(traction_from_gradient(p, grad, n) - T).max() <= 1e-7 * np.abs(T).max()


@given(params, points, st.floats(0, 2 * np.pi))
def test_traction_homogeneity(p, x, th):
    n = np.array([np.cos(th), np.sin(th)])
    assert np.allclose(traction_kernel(p, 2 * x, n), 0.5 * traction_kernel(p, x, n), rtol=1e-12, atol=1e-15)


def test_traction_requires_unit_normal():
    with pytest.raises(ValueError):
        traction_kernel(LameParams(1, 1), [1.0, 0.0], [2.0, 0.0])


@given(params, points)
def test_kelvin_symmetry_and_parity(p, x):
    G = kelvin_matrix(p, x)
    assert np.array_equal(G, G.T)
    assert np.array_equal(kelvin_matrix(p, -x), G)


def test_rigid_basis():
    b = rigid_basis(2)
    assert len(b) == 3
    g = b.gradients([[0.3, -0.7]])[:, 0]
    assert np.all(g + g.transpose(0, 2, 1) == 0)
    with pytest.raises(ValueError):
        rigid_basis(5)


@given(params, points, st.floats(0, 2 * np.pi))
def test_rigid_motions_are_traction_free(p, x, th):
    n = np.array([np.cos(th), np.sin(th)])
    g = rigid_basis().gradients([x])[:, 0]
    sym = 0.5 * (g + g.transpose(0, 2, 1))
    assert np.all(apply_elasticity_tensor(p, sym) == 0)
    assert np.all(traction_from_gradient(p, g.transpose(1, 0, 2), n) == 0)
