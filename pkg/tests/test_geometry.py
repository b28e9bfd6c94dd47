import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import ellipe

from lametrans.geometry import (
    BoundaryGrid,
    InclusionPlacement,
    check_disjoint,
    make_curve,
    min_distance,
    place,
    sample_grid,
)


def test_circle_perimeter():
    assert sample_grid(make_curve("circle", 1.0), 64).perimeter == pytest.approx(2 * np.pi, abs=1e-14)


def test_circle_weights_uniform():
    g = sample_grid(make_curve("circle", 1.0), 64)
    assert np.allclose(g.weights, 2 * np.pi / 64, rtol=0, atol=1e-15)


def test_ellipse_parametrization():
    c = make_curve("ellipse", 1.0, 0.6)
    t = np.linspace(0, 6, 7)
    assert np.allclose(c.point(t), np.stack([np.cos(t), 0.6 * np.sin(t)], axis=1))


def test_degenerate_curves_rejected():
    with pytest.raises(ValueError):
        make_curve("ellipse", 0.0, 0.6)
    with pytest.raises(ValueError):
        make_curve("blob", 1.0)
    with pytest.raises(ValueError):
        make_curve("circle", 1.0, scale=0.0)


def test_odd_node_count_rejected():
    with pytest.raises(ValueError):
        sample_grid(make_curve("circle", 1.0), 15)


def test_ellipse_perimeter_self_convergence():
    c = make_curve("ellipse", 1.0, 0.6)
    p128 = sample_grid(c, 128).perimeter
    assert abs(p128 - sample_grid(c, 512).perimeter) <= 1e-12
    # complete elliptic integral as an independent check
    assert p128 == pytest.approx(4 * ellipe(1 - 0.36), abs=1e-12)


def test_normals_outward_and_unit():
    for c in (make_curve("kite"), make_curve("ellipse", 1, 0.6, center=(2, -1))):
        g = sample_grid(c, 128)
        assert np.allclose(np.linalg.norm(g.normals, axis=1), 1)
        assert np.all(c.contains(g.points - 1e-3 * g.normals))
        assert not np.any(c.contains(g.points + 1e-3 * g.normals))


def test_place_examples():
    unit = make_curve("circle", 1.0)
    small = place(InclusionPlacement(unit, (0, 0), 0.1))
    assert np.allclose(np.linalg.norm(sample_grid(small, 32).points, axis=1), 0.1)
    moved = sample_grid(place(InclusionPlacement(unit, (2, 1), 1.0)), 32)
    assert np.allclose(np.linalg.norm(moved.points - [2, 1], axis=1), 1.0)
    kite = make_curve("kite")
    half = sample_grid(place(InclusionPlacement(kite, (0, 0), 0.5)), 256).perimeter
    assert half == pytest.approx(0.5 * sample_grid(kite, 256).perimeter, rel=1e-14)
    with pytest.raises(ValueError):
        place(InclusionPlacement(unit, (0, 0), 0.0))


def test_kite_spectral_convergence():
    # smooth periodic integrand: error decays faster than N^-6
    kite = make_curve("kite")

    def f(g):
        return g.integrate(np.exp(g.points[:, 0]) * np.cos(g.points[:, 1]))

    errs = {n: abs(f(sample_grid(kite, n)) - f(sample_grid(kite, 4 * n))) for n in (64, 128)}
    assert errs[128] <= errs[64] * 2.0 ** -6 or errs[128] < 1e-14


@settings(max_examples=30, deadline=None)
@given(
    st.sampled_from(["circle", "ellipse", "kite"]),
    st.floats(-3, 3), st.floats(-3, 3), st.floats(0.01, 2.0),
)
def test_place_commutes_with_sampling(kind, zx, zy, eps):
    params = {"circle": (1.0,), "ellipse": (1.0, 0.6), "kite": ()}[kind]
    ref = make_curve(kind, *params)
    a = sample_grid(place(InclusionPlacement(ref, (zx, zy), eps)), 32)
    b = sample_grid(ref, 32)
    assert np.allclose(a.points, np.array([zx, zy]) + eps * b.points, atol=1e-12)
    assert np.allclose(a.normals, b.normals, atol=1e-12)
    assert np.allclose(a.weights, eps * b.weights, rtol=1e-13)


def test_disjointness():
    a = BoundaryGrid(make_curve("circle", 0.5, center=(-1, 0)), 64)
    b = BoundaryGrid(make_curve("circle", 0.4, center=(1, 0.3)), 64)
    check_disjoint([a, b])
    with pytest.raises(ValueError, match="not disjoint"):
        check_disjoint([a, BoundaryGrid(make_curve("circle", 0.6, center=(-0.2, 0)), 64)])
    with pytest.raises(ValueError, match="nested"):
        check_disjoint([a, BoundaryGrid(make_curve("circle", 0.1, center=(-1, 0)), 64)])
    assert min_distance([[0.0, 0.0]], b)[0] == pytest.approx(np.hypot(1, 0.3) - 0.4, abs=1e-3)
