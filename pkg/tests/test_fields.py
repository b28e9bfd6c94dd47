import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lametrans.config import parse_field
from lametrans.fields import (
    InadmissibleFieldError,
    PolynomialField,
    lame_residual,
    linear_field,
    monomial_field,
    rigid_field,
)
from lametrans.material import LameParams

P0 = LameParams(0.5, 0.5)
PTS = np.array([[0.3, -0.7], [1.2, 0.4], [-2.0, 1.5]])


def test_rigid_fields():
    assert np.array_equal(rigid_field(2).value([[2.0, 3.0]]), [[-3.0, 2.0]])
    with pytest.raises(ValueError):
        rigid_field(3)


def test_harmonic_quadratic_solves_lame():
    f = parse_field("linear(0.2, 1, 1, 0) + harmonic2(0.3)")
    assert f.degree == 2
    assert lame_residual(f, P0, PTS) <= 1e-14
    f.require_admissible(P0)


def test_monomial_is_not_a_solution():
    f = monomial_field((2, 0), 0)
    with pytest.raises(InadmissibleFieldError):
        f.require_admissible(P0)
    assert lame_residual(f, P0, PTS) == pytest.approx(2 * P0.mu + 2 * (P0.lam + P0.mu))


def test_field_arithmetic():
    a, b = linear_field([[1, 2], [3, 4]]), rigid_field(0)
    assert np.allclose((a - 2 * b).value(PTS), a.value(PTS) - 2 * b.value(PTS))
    assert np.allclose((a + b).gradient(PTS), a.gradient(PTS))


coef = st.floats(-3, 3)


@given(st.lists(st.tuples(st.integers(0, 1), st.integers(0, 3), st.integers(0, 3), coef), max_size=5))
def test_polynomial_derivatives_match_fd(terms):
    f = PolynomialField([(c, (a, b), k) for c, a, b, k in terms])
    h = 1e-5
    e = np.eye(2) * h
    fd = np.stack([(f.value(PTS + e[m]) - f.value(PTS - e[m])) / (2 * h) for m in range(2)], -1)
    assert np.allclose(fd, f.gradient(PTS), atol=1e-6 * (1 + np.abs(fd).max()))
    fdh = np.stack([(f.gradient(PTS + e[m]) - f.gradient(PTS - e[m])) / (2 * h) for m in range(2)], -1)
    assert np.allclose(fdh, f.hessian(PTS), atol=1e-6 * (1 + np.abs(fdh).max()))
    # finite-difference residual agrees with the analytic one
    assert lame_residual(f, P0, PTS, step=1e-3) == pytest.approx(
        lame_residual(f, P0, PTS), abs=1e-4 * (1 + lame_residual(f, P0, PTS))
    )
