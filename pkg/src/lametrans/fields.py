"""Background displacement fields h with values, gradients, Hessians and tractions.

Gradients are indexed ``[..., i, m] = d_m h_i`` and Hessians
``[..., i, m, n] = d_m d_n h_i``.
"""

from __future__ import annotations

import numpy as np

from .kernels import traction_from_gradient
from .material import LameParams


class InadmissibleFieldError(ValueError):
    """A polynomial field does not satisfy the homogeneous Lamé system."""


class BackgroundField:
    kind = "generic"

    def value(self, pts) -> np.ndarray:
        raise NotImplementedError

    def gradient(self, pts) -> np.ndarray:
        raise NotImplementedError

    def hessian(self, pts) -> np.ndarray:
        raise NotImplementedError

    def traction(self, p0: LameParams, grid) -> np.ndarray:
        """Conormal derivative ``d h / d nu_0`` at the nodes of ``grid``."""
        return traction_from_gradient(p0, self.gradient(grid.points), grid.normals)

    def __add__(self, other):
        return SumField((self, other), (1.0, 1.0))

    def __mul__(self, c):
        return SumField((self,), (float(c),))

    __rmul__ = __mul__

    def __sub__(self, other):
        return SumField((self, other), (1.0, -1.0))


class SumField(BackgroundField):
    kind = "sum"

    def __init__(self, parts, coefs):
        self.parts, self.coefs = tuple(parts), tuple(coefs)

    def _combine(self, name, pts):
        return sum(c * getattr(f, name)(pts) for f, c in zip(self.parts, self.coefs))

    def value(self, pts):
        return self._combine("value", pts)

    def gradient(self, pts):
        return self._combine("gradient", pts)

    def hessian(self, pts):
        return self._combine("hessian", pts)


def _mono(x, a, b, da=0, db=0):
    """``d1^da d2^db (x1^a x2^b)``."""
    ca = 1.0
    for k in range(da):
        ca *= a - k
    cb = 1.0
    for k in range(db):
        cb *= b - k
    if ca == 0.0 or cb == 0.0:
        return np.zeros(len(x))
    return ca * cb * x[:, 0] ** (a - da) * x[:, 1] ** (b - db)


class PolynomialField(BackgroundField):
    """``h_c(x) = sum coef * x1^a x2^b`` over terms ``(c, (a, b), coef)``."""

    kind = "polynomial"

    def __init__(self, terms, kind: str = "polynomial"):
        clean = []
        for c, (a, b), coef in terms:
            if c not in (0, 1) or a < 0 or b < 0:
                raise ValueError(f"bad polynomial term {(c, (a, b), coef)}")
            if coef != 0.0:
                clean.append((int(c), (int(a), int(b)), float(coef)))
        self.terms = tuple(clean)
        self.kind = kind

    @property
    def degree(self) -> int:
        return max((a + b for _, (a, b), _ in self.terms), default=0)

    def _pts(self, pts):
        return np.atleast_2d(np.asarray(pts, dtype=float))

    def value(self, pts):
        x = self._pts(pts)
        out = np.zeros((len(x), 2))
        for c, (a, b), coef in self.terms:
            out[:, c] += coef * _mono(x, a, b)
        return out

    def gradient(self, pts):
        x = self._pts(pts)
        out = np.zeros((len(x), 2, 2))
        for c, (a, b), coef in self.terms:
            out[:, c, 0] += coef * _mono(x, a, b, 1, 0)
            out[:, c, 1] += coef * _mono(x, a, b, 0, 1)
        return out

    def hessian(self, pts):
        x = self._pts(pts)
        out = np.zeros((len(x), 2, 2, 2))
        for c, (a, b), coef in self.terms:
            out[:, c, 0, 0] += coef * _mono(x, a, b, 2, 0)
            d12 = coef * _mono(x, a, b, 1, 1)
            out[:, c, 0, 1] += d12
            out[:, c, 1, 0] += d12
            out[:, c, 1, 1] += coef * _mono(x, a, b, 0, 2)
        return out

    def require_admissible(self, p0: LameParams, tol: float = 1e-6, seed: int = 0):
        res = lame_residual(self, p0, np.random.default_rng(seed).uniform(-2, 2, (16, 2)))
        if res > tol:
            raise InadmissibleFieldError(
                f"field does not solve the Lamé system (residual {res:.3g})"
            )
        return self


def lame_residual(field: BackgroundField, p0: LameParams, pts, step: float | None = None) -> float:
    """Sup norm of ``mu lap h + (lambda + mu) grad div h`` at ``pts``.

    With ``step`` set the second derivatives come from central differences of
    the values, otherwise from ``field.hessian``.
    """
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    if step is None:
        H = field.hessian(pts)
    else:
        H = np.zeros((len(pts), 2, 2, 2))
        e = np.eye(2) * step
        f0 = field.value(pts)
        for m in range(2):
            for n in range(2):
                if m == n:
                    d2 = field.value(pts + e[m]) - 2 * f0 + field.value(pts - e[m])
                else:
                    d2 = (
                        field.value(pts + e[m] + e[n]) - field.value(pts + e[m] - e[n])
                        - field.value(pts - e[m] + e[n]) + field.value(pts - e[m] - e[n])
                    ) / 4.0
                H[:, :, m, n] = d2 / step**2
    lap = H[:, :, 0, 0] + H[:, :, 1, 1]
    graddiv = np.einsum("...mmi->...i", H)
    return float(np.max(np.abs(p0.mu * lap + (p0.lam + p0.mu) * graddiv)))


def rigid_field(l: int, coef: float = 1.0) -> PolynomialField:
    """Translation ``e_1`` (l=0), ``e_2`` (l=1) or rotation ``(-x2, x1)`` (l=2)."""
    if l == 0:
        terms = [(0, (0, 0), coef)]
    elif l == 1:
        terms = [(1, (0, 0), coef)]
    elif l == 2:
        terms = [(0, (0, 1), -coef), (1, (1, 0), coef)]
    else:
        raise ValueError("rigid index must be 0, 1 or 2")
    return PolynomialField(terms, kind="rigid")


def linear_field(A, b=(0.0, 0.0)) -> PolynomialField:
    """``h(x) = A x + b``; every affine field solves the Lamé system."""
    A = np.asarray(A, dtype=float).reshape(2, 2)
    terms = [(i, (0, 0), b[i]) for i in range(2)]
    for i in range(2):
        terms.append((i, (1, 0), A[i, 0]))
        terms.append((i, (0, 1), A[i, 1]))
    return PolynomialField(terms, kind="linear")


def monomial_field(alpha, j: int) -> PolynomialField:
    """The formal source ``x^alpha e_j`` (not a Lamé solution in general)."""
    a, b = (int(v) for v in alpha)
    if j not in (0, 1):
        raise ValueError("direction must be 0 or 1")
    return PolynomialField([(j, (a, b), 1.0)], kind="monomial")


class CallableField(BackgroundField):
    """Field defined by user callables; ``hessian`` is optional."""

    kind = "callable"

    def __init__(self, value, gradient, hessian=None, kind="callable"):
        self._v, self._g, self._h = value, gradient, hessian
        self.kind = kind

    def value(self, pts):
        return self._v(np.atleast_2d(pts))

    def gradient(self, pts):
        return self._g(np.atleast_2d(pts))

    def hessian(self, pts):
        if self._h is None:
            raise NotImplementedError("this field has no Hessian")
        return self._h(np.atleast_2d(pts))
