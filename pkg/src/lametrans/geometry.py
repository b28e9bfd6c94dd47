"""Smooth closed parametrized curves and their trapezoid quadrature grids.

Every curve is traversed counterclockwise for ``t`` in ``[0, 2*pi)`` so the
outward normal is ``(x2', -x1') / |x'|``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

TWO_PI = 2.0 * np.pi

# kite: (cos t + K cos 2t - K, 1.5 sin t)
KITE_K = 0.65
KITE_B = 1.5


@dataclass(frozen=True)
class Curve:
    """A reference shape placed by ``center + scale * shape(t)``."""

    kind: str
    params: tuple = ()
    center: tuple = (0.0, 0.0)
    scale: float = 1.0

    def __post_init__(self):
        params = tuple(float(v) for v in self.params)
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        if self.kind == "circle":
            if len(params) != 1:
                raise ValueError("circle takes one radius")
        elif self.kind == "ellipse":
            if len(params) != 2:
                raise ValueError("ellipse takes two semi-axes")
        elif self.kind == "kite":
            if params:
                raise ValueError("kite takes no shape parameters")
        else:
            raise ValueError(f"unknown curve kind {self.kind!r}")
        if any(v <= 0.0 for v in params):
            raise ValueError(f"{self.kind} parameters must be positive, got {params}")
        if not self.scale > 0.0:
            raise ValueError("scale must be positive")

    def _shape(self, t, order):
        t = np.asarray(t, dtype=float)
        c, s = np.cos(t), np.sin(t)
        if self.kind == "circle":
            a = b = self.params[0]
        elif self.kind == "ellipse":
            a, b = self.params
        else:
            c2, s2 = np.cos(2 * t), np.sin(2 * t)
            if order == 0:
                return np.stack([c + KITE_K * c2 - KITE_K, KITE_B * s], axis=-1)
            if order == 1:
                return np.stack([-s - 2 * KITE_K * s2, KITE_B * c], axis=-1)
            return np.stack([-c - 4 * KITE_K * c2, -KITE_B * s], axis=-1)
        if order == 0:
            return np.stack([a * c, b * s], axis=-1)
        if order == 1:
            return np.stack([-a * s, b * c], axis=-1)
        return np.stack([-a * c, -b * s], axis=-1)

    def point(self, t):
        return np.asarray(self.center) + self.scale * self._shape(t, 0)

    def d1(self, t):
        return self.scale * self._shape(t, 1)

    def d2(self, t):
        return self.scale * self._shape(t, 2)

    def perimeter(self, n: int = 1024) -> float:
        t = np.arange(n) * (TWO_PI / n)
        return float(TWO_PI / n * np.linalg.norm(self.d1(t), axis=1).sum())

    def radius(self) -> float:
        """Largest distance from ``center`` to the curve."""
        t = np.arange(512) * (TWO_PI / 512)
        return float(np.max(np.linalg.norm(self.point(t) - self.center, axis=1)))

    def polygon(self, n: int = 2048) -> np.ndarray:
        return self.point(np.arange(n) * (TWO_PI / n))

    def contains(self, pts) -> np.ndarray:
        """Even-odd ray casting against a fine polygon of the curve."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        poly = self.polygon()
        x0, y0 = poly[:, 0], poly[:, 1]
        x1, y1 = np.roll(x0, -1), np.roll(y0, -1)
        px, py = pts[:, 0, None], pts[:, 1, None]
        crosses = (y0 > py) != (y1 > py)
        with np.errstate(divide="ignore", invalid="ignore"):
            xint = x0 + (py - y0) * (x1 - x0) / (y1 - y0)
        return np.count_nonzero(crosses & (px < xint), axis=1) % 2 == 1

    def translated(self, z0) -> "Curve":
        c = np.asarray(self.center) + np.asarray(z0, dtype=float)
        return Curve(self.kind, self.params, tuple(c), self.scale)


def make_curve(kind: str, *params, center=(0.0, 0.0), scale: float = 1.0) -> Curve:
    return Curve(kind, tuple(params), tuple(center), scale)


@dataclass(frozen=True)
class InclusionPlacement:
    reference: Curve
    z0: tuple
    epsilon: float


def place(inclusion: InclusionPlacement) -> Curve:
    """The curve ``z0 + epsilon * B``."""
    eps = float(inclusion.epsilon)
    if not eps > 0.0:
        raise ValueError("epsilon must be positive")
    ref = inclusion.reference
    center = np.asarray(inclusion.z0, dtype=float) + eps * np.asarray(ref.center)
    return Curve(ref.kind, ref.params, tuple(center), eps * ref.scale)


class BoundaryGrid:
    """Equispaced parameter nodes ``t_m = 2 pi m / N`` on a curve."""

    def __init__(self, curve: Curve, n: int):
        n = int(n)
        if n % 2 or n < 16:
            raise ValueError(f"node count must be even and >= 16, got {n}")
        self.curve = curve
        self.n = n
        self.t = np.arange(n) * (TWO_PI / n)
        self.points = curve.point(self.t)
        self.dx = curve.d1(self.t)
        self.ddx = curve.d2(self.t)
        self.speed = np.hypot(self.dx[:, 0], self.dx[:, 1])
        self.normals = np.stack([self.dx[:, 1], -self.dx[:, 0]], axis=1) / self.speed[:, None]
        self.weights = (TWO_PI / n) * self.speed
        for a in ("t", "points", "dx", "ddx", "speed", "normals", "weights"):
            getattr(self, a).setflags(write=False)

    def __repr__(self):
        return f"BoundaryGrid({self.curve!r}, n={self.n})"

    @property
    def perimeter(self) -> float:
        return float(self.weights.sum())

    @cached_property
    def spacing(self) -> float:
        return float(self.weights.max())

    def integrate(self, values) -> np.ndarray:
        return np.tensordot(self.weights, np.asarray(values), axes=(0, 0))

    def resampled(self, n: int) -> "BoundaryGrid":
        return BoundaryGrid(self.curve, n)


def sample_grid(curve: Curve, n: int) -> BoundaryGrid:
    return BoundaryGrid(curve, n)


def check_disjoint(grids, min_gap: float = 0.0) -> None:
    """Raise if any two curves touch, cross or nest (sampled check)."""
    for a in range(len(grids)):
        for b in range(a + 1, len(grids)):
            ga, gb = grids[a], grids[b]
            d = np.min(np.linalg.norm(ga.points[:, None, :] - gb.points[None, :, :], axis=2))
            if d <= min_gap:
                raise ValueError(f"curves {a} and {b} are not disjoint (gap {d:.3g})")
            ina, inb = gb.curve.contains(ga.points), ga.curve.contains(gb.points)
            if (ina.any() and not ina.all()) or (inb.any() and not inb.all()):
                raise ValueError(f"curves {a} and {b} are not disjoint (they cross)")
            if ina.all() or inb.all():
                raise ValueError(f"curves {a} and {b} are nested")


def min_distance(points, grid: BoundaryGrid) -> np.ndarray:
    points = np.atleast_2d(points)
    out = np.empty(len(points))
    for s in range(0, len(points), 256):
        blk = points[s : s + 256]
        out[s : s + 256] = np.min(
            np.linalg.norm(blk[:, None, :] - grid.points[None, :, :], axis=2), axis=1
        )
    return out
