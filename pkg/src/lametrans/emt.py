"""Elastic moment tensors ``M^j_{alpha beta}(B) = int_{dB} x^beta phi^j_alpha``.

``phi^j_alpha`` is the exterior density of the free-space transmission
problem with the formal source ``h = x^alpha e_j``.  Directions ``j`` and
components ``p`` are 0-based in the API and 1-based in the text export.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .fields import monomial_field
from .freespace import solve_transmission_many
from .geometry import BoundaryGrid
from .material import ContrastPair

ALPHAS = {1: ((1, 0), (0, 1)), 2: ((2, 0), (1, 1), (0, 2))}
BETAS = {1: ((1, 0), (0, 1)), 2: ((2, 0), (1, 1), (0, 2))}
# (|alpha|, |beta|) blocks of the d = 2 expansion
BLOCKS = ((1, 1), (1, 2), (2, 1))
EXPORT_HEADER = "# emt v1: a1 a2 b1 b2 j p value"


def polynomial_source(alpha, j: int):
    order = sum(alpha)
    if order not in (1, 2) or min(alpha) < 0 or len(alpha) != 2:
        raise ValueError(f"unsupported multi-index {tuple(alpha)} (need |alpha| in {{1, 2}})")
    return monomial_field(alpha, j)


def index_keys():
    """All ``(alpha, beta, j)`` stored in a table."""
    keys = []
    for na, nb in BLOCKS:
        for a in ALPHAS[na]:
            for b in BETAS[nb]:
                for j in range(2):
                    keys.append((a, b, j))
    return keys


@dataclass
class EmtTable:
    curve: object
    pair: ContrastPair
    entries: dict  # (alpha, beta, j) -> array(2)
    density_norms: dict | None = None  # (alpha, j) -> ||phi^j_alpha||_{-1/2}

    def __getitem__(self, key):
        a, b, j = key
        return self.entries[(tuple(a), tuple(b), int(j))]

    def __post_init__(self):
        for k, v in self.entries.items():
            if not np.all(np.isfinite(v)):
                raise ValueError(f"non-finite EMT entry {k}")

    def max_abs(self) -> float:
        return max(float(np.max(np.abs(v))) for v in self.entries.values())

    def records(self):
        """Flat rows ``(alpha, beta, j, p, value)`` in a fixed order."""
        for a, b, j in index_keys():
            v = self.entries[(a, b, j)]
            for p in range(2):
                yield a, b, j, p, float(v[p])

    def export(self) -> str:
        buf = io.StringIO()
        buf.write(EXPORT_HEADER + "\n")
        for a, b, j, p, v in self.records():
            buf.write(f"{a[0]} {a[1]} {b[0]} {b[1]} {j + 1} {p + 1} {v:.17g}\n")
        return buf.getvalue()

    @staticmethod
    def parse(text: str) -> dict:
        out = {}
        for line in text.splitlines():
            if not line.strip() or line.startswith("#"):
                continue
            a1, a2, b1, b2, j, p, v = line.split()
            key = ((int(a1), int(a2)), (int(b1), int(b2)), int(j) - 1)
            out.setdefault(key, np.zeros(2))[int(p) - 1] = float(v)
        return out


def _powers(pts, beta):
    return pts[:, 0] ** beta[0] * pts[:, 1] ** beta[1]


def compute_emt(pair: ContrastPair, grid: BoundaryGrid, centered: bool = True) -> EmtTable:
    """Solve the ten transmission problems ``h = x^alpha e_j`` with one factorization.

    The curve should be at unit scale; the expansion supplies the powers of
    epsilon.  Monomials are taken about the origin of the curve's frame.
    """
    from .potentials import sobolev_norm

    sources = [(a, j) for na in (1, 2) for a in ALPHAS[na] for j in range(2)]
    sols = solve_transmission_many(pair, [grid], [polynomial_source(a, j) for a, j in sources])
    phis = {src: s.phi[0] for src, s in zip(sources, sols)}
    w = grid.weights
    entries = {}
    for a, b, j in index_keys():
        xb = _powers(grid.points, b)
        entries[(a, b, j)] = np.sum((w * xb)[:, None] * phis[(a, j)], axis=0)
    norms = {src: sobolev_norm(grid, phis[src], -0.5) for src in sources}
    return EmtTable(grid.curve, pair, entries, norms)


def emt_as_tensor(table: EmtTable) -> np.ndarray:
    """``m[i, j, p, q] = M^j_{e_i e_q}[p]``."""
    m = np.zeros((2, 2, 2, 2))
    e = ((1, 0), (0, 1))
    for i in range(2):
        for q in range(2):
            for j in range(2):
                key = (e[i], e[q], j)
                if key not in table.entries:
                    raise KeyError(f"missing EMT entry {key}")
                m[i, j, :, q] = table.entries[key]
    return m


def rotate_tensor(m: np.ndarray, angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    Q = np.array([[c, -s], [s, c]])
    return np.einsum("ia,jb,pc,qd,abcd->ijpq", Q, Q, Q, Q, m)
