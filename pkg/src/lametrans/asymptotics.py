"""Small-inclusion expansion of the boundary trace and its error.

For ``D = z0 + eps B`` in d = 2 the boundary perturbation is approximated by

    u(x) ~ U(x) - sum_j sum_{alpha, beta} eps^{|alpha|+|beta|} / (alpha! beta!)
                  d^alpha U_j(z0) d_z^beta N(x, z0) M^j_{alpha beta}(B)

with ``(|alpha|, |beta|)`` in ``{(1, 1), (1, 2), (2, 1)}``; the error is
expected to be ``O(eps^4)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial

import numpy as np

from .bvp import NeumannFunction, field_derivatives, solve_background, solve_with_inclusion
from .emt import ALPHAS, BETAS, BLOCKS, EmtTable, compute_emt
from .geometry import BoundaryGrid, Curve, InclusionPlacement, place
from .material import ContrastPair


def multi_factorial(alpha) -> int:
    return factorial(alpha[0]) * factorial(alpha[1])


@dataclass
class ExpansionInput:
    emt: EmtTable
    U_boundary: np.ndarray  # U at the target nodes, (N, 2)
    dU: dict  # alpha -> d^alpha U(z0), shape (2,)
    dN: dict  # beta -> d_z^beta N(x, z0) at the targets, shape (N, 2, 2)
    epsilon: float
    z0: tuple
    blocks: tuple = BLOCKS

    def __post_init__(self):
        for na, nb in self.blocks:
            for a in ALPHAS[na]:
                if a not in self.dU:
                    raise KeyError(f"missing derivative of U for alpha={a}")
                for b in BETAS[nb]:
                    if b not in self.dN:
                        raise KeyError(f"missing z-derivative of N for beta={b}")
                    for j in range(2):
                        if (a, b, j) not in self.emt.entries:
                            raise KeyError(f"missing EMT entry {(a, b, j)}")


def evaluate_expansion(inp: ExpansionInput) -> np.ndarray:
    out = np.array(inp.U_boundary, dtype=float, copy=True)
    eps = float(inp.epsilon)
    if eps == 0.0:
        return out
    for na, nb in inp.blocks:
        pref = eps ** (na + nb)
        for a in ALPHAS[na]:
            for b in BETAS[nb]:
                c = pref / (multi_factorial(a) * multi_factorial(b))
                for j in range(2):
                    coef = c * inp.dU[a][j]
                    if coef == 0.0:
                        continue
                    out -= coef * np.einsum("nik,k->ni", inp.dN[b], inp.emt[a, b, j])
    return out


def expansion_error(u_boundary, expansion) -> float:
    """Nodal sup norm of the pointwise Euclidean difference."""
    d = np.asarray(u_boundary, dtype=float) - np.asarray(expansion, dtype=float)
    if d.shape != np.shape(expansion):
        raise ValueError("fields must be sampled at the same points")
    return float(np.max(np.linalg.norm(d, axis=-1)))


@dataclass
class ExpansionProblem:
    """Epsilon-independent ingredients: U, its derivatives, N-derivatives and the EMT.

    ``reference`` is the unit-scale shape B (in its own frame); inclusions
    are placed at ``z0 + eps * B``.
    """

    pair: ContrastPair
    omega: BoundaryGrid
    reference: Curve
    z0: tuple
    g: np.ndarray
    n_inclusion: int = 256
    emt: EmtTable | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        p0 = self.pair.background
        self.z0 = tuple(float(v) for v in self.z0)
        self.U = solve_background(p0, self.omega, self.g)
        self.g = np.asarray(self.g, dtype=float)
        if self.emt is None:
            self.emt = compute_emt(self.pair, BoundaryGrid(self.reference, self.n_inclusion))
        nf = NeumannFunction(p0, self.omega, self.z0)
        alphas = [a for k in (1, 2) for a in ALPHAS[k]]
        self.dU = {a: field_derivatives(self.U, self.z0, a) for a in alphas}
        self.dN = {b: nf.boundary_values(b) for b in alphas}
        self.U_boundary = self.U.boundary_trace()

    def inclusion_grid(self, eps: float) -> BoundaryGrid:
        return BoundaryGrid(place(InclusionPlacement(self.reference, self.z0, eps)), self.n_inclusion)

    def exact_trace(self, eps: float) -> np.ndarray:
        key = float(eps)
        if key not in self._cache:
            sol = solve_with_inclusion(self.pair, self.omega, [self.inclusion_grid(eps)], self.g)
            self._cache[key] = sol.boundary_trace()
        return self._cache[key]

    def expansion(self, eps: float, blocks=BLOCKS) -> np.ndarray:
        inp = ExpansionInput(self.emt, self.U_boundary, self.dU, self.dN, eps, self.z0, blocks)
        return evaluate_expansion(inp)

    def error(self, eps: float, blocks=BLOCKS) -> float:
        return expansion_error(self.exact_trace(eps), self.expansion(eps, blocks))
