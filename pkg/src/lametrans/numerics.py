"""Dense LU solves and bordered (Lagrange-multiplier) systems."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgWarning, lapack, lu_factor
from scipy.linalg import lu_solve as _lu_solve

EPS = np.finfo(float).eps


class SingularSystemError(np.linalg.LinAlgError):
    def __init__(self, msg, cond=np.inf):
        super().__init__(msg)
        self.cond = cond


class LUFactor:
    """Row-equilibrated LU factorization with partial pivoting.

    Rows are scaled by their max-norm before factoring, which keeps blocks
    of very different magnitude (e.g. single layer rows at large shear
    modulus) from dictating the pivot order.
    """

    def __init__(self, A, equilibrate: bool = True):
        A = np.array(A, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError(f"matrix must be square, got shape {A.shape}")
        n = A.shape[0]
        if equilibrate:
            s = np.max(np.abs(A), axis=1)
            if np.any(s == 0.0):
                raise SingularSystemError("matrix has a zero row")
            self.row_scale = 1.0 / s
            A *= self.row_scale[:, None]
        else:
            self.row_scale = np.ones(n)
        anorm = np.max(np.sum(np.abs(A), axis=0)) if n else 0.0
        with warnings.catch_warnings():
            # exact singularity is reported below
            warnings.simplefilter("ignore", LinAlgWarning)
            self.lu, self.piv = lu_factor(A, check_finite=True)
        diag = np.abs(np.diag(self.lu))
        if n and (diag.min() == 0.0 or diag.min() <= n * EPS * diag.max()):
            raise SingularSystemError("zero pivot: matrix is singular to working precision")
        rcond, info = lapack.dgecon(self.lu, anorm, norm="1")
        self.cond = 1.0 / rcond if rcond > 0 else np.inf
        if not rcond > n * EPS:
            raise SingularSystemError(
                f"matrix is singular to working precision (cond ~ {self.cond:.3g})", self.cond
            )
        self.n = n

    def solve(self, b) -> np.ndarray:
        b = np.asarray(b, dtype=float)
        if b.shape[0] != self.n:
            raise ValueError(f"right-hand side has {b.shape[0]} rows, expected {self.n}")
        scale = self.row_scale if b.ndim == 1 else self.row_scale[:, None]
        # getrs shifts the pivot array in place while it runs, so threads
        # sharing a factorization each need their own copy
        return _lu_solve((self.lu, self.piv.copy()), b * scale)


def lu_solve(A, b) -> np.ndarray:
    return LUFactor(A).solve(b)


@dataclass
class BorderedSystem:
    """``[[A, B], [C^T, D]] [x; y] = [rhs; crhs]`` with ``C = B`` and ``D = 0`` by default.

    ``y`` holds Lagrange multipliers (or any other small set of border
    unknowns such as rigid-motion coefficients).
    """

    A: np.ndarray
    B: np.ndarray
    rhs: np.ndarray | None = None
    crhs: np.ndarray | None = None
    C: np.ndarray | None = None
    D: np.ndarray | None = None

    def __post_init__(self):
        self.A = np.asarray(self.A, dtype=float)
        n = self.A.shape[0]
        if self.A.ndim != 2 or self.A.shape[1] != n:
            raise ValueError("A must be square")
        self.B = np.asarray(self.B, dtype=float).reshape(n, -1)
        k = self.B.shape[1]
        if k > 64:
            raise ValueError(f"border too wide ({k} columns)")
        self.C = self.B if self.C is None else np.asarray(self.C, dtype=float).reshape(n, -1)
        if self.C.shape != (n, k):
            raise ValueError(f"C has shape {self.C.shape}, expected {(n, k)}")
        self.D = np.zeros((k, k)) if self.D is None else np.asarray(self.D, dtype=float)
        if self.D.shape != (k, k):
            raise ValueError("D must be k x k")
        if self.rhs is not None and np.shape(self.rhs)[0] != n:
            raise ValueError("rhs length does not match A")
        if self.crhs is not None and np.shape(self.crhs)[0] != k:
            raise ValueError("crhs length does not match the border")

    @property
    def k(self) -> int:
        return self.B.shape[1]

    def matrix(self) -> np.ndarray:
        return np.block([[self.A, self.B], [self.C.T, self.D]])

    def factor(self) -> "BorderedFactor":
        return BorderedFactor(LUFactor(self.matrix()), self.A.shape[0], self.k)


class BorderedFactor:
    def __init__(self, lu: LUFactor, n: int, k: int):
        self.lu, self.n, self.k = lu, n, k

    @property
    def cond(self):
        return self.lu.cond

    def solve(self, rhs, crhs=None):
        rhs = np.asarray(rhs, dtype=float)
        if crhs is None:
            crhs = np.zeros((self.k,) + rhs.shape[1:])
        z = self.lu.solve(np.concatenate([rhs, np.asarray(crhs, dtype=float)]))
        return z[: self.n], z[self.n :]


def solve_bordered(sys: BorderedSystem):
    """Return ``(x, multipliers)``."""
    if sys.rhs is None:
        raise ValueError("bordered system has no right-hand side")
    if sys.k == 0:
        return lu_solve(sys.A, sys.rhs), np.zeros(0)
    return sys.factor().solve(sys.rhs, sys.crhs)
