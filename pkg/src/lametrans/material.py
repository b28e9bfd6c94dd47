"""Lamé parameters, Kelvin constants and the isotropic elasticity tensor."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np


class StrongConvexityError(ValueError):
    """Raised when a Lamé pair violates mu > 0 and d*lambda + 2*mu > 0."""


class InadmissibleContrastWarning(UserWarning):
    """(lambda - lambda0)(mu - mu0) <= 0 for a background/inclusion pair."""


@dataclass(frozen=True)
class LameParams:
    """Isotropic Lamé pair with derived bulk modulus and Kelvin constants.

    ``alpha`` and ``beta`` are the constants of the Kelvin matrix,
    ``alpha = (1/mu + 1/(2 mu + lambda)) / 2`` and
    ``beta = (1/mu - 1/(2 mu + lambda)) / 2``.
    """

    lam: float
    mu: float
    dim: int = 2

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ValueError(f"dim must be 2 or 3, got {self.dim}")
        lam, mu = float(self.lam), float(self.mu)
        if not (np.isfinite(lam) and np.isfinite(mu)):
            raise StrongConvexityError(f"non-finite Lamé pair ({lam}, {mu})")
        if mu <= 0.0 or self.dim * lam + 2.0 * mu <= 0.0:
            raise StrongConvexityError(
                f"strong convexity violated: mu={mu}, {self.dim}*lambda+2*mu="
                f"{self.dim * lam + 2.0 * mu}"
            )
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "mu", mu)

    @property
    def kappa(self) -> float:
        return self.lam + 2.0 * self.mu / self.dim

    @property
    def alpha(self) -> float:
        return 0.5 * (1.0 / self.mu + 1.0 / (2.0 * self.mu + self.lam))

    @property
    def beta(self) -> float:
        return 0.5 * (1.0 / self.mu - 1.0 / (2.0 * self.mu + self.lam))

    @classmethod
    def from_kappa_mu(cls, kappa: float, mu: float, dim: int = 2) -> "LameParams":
        return cls(kappa - 2.0 * mu / dim, mu, dim)


def new_lame_params(lam: float, mu: float, dim: int = 2) -> LameParams:
    return LameParams(lam, mu, dim)


def apply_elasticity_tensor(p: LameParams, strain) -> np.ndarray:
    """Return ``lambda tr(E) I + 2 mu E`` for a (stack of) symmetric strain(s)."""
    strain = np.asarray(strain, dtype=float)
    d = strain.shape[-1]
    tr = np.trace(strain, axis1=-2, axis2=-1)
    return p.lam * tr[..., None, None] * np.eye(d) + 2.0 * p.mu * strain


def check_contrast(pair: "ContrastPair") -> bool:
    return (pair.inclusion.lam - pair.background.lam) * (
        pair.inclusion.mu - pair.background.mu
    ) > 0.0


@dataclass(frozen=True)
class ContrastPair:
    """Background and inclusion Lamé pairs.

    Inadmissible contrast only warns: the zero-contrast pair is a useful
    regression case and the discrete problem stays solvable.
    """

    background: LameParams
    inclusion: LameParams
    admissible: bool = field(init=False)

    def __post_init__(self):
        if self.background.dim != self.inclusion.dim:
            raise ValueError("background and inclusion dimensions differ")
        ok = check_contrast(self)
        object.__setattr__(self, "admissible", ok)
        if not ok:
            warnings.warn(
                f"(lambda-lambda0)(mu-mu0) <= 0 for inclusion "
                f"({self.inclusion.lam}, {self.inclusion.mu}) in background "
                f"({self.background.lam}, {self.background.mu})",
                InadmissibleContrastWarning,
                stacklevel=3,
            )

    @classmethod
    def make(cls, lam0, mu0, lam, mu, dim=2):
        return cls(LameParams(lam0, mu0, dim), LameParams(lam, mu, dim))
