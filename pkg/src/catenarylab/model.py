"""Pointwise geometry of radial graphs r(s) weighted by the distance to the unit circle.

A curve is given in polar form gamma(s) = r(s) (cos s, sin s).  Its potential
energy is E = int |r-1|^alpha * sqrt(r^2 + r'^2) ds, and the extremals satisfy

    r (r-1) r'' = ((alpha+2) r - 2) r'^2 + ((alpha+1) r - 1) r^2.

This module holds the algebraic building blocks: curvature, the normal/radial
angle, the strong-form residual of the extremal equation, and quadrature of
the energy over sampled curves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

__all__ = [
    "PowerParams",
    "PolarState",
    "distance_power",
    "curvature",
    "cos_phi",
    "el_residual",
    "curvature_relation_residual",
    "energy",
    "to_cartesian",
]


@dataclass(frozen=True)
class PowerParams:
    """Exponent of the distance weight |r-1|**alpha.

    alpha = 0 would weight pure arc length (extremals are straight lines) and
    is rejected at construction.
    """

    alpha: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.alpha) or self.alpha == 0.0:
            raise ValueError(f"alpha must be finite and nonzero, got {self.alpha!r}")

    @property
    def equilibrium_radius(self) -> float | None:
        """Radius 1/(1+alpha) of the constant circular solution; None for alpha <= -1."""
        if self.alpha > -1.0:
            return 1.0 / (1.0 + self.alpha)
        return None


@dataclass(frozen=True)
class PolarState:
    """A point (r, r') of a radial graph; r = 0 and r = 1 are barriers."""

    r: float
    dr: float

    def __post_init__(self) -> None:
        if not (self.r > 0.0) or self.r == 1.0:
            raise ValueError(f"state requires r > 0 and r != 1, got r={self.r!r}")


def _check_radius(r, allow_unit: bool = False) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0.0):
        raise ValueError("radius must be positive")
    if not allow_unit and np.any(r == 1.0):
        raise ValueError("radius r = 1 lies on the singular barrier")
    return r


def distance_power(params: PowerParams, r) -> np.ndarray:
    """|r-1|**alpha, the energy density per unit length.

    The branch is fixed by the sign of r-1; solutions never cross r = 1, so a
    single branch applies along any one curve.
    """
    r = _check_radius(r)
    return np.abs(r - 1.0) ** params.alpha


def curvature(r, dr, ddr):
    """Signed curvature of gamma(s) = r(s)(cos s, sin s).

    kappa = (2 r'^2 + r^2 - r r'') / (r^2 + r'^2)^(3/2), signed with respect
    to the leftward unit normal N = (-r' sin s - r cos s, r' cos s - r sin s)
    / sqrt(r^2 + r'^2).  A circle of radius a about the origin has kappa = 1/a.
    """
    r = _check_radius(r, allow_unit=True)
    dr = np.asarray(dr, dtype=float)
    ddr = np.asarray(ddr, dtype=float)
    return (2.0 * dr * dr + r * r - r * ddr) / np.hypot(r, dr) ** 3


def cos_phi(r, dr):
    """Cosine of the angle between the unit normal and the radial direction.

    cos(phi) = <N, gamma>/|gamma| = -r / sqrt(r^2 + r'^2); always in [-1, 0)
    for r > 0, approaching 0 only when the tangent turns radial (|r'| -> inf).
    """
    r = _check_radius(r, allow_unit=True)
    dr = np.asarray(dr, dtype=float)
    return -r / np.hypot(r, dr)


def el_residual(params: PowerParams, r, dr, ddr):
    """Residual r(r-1)r'' - ((alpha+2)r-2)r'^2 - ((alpha+1)r-1)r^2.

    Vanishes exactly on the 2-jets of extremal curves.  Rejects r in {0, 1},
    where the equation degenerates.
    """
    r = _check_radius(r)
    dr = np.asarray(dr, dtype=float)
    ddr = np.asarray(ddr, dtype=float)
    a = params.alpha
    lhs = r * (r - 1.0) * ddr
    rhs = ((a + 2.0) * r - 2.0) * dr * dr + ((a + 1.0) * r - 1.0) * r * r
    return lhs - rhs


def curvature_relation_residual(params: PowerParams, r, dr, ddr):
    """Residual of the equivalent curvature form kappa = alpha * cos(phi) / (r - 1).

    With the normal convention of :func:`curvature` the relation holds exactly
    on extremal jets; note the sign pairs with cos(phi) = -r/sqrt(r^2+r'^2)
    (the constant circle r = 1/(1+alpha) has kappa = 1 + alpha > 0).
    """
    r = _check_radius(r)
    return curvature(r, dr, ddr) - params.alpha * cos_phi(r, dr) / (r - 1.0)


def _split_samples(samples):
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 2 or arr.shape[1] < 2:
        raise ValueError("samples must be an (n, 3) array of (s, r, dr) rows")
    s = arr[:, 0]
    r = arr[:, 1]
    dr = arr[:, 2] if arr.shape[1] > 2 else np.zeros_like(r)
    return s, r, dr


def energy(params: PowerParams, samples) -> float:
    """Composite-Simpson quadrature of int |r-1|^alpha sqrt(r^2+r'^2) ds.

    `samples` is an (n, 3) array of rows (s, r, dr) on a strictly increasing
    s-grid.  The integrand is evaluated exactly at the samples; Simpson keeps
    the rule at 4th order on smooth dense grids.
    """
    s, r, dr = _split_samples(samples)
    if s.size < 3:
        raise ValueError("need at least 3 samples for Simpson quadrature")
    if np.any(np.diff(s) <= 0.0):
        raise ValueError("s-grid must be strictly increasing")
    _check_radius(r, allow_unit=True)
    integrand = np.abs(r - 1.0) ** params.alpha * np.hypot(r, dr)
    return float(simpson(integrand, x=s))


def to_cartesian(samples) -> np.ndarray:
    """Map (s, r) samples to (x, y) = (r cos s, r sin s); preserves sample count."""
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 2 or arr.shape[1] < 2:
        raise ValueError("samples must be an (n, >=2) array with columns (s, r, ...)")
    s, r = arr[:, 0], arr[:, 1]
    return np.column_stack((r * np.cos(s), r * np.sin(s)))
