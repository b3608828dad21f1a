"""Sampled solutions r(s) of the extremal ODE and their interpolation.

A Trajectory stores the s >= 0 half of a solution with r'(0) = 0; the s < 0
half follows from the reflection symmetry r(-s) = r(s) and is materialized on
demand by :func:`mirrored_samples`.  Interpolation between samples is quintic
Hermite built from nodal (r, r', r''), so interpolated jets stay consistent
with the ODE to well below solver tolerance.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .model import PowerParams

__all__ = [
    "StopReason",
    "SolverConfig",
    "EndgameTail",
    "Trajectory",
    "mirrored_samples",
    "QuinticHermite",
]


class StopReason(enum.Enum):
    """Why integration ended; exactly one per trajectory."""

    COMPLETED = "Completed"          # requested span reached
    SINGULAR_UNIT = "SingularUnit"   # |r - 1| shrank to eps_unit
    NEAR_ORIGIN = "NearOrigin"       # r shrank to eps_origin
    BLOWUP = "Blowup"                # |r'| exceeded v_max
    STEP_UNDERFLOW = "StepUnderflow"  # integrator stalled before any event


@dataclass(frozen=True)
class SolverConfig:
    """Integration settings; the defaults match the acceptance tolerances."""

    span: float = 4.0 * math.pi
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    eps_unit: float = 1e-9     # stop when |r-1| reaches this
    eps_origin: float = 1e-9   # stop when r reaches this
    v_max: float = 1e9         # stop when |r'| reaches this
    max_samples: int = 200_000
    ds_max: float = 0.005      # densify solver steps to at most this spacing
    max_step: float = 0.05     # cap on accepted steps; bounds dense-output defect
    endgame_delta: float = 1e-4  # switch to r-parametrized end-game inside this band
    method: str = "DOP853"

    def __post_init__(self) -> None:
        if self.span <= 0.0:
            raise ValueError("span must be positive")
        if self.rel_tol <= 0.0 or self.abs_tol <= 0.0:
            raise ValueError("tolerances must be positive")
        if not (0.0 < self.eps_unit < self.endgame_delta < 1.0):
            raise ValueError("need 0 < eps_unit < endgame_delta < 1")
        if self.eps_origin <= 0.0 or self.v_max <= 0.0:
            raise ValueError("eps_origin and v_max must be positive")
        if self.max_samples < 16:
            raise ValueError("max_samples too small")
        if self.ds_max <= 0.0 or self.max_step <= 0.0:
            raise ValueError("ds_max and max_step must be positive")


@dataclass(frozen=True)
class EndgameTail:
    """Vertical-tangent samples near r = 1 whose s-increments collapse below
    double resolution; s may tie, (r, dr) stay meaningful."""

    s: np.ndarray
    r: np.ndarray
    dr: np.ndarray


@dataclass(frozen=True)
class Trajectory:
    """Half-solution on [0, s_max] with r(0) = r0, r'(0) = 0.

    Treat as immutable: the arrays are shared, never written.  Safe to hand
    between threads and to classify/measure concurrently.
    """

    params: PowerParams
    r0: float
    s: np.ndarray
    r: np.ndarray
    dr: np.ndarray
    stop_reason: StopReason
    config: SolverConfig
    tail: EndgameTail | None = None
    _interp_cache: object = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        for name in ("s", "r", "dr"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        if self.s.size < 2:
            raise ValueError("trajectory needs at least two samples")
        if self.s[0] != 0.0 or self.r[0] != self.r0 or self.dr[0] != 0.0:
            raise ValueError("first sample must be (s, r, dr) = (0, r0, 0)")
        if np.any(np.diff(self.s) <= 0.0):
            raise ValueError("sample angles must be strictly increasing")
        if np.any(self.r <= 0.0) or np.any(self.r == 1.0):
            raise ValueError("samples must satisfy r > 0 and r != 1")

    @property
    def n(self) -> int:
        return int(self.s.size)

    @property
    def s_max(self) -> float:
        """Largest angle reached, end-game tail included."""
        if self.tail is not None and self.tail.s.size:
            return float(max(self.s[-1], self.tail.s[-1]))
        return float(self.s[-1])

    @property
    def angular_extent(self) -> float:
        """Total angle 2*s_max covered by the symmetric extension."""
        return 2.0 * self.s_max

    def samples(self) -> np.ndarray:
        """(n, 3) array of rows (s, r, dr)."""
        return np.column_stack((self.s, self.r, self.dr))


def mirrored_samples(traj: Trajectory) -> np.ndarray:
    """Samples over [-s_max, s_max] via r(-s) = r(s), r'(-s) = -r'(s)."""
    s = np.concatenate((-traj.s[::-1], traj.s[1:]))
    r = np.concatenate((traj.r[::-1], traj.r[1:]))
    dr = np.concatenate((-traj.dr[::-1], traj.dr[1:]))
    return np.column_stack((s, r, dr))


class QuinticHermite:
    """Piecewise quintic matching (f, f', f'') at both ends of each interval.

    Interpolation error on a spacing-h grid scales as h^6 for values, h^5 for
    first and h^4 for second derivatives.
    """

    def __init__(self, s: np.ndarray, f: np.ndarray, df: np.ndarray, d2f: np.ndarray):
        s = np.asarray(s, dtype=float)
        if s.size < 2 or np.any(np.diff(s) <= 0.0):
            raise ValueError("nodes must be strictly increasing")
        self.s = s
        h = np.diff(s)
        f0, f1 = f[:-1], f[1:]
        # scale derivatives to the unit interval
        g0, g1 = df[:-1] * h, df[1:] * h
        k0, k1 = d2f[:-1] * h * h, d2f[1:] * h * h
        d = f1 - f0
        c = np.empty((s.size - 1, 6))
        c[:, 0] = f0
        c[:, 1] = g0
        c[:, 2] = 0.5 * k0
        c[:, 3] = 10.0 * d - 6.0 * g0 - 4.0 * g1 - 1.5 * k0 + 0.5 * k1
        c[:, 4] = -15.0 * d + 8.0 * g0 + 7.0 * g1 + 1.5 * k0 - k1
        c[:, 5] = 6.0 * d - 3.0 * (g0 + g1) - 0.5 * (k0 - k1)
        self._h = h
        self._c = c

    def _locate(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        idx = np.clip(np.searchsorted(self.s, x, side="right") - 1, 0, self.s.size - 2)
        t = (x - self.s[idx]) / self._h[idx]
        return idx, t

    def __call__(self, x) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Evaluate (f, f', f'') at x (scalar or array)."""
        x = np.asarray(x, dtype=float)
        idx, t = self._locate(np.atleast_1d(x))
        c = self._c[idx]
        val = c[:, 5]
        d1 = np.zeros_like(t)
        d2 = np.zeros_like(t)
        for k in range(4, -1, -1):
            d2 = d2 * t + 2.0 * d1
            d1 = d1 * t + val
            val = val * t + c[:, k]
        h = self._h[idx]
        out = (val, d1 / h, d2 / (h * h))
        if x.ndim == 0:
            return tuple(float(o[0]) for o in out)  # type: ignore[return-value]
        return out
