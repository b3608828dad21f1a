"""Phase-plane system, adaptive integration with event detection, equilibria.

With u = r and v = r' the extremal equation becomes

    u' = v,   v' = u((alpha+1)u - 1)/(u - 1) + ((alpha+2)u - 2) v^2 / (u(u - 1)),

singular on the lines u = 0 and u = 1.  Integration runs in the angle s and
stops strictly before the singular set (events), optionally finishing with an
r-parametrized end-game that resolves vertical-tangent approaches to the unit
circle for alpha < 0.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .model import PowerParams
from .trajectory import (
    EndgameTail,
    QuinticHermite,
    SolverConfig,
    StopReason,
    Trajectory,
)

__all__ = [
    "PhasePoint",
    "EquilibriumKind",
    "EquilibriumInfo",
    "vector_field",
    "second_derivative",
    "integrate",
    "equilibrium",
    "interpolant",
    "evaluate",
    "midpoint_el_residuals",
    "v_zero_crossings",
    "reflection_defect",
]

log = logging.getLogger(__name__)

# ln(v) ceiling for the end-game; keeps v^2 far from overflow for any alpha
_LNV_CAP = 340.0


@dataclass(frozen=True)
class PhasePoint:
    """Point (u, v) = (r, r') of the phase plane, off the singular lines."""

    u: float
    v: float

    def __post_init__(self) -> None:
        if not (self.u > 0.0) or self.u == 1.0:
            raise ValueError(f"phase point requires u > 0 and u != 1, got u={self.u!r}")


class EquilibriumKind(enum.Enum):
    CENTER = "Center"
    SADDLE = "Saddle"


@dataclass(frozen=True)
class EquilibriumInfo:
    point: PhasePoint
    jacobian: np.ndarray
    eigenvalues: tuple[complex, complex]
    kind: EquilibriumKind


def _ddr(a: float, r, dr):
    """r'' solved from the extremal equation; no validation, hot path."""
    return (((a + 2.0) * r - 2.0) * dr * dr + ((a + 1.0) * r - 1.0) * r * r) / (
        r * (r - 1.0)
    )


def second_derivative(params: PowerParams, r, dr):
    """r'' = (((alpha+2)r-2)r'^2 + ((alpha+1)r-1)r^2) / (r(r-1)).

    Single source of truth for the vector field's v-component.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0.0) or np.any(r == 1.0):
        raise ValueError("second derivative is singular at r in {0, 1}")
    return _ddr(params.alpha, r, np.asarray(dr, dtype=float))


def vector_field(params: PowerParams, p) -> tuple[float, float]:
    """(u', v') at a phase point; raises on the singular lines u in {0, 1}."""
    if not isinstance(p, PhasePoint):
        p = PhasePoint(*p)
    return p.v, float(second_derivative(params, p.u, p.v))


def equilibrium(params: PowerParams) -> EquilibriumInfo | None:
    """Rest point of the phase flow; absent when alpha <= -1.

    At P = (1/(1+alpha), 0) the linearization is [[0, 1], [-(alpha+1)/alpha, 0]]:
    a center (pure imaginary pair) for alpha > 0, a saddle (real opposite
    pair) for alpha in (-1, 0).
    """
    a = params.alpha
    if a <= -1.0:
        return None
    u = 1.0 / (1.0 + a)
    coeff = -(a + 1.0) / a
    jac = np.array([[0.0, 1.0], [coeff, 0.0]])
    if a > 0.0:
        w = math.sqrt((a + 1.0) / a)
        eig = (complex(0.0, w), complex(0.0, -w))
        kind = EquilibriumKind.CENTER
    else:
        w = math.sqrt((a + 1.0) / (-a))
        eig = (complex(w, 0.0), complex(-w, 0.0))
        kind = EquilibriumKind.SADDLE
    return EquilibriumInfo(PhasePoint(u, 0.0), jac, eig, kind)


def _phase_events(cfg: SolverConfig, switch_delta: float | None):
    def unit(s, y):
        return abs(y[0] - 1.0) - cfg.eps_unit

    unit.terminal, unit.direction = True, -1.0

    def origin(s, y):
        return y[0] - cfg.eps_origin

    origin.terminal, origin.direction = True, -1.0

    def blow(s, y):
        return abs(y[1]) - cfg.v_max

    blow.terminal, blow.direction = True, 1.0

    events = {"unit": unit, "origin": origin, "blow": blow}
    if switch_delta is not None:
        def switch(s, y):
            return abs(y[0] - 1.0) - switch_delta

        switch.terminal, switch.direction = True, -1.0
        events["switch"] = switch
    return events


def _dense_grid(sol, ds_max: float, max_samples: int, nsub_min: int = 4):
    """Solver steps densified to spacing <= ds_max and at least nsub_min
    pieces per accepted step (coarsened only if the sample budget would
    overflow).

    Near a blow-up or barrier the accepted steps shrink in proportion to the
    distance from the singular angle; splitting each one keeps the dense-grid
    spacing a small fraction of that distance, which is what bounds the
    interpolated midpoint residual there.
    """
    ts = sol.t
    span = ts[-1] - ts[0]
    ds = ds_max
    need = nsub_min * ts.size + int(span / ds) + 8
    if need > max_samples:
        nsub_min = 1
        ds = span / max(max_samples - ts.size - 8, 8)
    s_parts, y_parts = [], []
    for i in range(ts.size - 1):
        s_parts.append(ts[i : i + 1])
        y_parts.append(sol.y[:, i : i + 1])
        h = ts[i + 1] - ts[i]
        nsub = max(int(math.ceil(h / ds)), nsub_min)
        if nsub > 1:
            interior = ts[i] + h * np.arange(1, nsub) / nsub
            s_parts.append(interior)
            y_parts.append(sol.sol(interior))
    s_parts.append(ts[-1:])
    y_parts.append(sol.y[:, -1:])
    return np.concatenate(s_parts), np.concatenate(y_parts, axis=1)


def _endgame(a: float, s_sw: float, r_sw: float, v_sw: float, cfg: SolverConfig):
    """Finish the approach to the unit circle with |r-1| as the independent
    variable (log coordinates), where the s-parametrized tangent is vertical.

    Works on w = r - 1 directly: near r = 1 the difference r - 1 is exact
    (Sterbenz) while reconstructing it from 1 + w is not.  Emitted samples are
    snapped to representable radii so the stored (r, dr) pairs stay consistent
    with each other to machine precision.
    """
    sg = 1.0 if r_sw > 1.0 else -1.0
    vsgn = 1.0 if v_sw > 0.0 else -1.0
    w_sw = r_sw - 1.0

    def rhs(tau, y):
        w = sg * math.exp(tau)
        v = vsgn * math.exp(y[1])
        dlnv = ((a + (a + 2.0) * w) + (a + (a + 1.0) * w) * (1.0 + w) ** 2
                * math.exp(-2.0 * y[1])) / (1.0 + w)
        return (w / v, dlnv)

    def cap(tau, y):
        return y[1] - _LNV_CAP

    cap.terminal, cap.direction = True, 1.0

    sol = solve_ivp(
        rhs,
        (math.log(abs(w_sw)), math.log(cfg.eps_unit)),
        [s_sw, math.log(abs(v_sw))],
        method="DOP853",
        rtol=max(cfg.rel_tol, 1e-10),
        atol=1e-13,
        dense_output=True,
        events=[cap],
    )
    w_lo = math.exp(sol.t[-1])
    decades = math.log10(abs(w_sw) / w_lo)
    # dense geometric emission: the quintic midpoint residual in the
    # root-singular zone scales like (1 - q^k)^4 for ratio q, so keep q near 1
    n_out = max(int(math.ceil(160 * decades)) + 1, 8)
    w_targets = np.geomspace(abs(w_sw), w_lo, n_out)[1:]
    r_out = 1.0 + sg * w_targets
    w_snap = r_out - 1.0  # exact near 1
    tau_out = np.log(np.abs(w_snap))
    ys = sol.sol(tau_out)
    return r_out, ys[0], vsgn * np.exp(ys[1])


def integrate(params: PowerParams, r0: float, config: SolverConfig | None = None) -> Trajectory:
    """Solve the extremal ODE from r(0) = r0, r'(0) = 0 over s in [0, span].

    Adaptive Dormand-Prince (8th order, embedded error control, dense output);
    events stop strictly before the barriers r = 0 and r = 1 or at |r'| =
    v_max.  The s < 0 half of the solution is the exact mirror image and is
    not stored.  For alpha < 0 the terminal approach to the unit circle is
    resolved by the r-parametrized end-game.
    """
    cfg = config or SolverConfig()
    if not (r0 > 0.0) or r0 == 1.0:
        raise ValueError(f"r0 must satisfy r0 > 0 and r0 != 1, got {r0!r}")
    if abs(r0 - 1.0) <= 2.0 * cfg.eps_unit:
        raise ValueError("r0 lies inside the unit-barrier stop band")
    a = params.alpha

    switch_delta = None
    if a < 0.0:
        # the approach to r = 1 has |r'| ~ |r-1|^alpha -> inf; switch to the
        # end-game while |r'| is still below the blow-up guard, i.e. outside
        # the momentum-determined radius where |r'| reaches v_max; the speed
        # at half the starting gap is only ~2^|alpha|, so that caps the band
        j0 = r0 * abs(r0 - 1.0) ** a
        w_guard = 2.0 * (j0 * cfg.v_max) ** (1.0 / a)
        delta = min(max(cfg.endgame_delta, w_guard), abs(r0 - 1.0) / 2.0)
        if delta > 2.0 * cfg.eps_unit:
            switch_delta = delta

    events = _phase_events(cfg, switch_delta)
    names = list(events)
    sol = solve_ivp(
        lambda s, y: (y[1], _ddr(a, y[0], y[1])),
        (0.0, cfg.span),
        [r0, 0.0],
        method=cfg.method,
        rtol=cfg.rel_tol,
        atol=cfg.abs_tol,
        max_step=cfg.max_step,
        dense_output=True,
        events=list(events.values()),
    )

    fired = None
    if sol.status == 1:
        for k, name in enumerate(names):
            times = sol.t_events[k]
            if times.size and math.isclose(times[-1], sol.t[-1], rel_tol=0.0, abs_tol=1e-12):
                fired = name
                break
    reason = {
        None: StopReason.COMPLETED,
        "unit": StopReason.SINGULAR_UNIT,
        "origin": StopReason.NEAR_ORIGIN,
        "blow": StopReason.BLOWUP,
        "switch": StopReason.SINGULAR_UNIT,
    }[fired]
    if sol.status == -1:
        log.warning("integrator stalled for alpha=%g r0=%g: %s", a, r0, sol.message)
        reason = StopReason.STEP_UNDERFLOW

    s_arr, y_arr = _dense_grid(sol, cfg.ds_max, cfg.max_samples)
    r_arr, v_arr = y_arr[0], y_arr[1]

    tail = None
    if fired == "switch":
        r_eg, s_eg, v_eg = _endgame(a, sol.t[-1], sol.y[0, -1], sol.y[1, -1], cfg)
        tail = EndgameTail(s=s_eg, r=r_eg, dr=v_eg)
        # merge only while the angle gaps stay far above double resolution:
        # end-game angles are independently rounded values of s(tau), so gaps
        # near eps*s carry relative jitter that would corrupt interpolation
        floor = 4e-7 * max(1.0, s_arr[-1])
        keep = 0
        last = s_arr[-1]
        while keep < s_eg.size and s_eg[keep] >= last + floor:
            last = s_eg[keep]
            keep += 1
        if keep:
            s_arr = np.concatenate((s_arr, s_eg[:keep]))
            r_arr = np.concatenate((r_arr, r_eg[:keep]))
            v_arr = np.concatenate((v_arr, v_eg[:keep]))

    # exact initial condition, guard against event-time duplicates
    s_arr[0], r_arr[0], v_arr[0] = 0.0, r0, 0.0
    good = np.concatenate(([True], np.diff(s_arr) > 0.0))
    log.debug(
        "integrate alpha=%g r0=%g: %d samples, stop=%s, s_max=%g",
        a, r0, int(good.sum()), reason.value, s_arr[good][-1],
    )
    return Trajectory(
        params=params,
        r0=r0,
        s=s_arr[good],
        r=r_arr[good],
        dr=v_arr[good],
        stop_reason=reason,
        config=cfg,
        tail=tail,
    )


def interpolant(traj: Trajectory) -> QuinticHermite:
    """Quintic Hermite interpolant of r(s) with nodal r'' from the ODE; cached."""
    cached = traj._interp_cache
    if cached is None:
        cached = QuinticHermite(traj.s, traj.r, traj.dr, _ddr(traj.params.alpha, traj.r, traj.dr))
        object.__setattr__(traj, "_interp_cache", cached)
    return cached


def evaluate(traj: Trajectory, s):
    """(r, dr, ddr) between samples at |s| (the mirror covers s < 0)."""
    itp = interpolant(traj)
    return itp(np.abs(s))


def midpoint_el_residuals(traj: Trajectory) -> np.ndarray:
    """Normalized extremal-equation residual at every interval midpoint.

    The jet at the midpoint comes from the interpolant alone; the residual is
    scaled by the largest of the equation's three terms, so it measures how
    far the dense representation drifts from the flow between accepted
    samples.
    """
    mids = 0.5 * (traj.s[:-1] + traj.s[1:])
    mids = mids[np.diff(traj.s) > 1e-13]
    r, dr, ddr = evaluate(traj, mids)
    a = traj.params.alpha
    t1 = r * (r - 1.0) * ddr
    t2 = ((a + 2.0) * r - 2.0) * dr * dr
    t3 = ((a + 1.0) * r - 1.0) * r * r
    scale = np.maximum(np.maximum(np.abs(t1), np.abs(t2)), np.abs(t3))
    return (t1 - t2 - t3) / np.maximum(scale, 1e-300)


def v_zero_crossings(traj: Trajectory, degenerate_tol: float = 1e-11) -> np.ndarray:
    """Interior angles where r' changes sign, root-refined on the interpolant.

    Returns an empty array for degenerate (constant) trajectories where r'
    never leaves the noise floor; s = 0 itself is not reported.
    """
    dr = traj.dr
    if np.max(np.abs(dr)) <= degenerate_tol * max(1.0, traj.r0):
        return np.array([])
    itp = interpolant(traj)
    found = []
    for i in np.nonzero(dr[:-1] * dr[1:] < 0.0)[0]:
        root = brentq(
            lambda x: itp(x)[1],
            traj.s[i],
            traj.s[i + 1],
            xtol=traj.config.abs_tol,
        )
        found.append(root)
    for i in np.nonzero(dr[1:-1] == 0.0)[0]:
        if dr[i] * dr[i + 2] < 0.0:
            found.append(traj.s[i + 1])
    return np.array(sorted(found))


def reflection_defect(params: PowerParams, r0: float, config: SolverConfig | None = None) -> float:
    """Two-sided symmetry check: integrate s < 0 independently and return
    max |r(-s) - r(s)| / max(|r(s)|, r0) over the common domain.

    The production path never does this (the mirror is exact); this is the
    nontrivial validation of the even symmetry forced by r'(0) = 0.
    """
    cfg = config or SolverConfig()
    fwd = integrate(params, r0, cfg)
    events = _phase_events(cfg, None)
    back = solve_ivp(
        lambda s, y: (y[1], _ddr(params.alpha, y[0], y[1])),
        (0.0, -fwd.s[-1]),
        [r0, 0.0],
        method=cfg.method,
        rtol=cfg.rel_tol,
        atol=cfg.abs_tol,
        max_step=cfg.max_step,
        dense_output=True,
        events=list(events.values()),
    )
    s_common = fwd.s[fwd.s <= -back.t[-1]]
    r_back = back.sol(-s_common)[0]
    r_fwd = fwd.r[: s_common.size]
    return float(np.max(np.abs(r_back - r_fwd) / np.maximum(np.abs(r_fwd), r0)))
