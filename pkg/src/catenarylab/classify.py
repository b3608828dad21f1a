"""Regime classification of extremal curves with measured corroboration.

The qualitative picture by exponent and starting radius:

    alpha > 0:            r0 = 1/(1+alpha) -> constant circle;
                          r0 < 1 -> periodic inner oscillation;
                          r0 > 1 -> convex blow-up between two asymptotic rays.
    alpha in (-1, 0):     r0 < 1 or 1 < r0 < 1/(1+alpha) -> orthogonal hit of
                          the unit circle (convex resp. concave);
                          r0 > 1/(1+alpha) -> convex unbounded growth.
    alpha <= -1:          orthogonal hit, convex inside / concave outside.

A regime is reported only when the measurements beat their tolerance with a
10x margin; otherwise the report is Unresolved with diagnostics in `notes`.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import quad, solve_ivp

from .conservation import momentum_drift
from .dynamics import (
    _ddr,
    evaluate,
    integrate,
    interpolant,
    v_zero_crossings,
)
from .model import PowerParams, cos_phi, to_cartesian
from .trajectory import SolverConfig, StopReason, Trajectory

__all__ = [
    "Regime",
    "ClassifyConfig",
    "ClassificationReport",
    "expected_regime",
    "classify",
    "period",
    "half_period_swap_defect",
    "orthogonality_defect",
    "inversion_defect",
    "asymptote_angle",
    "inner_limit_gap",
]

log = logging.getLogger(__name__)


class Regime(enum.Enum):
    CONSTANT_CIRCLE = "ConstantCircle"
    PERIODIC_INNER = "PeriodicInner"
    OUTER_ASYMPTOTIC = "OuterAsymptotic"
    ORTHOGONAL_HIT_CONVEX = "OrthogonalHitConvex"
    ORTHOGONAL_HIT_CONCAVE = "OrthogonalHitConcave"
    OUTER_UNBOUNDED_CONVEX = "OuterUnboundedConvex"
    UNRESOLVED = "Unresolved"


@dataclass(frozen=True)
class ClassifyConfig:
    solver: SolverConfig = SolverConfig()
    span_cap: float = 128.0 * math.pi
    periodic_tol: float = 1e-6   # sup |r(s+T) - r(s)| for a confirmed period
    orth_tol: float = 1e-3       # extrapolated |cos phi| for a confirmed hit
    margin: float = 10.0         # metrics must beat tolerance by this factor
    eq_rtol: float = 1e-12       # |r0 - 1/(1+alpha)| for the constant regime


@dataclass(frozen=True)
class ClassificationReport:
    alpha: float
    r0: float
    regime: Regime
    angular_extent: float
    conservation_drift: float
    stop_reason: StopReason
    solver: SolverConfig
    period: float | None = None
    extrema: tuple[float, float] | None = None
    blowup_angle: float | None = None
    orthogonality_defect: float | None = None
    notes: str = ""


def expected_regime(params: PowerParams, r0: float) -> Regime:
    """Regime predicted by the decision table alone (no integration)."""
    a = params.alpha
    eq = params.equilibrium_radius
    if eq is not None and r0 == eq:
        return Regime.CONSTANT_CIRCLE
    if a > 0.0:
        return Regime.PERIODIC_INNER if r0 < 1.0 else Regime.OUTER_ASYMPTOTIC
    if a > -1.0:
        if r0 < 1.0:
            return Regime.ORTHOGONAL_HIT_CONVEX
        if r0 < eq:
            return Regime.ORTHOGONAL_HIT_CONCAVE
        if r0 > eq:
            return Regime.OUTER_UNBOUNDED_CONVEX
        return Regime.CONSTANT_CIRCLE
    return Regime.ORTHOGONAL_HIT_CONVEX if r0 < 1.0 else Regime.ORTHOGONAL_HIT_CONCAVE


def _crossing_radii(traj: Trajectory, crossings: np.ndarray) -> np.ndarray:
    return np.array([evaluate(traj, c)[0] for c in crossings])


def _period_and_defect(traj: Trajectory, n_check: int = 2001):
    """Mean spacing of alternating r'-zeros and the sup closure defect."""
    crossings = v_zero_crossings(traj)
    if crossings.size < 4:
        raise ValueError(
            f"period detection needs >= 4 interior r'-zeros, found {crossings.size}"
        )
    critical = np.concatenate(([0.0], crossings))
    t_est = critical[2:] - critical[:-2]
    t = float(np.mean(t_est))
    itp = interpolant(traj)
    s_hi = traj.s[-1] - t
    grid = np.linspace(0.0, min(s_hi, 2.0 * t), n_check)
    defect = float(np.max(np.abs(itp(grid + t)[0] - itp(grid)[0])))
    return t, defect, crossings


def period(traj: Trajectory, tol: float = 1e-6) -> float:
    """Period of r(s), validated by |r(s+T) - r(s)| <= tol on the overlap."""
    t, defect, _ = _period_and_defect(traj)
    if defect > tol:
        raise ValueError(f"period candidate fails closure: defect {defect:.3e} > {tol:g}")
    return t


def orthogonality_defect(traj: Trajectory) -> float:
    """Extrapolated |cos phi| at the unit-circle endpoint of a SingularUnit stop.

    Uses the final three samples (geometrically spaced in |r-1| when the
    end-game ran) and Aitken extrapolation of the power-law decay toward
    r = 1; the result bounds the deviation from a right-angle intersection.
    """
    if traj.stop_reason is not StopReason.SINGULAR_UNIT:
        raise ValueError(f"orthogonality needs a SingularUnit stop, got {traj.stop_reason.value}")
    if traj.tail is not None and traj.tail.r.size >= 3:
        r, dr = traj.tail.r[-3:], traj.tail.dr[-3:]
    else:
        r, dr = traj.r[-3:], traj.dr[-3:]
    x = np.abs(cos_phi(r, dr))
    d2 = x[2] - 2.0 * x[1] + x[0]
    if abs(d2) < 1e-30:
        return float(x[2])
    return float(abs(x[2] - (x[2] - x[1]) ** 2 / d2))


def asymptote_angle(traj: Trajectory) -> float:
    """Blow-up angle s1 of an outer solution, refined past the stop event.

    Continues the integration with ln r as the independent variable from the
    blow-up event out to r = 1e7, then adds the remaining arc estimated from
    the conserved momentum (the remainder is O(r^-(1+alpha)), far below the
    cross-validation tolerance).
    """
    if traj.stop_reason is not StopReason.BLOWUP:
        raise ValueError(f"asymptote angle needs a Blowup stop, got {traj.stop_reason.value}")
    a = traj.params.alpha
    s_e, r_e, v_e = traj.s[-1], traj.r[-1], traj.dr[-1]
    if v_e <= 0.0:
        raise ValueError("outer blow-up requires r' > 0 at the stop event")

    def rhs(rho, y):
        r = math.exp(rho)
        rv2 = math.exp(2.0 * (rho - y[1]))
        dlnv = (((a + 2.0) * r - 2.0) + ((a + 1.0) * r - 1.0) * rv2) / (r - 1.0)
        return (math.exp(rho - y[1]), dlnv)

    r_big = max(1e7, 10.0 * r_e)
    sol = solve_ivp(
        rhs,
        (math.log(r_e), math.log(r_big)),
        [s_e, math.log(v_e)],
        method="DOP853",
        rtol=1e-12,
        atol=1e-14,
    )
    s_big = float(sol.y[0, -1])
    j0 = traj.r0 * abs(traj.r0 - 1.0) ** a

    def inv_speed_folded(x):
        # remaining arc int_{r_big}^{inf} dr/|r'| folded through x = 1/r
        if x <= 0.0:
            return 0.0
        r = 1.0 / x
        v2 = r * r * (r * r * abs(r - 1.0) ** (2.0 * a) / (j0 * j0) - 1.0)
        return 1.0 / (x * x * math.sqrt(v2))

    tail = quad(inv_speed_folded, 0.0, 1.0 / r_big, epsabs=1e-14, epsrel=1e-12)[0]
    return s_big + tail


def _integrate_enough(params: PowerParams, r0: float, cfg: ClassifyConfig, want_periodic: bool):
    """Integrate, doubling the span until the regime's evidence can exist."""
    solver = cfg.solver
    span = solver.span
    while True:
        traj = integrate(params, r0, replace(solver, span=span))
        if traj.stop_reason is not StopReason.COMPLETED:
            return traj
        if want_periodic and v_zero_crossings(traj).size >= 4:
            return traj
        if span >= cfg.span_cap:
            return traj
        span = min(2.0 * span, cfg.span_cap)
        log.debug("extending span to %g for alpha=%g r0=%g", span, params.alpha, r0)


def _convexity_sign(traj: Trajectory) -> int:
    """+1 if r'' > 0 at every sample, -1 if < 0 everywhere, else 0."""
    dd = _ddr(traj.params.alpha, traj.r, traj.dr)
    if np.all(dd > 0.0):
        return 1
    if np.all(dd < 0.0):
        return -1
    return 0


def classify(params: PowerParams, r0: float, config: ClassifyConfig | None = None) -> ClassificationReport:
    """Integrate, measure, and assign a regime; Unresolved when evidence is weak."""
    cfg = config or ClassifyConfig()
    expected = expected_regime(params, r0)
    eq = params.equilibrium_radius

    def report(traj, regime, notes="", **extra):
        return ClassificationReport(
            alpha=params.alpha,
            r0=r0,
            regime=regime,
            angular_extent=traj.angular_extent,
            conservation_drift=momentum_drift(traj),
            stop_reason=traj.stop_reason,
            solver=traj.config,
            notes=notes,
            **extra,
        )

    if eq is not None and abs(r0 - eq) <= cfg.eq_rtol * eq:
        traj = integrate(params, r0, replace(cfg.solver, span=2.0 * math.pi))
        wobble = float(np.max(np.abs(traj.r - r0)))
        if wobble <= 1e-9:
            return report(traj, Regime.CONSTANT_CIRCLE,
                          notes=f"constant radius holds to {wobble:.1e}")
        return report(traj, Regime.UNRESOLVED,
                      notes=f"expected constant solution but radius wobbles by {wobble:.1e}")

    try:
        traj = _integrate_enough(params, r0, cfg, expected is Regime.PERIODIC_INNER)
    except ValueError as exc:
        raise
    except Exception as exc:  # integrator failure -> diagnostics, not a crash
        log.warning("integration failed for alpha=%g r0=%g: %s", params.alpha, r0, exc)
        return ClassificationReport(
            alpha=params.alpha, r0=r0, regime=Regime.UNRESOLVED,
            angular_extent=0.0, conservation_drift=float("nan"),
            stop_reason=StopReason.STEP_UNDERFLOW, solver=cfg.solver,
            notes=f"integration failed: {exc}",
        )

    problems: list[str] = []
    if expected is Regime.PERIODIC_INNER:
        if traj.stop_reason is not StopReason.COMPLETED:
            problems.append(f"unexpected stop {traj.stop_reason.value}")
        else:
            try:
                t, defect, crossings = _period_and_defect(traj)
            except ValueError as exc:
                problems.append(str(exc))
            else:
                if defect > cfg.periodic_tol / cfg.margin:
                    problems.append(f"closure defect {defect:.3e} too weak")
                radii = _crossing_radii(traj, crossings)
                lo = min(r0, float(radii.min()))
                hi = max(r0, float(radii.max()))
                if not (lo < eq < hi):
                    problems.append(f"extrema ({lo:.6g}, {hi:.6g}) do not bracket {eq:.6g}")
                if not problems:
                    return report(
                        traj, Regime.PERIODIC_INNER, period=t, extrema=(lo, hi),
                        notes=f"closure defect {defect:.1e} over one period",
                    )
    elif expected is Regime.OUTER_ASYMPTOTIC:
        if traj.stop_reason is not StopReason.BLOWUP:
            problems.append(f"expected blow-up, got {traj.stop_reason.value}")
        elif _convexity_sign(traj) != 1:
            problems.append("radius is not convex along the run")
        else:
            s1 = asymptote_angle(traj)
            return report(
                traj, Regime.OUTER_ASYMPTOTIC, blowup_angle=s1,
                notes=f"asymptotic rays at +-{s1:.6f}",
            )
    elif expected in (Regime.ORTHOGONAL_HIT_CONVEX, Regime.ORTHOGONAL_HIT_CONCAVE):
        want = 1 if expected is Regime.ORTHOGONAL_HIT_CONVEX else -1
        if traj.stop_reason is not StopReason.SINGULAR_UNIT:
            problems.append(f"expected a unit-circle hit, got {traj.stop_reason.value}")
        else:
            defect = orthogonality_defect(traj)
            sign = _convexity_sign(traj)
            if defect > cfg.orth_tol / cfg.margin:
                problems.append(f"orthogonality defect {defect:.3e} too weak")
            if sign != want:
                problems.append(f"convexity sign {sign} does not match theorem ({want})")
            if not problems:
                return report(
                    traj, expected, orthogonality_defect=defect,
                    notes=f"meets the circle at |cos phi| <= {defect:.1e}",
                )
    elif expected is Regime.OUTER_UNBOUNDED_CONVEX:
        if traj.stop_reason is not StopReason.BLOWUP:
            problems.append(f"expected unbounded growth, got {traj.stop_reason.value}")
        elif _convexity_sign(traj) != 1:
            problems.append("radius is not convex along the run")
        else:
            return report(
                traj, Regime.OUTER_UNBOUNDED_CONVEX,
                notes=f"r and r' grow without bound; r reached {traj.r[-1]:.4g}",
            )

    return report(traj, Regime.UNRESOLVED,
                  notes="; ".join(problems) or "no corroborating evidence")


def half_period_swap_defect(r0: float, solver: SolverConfig | None = None) -> float:
    """Shift-by-half-period duality of inner solutions at alpha = 1.

    The solution started at r0 < 1, advanced to its next critical angle,
    coincides with the solution started at 1 - r0: the returned value is the
    sup over one period of the mismatch.  The shift is the spacing of
    consecutive critical points (half the full period; the full-period shift
    is a tautology).
    """
    if not (0.0 < r0 < 1.0):
        raise ValueError("inner duality requires 0 < r0 < 1")
    params = PowerParams(1.0)
    if r0 == 0.5:
        return 0.0
    cfg = solver or SolverConfig(span=8.0 * math.pi)
    a = integrate(params, r0, cfg)
    b = integrate(params, 1.0 - r0, cfg)
    cross = v_zero_crossings(a)
    if cross.size < 2:
        raise ValueError("trajectory too short to locate the half-period shift")
    delta = float(cross[0])
    r_at_delta = float(evaluate(a, delta)[0])
    if abs(r_at_delta - (1.0 - r0)) > 1e-3:
        raise ValueError(
            f"critical radius {r_at_delta:.6g} is not the dual value {1.0 - r0:.6g}"
        )
    t_full = 2.0 * delta
    s_hi = min(a.s[-1] - delta, b.s[-1], t_full)
    grid = np.linspace(0.0, s_hi, 2001)
    ra = interpolant(a)(grid + delta)[0]
    rb = interpolant(b)(grid)[0]
    return float(np.max(np.abs(ra - rb)))


def inversion_defect(r0: float, solver: SolverConfig | None = None) -> float:
    """Unit-circle inversion duality at alpha = -2: sup |r(s; r0) * r(s; 1/r0) - 1|.

    The sup runs up to the angle where either curve enters the band
    |r-1| < 3e-2: inside it |r'| exceeds ~1e3, so comparing radii at fixed
    angle amplifies the integrators' O(1e-12) angle error past the defect
    being measured, while both radii converge to 1 and to each other's
    inverses.  No duality evidence is lost by the cut.
    """
    if not (r0 > 0.0) or r0 == 1.0:
        raise ValueError("inversion pairing requires r0 > 0, r0 != 1")
    params = PowerParams(-2.0)
    cfg = solver or SolverConfig()
    a = integrate(params, r0, cfg)
    b = integrate(params, 1.0 / r0, cfg)

    def band_edge(t: Trajectory) -> float:
        outside = np.abs(t.r - 1.0) >= 3e-2
        return float(t.s[outside][-1]) if outside.any() else float(t.s[-1])

    s_hi = min(band_edge(a), band_edge(b))
    grid = np.linspace(0.0, s_hi, 2001)
    prod = interpolant(a)(grid)[0] * interpolant(b)(grid)[0]
    return float(np.max(np.abs(prod - 1.0)))


def inner_limit_gap(r0: float, solver: SolverConfig | None = None) -> float:
    """Deviation of the one-period inner curve from the segment {0} x [-1, 1].

    Directed gap: the largest distance from a curve point to the segment.  As
    r0 -> 0 the curve collapses onto a double covering of the segment, so the
    gap must shrink with r0 (a trend check, no absolute tolerance).
    """
    params = PowerParams(1.0)
    cfg = solver or SolverConfig()
    traj = integrate(params, r0, cfg)
    t = period(traj, tol=1e-5)
    m = traj.s <= t
    xy = to_cartesian(np.column_stack((traj.s[m], traj.r[m])))
    x, y = xy[:, 0], xy[:, 1]
    d = np.where(np.abs(y) <= 1.0, np.abs(x), np.hypot(x, np.abs(y) - 1.0))
    return float(np.max(d))
