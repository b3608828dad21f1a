"""The acceptance suite: every quantitative gate, runnable from CLI or tests.

Each check returns a CheckResult with the measured worst-case values in its
detail string; `run_suite` executes any subset by name.  Trajectories are
cached per (alpha, r0, solver) so the full suite reuses work.
"""

from __future__ import annotations

import json
import math
import tempfile
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path

import numpy as np

from .classify import (
    ClassifyConfig,
    Regime,
    classify,
    half_period_swap_defect,
    inner_limit_gap,
    inversion_defect,
    orthogonality_defect,
    period,
)
from .conservation import (
    build_first_integral,
    domain_bound_quadrature,
    g_polynomial,
    momentum_drift,
    trajectory_first_integral_residual,
)
from .dynamics import _ddr, equilibrium, integrate, midpoint_el_residuals
from .model import PowerParams
from .trajectory import SolverConfig, StopReason, Trajectory

__all__ = ["CheckResult", "SUITES", "run_suite"]

# (alpha, r0) pairs spanning every regime: periodic inner, outer asymptotic,
# orthogonal hits of both convexities, and unbounded outer growth
REGIME_PAIRS: tuple[tuple[float, float], ...] = (
    (1.0, 0.2), (1.0, 0.25), (1.0, 0.4), (1.0, 0.75),
    (1.0, 1.5), (1.0, 2.0), (1.0, 4.0),
    (3.0, 0.2), (3.0, 0.4), (3.0, 1.5), (3.0, 2.0),
    (0.5, 0.3), (0.5, 2.0),
    (-0.5, 0.75), (-0.5, 1.5), (-0.5, 2.5),
    (-1.0, 0.5), (-1.0, 2.0),
    (-3.0, 0.25), (-3.0, 2.0),
)

_PUBLISHED_TAILS = {
    -1: [Fraction(0)],
    -2: [Fraction(0), Fraction(4), Fraction(-1)],
    -3: [Fraction(0), Fraction(20), Fraction(-15), Fraction(6), Fraction(-1)],
}


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


_TRAJ_CACHE: dict[tuple, Trajectory] = {}


def _traj(alpha: float, r0: float, **overrides) -> Trajectory:
    key = (alpha, r0, tuple(sorted(overrides.items())))
    if key not in _TRAJ_CACHE:
        cfg = replace(SolverConfig(), **overrides) if overrides else SolverConfig()
        _TRAJ_CACHE[key] = integrate(PowerParams(alpha), r0, cfg)
    return _TRAJ_CACHE[key]


def check_el_residual() -> CheckResult:
    """1. Interpolated-midpoint residual <= 1e-6 x local scale, all regimes."""
    worst, worst_pair = 0.0, None
    for alpha, r0 in REGIME_PAIRS:
        res = float(np.max(np.abs(midpoint_el_residuals(_traj(alpha, r0)))))
        if res > worst:
            worst, worst_pair = res, (alpha, r0)
    return CheckResult(
        "el-residual",
        worst <= 1e-6,
        f"20 regime pairs, worst |residual|/scale {worst:.2e} at {worst_pair} (tol 1e-6)",
    )


def check_conservation() -> CheckResult:
    """2. Momentum drift <= 1e-8 (non-singular stops); first-integral residual
    <= 1e-8 for alpha in {1, 2, 3, -1, -2, -3}."""
    worst_drift, worst_fi = 0.0, 0.0
    for alpha, r0 in REGIME_PAIRS:
        traj = _traj(alpha, r0)
        if traj.stop_reason is not StopReason.SINGULAR_UNIT:
            worst_drift = max(worst_drift, momentum_drift(traj))
    fi_pairs = [(a, r0) for a in (1, 2, 3) for r0 in (0.3, 2.0)]
    fi_pairs += [(a, r0) for a in (-1, -2, -3) for r0 in (0.5, 2.0)]
    for alpha, r0 in fi_pairs:
        worst_fi = max(worst_fi, trajectory_first_integral_residual(_traj(float(alpha), r0)))
    ok = worst_drift <= 1e-8 and worst_fi <= 1e-8
    return CheckResult(
        "conservation",
        ok,
        f"momentum drift {worst_drift:.2e} (tol 1e-8), "
        f"first-integral residual {worst_fi:.2e} (tol 1e-8)",
    )


def check_g_polynomial() -> CheckResult:
    """3. Published tail polynomials reproduced exactly; g' identity exact in
    rational arithmetic down to alpha = -6."""
    for alpha, want in _PUBLISHED_TAILS.items():
        got = g_polynomial(alpha)
        if got != want:
            return CheckResult("g-polynomial", False, f"alpha={alpha}: {got} != {want}")
    rng = np.random.default_rng(20240817)
    worst = Fraction(0)
    for alpha in range(-1, -7, -1):
        form = build_first_integral(alpha)
        for _ in range(20):
            num = int(rng.integers(1, 60))
            den = int(rng.integers(1, 60))
            r = Fraction(num, den)
            if r in (0, 1):
                continue
            lhs = (
                Fraction(2) / r ** 3
                + Fraction(2 * alpha) / r ** 2
                + sum(d * p * r ** (d - 1) for d, p in enumerate(form.tail_poly) if d)
            )
            rhs = Fraction(2) * ((alpha + 1) * r - 1) * (r - 1) ** (-2 * alpha - 1) / r ** 3
            worst = max(worst, abs(lhs - rhs))
    return CheckResult(
        "g-polynomial",
        worst <= Fraction(1, 10 ** 12),
        f"published tails exact; rational g' identity defect {float(worst):.1e} (tol 1e-12)",
    )


def check_periodic_suite() -> CheckResult:
    """4. alpha = 1, r0 in {0.2, 0.25, 0.4}: periodic, extrema {r0, 1-r0},
    half-period swap defect <= 1e-6, minimum < 1/2 < maximum."""
    issues, worst_ext, worst_swap = [], 0.0, 0.0
    for r0 in (0.2, 0.25, 0.4):
        rep = classify(PowerParams(1.0), r0)
        if rep.regime is not Regime.PERIODIC_INNER:
            issues.append(f"r0={r0}: regime {rep.regime.value}")
            continue
        lo, hi = rep.extrema
        ext = max(abs(lo - r0), abs(hi - (1.0 - r0)))
        worst_ext = max(worst_ext, ext)
        if not (lo < 0.5 < hi):
            issues.append(f"r0={r0}: extrema do not bracket 1/2")
        worst_swap = max(worst_swap, half_period_swap_defect(r0))
    ok = not issues and worst_ext <= 1e-6 and worst_swap <= 1e-6
    detail = (
        f"extrema defect {worst_ext:.2e}, swap defect {worst_swap:.2e} (tol 1e-6)"
        + ("; " + "; ".join(issues) if issues else "")
    )
    return CheckResult("periodic-suite", ok, detail)


def check_blowup_suite() -> CheckResult:
    """5. alpha in {1,2,3} x r0 in {1.5,2,3,4}: blow-up with s1 < pi/2,
    quadrature agreement <= 1e-4, r'' > 0 at every sample."""
    issues, worst_gap, largest_s1 = [], 0.0, 0.0
    for alpha in (1, 2, 3):
        for r0 in (1.5, 2.0, 3.0, 4.0):
            rep = classify(PowerParams(float(alpha)), r0)
            if rep.regime is not Regime.OUTER_ASYMPTOTIC:
                issues.append(f"({alpha},{r0}): regime {rep.regime.value}")
                continue
            s1 = rep.blowup_angle
            largest_s1 = max(largest_s1, s1)
            if not s1 < math.pi / 2.0:
                issues.append(f"({alpha},{r0}): s1 = {s1} >= pi/2")
            gap = abs(s1 - domain_bound_quadrature(alpha, r0))
            worst_gap = max(worst_gap, gap)
            traj = _traj(float(alpha), r0)
            if not np.all(_ddr(float(alpha), traj.r, traj.dr) > 0.0):
                issues.append(f"({alpha},{r0}): r'' not positive everywhere")
    ok = not issues and worst_gap <= 1e-4
    detail = (
        f"12 outer runs, max s1 {largest_s1:.6f} < pi/2, "
        f"quadrature gap {worst_gap:.2e} (tol 1e-4)"
        + ("; " + "; ".join(issues) if issues else "")
    )
    return CheckResult("blowup-suite", ok, detail)


def check_orthogonal_suite() -> CheckResult:
    """6. Hits of the unit circle stop at SingularUnit with orthogonality
    defect <= 1e-3 and the theorem's convex/concave sign."""
    cases = [(-0.5, 0.75, 1), (-0.5, 1.5, -1), (-3.0, 0.25, 1), (-3.0, 2.0, -1)]
    issues, worst = [], 0.0
    for alpha, r0, sign in cases:
        traj = _traj(alpha, r0)
        if traj.stop_reason is not StopReason.SINGULAR_UNIT:
            issues.append(f"({alpha},{r0}): stop {traj.stop_reason.value}")
            continue
        defect = orthogonality_defect(traj)
        worst = max(worst, defect)
        dd = _ddr(alpha, traj.r, traj.dr)
        if sign == 1 and not np.all(dd > 0.0):
            issues.append(f"({alpha},{r0}): expected convex")
        if sign == -1 and not np.all(dd < 0.0):
            issues.append(f"({alpha},{r0}): expected concave")
    ok = not issues and worst <= 1e-3
    detail = f"orthogonality defect {worst:.2e} (tol 1e-3)" + (
        "; " + "; ".join(issues) if issues else ""
    )
    return CheckResult("orthogonal-suite", ok, detail)


def check_inversion() -> CheckResult:
    """7. alpha = -2 inversion duality: defect <= 1e-6 for r0 in {2, 3, 5}."""
    worst = max(inversion_defect(r0) for r0 in (2.0, 3.0, 5.0))
    return CheckResult("inversion", worst <= 1e-6, f"pair defect {worst:.2e} (tol 1e-6)")


def check_equilibrium() -> CheckResult:
    """8. Center for alpha in {0.5, 1, 3}, saddle for {-0.25, -0.5, -0.75},
    absent for {-1, -2}; alpha = 1 jacobian exactly [[0,1],[-2,0]]."""
    issues = []
    for alpha in (0.5, 1.0, 3.0):
        info = equilibrium(PowerParams(alpha))
        if info is None or info.kind.value != "Center":
            issues.append(f"alpha={alpha}: expected a center")
    for alpha in (-0.25, -0.5, -0.75):
        info = equilibrium(PowerParams(alpha))
        if info is None or info.kind.value != "Saddle":
            issues.append(f"alpha={alpha}: expected a saddle")
    for alpha in (-1.0, -2.0):
        if equilibrium(PowerParams(alpha)) is not None:
            issues.append(f"alpha={alpha}: expected no equilibrium")
    jac = equilibrium(PowerParams(1.0)).jacobian
    if not np.array_equal(jac, np.array([[0.0, 1.0], [-2.0, 0.0]])):
        issues.append(f"alpha=1 jacobian {jac.tolist()}")
    return CheckResult(
        "equilibrium",
        not issues,
        "center/saddle dichotomy and exact alpha=1 jacobian" + (
            "; " + "; ".join(issues) if issues else ""
        ),
    )


def check_stationarity() -> CheckResult:
    """9. Solution defect <= 1e-6; non-solution control >= 1e-2; observed
    order in the step >= 1.9 before the quadrature floor."""
    from .variation import stationarity_defect, stationarity_defects_vs_step

    params = PowerParams(1.0)
    base = _traj(1.0, 0.25)
    t = period(base)
    one_period = _traj(1.0, 0.25, span=t)
    d_sol = stationarity_defect(params, one_period)

    s = np.linspace(0.0, 2.0 * math.pi, 1001)
    control = Trajectory(
        params=params, r0=0.6,
        s=s, r=np.full_like(s, 0.6), dr=np.zeros_like(s),
        stop_reason=StopReason.COMPLETED, config=SolverConfig(),
    )
    d_ctl = stationarity_defect(params, control)

    d1, d2, _ = stationarity_defects_vs_step(params, one_period)
    order = math.log10(d1 / d2)
    ok = d_sol <= 1e-6 and d_ctl >= 1e-2 and order >= 1.9
    return CheckResult(
        "stationarity",
        ok,
        f"solution defect {d_sol:.2e} (tol 1e-6), control {d_ctl:.2e} (floor 1e-2), "
        f"order {order:.3f} (>= 1.9)",
    )


def check_limit_trend() -> CheckResult:
    """10. One-period curve approaches the segment {0} x [-1, 1] as r0 -> 0."""
    g2 = inner_limit_gap(1e-2)
    g3 = inner_limit_gap(1e-3)
    return CheckResult(
        "limit-trend",
        g3 < g2,
        f"segment gap {g2:.4f} (r0=1e-2) -> {g3:.4f} (r0=1e-3), strictly decreasing",
    )


def check_io_roundtrip() -> CheckResult:
    """11 (file part). CSV round-trip is bit-exact; JSON reports validate and
    reject unknown fields."""
    import jsonschema

    from .storage import (
        read_trajectory_csv,
        report_from_dict,
        report_to_dict,
        validate_report,
        write_trajectory_csv,
    )

    traj = _traj(1.0, 0.25)
    issues = []
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "traj.csv"
        write_trajectory_csv(traj, path)
        cols = read_trajectory_csv(path)
        for name, ref in (("s", traj.s), ("r", traj.r), ("dr", traj.dr)):
            if not np.array_equal(cols[name], ref):
                issues.append(f"CSV column {name} not bit-identical")
    rep = classify(PowerParams(1.0), 0.25)
    data = json.loads(json.dumps(report_to_dict(rep)))
    back = report_from_dict(data)
    if back.regime is not rep.regime or back.period != rep.period:
        issues.append("JSON report round-trip changed fields")
    data["surprise"] = 1
    try:
        validate_report(data)
        issues.append("unknown field was not rejected")
    except jsonschema.ValidationError:
        pass
    return CheckResult(
        "io-roundtrip",
        not issues,
        "CSV bit-exact, JSON schema round-trip, unknown fields rejected" + (
            "; " + "; ".join(issues) if issues else ""
        ),
    )


SUITES = {
    "el-residual": check_el_residual,
    "conservation": check_conservation,
    "g-polynomial": check_g_polynomial,
    "periodic-suite": check_periodic_suite,
    "blowup-suite": check_blowup_suite,
    "orthogonal-suite": check_orthogonal_suite,
    "inversion": check_inversion,
    "equilibrium": check_equilibrium,
    "stationarity": check_stationarity,
    "limit-trend": check_limit_trend,
    "io-roundtrip": check_io_roundtrip,
}


def run_suite(names: list[str] | None = None) -> list[CheckResult]:
    """Run the named checks (all by default) in registry order."""
    if names is None or names == ["all"]:
        names = list(SUITES)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise KeyError(f"unknown suite(s): {', '.join(unknown)}")
    return [SUITES[n]() for n in names]
