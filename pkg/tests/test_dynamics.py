import math

import numpy as np
import pytest

from catenarylab import (
    EquilibriumKind,
    PhasePoint,
    PowerParams,
    SolverConfig,
    StopReason,
    equilibrium,
    integrate,
    midpoint_el_residuals,
    second_derivative,
    v_zero_crossings,
    vector_field,
)
from catenarylab.dynamics import reflection_defect
from catenarylab.trajectory import Trajectory, mirrored_samples


def test_vector_field_equilibrium_points():
    assert vector_field(PowerParams(1.0), PhasePoint(0.5, 0.0)) == (0.0, 0.0)
    assert vector_field(PowerParams(3.0), PhasePoint(0.25, 0.0)) == (0.0, 0.0)


def test_vector_field_outer_value():
    du, dv = vector_field(PowerParams(1.0), (2.0, 0.0))
    assert du == 0.0
    assert dv == pytest.approx(6.0)


def test_vector_field_rejects_singular_input():
    with pytest.raises(ValueError):
        vector_field(PowerParams(1.0), (1.0, 0.0))


@pytest.mark.parametrize(
    "alpha,r,dr,expected",
    [
        (1.0, 2.0, 0.0, 6.0),
        (1.0, 0.5, 0.0, 0.0),
        (-0.5, 0.75, 0.0, 1.875),
    ],
)
def test_second_derivative_values(alpha, r, dr, expected):
    assert second_derivative(PowerParams(alpha), r, dr) == pytest.approx(expected)


def test_vector_field_shares_second_derivative():
    rng = np.random.default_rng(3)
    p = PowerParams(-1.5)
    for _ in range(50):
        u = rng.uniform(0.1, 3.0)
        if abs(u - 1.0) < 0.05:
            continue
        v = rng.uniform(-2.0, 2.0)
        du, dv = vector_field(p, (u, v))
        assert du == v
        assert dv == second_derivative(p, u, v)


def test_equilibrium_center_case():
    info = equilibrium(PowerParams(1.0))
    assert info.point.u == pytest.approx(0.5)
    np.testing.assert_array_equal(info.jacobian, [[0.0, 1.0], [-2.0, 0.0]])
    assert info.kind is EquilibriumKind.CENTER
    lam = sorted(info.eigenvalues, key=lambda z: z.imag)
    assert lam[1] == pytest.approx(1j * math.sqrt(2.0))
    assert all(z.real == 0.0 and z.imag != 0.0 for z in info.eigenvalues)


def test_equilibrium_saddle_case():
    info = equilibrium(PowerParams(-0.5))
    assert info.point.u == pytest.approx(2.0)
    np.testing.assert_array_equal(info.jacobian, [[0.0, 1.0], [1.0, 0.0]])
    assert info.kind is EquilibriumKind.SADDLE
    vals = sorted(z.real for z in info.eigenvalues)
    assert vals == pytest.approx([-1.0, 1.0])
    assert all(z.imag == 0.0 for z in info.eigenvalues)


def test_equilibrium_absent_at_and_below_minus_one():
    assert equilibrium(PowerParams(-1.0)) is None
    assert equilibrium(PowerParams(-2.5)) is None


def test_integrate_validates_r0():
    p = PowerParams(1.0)
    for bad in (0.0, -1.0, 1.0):
        with pytest.raises(ValueError):
            integrate(p, bad)


def test_integrate_periodic_completes():
    traj = integrate(PowerParams(1.0), 0.25)
    assert traj.stop_reason is StopReason.COMPLETED
    assert traj.s[0] == 0.0 and traj.r[0] == 0.25 and traj.dr[0] == 0.0
    assert np.all(np.diff(traj.s) > 0.0)


def test_integrate_outer_blows_up_before_quarter_turn():
    traj = integrate(PowerParams(1.0), 2.0)
    assert traj.stop_reason is StopReason.BLOWUP
    assert traj.s[-1] < math.pi / 2.0
    assert abs(traj.dr[-1]) >= traj.config.v_max * (1.0 - 1e-9)


def test_integrate_negative_alpha_hits_circle():
    traj = integrate(PowerParams(-0.5), 0.75)
    assert traj.stop_reason is StopReason.SINGULAR_UNIT
    assert traj.tail is not None
    assert abs(traj.tail.r[-1] - 1.0) == pytest.approx(1e-9, rel=1e-3)


def test_barrier_non_crossing():
    for alpha, r0 in [(1.0, 0.25), (1.0, 2.0), (-0.5, 0.75), (-3.0, 2.0)]:
        traj = integrate(PowerParams(alpha), r0)
        assert np.all(traj.r > 0.0)
        assert np.all(np.sign(traj.r - 1.0) == np.sign(r0 - 1.0))


def test_constant_solution_stays_constant():
    traj = integrate(PowerParams(1.0), 0.5, SolverConfig(span=2.0 * math.pi))
    assert traj.stop_reason is StopReason.COMPLETED
    assert np.max(np.abs(traj.r - 0.5)) <= 1e-12
    assert v_zero_crossings(traj).size == 0  # degenerate: dr never leaves noise


def test_v_zero_crossings_equally_spaced():
    # two full periods -> four interior sign changes of r', spaced T/2
    traj = integrate(PowerParams(1.0), 0.25, SolverConfig(span=8.8))
    cross = v_zero_crossings(traj)
    assert cross.size == 4
    gaps = np.diff(np.concatenate(([0.0], cross)))
    assert np.max(np.abs(gaps - gaps[0])) < 1e-6


def test_outer_run_has_no_interior_crossings():
    traj = integrate(PowerParams(1.0), 2.0)
    assert v_zero_crossings(traj).size == 0


def test_midpoint_residual_smooth_case_meets_solver_tolerance():
    # on a smooth run with a fine grid the interpolated-midpoint defect stays
    # within 100 x rel_tol of the local scale
    traj = integrate(PowerParams(1.0), 0.25, SolverConfig(span=8.8, ds_max=0.0025))
    res = midpoint_el_residuals(traj)
    assert np.max(np.abs(res)) <= 100.0 * traj.config.rel_tol


@pytest.mark.parametrize("alpha,r0", [(1.0, 0.25), (1.0, 2.0), (-0.5, 0.75), (-3.0, 2.0)])
def test_midpoint_residual_all_regimes(alpha, r0):
    traj = integrate(PowerParams(alpha), r0)
    assert np.max(np.abs(midpoint_el_residuals(traj))) <= 1e-6


def test_el_residual_zero_at_accepted_samples():
    from catenarylab import el_residual

    traj = integrate(PowerParams(1.0), 0.25)
    p = traj.params
    ddr = second_derivative(p, traj.r, traj.dr)
    res = el_residual(p, traj.r, traj.dr, ddr)
    scale = np.abs(traj.r * (traj.r - 1.0) * ddr) + traj.r ** 2
    assert np.max(np.abs(res) / scale) < 1e-13


@pytest.mark.parametrize("alpha,r0", [(1.0, 0.25), (1.0, 2.0), (-0.5, 1.5)])
def test_reflection_symmetry_two_sided(alpha, r0):
    # independent backward integration must mirror the forward half
    defect = reflection_defect(PowerParams(alpha), r0)
    assert defect <= 1e-10


def test_mirrored_samples_even_extension():
    traj = integrate(PowerParams(1.0), 0.25, SolverConfig(span=3.0))
    full = mirrored_samples(traj)
    assert full.shape[0] == 2 * traj.n - 1
    np.testing.assert_array_equal(full[: traj.n - 1, 1], traj.r[:0:-1])
    np.testing.assert_array_equal(full[traj.n - 1 :, 1], traj.r)
    assert np.all(np.diff(full[:, 0]) > 0.0)


def test_trajectory_invariants_enforced():
    p = PowerParams(1.0)
    s = np.array([0.0, 1.0, 2.0])
    ok = dict(params=p, r0=0.5, stop_reason=StopReason.COMPLETED, config=SolverConfig())
    Trajectory(s=s, r=np.array([0.5, 0.6, 0.5]), dr=np.array([0.0, 0.1, 0.0]), **ok)
    with pytest.raises(ValueError):  # first sample must be the initial condition
        Trajectory(s=s, r=np.array([0.6, 0.6, 0.5]), dr=np.array([0.0, 0.1, 0.0]), **ok)
    with pytest.raises(ValueError):  # strictly increasing angles
        Trajectory(s=np.array([0.0, 1.0, 1.0]), r=np.array([0.5, 0.6, 0.5]),
                   dr=np.array([0.0, 0.1, 0.0]), **ok)
    with pytest.raises(ValueError):  # barrier value in samples
        Trajectory(s=s, r=np.array([0.5, 1.0, 0.5]), dr=np.array([0.0, 0.1, 0.0]), **ok)
