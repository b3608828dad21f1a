"""Conserved quantities along extremal curves.

Two families: the angle-independence of the energy density gives the
"angular momentum"

    J = r^2 |r-1|^alpha / sqrt(r^2 + r'^2),

constant along every solution for every alpha; and for integer alpha the
separable reduction r'^2 = f(r) g(r) with f(r) = r^4 (r-1)^(2 alpha) and an
elementary g, which also yields the blow-up angle of outer solutions by
quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np
from scipy.integrate import quad

from .model import PowerParams
from .trajectory import Trajectory

__all__ = [
    "momentum",
    "momentum_drift",
    "g_polynomial",
    "FirstIntegralForm",
    "build_first_integral",
    "first_integral_residual",
    "trajectory_first_integral_residual",
    "domain_bound_quadrature",
]

_QUAD_OPTS = dict(epsabs=1e-14, epsrel=1e-13, limit=200)


def momentum(params: PowerParams, r, dr):
    """J = r^2 |r-1|^alpha / sqrt(r^2 + r'^2); equals r0 |r0-1|^alpha at s = 0."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0.0) or np.any(r == 1.0):
        raise ValueError("momentum is singular at r in {0, 1}")
    dr = np.asarray(dr, dtype=float)
    return r * r * np.abs(r - 1.0) ** params.alpha / np.hypot(r, dr)


def momentum_drift(traj: Trajectory) -> float:
    """max over samples of |J(s) - J(0)| / |J(0)|."""
    j = momentum(traj.params, traj.r, traj.dr)
    j0 = traj.r0 * abs(traj.r0 - 1.0) ** traj.params.alpha
    return float(np.max(np.abs(j - j0)) / j0)


def _expand_g_derivative_numerator(alpha: int) -> list[int]:
    """Ascending coefficients of 2((alpha+1)r - 1)(r-1)^(-2 alpha - 1) for
    negative integer alpha (a polynomial of degree -2 alpha)."""
    m = -alpha
    binom = [comb(2 * m - 1, j) * (-1) ** (2 * m - 1 - j) for j in range(2 * m)]
    c = [0] * (2 * m + 1)
    for j, b in enumerate(binom):
        c[j] += -2 * b
        c[j + 1] += 2 * (alpha + 1) * b
    return c


def g_polynomial(alpha: int) -> list[Fraction]:
    """Polynomial part P of g(r) = c - 1/r^2 - 2 alpha / r + P(r), negative
    integer alpha only.

    Derived by expanding g'(r) = 2((alpha+1)r - 1)(r-1)^(-2 alpha - 1)/r^3
    with binomial coefficients and integrating termwise; the 1/r term's
    coefficient vanishes identically, so no logarithm appears.  Coefficients
    are exact rationals, ascending, with zero constant term.
    """
    if not isinstance(alpha, (int, np.integer)) or alpha >= 0:
        raise ValueError(f"g_polynomial needs a negative integer alpha, got {alpha!r}")
    alpha = int(alpha)
    c = _expand_g_derivative_numerator(alpha)
    if c[2] != 0 or c[0] != 2 or c[1] != 2 * alpha:
        raise AssertionError(f"unexpected expansion for alpha={alpha}: {c}")
    degree = len(c) - 3  # -2 alpha - 2
    p = [Fraction(0)] * (degree + 1)
    for k in range(3, len(c)):
        p[k - 2] = Fraction(c[k], k - 2)
    return p


@dataclass(frozen=True)
class FirstIntegralForm:
    """Separable form r'^2 = f(r) g(r) for integer alpha.

    f(r) = r^4 (r-1)^(2 alpha) (stored as the exponent pair f_exponents);
    g(r) = c - 1/(r^2 (r-1)^(2 alpha))                 for alpha > 0,
    g(r) = c - 1/r^2 - 2 alpha / r + P(r)              for alpha < 0,
    with c fixed by g(r0) = 0 (the initial point is a turning point).
    """

    alpha: int
    f_exponents: tuple[int, int]
    tail_poly: tuple[Fraction, ...] | None  # P ascending; None for alpha > 0

    def f(self, r):
        r = np.asarray(r, dtype=float)
        return r ** 4 * (r - 1.0) ** (2 * self.alpha)

    def g_tail(self, r):
        """The r-dependent part of g (so g = constant + g_tail)."""
        r = np.asarray(r, dtype=float)
        if self.alpha > 0:
            return -1.0 / (r * r * (r - 1.0) ** (2 * self.alpha))
        out = -1.0 / (r * r) - 2.0 * self.alpha / r
        for d, p in enumerate(self.tail_poly):
            if p:
                out = out + float(p) * r ** d
        return out

    def g_tail_magnitude(self, r):
        """Sum of |term| of g_tail; a cancellation-free scale for residuals."""
        r = np.asarray(r, dtype=float)
        if self.alpha > 0:
            return 1.0 / (r * r * np.abs(r - 1.0) ** (2 * self.alpha))
        out = 1.0 / (r * r) + np.abs(2.0 * self.alpha) / r
        for d, p in enumerate(self.tail_poly):
            if p:
                out = out + abs(float(p)) * r ** d
        return out

    def g_derivative(self, r):
        """d/dr of the represented g; must equal 2((alpha+1)r-1)/(r^3 (r-1)^(2 alpha + 1))."""
        r = np.asarray(r, dtype=float)
        a = self.alpha
        if a > 0:
            return 2.0 / (r ** 3 * (r - 1.0) ** (2 * a)) + 2.0 * a / (
                r * r * (r - 1.0) ** (2 * a + 1)
            )
        out = 2.0 / r ** 3 + 2.0 * a / (r * r)
        for d, p in enumerate(self.tail_poly):
            if p and d >= 1:
                out = out + d * float(p) * r ** (d - 1)
        return out

    def constant(self, r0: float) -> float:
        """c with g(r0) = 0, i.e. r0 is a turning point (r'(0) = 0)."""
        return -float(self.g_tail(r0))


def build_first_integral(alpha) -> FirstIntegralForm:
    """FirstIntegralForm for a nonzero integer alpha."""
    if not isinstance(alpha, (int, np.integer)) or alpha == 0:
        raise ValueError(f"first integral form needs a nonzero integer alpha, got {alpha!r}")
    alpha = int(alpha)
    poly = tuple(g_polynomial(alpha)) if alpha < 0 else None
    return FirstIntegralForm(alpha=alpha, f_exponents=(4, 2 * alpha), tail_poly=poly)


def first_integral_residual(form: FirstIntegralForm, r0: float, r, dr):
    """Defect of the conserved identity, normalized by its largest term.

    alpha > 0:  r'^2 r0^2 (r0-1)^(2a) - r^2 (r^2 (r-1)^(2a) - r0^2 (r0-1)^(2a));
    alpha < 0:  r'^2 (r-1)^(-2a) - r^4 (g_tail(r) - g_tail(r0)).

    Both sides vanish at turning points, so the normalizer also includes the
    cancellation-free magnitudes of the constituent terms.
    """
    a = form.alpha
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0.0) or np.any(r == 1.0):
        raise ValueError("residual is singular at r in {0, 1}")
    dr = np.asarray(dr, dtype=float)
    if a > 0:
        c0 = r0 * r0 * (r0 - 1.0) ** (2 * a)
        lhs = dr * dr * c0
        term = r * r * (r * r * (r - 1.0) ** (2 * a))
        rhs = term - r * r * c0
        scale = np.maximum.reduce([np.abs(lhs), np.abs(rhs), term, r * r * c0])
    else:
        w2m = (r - 1.0) ** (-2 * a)
        lhs = dr * dr * w2m
        rhs = r ** 4 * (form.g_tail(r) - form.g_tail(r0))
        mag = r ** 4 * (form.g_tail_magnitude(r) + abs(form.g_tail_magnitude(r0)))
        scale = np.maximum.reduce([np.abs(lhs), np.abs(rhs), mag])
    return (lhs - rhs) / np.maximum(scale, 1e-300)


def trajectory_first_integral_residual(traj: Trajectory) -> float:
    """max |first_integral_residual| over the trajectory's samples."""
    a = traj.params.alpha
    if a != int(a):
        raise ValueError("first integral forms exist for integer alpha only")
    form = build_first_integral(int(a))
    res = first_integral_residual(form, traj.r0, traj.r, traj.dr)
    return float(np.max(np.abs(res)))


def _radicand_over_t2(alpha: int, r0: float, t: float) -> float:
    """(r^2 (r-1)^(2a) - r0^2 (r0-1)^(2a)) / t^2 at r = r0 + t^2, exactly.

    Writing the radicand as (A - B)(A + B) with A = r(r-1)^alpha and
    B = r0(r0-1)^alpha, the factor A - B carries r - r0 = t^2 explicitly via
    the difference-of-powers identity, so the endpoint cancellation never
    happens in floating point.
    """
    r = r0 + t * t
    power_sum = sum(
        (r - 1.0) ** k * (r0 - 1.0) ** (alpha - 1 - k) for k in range(alpha)
    )
    diff_over_t2 = (r - 1.0) ** alpha + r0 * power_sum
    a = r * (r - 1.0) ** alpha
    b = r0 * (r0 - 1.0) ** alpha
    return diff_over_t2 * (a + b)


def domain_bound_quadrature(alpha: int, r0: float, r_max: float = 1e6) -> float:
    """Blow-up angle s1 of the outer solution by quadrature of the separable form.

    s1 = r0 (r0-1)^alpha * int_{r0}^{inf} dr / (r sqrt(r^2 (r-1)^(2 alpha)
    - r0^2 (r0-1)^(2 alpha))).  The inverse-square-root endpoint at r = r0 is
    removed by r = r0 + t^2; the far field is folded to x = 1/r, and the piece
    beyond r_max is reported as a separately-quadrated tail so the result is
    insensitive to r_max.  Positive integer alpha, r0 > 1.
    """
    if not isinstance(alpha, (int, np.integer)) or alpha <= 0:
        raise ValueError(f"quadrature form needs a positive integer alpha, got {alpha!r}")
    alpha = int(alpha)
    if not r0 > 1.0:
        raise ValueError("outer solutions need r0 > 1")
    if not r_max > r0 + 1.0:
        raise ValueError("r_max must exceed r0 + 1")
    k = r0 * (r0 - 1.0) ** alpha
    c0 = r0 * r0 * (r0 - 1.0) ** (2 * alpha)

    def near(t):
        rr = r0 + t * t
        return 2.0 * k / (rr * math.sqrt(_radicand_over_t2(alpha, r0, t)))

    def far(x):
        if x <= 0.0:
            return 0.0
        rr = 1.0 / x
        return k / (x * math.sqrt(rr * rr * (rr - 1.0) ** (2 * alpha) - c0))

    seam = r0 + 1.0
    i_near = quad(near, 0.0, 1.0, **_QUAD_OPTS)[0]
    i_mid = quad(far, 1.0 / r_max, 1.0 / seam, **_QUAD_OPTS)[0]
    i_tail = quad(far, 0.0, 1.0 / r_max, **_QUAD_OPTS)[0]
    return i_near + i_mid + i_tail
