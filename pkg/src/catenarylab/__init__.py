"""catenarylab: extremal curves of int |r-1|^alpha dl around the unit circle.

Library + CLI for integrating, classifying, and verifying the hanging-chain
problem measured against a circle: phase-plane dynamics with singularity
events, conserved quantities, regime classification, and direct stationarity
checks of the energy.
"""

from .model import (
    PowerParams,
    PolarState,
    curvature,
    cos_phi,
    el_residual,
    curvature_relation_residual,
    energy,
    to_cartesian,
)
from .trajectory import SolverConfig, StopReason, Trajectory, mirrored_samples
from .dynamics import (
    PhasePoint,
    EquilibriumInfo,
    EquilibriumKind,
    vector_field,
    second_derivative,
    integrate,
    equilibrium,
    evaluate,
    midpoint_el_residuals,
    v_zero_crossings,
)
from .conservation import (
    momentum,
    momentum_drift,
    g_polynomial,
    FirstIntegralForm,
    build_first_integral,
    first_integral_residual,
    domain_bound_quadrature,
)
from .classify import (
    Regime,
    ClassifyConfig,
    ClassificationReport,
    classify,
    expected_regime,
    period,
    half_period_swap_defect,
    orthogonality_defect,
    inversion_defect,
    asymptote_angle,
    inner_limit_gap,
)
from .variation import BumpBasis, stationarity_defect

__version__ = "0.1.0"

__all__ = [
    "PowerParams",
    "PolarState",
    "curvature",
    "cos_phi",
    "el_residual",
    "curvature_relation_residual",
    "energy",
    "to_cartesian",
    "SolverConfig",
    "StopReason",
    "Trajectory",
    "mirrored_samples",
    "PhasePoint",
    "EquilibriumInfo",
    "EquilibriumKind",
    "vector_field",
    "second_derivative",
    "integrate",
    "equilibrium",
    "evaluate",
    "midpoint_el_residuals",
    "v_zero_crossings",
    "momentum",
    "momentum_drift",
    "g_polynomial",
    "FirstIntegralForm",
    "build_first_integral",
    "first_integral_residual",
    "domain_bound_quadrature",
    "Regime",
    "ClassifyConfig",
    "ClassificationReport",
    "classify",
    "expected_regime",
    "period",
    "half_period_swap_defect",
    "orthogonality_defect",
    "inversion_defect",
    "asymptote_angle",
    "inner_limit_gap",
    "BumpBasis",
    "stationarity_defect",
    "__version__",
]
