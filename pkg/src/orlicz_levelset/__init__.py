"""Level-set measures of difference quotients against Orlicz modulars.

The package computes, for a radial function u on R^N and a Young function
Phi, the modular integral of Phi(|u|) and the 2N-dimensional measure of the
difference-quotient level set

    E_t = {(x, y) : x != y, Phi(|u(x) - u(y)|) / |x - y|^N >= Phi(t)},

then certifies numerically that Phi(t)|E_t| converges to twice the unit-ball
volume times the modular as t -> 0+, together with the doubling sandwich and
the universal doubled-argument bound around that limit.
"""

from .geometry import ball_annulus_intersection, ball_ball_intersection, unit_ball_volume
from .level_sets import (
    ESTIMATOR_METHODS,
    MeasureEstimate,
    direct_power_weighted,
    exact_piecewise,
    indicator_closed_form,
    monte_carlo_full,
    phi_weighted,
    semi_analytic_compact,
)
from .quadrature import QuadratureConvergenceError, QuadratureResult, adaptive_quadrature
from .radial_functions import (
    Gaussian,
    PiecewiseConstantRadial,
    RadialProfile,
    TruncationPair,
    indicator,
    modular,
    truncate,
)
from .sweeps import (
    FitResult,
    SweepResult,
    Verdict,
    check_compact_bracket,
    check_identity,
    check_sandwich,
    check_universal_upper,
    gu_yung_specialize,
    make_t_grid,
    sweep,
)
from .young import (
    Delta2Estimate,
    DegenerateYoungFunctionError,
    LLogL,
    PiecewiseLinearConvex,
    Power,
    PowerLog,
    YoungFunction,
    YoungReport,
    certify_young,
    default_delta2_grid,
    delta2_constant,
    phi_inverse,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "unit_ball_volume",
    "ball_ball_intersection",
    "ball_annulus_intersection",
    "adaptive_quadrature",
    "QuadratureResult",
    "QuadratureConvergenceError",
    "YoungFunction",
    "Power",
    "PowerLog",
    "LLogL",
    "PiecewiseLinearConvex",
    "Delta2Estimate",
    "YoungReport",
    "DegenerateYoungFunctionError",
    "delta2_constant",
    "certify_young",
    "default_delta2_grid",
    "phi_inverse",
    "PiecewiseConstantRadial",
    "RadialProfile",
    "Gaussian",
    "TruncationPair",
    "indicator",
    "truncate",
    "modular",
    "MeasureEstimate",
    "exact_piecewise",
    "semi_analytic_compact",
    "monte_carlo_full",
    "phi_weighted",
    "direct_power_weighted",
    "indicator_closed_form",
    "ESTIMATOR_METHODS",
    "FitResult",
    "Verdict",
    "SweepResult",
    "make_t_grid",
    "sweep",
    "check_identity",
    "check_sandwich",
    "check_universal_upper",
    "check_compact_bracket",
    "gu_yung_specialize",
]
