"""Threshold sweeps, limit extrapolation, and pass/fail verdicts.

A sweep evaluates Phi(t)|E_t| on a decreasing grid of thresholds and
extrapolates t -> 0 with an affine model in Phi(t),

    y(t) = a + b * Phi(t),

which is the right model because for compactly supported u the deviation of
Phi(t)|E_t| from its limit is O(Phi(t)) with an explicit constant; the
intercept a estimates twice the unit-ball volume times the modular.

Verdicts compare sweep outputs against the identity, the doubling sandwich,
the universal doubled-argument bound, and the compact-support bracket. Each
verdict carries a signed margin (nonnegative iff it passed) built so that
enlarging the tolerance can only grow the margin; statistical slack enters
as three standard errors wherever Monte Carlo was involved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .geometry import unit_ball_volume
from .level_sets import MeasureEstimate, direct_power_weighted, phi_weighted
from .quadrature import QuadratureConvergenceError
from .radial_functions import TestFunction, modular
from .young import Power, YoungFunction

__all__ = [
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

DEFAULT_FIT_POINTS = 5


@dataclass(frozen=True)
class FitResult:
    """Affine fit y = intercept + slope * Phi(t) over the smallest thresholds."""

    intercept: float
    slope: float
    intercept_std_error: float
    residual_rms: float
    points_used: int


@dataclass(frozen=True)
class Verdict:
    """Outcome of one named check.

    ``margin`` is allowance minus deviation, in the units named by ``detail``;
    nonnegative exactly when the check passed.
    """

    name: str
    passed: bool
    margin: float
    detail: str


@dataclass(frozen=True)
class SweepResult:
    t_values: tuple
    estimates: tuple  # MeasureEstimate per t, None where the estimator failed
    modular_value: float
    dim: int
    fit: Optional[FitResult]
    grid_sup: float
    grid_sup_t: float
    failures: tuple = ()  # (grid index, message) pairs
    verdicts: dict = field(default_factory=dict)

    @property
    def limit_target(self) -> float:
        """2 omega_N times the modular: the value the intercept should hit."""
        return 2.0 * unit_ball_volume(self.dim) * self.modular_value

    def with_verdicts(self, verdicts: dict) -> "SweepResult":
        return replace(self, verdicts=dict(verdicts))


def make_t_grid(t_max: float, t_min: float, count: int) -> tuple:
    """Log-spaced decreasing thresholds from t_max down to t_min."""
    t_max, t_min = float(t_max), float(t_min)
    if not (0 < t_min < t_max and math.isfinite(t_max)):
        raise ValueError(f"need 0 < t_min < t_max, got t_min={t_min}, t_max={t_max}")
    count = int(count)
    if count < 2:
        raise ValueError(f"need at least two grid points, got {count}")
    return tuple(float(t) for t in np.geomspace(t_max, t_min, count))


def _validated_grid(t_values) -> tuple:
    ts = tuple(float(t) for t in t_values)
    if not ts:
        raise ValueError("empty threshold grid")
    arr = np.asarray(ts)
    if np.any(arr <= 0) or not np.all(np.isfinite(arr)):
        raise ValueError("thresholds must be positive and finite")
    if np.any(np.diff(arr) >= 0):
        raise ValueError("thresholds must be strictly decreasing")
    return ts


def _per_t_seed(seed, idx: int):
    """Independent substream per grid point, derived from the master seed."""
    if seed is None:
        return None
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(idx),))
    return int(ss.generate_state(1, np.uint64)[0])


def _affine_fit(phi_vals, values, sigmas) -> FitResult:
    x = np.asarray(phi_vals, dtype=float)
    y = np.asarray(values, dtype=float)
    s = np.asarray(sigmas, dtype=float)
    n = x.size
    if n == 0:
        raise ValueError("no points to fit")
    # Per-point precision weights need every sigma; any exact point (sigma 0)
    # reverts the fit to uniform weights.
    w = 1.0 / s**2 if np.all(s > 0) else np.ones_like(x)

    s0 = math.fsum(w)
    x_bar = math.fsum(w * x) / s0
    y_bar = math.fsum(w * y) / s0
    xc = x - x_bar
    sxx = math.fsum(w * xc * xc)
    if sxx == 0.0:
        slope = 0.0
        hat = w / s0
    else:
        slope = math.fsum(w * xc * y) / sxx
        hat = w / s0 - x_bar * (w * xc) / sxx
    intercept = y_bar - slope * x_bar
    intercept_var = math.fsum(hat * hat * s * s)
    resid = y - intercept - slope * x
    residual_rms = math.sqrt(math.fsum(resid * resid) / n)
    return FitResult(intercept, slope, math.sqrt(max(intercept_var, 0.0)), residual_rms, n)


def sweep(
    u: TestFunction,
    phi: YoungFunction,
    t_values,
    method: str = "exact_piecewise",
    budget: int = 100_000,
    seed=None,
    *,
    tol: float = 1e-9,
    workers: int = 1,
    truncation_radius: Optional[float] = None,
    fit_points: int = DEFAULT_FIT_POINTS,
    modular_rel_tol: float = 1e-10,
) -> SweepResult:
    """Evaluate Phi(t)|E_t| on the grid and fit the affine-in-Phi(t) model.

    Each grid point gets its own seed substream so results do not depend on
    grid order or on other points' failures. A failed estimator leaves a gap
    (recorded in ``failures``) instead of aborting the sweep; the fit and the
    grid supremum use the surviving points.
    """
    t_values = _validated_grid(t_values)
    modular_value = modular(u, phi, rel_tol=modular_rel_tol)

    estimates: list = []
    failures: list = []
    for idx, t in enumerate(t_values):
        try:
            est = phi_weighted(
                u,
                phi,
                t,
                method=method,
                tol=tol,
                mc_samples=budget,
                seed=_per_t_seed(seed, idx),
                truncation_radius=truncation_radius,
                workers=workers,
            )
        except (ValueError, ArithmeticError, QuadratureConvergenceError) as exc:
            estimates.append(None)
            failures.append((idx, f"t={t}: {exc}"))
            continue
        estimates.append(est)

    valid = [(t, e) for t, e in zip(t_values, estimates) if e is not None]
    if valid:
        sup_t, sup_est = max(valid, key=lambda pair: pair[1].value)
        grid_sup, grid_sup_t = sup_est.value, sup_t
    else:
        grid_sup = grid_sup_t = math.nan

    fit = None
    if valid:
        # smallest thresholds sit at the tail of the decreasing grid
        k = max(1, min(int(fit_points), len(valid)))
        tail = valid[-k:]
        fit = _affine_fit(
            [phi(t) for t, _ in tail],
            [e.value for _, e in tail],
            [e.std_error for _, e in tail],
        )

    return SweepResult(
        t_values,
        tuple(estimates),
        modular_value,
        u.dim,
        fit,
        grid_sup,
        grid_sup_t,
        tuple(failures),
    )


# --- verdicts --------------------------------------------------------------


def _max_std_error(result: SweepResult) -> float:
    errs = [e.std_error for e in result.estimates if e is not None]
    return max(errs) if errs else 0.0


def check_identity(result: SweepResult, tol: float = 1e-9) -> Verdict:
    """Fit intercept against 2 omega_N * modular, with 3 sigma slack."""
    name = "identity"
    if result.fit is None:
        return Verdict(name, False, -math.inf, "no fit available (all grid points failed)")
    target = result.limit_target
    deviation = abs(result.fit.intercept - target)
    allowance = tol * target + 3.0 * result.fit.intercept_std_error
    detail = (
        f"intercept {result.fit.intercept:.12g} vs 2*omega*modular {target:.12g}, "
        f"|diff| {deviation:.3e} <= {allowance:.3e} required"
    )
    return Verdict(name, deviation <= allowance, allowance - deviation, detail)


def check_sandwich(result: SweepResult, delta2, tol: float = 1e-6) -> tuple:
    """Grid supremum between 2 omega modular and its doubling multiple.

    The grid sup is only a lower bound for the true supremum, so the lower
    verdict asserts attainment in the small-t limit, which needs the grid to
    actually reach small t; the upper verdict is unconditional.
    """
    if hasattr(delta2, "estimate"):
        # the grid estimate never exceeds the true constant, so prefer the
        # closed form when one is attached
        k = delta2.analytic if delta2.analytic is not None else delta2.estimate
    else:
        k = delta2
    k = float(k)
    if not (k >= 1 and math.isfinite(k)):
        raise ValueError(f"doubling constant must be finite and >= 1, got {k}")
    target = result.limit_target
    slack = 3.0 * _max_std_error(result)
    sup = result.grid_sup
    if math.isnan(sup):
        bad = "grid supremum unavailable (all grid points failed)"
        return (
            Verdict("sandwich_lower", False, -math.inf, bad),
            Verdict("sandwich_upper", False, -math.inf, bad),
        )

    lower_floor = target * (1.0 - tol) - slack
    lower = Verdict(
        "sandwich_lower",
        sup >= lower_floor,
        sup - lower_floor,
        f"grid_sup {sup:.12g} >= {lower_floor:.12g} "
        f"(2*omega*modular {target:.12g}, attained as t -> 0)",
    )
    upper_cap = k * target * (1.0 + tol) + slack
    upper = Verdict(
        "sandwich_upper",
        sup <= upper_cap,
        upper_cap - sup,
        f"grid_sup {sup:.12g} <= {upper_cap:.12g} (doubling constant {k:.6g})",
    )
    return lower, upper


def check_universal_upper(
    result: SweepResult,
    u: TestFunction,
    phi: YoungFunction,
    tol: float = 1e-9,
    modular_rel_tol: float = 1e-10,
) -> Verdict:
    """Every per-t value against 2 omega_N * modular of the doubled function.

    Needs no doubling condition on Phi, which is what makes it worth checking
    separately from the sandwich.
    """
    name = "universal_upper"
    bound = 2.0 * unit_ball_volume(u.dim) * modular(u.scaled(2.0), phi, rel_tol=modular_rel_tol)
    margin = math.inf
    worst_t = None
    for t, est in zip(result.t_values, result.estimates):
        if est is None:
            continue
        allowance = bound * (1.0 + tol) + 3.0 * est.std_error
        m = allowance - est.value
        if m < margin:
            margin, worst_t = m, t
    if worst_t is None:
        return Verdict(name, False, -math.inf, "no estimates available")
    detail = f"bound 2*omega*modular(2u) = {bound:.12g}; tightest at t={worst_t:g}"
    return Verdict(name, margin >= 0.0, margin, detail)


def check_compact_bracket(
    result: SweepResult,
    u: TestFunction,
    phi: YoungFunction,
    tol: float = 1e-9,
) -> Verdict:
    """Per-t deviation from the limit against 2 Phi(t) omega^2 R^(2N)."""
    name = "compact_bracket"
    R = u.support_radius
    if not math.isfinite(R):
        raise ValueError("compact bracket needs a compactly supported function")
    omega = unit_ball_volume(u.dim)
    target = result.limit_target
    margin = math.inf
    worst_t = None
    for t, est in zip(result.t_values, result.estimates):
        if est is None:
            continue
        bracket = 2.0 * phi(t) * omega**2 * R ** (2 * u.dim)
        deviation = abs(est.value - target)
        allowance = bracket + tol * (target + bracket) + 3.0 * est.std_error
        m = allowance - deviation
        if m < margin:
            margin, worst_t = m, t
    if worst_t is None:
        return Verdict(name, False, -math.inf, "no estimates available")
    detail = (
        f"max |value - {target:.12g}| within 2 Phi(t) omega^2 R^(2N) "
        f"(R={R:g}); tightest at t={worst_t:g}"
    )
    return Verdict(name, margin >= 0.0, margin, detail)


def gu_yung_specialize(
    u: TestFunction,
    p: float,
    t_values,
    *,
    method: str = "exact_piecewise",
    budget: int = 100_000,
    seed=None,
    workers: int = 1,
    truncation_radius: Optional[float] = None,
    agreement_tol: float = 1e-12,
    limit_tol: float = 0.01,
    fit_points: int = DEFAULT_FIT_POINTS,
    modular_rel_tol: float = 1e-10,
) -> Verdict:
    """Power-law specialization cross-check.

    With Phi(t) = t^p the level set coincides with the p-power difference
    quotient set, so two independently coded routes must produce the same
    numbers: the generic Orlicz route and a direct power-arithmetic route
    sharing the identical sample streams. Passes iff (a) the routes agree to
    ``agreement_tol`` relative at every threshold, and (b) the extrapolated
    limit of the Orlicz route matches 2 omega_N * integral of |u|^p within
    ``limit_tol`` plus 3 sigma. The margin is the smaller of the two
    normalized margins.
    """
    p = float(p)
    phi = Power(p)
    t_values = _validated_grid(t_values)
    # both outer quadratures forced well below the agreement tolerance
    est_tol = 1e-13

    max_rel = 0.0
    pairs = []
    for idx, t in enumerate(t_values):
        kwargs = dict(
            method=method,
            tol=est_tol,
            mc_samples=budget,
            seed=_per_t_seed(seed, idx),
            truncation_radius=truncation_radius,
            workers=workers,
        )
        orlicz = phi_weighted(u, phi, t, **kwargs)
        direct = direct_power_weighted(u, p, t, **kwargs)
        denom = max(abs(orlicz.value), abs(direct.value))
        rel = 0.0 if denom == 0.0 else abs(orlicz.value - direct.value) / denom
        max_rel = max(max_rel, rel)
        pairs.append((t, orlicz))

    agree_margin = agreement_tol - max_rel

    k = max(1, min(int(fit_points), len(pairs)))
    tail = pairs[-k:]
    fit = _affine_fit(
        [phi(t) for t, _ in tail],
        [e.value for _, e in tail],
        [e.std_error for _, e in tail],
    )
    target = 2.0 * unit_ball_volume(u.dim) * modular(u, phi, rel_tol=modular_rel_tol)
    deviation = abs(fit.intercept - target)
    allowance = limit_tol * target + 3.0 * fit.intercept_std_error
    limit_margin = (allowance - deviation) / target if target > 0 else allowance - deviation

    passed = agree_margin >= 0.0 and deviation <= allowance
    detail = (
        f"max per-t route gap {max_rel:.3e} (allowed {agreement_tol:.1e}); "
        f"intercept {fit.intercept:.9g} vs 2*omega*integral(|u|^p) {target:.9g} "
        f"(allowed deviation {allowance:.3g})"
    )
    return Verdict("gu_yung", passed, min(agree_margin, limit_margin), detail)
