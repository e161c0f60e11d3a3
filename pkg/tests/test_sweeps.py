"""Threshold sweeps, affine extrapolation, and the named verdicts."""

import math
from dataclasses import replace

import numpy as np
import pytest

from orlicz_levelset.geometry import unit_ball_volume
from orlicz_levelset.radial_functions import (
    Gaussian,
    PiecewiseConstantRadial,
    RadialProfile,
    indicator,
    modular,
)
from orlicz_levelset.sweeps import (
    SweepResult,
    Verdict,
    _affine_fit,
    check_compact_bracket,
    check_identity,
    check_sandwich,
    check_universal_upper,
    gu_yung_specialize,
    make_t_grid,
    sweep,
)
from orlicz_levelset.young import LLogL, Power, PowerLog, delta2_constant

INTERVAL = indicator(1.0, 1.0, dim=1)
STAIRCASE = PiecewiseConstantRadial((0.7, 1.4, 2.2), (1.8, 0.9, 0.4), dim=2)


def test_make_t_grid_examples():
    assert make_t_grid(1.0, 1e-3, 4) == pytest.approx((1.0, 0.1, 0.01, 0.001), rel=1e-12)
    assert make_t_grid(0.5, 0.005, 3) == pytest.approx((0.5, 0.05, 0.005), rel=1e-12)


def test_make_t_grid_validation():
    with pytest.raises(ValueError):
        make_t_grid(1.0, 1.0, 1)
    with pytest.raises(ValueError):
        make_t_grid(1.0, 2.0, 4)
    with pytest.raises(ValueError):
        make_t_grid(1.0, 0.0, 4)
    with pytest.raises(ValueError):
        make_t_grid(1.0, 0.1, 1)


def test_sweep_rejects_bad_grids():
    for grid in [(), (0.1, 0.5), (0.5, 0.5), (0.5, -0.1), (0.5, float("nan"))]:
        with pytest.raises(ValueError):
            sweep(INTERVAL, Power(2.0), grid)


def test_exact_indicator_sweep_frozen_values():
    # 8 - 8 t^2 on the grid, so the affine-in-Phi(t) model is exact
    result = sweep(INTERVAL, Power(2.0), (0.5, 0.25, 0.125))
    got = [e.value for e in result.estimates]
    assert got == pytest.approx([6.0, 7.5, 7.875], rel=1e-10)
    assert result.fit.intercept == pytest.approx(8.0, abs=1e-9)
    assert result.fit.slope == pytest.approx(-8.0, rel=1e-9)
    assert result.fit.residual_rms <= 1e-10
    assert result.fit.points_used == 3
    assert result.modular_value == pytest.approx(2.0, rel=1e-12)
    assert result.limit_target == pytest.approx(8.0, rel=1e-12)
    assert result.grid_sup == pytest.approx(7.875, rel=1e-10)
    assert result.grid_sup_t == 0.125
    assert result.failures == ()


def test_power_one_indicator_sweep():
    # rho = 1/t >= 2R on this grid, so Phi(t)|E_t| = 8 - 8t; the sandwich
    # lower verdict needs the grid to push 8 - 8t above 8(1 - 1e-6)
    ts = make_t_grid(0.5, 1e-7, 6)
    result = sweep(INTERVAL, Power(1.0), ts)
    for t, est in zip(result.t_values, result.estimates):
        assert est.value == pytest.approx(8.0 - 8.0 * t, rel=1e-10)
    assert result.fit.intercept == pytest.approx(8.0, abs=1e-8)
    lower, upper = check_sandwich(result, delta2_constant(Power(1.0)))
    assert lower.passed and upper.passed


def test_sweep_of_zero_function():
    u = indicator(1.0, 0.0, dim=1)
    result = sweep(u, Power(2.0), (0.5, 0.25, 0.125))
    assert all(e.value == 0.0 for e in result.estimates)
    assert result.fit.intercept == 0.0
    assert result.grid_sup == 0.0
    assert check_identity(result).passed
    lower, upper = check_sandwich(result, delta2_constant(Power(2.0)))
    assert lower.passed and upper.passed
    assert check_universal_upper(result, u, Power(2.0)).passed
    assert check_compact_bracket(result, u, Power(2.0)).passed


def test_identity_verdict_passes_on_exact_sweep():
    result = sweep(INTERVAL, Power(2.0), make_t_grid(0.5, 1e-3, 6))
    verdict = check_identity(result)
    assert verdict.passed
    assert verdict.margin >= 0.0
    assert verdict.name == "identity"


def corrupt(result, factor=1.5):
    # scale every estimate and rebuild the dependent fields, keeping the
    # honest modular target in place
    scaled = tuple(
        None if e is None else replace(e, value=factor * e.value) for e in result.estimates
    )
    valid = [(t, e) for t, e in zip(result.t_values, scaled) if e is not None]
    k = min(5, len(valid))
    tail = valid[-k:]
    phi_vals = [t * t for t, _ in tail]  # Power(2) grids only
    fit = _affine_fit(phi_vals, [e.value for _, e in tail], [e.std_error for _, e in tail])
    sup_t, sup_est = max(valid, key=lambda pair: pair[1].value)
    return replace(
        result, estimates=scaled, fit=fit, grid_sup=sup_est.value, grid_sup_t=sup_t
    )


def test_identity_verdict_fails_on_corrupted_estimates():
    result = sweep(INTERVAL, Power(2.0), make_t_grid(0.5, 1e-3, 6))
    bad = corrupt(result)
    verdict = check_identity(bad)
    assert not verdict.passed
    assert verdict.margin < 0.0


def test_verdict_margins_monotone_in_tolerance():
    result = sweep(INTERVAL, Power(2.0), make_t_grid(0.5, 1e-3, 6))
    cases = [result, corrupt(result)]
    tols = [1e-12, 1e-9, 1e-6, 1e-3, 1e-1]
    for res in cases:
        for make in (
            lambda r, tol: check_identity(r, tol),
            lambda r, tol: check_sandwich(r, 4.0, tol)[0],
            lambda r, tol: check_sandwich(r, 4.0, tol)[1],
            lambda r, tol: check_universal_upper(r, INTERVAL, Power(2.0), tol),
            lambda r, tol: check_compact_bracket(r, INTERVAL, Power(2.0), tol),
        ):
            margins = [make(res, tol).margin for tol in tols]
            passes = [make(res, tol).passed for tol in tols]
            assert all(b >= a - 1e-15 for a, b in zip(margins, margins[1:]))
            # enlarging tol never flips pass -> fail
            assert all(b or not a for a, b in zip(passes, passes[1:]))


def test_sandwich_needs_a_grid_reaching_small_t():
    fine = sweep(INTERVAL, Power(2.0), make_t_grid(0.5, 1e-4, 8))
    lower, upper = check_sandwich(fine, delta2_constant(Power(2.0)))
    assert lower.passed and upper.passed
    # a coarse grid tops out at 7.875 < 8(1 - tol): the lower verdict reports
    # honestly that attainment was not demonstrated
    coarse = sweep(INTERVAL, Power(2.0), (0.5, 0.25, 0.125))
    lower, upper = check_sandwich(coarse, delta2_constant(Power(2.0)))
    assert not lower.passed
    assert upper.passed


def test_sandwich_accepts_plain_float_delta2():
    result = sweep(INTERVAL, Power(2.0), make_t_grid(0.5, 1e-4, 8))
    lower, upper = check_sandwich(result, 4.0)
    assert lower.passed and upper.passed
    with pytest.raises(ValueError):
        check_sandwich(result, 0.5)


def test_universal_upper_randomized_exact_cases():
    rng = np.random.default_rng(2024)
    for case in range(50):
        pieces = int(rng.integers(1, 4))
        dim = int(rng.integers(1, 4))
        u = PiecewiseConstantRadial(
            tuple(np.sort(rng.uniform(0.3, 2.0, size=pieces))),
            tuple(rng.uniform(-2.0, 2.0, size=pieces)),
            dim,
        )
        phi = (Power(2.0), LLogL(), PowerLog(1.0))[case % 3]
        result = sweep(u, phi, make_t_grid(0.6, 0.05, 4))
        assert check_universal_upper(result, u, phi).passed


@pytest.mark.parametrize("dim,phi_t_sq", [(1, True), (2, True)])
def test_compact_bracket_is_tight_for_indicators(dim, phi_t_sq):
    u = indicator(1.0, 1.0, dim=dim)
    omega = unit_ball_volume(dim)
    result = sweep(u, Power(2.0), make_t_grid(0.5, 0.05, 5))
    target = result.limit_target
    for t, est in zip(result.t_values, result.estimates):
        bracket = 2.0 * (t * t) * omega**2
        assert abs(est.value - target) == pytest.approx(bracket, rel=1e-9)
    assert check_compact_bracket(result, u, Power(2.0)).passed


def test_gu_yung_exact_route_agreement():
    verdict = gu_yung_specialize(INTERVAL, 2.0, make_t_grid(0.5, 0.03125, 5))
    assert isinstance(verdict, Verdict)
    assert verdict.name == "gu_yung"
    assert verdict.passed
    assert verdict.margin >= 0.0


def test_gu_yung_zero_function():
    verdict = gu_yung_specialize(indicator(1.0, 0.0, dim=1), 2.0, (0.5, 0.25, 0.125))
    assert verdict.passed


def test_gu_yung_gaussian_monte_carlo():
    # limit target 2 * omega_1 * integral e^{-|x|} dx ... with p = 1:
    # 2 * 2 * sqrt(pi) approx 7.0898 for the unit Gaussian
    verdict = gu_yung_specialize(
        Gaussian(1.0, 1.0, dim=1),
        1.0,
        make_t_grid(0.05, 0.005, 5),
        method="monte_carlo_full",
        budget=60_000,
        seed=99,
        truncation_radius=6.0,
    )
    assert verdict.passed, verdict.detail


def test_sweep_records_failures_as_gaps():
    # t = 0.05 underflows Phi(t) = t^300 to zero and must not abort the sweep
    result = sweep(STAIRCASE, Power(300.0), (0.9, 0.3, 0.05))
    assert len(result.failures) == 1
    assert result.failures[0][0] == 2
    assert result.estimates[2] is None
    assert result.estimates[0] is not None
    assert math.isfinite(result.grid_sup)


def test_all_points_failing_yields_failed_verdicts():
    result = sweep(STAIRCASE, Power(300.0), (0.08, 0.06, 0.05))
    assert result.fit is None
    assert len(result.failures) == 3
    verdict = check_identity(result)
    assert not verdict.passed and verdict.margin == -math.inf
    lower, upper = check_sandwich(result, 4.0)
    assert not lower.passed and not upper.passed


def test_sweep_seed_reproducibility():
    u = RadialProfile(
        lambda r: np.maximum(0.0, 1.0 - np.asarray(r, dtype=float)), 1.0, 1
    )
    kwargs = dict(method="monte_carlo_full", budget=20_000)
    a = sweep(u, Power(1.0), (0.1, 0.05, 0.02), seed=5, **kwargs)
    b = sweep(u, Power(1.0), (0.1, 0.05, 0.02), seed=5, **kwargs)
    c = sweep(u, Power(1.0), (0.1, 0.05, 0.02), seed=6, **kwargs)
    assert [e.value for e in a.estimates] == [e.value for e in b.estimates]
    assert [e.value for e in a.estimates] != [e.value for e in c.estimates]
    d = sweep(u, Power(1.0), (0.1, 0.05, 0.02), seed=5, workers=4, **kwargs)
    assert [e.value for e in a.estimates] == [e.value for e in d.estimates]


def test_affine_fit_against_lstsq_oracle():
    rng = np.random.default_rng(3)
    x = rng.uniform(0.0, 1.0, size=7)
    y = 3.0 + 2.0 * x + rng.normal(0, 0.1, size=7)
    fit = _affine_fit(x, y, np.zeros(7))
    coeffs = np.polynomial.polynomial.polyfit(x, y, 1)
    assert fit.intercept == pytest.approx(coeffs[0], rel=1e-10)
    assert fit.slope == pytest.approx(coeffs[1], rel=1e-10)

    # weighted: scale rows by 1/sigma and compare against lstsq on the scaled
    # design matrix
    sigmas = rng.uniform(0.05, 0.4, size=7)
    wfit = _affine_fit(x, y, sigmas)
    A = np.stack([1.0 / sigmas, x / sigmas], axis=1)
    sol, *_ = np.linalg.lstsq(A, y / sigmas, rcond=None)
    assert wfit.intercept == pytest.approx(sol[0], rel=1e-10)
    assert wfit.slope == pytest.approx(sol[1], rel=1e-10)


def test_affine_fit_intercept_error_is_calibrated():
    """Reported intercept standard error against 400 synthetic replicates."""
    rng = np.random.default_rng(17)
    x = np.linspace(0.1, 0.5, 5)
    sigmas = np.array([0.02, 0.05, 0.03, 0.08, 0.04])
    intercepts = []
    reported = None
    for _ in range(400):
        y = 1.7 - 0.9 * x + rng.normal(0.0, sigmas)
        fit = _affine_fit(x, y, sigmas)
        intercepts.append(fit.intercept)
        reported = fit.intercept_std_error
    empirical = float(np.std(intercepts))
    assert 0.75 <= empirical / reported <= 1.3


def test_affine_fit_degenerate_single_abscissa():
    fit = _affine_fit([0.25, 0.25], [3.0, 3.2], [0.1, 0.1])
    assert fit.slope == 0.0
    assert fit.intercept == pytest.approx(3.1, rel=1e-12)
    with pytest.raises(ValueError):
        _affine_fit([], [], [])


def test_with_verdicts_round_trip():
    result = sweep(INTERVAL, Power(2.0), (0.5, 0.25, 0.125))
    v = check_identity(result)
    updated = result.with_verdicts({v.name: v})
    assert isinstance(updated, SweepResult)
    assert updated.verdicts["identity"].passed
    assert result.verdicts == {}
