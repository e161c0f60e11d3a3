"""Radial test functions: evaluation, truncation set algebra, modulars."""

import math

import numpy as np
import pytest
from scipy import integrate

from orlicz_levelset.geometry import unit_ball_volume
from orlicz_levelset.radial_functions import (
    Gaussian,
    PiecewiseConstantRadial,
    RadialProfile,
    TruncationPair,
    indicator,
    modular,
    truncate,
)
from orlicz_levelset.young import LLogL, Power, PowerLog


def tent(support=1.0, dim=2):
    return RadialProfile(
        lambda r: np.maximum(0.0, 1.0 - np.asarray(r, dtype=float) / support),
        support,
        dim,
    )


def test_indicator_evaluation():
    u = indicator(1.0, 2.0, dim=2)
    assert u(np.array([0.3, 0.4])) == 2.0  # |x| = 0.5
    assert u(np.array([3.0, 0.0])) == 0.0


def test_gaussian_evaluation():
    u = Gaussian(1.0, 1.0, dim=1)
    assert u(np.array([1.0])) == pytest.approx(math.exp(-1.0), rel=1e-15)
    assert u(np.array([0.0])) == 1.0


def test_boundary_points_belong_to_outer_annulus():
    # annuli are half-open [r_{i-1}, r_i): the shared edge goes with the next piece
    u = PiecewiseConstantRadial((1.0, 2.0), (3.0, 7.0), dim=3)
    assert u.profile(0.0) == 3.0
    assert u.profile(1.0) == 7.0
    assert u.profile(2.0) == 0.0
    assert u.support_radius == 2.0


def test_profile_vectorized_matches_pointwise():
    u = PiecewiseConstantRadial((0.5, 1.5, 2.0), (4.0, -1.0, 2.5), dim=2)
    rs = np.array([0.0, 0.25, 0.5, 1.0, 1.5, 1.9, 2.0, 5.0])
    vec = u.profile(rs)
    assert vec.tolist() == [u.profile(float(r)) for r in rs]


def test_evaluate_validates_points():
    u = indicator(1.0, 1.0, dim=2)
    with pytest.raises(ValueError):
        u(np.array([1.0, 2.0, 3.0]))
    with pytest.raises(ValueError):
        u(np.array([np.nan, 0.0]))


def test_constructor_validation():
    with pytest.raises(ValueError):
        PiecewiseConstantRadial((2.0, 1.0), (1.0, 1.0), dim=2)
    with pytest.raises(ValueError):
        PiecewiseConstantRadial((0.0, 1.0), (1.0, 1.0), dim=2)
    with pytest.raises(ValueError):
        PiecewiseConstantRadial((1.0,), (1.0, 2.0), dim=2)
    with pytest.raises(ValueError):
        PiecewiseConstantRadial((), (), dim=2)
    with pytest.raises(ValueError):
        PiecewiseConstantRadial((1.0,), (float("nan"),), dim=2)
    with pytest.raises(ValueError):
        indicator(1.0, 1.0, dim=0)
    with pytest.raises(ValueError):
        indicator(1.0, 1.0, dim=11)
    with pytest.raises(ValueError):
        indicator(1.0, 1.0, dim=2.0)
    with pytest.raises(ValueError):
        Gaussian(1.0, 0.0, dim=2)
    with pytest.raises(ValueError):
        Gaussian(1.0, 1.0, dim=2, inner_radius=-0.5)
    with pytest.raises(ValueError):
        RadialProfile(lambda r: r, 0.0, dim=2)


def test_scaled_variants():
    assert indicator(1.0, 2.0, dim=2).scaled(3.0).values == (6.0,)
    assert Gaussian(2.0, 1.0, dim=1).scaled(0.5).amplitude == 1.0
    u = tent()
    v = u.scaled(1.7)
    for r in (0.0, 0.3, 0.99, 2.0):
        assert v.profile(r) == pytest.approx(1.7 * u.profile(r), rel=1e-15)


def test_truncate_beyond_support_is_identity():
    u = indicator(1.0, 1.0, dim=2)
    pair = truncate(u, 2.0)
    assert isinstance(pair, TruncationPair)
    assert pair.truncated is u
    for r in (0.0, 0.5, 1.0, 3.0):
        assert pair.tail.profile(r) == 0.0


def test_truncate_splits_an_annulus():
    # cutting Indicator(1, 1) at 0.5 leaves the annulus [0.5, 1) value 1 outside
    u = indicator(1.0, 1.0, dim=2)
    inside, tail = truncate(u, 0.5)
    assert inside.radii == (0.5,) and inside.values == (1.0,)
    assert tail.profile(0.25) == 0.0
    assert tail.profile(0.5) == 1.0
    assert tail.profile(0.75) == 1.0
    assert tail.profile(1.0) == 0.0


def test_truncate_pointwise_additivity_piecewise():
    u = PiecewiseConstantRadial((1.0, 2.0, 3.0), (5.0, 3.0, 1.0), dim=2)
    grid = [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 2.999, 3.0, 4.0]
    for cut in (0.4, 1.0, 2.5, 3.0, 6.0):
        inside, tail = truncate(u, cut)
        for r in grid + [cut]:
            assert inside.profile(r) + tail.profile(r) == u.profile(r)


def test_truncate_gaussian():
    g = Gaussian(2.0, 1.3, dim=2)
    inside, tail = truncate(g, 1.5)
    assert isinstance(tail, Gaussian) and tail.inner_radius == 1.5
    assert inside.support_radius == 1.5
    assert tail.profile(1.0) == 0.0
    for r in (0.0, 0.7, 1.5, 2.0, 4.0):
        total = inside.profile(r) + tail.profile(r)
        assert total == pytest.approx(g.profile(r), rel=1e-15, abs=1e-300)


def test_truncate_gaussian_tail_below_inner_radius():
    # cutting a tail piece inside its own inner radius changes nothing
    g = Gaussian(1.0, 1.0, dim=2, inner_radius=2.0)
    inside, tail = truncate(g, 1.0)
    for r in (0.0, 0.5, 1.0, 1.5, 2.0, 3.0):
        assert inside.profile(r) == 0.0
        assert tail.profile(r) == g.profile(r)


def test_truncate_radial_profile_additivity():
    u = tent(support=2.0, dim=3)
    inside, tail = truncate(u, 0.8)
    for r in (0.0, 0.4, 0.8, 1.2, 2.0, 3.0):
        assert inside.profile(r) + tail.profile(r) == pytest.approx(
            u.profile(r), rel=1e-15, abs=0.0
        )


def test_truncate_validates_radius():
    u = indicator(1.0, 1.0, dim=2)
    for bad in (0.0, -1.0, float("inf"), float("nan")):
        with pytest.raises(ValueError):
            truncate(u, bad)


def test_modular_indicator_closed_form():
    # omega_2 * 1^2 * Phi(2) with Phi = t^3
    assert modular(indicator(1.0, 2.0, dim=2), Power(3.0)) == pytest.approx(
        8.0 * math.pi, rel=1e-15
    )


def test_modular_of_zero_function():
    assert modular(indicator(1.0, 0.0, dim=2), Power(2.0)) == 0.0
    assert modular(Gaussian(0.0, 1.0, dim=1), LLogL()) == 0.0


def test_modular_gaussian_frozen_value():
    # integral of e^{-2x^2} over the line
    got = modular(Gaussian(1.0, 1.0, dim=1), Power(2.0), rel_tol=1e-12)
    assert got == pytest.approx(math.sqrt(math.pi / 2.0), rel=1e-11)


def test_modular_gaussian_against_quad_oracle():
    g = Gaussian(1.5, 0.8, dim=2)
    phi = LLogL()
    oracle, err = integrate.quad(
        lambda r: 2.0 * math.pi * phi(1.5 * math.exp(-((r / 0.8) ** 2))) * r,
        0.0,
        40.0,
        epsabs=1e-14,
        epsrel=1e-12,
    )
    got = modular(g, phi, rel_tol=1e-12)
    assert got == pytest.approx(oracle, rel=1e-10)


def test_modular_profile_against_quad_oracle():
    u = tent(support=1.0, dim=2)
    phi = LLogL()
    oracle, err = integrate.quad(
        lambda r: 2.0 * math.pi * phi(1.0 - r) * r, 0.0, 1.0, epsabs=1e-14, epsrel=1e-12
    )
    assert modular(u, phi, rel_tol=1e-12) == pytest.approx(oracle, rel=1e-10)


def test_modular_additivity_under_truncation():
    u = PiecewiseConstantRadial((1.0, 2.0, 3.0), (5.0, 3.0, 1.0), dim=2)
    phi = LLogL()
    whole = modular(u, phi)
    for cut in (0.5, 1.0, 2.5, 3.0, 10.0):
        inside, tail = truncate(u, cut)
        assert modular(inside, phi) + modular(tail, phi) == pytest.approx(
            whole, rel=1e-10
        )


def test_modular_additivity_gaussian():
    g = Gaussian(2.0, 1.5, dim=2)
    phi = Power(2.0)
    whole = modular(g, phi, rel_tol=1e-12)
    for cut in (0.5, 1.5, 3.0):
        inside, tail = truncate(g, cut)
        got = modular(inside, phi, rel_tol=1e-12) + modular(tail, phi, rel_tol=1e-12)
        assert got == pytest.approx(whole, rel=1e-10)


def test_tail_modular_vanishes_monotonically():
    phi = LLogL()
    cases = [
        Gaussian(2.0, 1.5, dim=2),
        PiecewiseConstantRadial((1.0, 2.0), (3.0, 1.0), dim=3),
        tent(support=2.0, dim=1),
    ]
    for u in cases:
        tails = [modular(truncate(u, R).tail, phi, rel_tol=1e-11) for R in (0.5, 1.0, 2.0, 4.0, 8.0)]
        assert all(a >= b - 1e-15 * abs(a) for a, b in zip(tails, tails[1:]))
        assert tails[-1] <= 1e-6 * (tails[0] + 1e-300)


def test_scaling_identity_exact():
    # omega_N R^N c^p, same arithmetic on both sides
    for dim, R, c, p in [(1, 2.0, 3.0, 2.0), (2, 1.5, 2.0, 3.0), (3, 0.75, 4.0, 1.0)]:
        got = modular(indicator(R, c, dim), Power(p))
        assert got == (abs(c) ** p * unit_ball_volume(dim)) * R**dim


def test_membership_scaled_modular_is_finite():
    """Every catalog entry stays in the Orlicz class after doubling."""
    functions = [
        indicator(1.0, 2.0, dim=2),
        PiecewiseConstantRadial((1.0, 2.0), (3.0, 1.0), dim=3),
        tent(support=1.0, dim=2),
        Gaussian(1.0, 1.0, dim=1),
    ]
    for u in functions:
        for phi in (Power(1.0), Power(3.5), PowerLog(2.0), LLogL()):
            assert math.isfinite(modular(u.scaled(2.0), phi, rel_tol=1e-8))


def test_modular_rejects_infinite_profile_support():
    u = RadialProfile(lambda r: np.exp(-np.asarray(r, dtype=float)), math.inf, dim=2)
    with pytest.raises(ValueError):
        modular(u, Power(2.0))


def test_modular_validates_rel_tol():
    u = indicator(1.0, 1.0, dim=2)
    for bad in (0.0, 1.0, -0.5, 2.0):
        with pytest.raises(ValueError):
            modular(u, Power(2.0), rel_tol=bad)
