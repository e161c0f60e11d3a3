"""Ball and ball/annulus intersection volumes against independent oracles."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orlicz_levelset.geometry import (
    MAX_DIMENSION,
    _cap_volume_reference,
    _half_cap,
    ball_annulus_intersection,
    ball_ball_intersection,
    unit_ball_volume,
)


def test_unit_ball_volumes():
    assert abs(unit_ball_volume(1) - 2.0) <= 2e-14
    assert abs(unit_ball_volume(2) - math.pi) <= 1e-14 * math.pi
    assert abs(unit_ball_volume(3) - 4.0 * math.pi / 3.0) <= 1e-14 * 4.19
    assert abs(unit_ball_volume(4) - math.pi**2 / 2.0) <= 1e-13


@pytest.mark.parametrize("dim", [0, -1, MAX_DIMENSION + 1])
def test_unit_ball_volume_range(dim):
    with pytest.raises(ValueError):
        unit_ball_volume(dim)


def test_containment():
    assert ball_ball_intersection(0.0, 1.0, 1.0, 2) == pytest.approx(math.pi, rel=1e-14)
    # smaller ball swallowed regardless of which argument it is
    v = unit_ball_volume(3) * 0.5**3
    assert ball_ball_intersection(0.2, 0.5, 1.0, 3) == pytest.approx(v, rel=1e-13)
    assert ball_ball_intersection(0.2, 1.0, 0.5, 3) == pytest.approx(v, rel=1e-13)


@pytest.mark.parametrize("dim", [1, 2, 3])
def test_disjoint(dim):
    assert ball_ball_intersection(3.0, 1.0, 1.0, dim) == 0.0
    assert ball_ball_intersection(2.0, 1.0, 1.0, dim) == 0.0  # touching


def test_planar_lens_closed_form():
    # 2 r^2 acos(d/2r) - (d/2) sqrt(4r^2 - d^2) at d = r = 1
    target = 2.0 * math.pi / 3.0 - math.sqrt(3.0) / 2.0
    got = ball_ball_intersection(1.0, 1.0, 1.0, 2)
    assert abs(got - target) <= 1e-12 * target


def test_one_dimensional_interval_oracle():
    rng = np.random.default_rng(1234)
    n = 10_000
    d = rng.uniform(0.0, 4.0, n)
    r1 = rng.uniform(0.01, 2.0, n)
    r2 = rng.uniform(0.01, 2.0, n)
    got = ball_ball_intersection(d, r1, r2, 1)
    overlap = np.maximum(0.0, np.minimum(r1, d + r2) - np.maximum(-r1, d - r2))
    assert np.all(np.abs(got - overlap) <= 1e-13 * np.maximum(overlap, 1e-12))


def test_symmetry_exact():
    rng = np.random.default_rng(7)
    for _ in range(300):
        d = rng.uniform(0, 3)
        r1, r2 = rng.uniform(0.05, 1.8, 2)
        dim = rng.integers(1, 7)
        assert ball_ball_intersection(d, r1, r2, int(dim)) == ball_ball_intersection(
            d, r2, r1, int(dim)
        )


def test_monotone_in_radius_and_distance():
    rng = np.random.default_rng(8)
    for _ in range(200):
        d = rng.uniform(0, 3)
        r2 = rng.uniform(0.1, 2)
        dim = int(rng.integers(1, 5))
        radii = np.sort(rng.uniform(0.05, 2.5, 4))
        vols = [ball_ball_intersection(d, r, r2, dim) for r in radii]
        assert all(b >= a - 1e-13 for a, b in zip(vols, vols[1:]))
        dists = np.sort(rng.uniform(0, 4, 4))
        vols_d = [ball_ball_intersection(x, radii[-1], r2, dim) for x in dists]
        assert all(b <= a + 1e-13 for a, b in zip(vols_d, vols_d[1:]))


def test_annulus_is_difference_of_balls():
    rng = np.random.default_rng(9)
    for _ in range(200):
        d = rng.uniform(0, 3)
        r = rng.uniform(0.1, 2)
        dim = int(rng.integers(1, 5))
        R = rng.uniform(0.1, 3)
        whole = ball_annulus_intersection(d, r, 0.0, R, dim)
        assert whole == pytest.approx(ball_ball_intersection(d, r, R, dim), abs=1e-15, rel=1e-13)


def test_annulus_examples():
    # ball entirely inside the inner hole
    assert ball_annulus_intersection(0.0, 0.5, 1.0, 2.0, 2) == 0.0
    # interval arithmetic: [-2,2] minus [-1,1]
    assert ball_annulus_intersection(0.0, 2.0, 1.0, math.inf, 1) == pytest.approx(2.0, rel=1e-13)
    # [-0.5,1.5] minus [-1,1]
    assert ball_annulus_intersection(0.5, 1.0, 1.0, math.inf, 1) == pytest.approx(0.5, rel=1e-13)


def test_annulus_infinite_outer_vs_complement():
    rng = np.random.default_rng(10)
    for _ in range(100):
        d = rng.uniform(0, 3)
        r = rng.uniform(0.1, 2)
        a = rng.uniform(0, 2)
        dim = int(rng.integers(1, 5))
        got = ball_annulus_intersection(d, r, a, math.inf, dim)
        expected = unit_ball_volume(dim) * r**dim - ball_ball_intersection(d, r, a, dim)
        assert got == pytest.approx(expected, abs=1e-14, rel=1e-12)


def test_cap_routes_cross_validate():
    # incomplete-beta cap against direct quadrature of the slice profile;
    # the beta route takes x = h(2r-h)/r^2, the quadrature route takes h
    rng = np.random.default_rng(11)
    for _ in range(60):
        r = rng.uniform(0.2, 2.0)
        h = rng.uniform(0.0, 1.0) * r  # half-cap heights
        dim = int(rng.integers(1, 8))
        beta_route = _half_cap(r, h * (2.0 * r - h) / (r * r), dim)
        quad_route = _cap_volume_reference(r, h, dim)
        assert float(beta_route) == pytest.approx(quad_route, abs=1e-15, rel=1e-10)


def test_near_tangency_stays_accurate():
    # at separation r1 + r2 - eps the lens is tiny; the factored cap-height
    # formula must keep relative accuracy while a naive one cancels
    r1, r2 = 1.0, 0.7
    previous = math.inf
    for eps in (1e-6, 1e-8, 1e-10, 1e-13):
        d = r1 + r2 - eps
        lens = ball_ball_intersection(d, r1, r2, 3)
        assert lens > 0.0
        assert lens < previous
        previous = lens
        # reference by direct quadrature of both caps
        h1 = (r2 - d + r1) * (r2 + d - r1) / (2.0 * d)
        h2 = (r1 - d + r2) * (r1 + d - r2) / (2.0 * d)
        ref = _cap_volume_reference(r1, h1, 3) + _cap_volume_reference(r2, h2, 3)
        assert lens == pytest.approx(ref, rel=1e-8)


def test_negative_inputs_rejected():
    with pytest.raises(ValueError):
        ball_ball_intersection(-0.1, 1.0, 1.0, 2)
    with pytest.raises(ValueError):
        ball_ball_intersection(1.0, -1.0, 1.0, 2)
    with pytest.raises(ValueError):
        ball_annulus_intersection(1.0, 1.0, 2.0, 1.0, 2)  # a_inner >= a_outer


@settings(max_examples=200, deadline=None)
@given(
    d=st.floats(0.0, 4.0),
    r1=st.floats(0.01, 2.0),
    r2=st.floats(0.01, 2.0),
    dim=st.integers(1, 6),
)
def test_volume_bounds_property(d, r1, r2, dim):
    v = ball_ball_intersection(d, r1, r2, dim)
    rmin = min(r1, r2)
    assert 0.0 <= v <= unit_ball_volume(dim) * rmin**dim * (1.0 + 1e-12)
