"""Volumes of N-dimensional balls and their intersections with balls and annuli.

All level-set fiber computations in this package reduce to the volume of
``B(x, r) ∩ {annulus}`` for centers at distance d from the origin, so these
primitives carry the precision budget of everything downstream. The main path
goes through the regularized incomplete beta function; a direct quadrature of
the cap profile ``(1 - s^2)^((N-1)/2)`` is kept as an independent second route
and the two are checked against each other in the test suite.

Arguments broadcast like numpy ufuncs; scalars in give floats out.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import betainc

from .quadrature import adaptive_quadrature

__all__ = [
    "MAX_DIMENSION",
    "unit_ball_volume",
    "ball_ball_intersection",
    "ball_annulus_intersection",
]

MAX_DIMENSION = 10


def _validated_dim(dim) -> int:
    if not isinstance(dim, (int, np.integer)):
        raise ValueError(f"dimension must be an integer, got {dim!r}")
    dim = int(dim)
    if not 1 <= dim <= MAX_DIMENSION:
        raise ValueError(f"dimension must lie in [1, {MAX_DIMENSION}], got {dim}")
    return dim


def unit_ball_volume(dim: int) -> float:
    """Volume of the unit ball in R^dim: pi^(dim/2) / Gamma(dim/2 + 1)."""
    dim = _validated_dim(dim)
    return math.pi ** (dim / 2.0) / math.gamma(dim / 2.0 + 1.0)


def _half_cap(r, height_x, dim: int):
    """Cap volume for nonnegative signed height, from x = 1 - (a/r)^2 in [0, 1].

    V = (omega_N / 2) r^N I_x((N+1)/2, 1/2). The caller supplies x in factored
    form so near-degenerate caps keep relative accuracy.
    """
    omega = unit_ball_volume(dim)
    return 0.5 * omega * r**dim * betainc(0.5 * (dim + 1), 0.5, np.clip(height_x, 0.0, 1.0))


def _check_nonneg(name, value):
    arr = np.asarray(value, dtype=float)
    if arr.size and (np.any(arr < 0) or not np.all(np.isfinite(arr))):
        raise ValueError(f"{name} must be nonnegative and finite")
    return arr


def ball_ball_intersection(d, r1, r2, dim: int):
    """|B(0, r1) ∩ B(c, r2)| in R^dim for centers at distance d = |c|.

    Disjoint and containment cases return the exact closed forms; the lens case
    is the sum of two spherical caps.
    """
    dim = _validated_dim(dim)
    d = _check_nonneg("center distance", d)
    r1 = _check_nonneg("radius", r1)
    r2 = _check_nonneg("radius", r2)
    scalar = d.ndim == 0 and np.ndim(r1) == 0 and np.ndim(r2) == 0
    d, r1, r2 = np.broadcast_arrays(d, r1, r2)

    omega = unit_ball_volume(dim)
    rmin = np.minimum(r1, r2)
    contained = d + rmin <= np.maximum(r1, r2)
    disjoint = d >= r1 + r2
    lens = ~(contained | disjoint)

    out = np.where(contained, omega * rmin**dim, 0.0)
    if np.any(lens):
        dl, r1l, r2l = d[lens], r1[lens], r2[lens]
        # h_i = r_i - a_i where a_i is the signed distance from center i to the
        # chordal hyperplane; the factored products avoid cancellation near
        # tangency. In the lens branch d > 0 and both factors are positive.
        h1 = (r2l - dl + r1l) * (r2l + dl - r1l) / (2.0 * dl)
        h2 = (r1l - dl + r2l) * (r1l + dl - r2l) / (2.0 * dl)
        x1 = h1 * (2.0 * r1l - h1) / (r1l * r1l)
        x2 = h2 * (2.0 * r2l - h2) / (r2l * r2l)
        cap1 = _half_cap(r1l, x1, dim)
        cap2 = _half_cap(r2l, x2, dim)
        # h > r means the hyperplane sits past the center: cap is the larger piece.
        cap1 = np.where(h1 > r1l, omega * r1l**dim - cap1, cap1)
        cap2 = np.where(h2 > r2l, omega * r2l**dim - cap2, cap2)
        # rounding in (r2 + d - r1) can push the sum past the smaller ball when
        # d is tiny against nearly equal radii; the containment bound is exact
        out[lens] = np.minimum(cap1 + cap2, omega * rmin[lens] ** dim)

    if scalar:
        return float(out)
    return out


def ball_annulus_intersection(d, r, a_inner, a_outer, dim: int):
    """|B(c, r) ∩ {a_inner <= |y| < a_outer}| for |c| = d; a_outer may be inf."""
    dim = _validated_dim(dim)
    a_inner = float(a_inner)
    a_outer = float(a_outer)
    if a_inner < 0 or not a_inner < a_outer:
        raise ValueError("annulus needs 0 <= a_inner < a_outer")
    inner = ball_ball_intersection(d, a_inner, r, dim) if a_inner > 0 else 0.0
    if math.isinf(a_outer):
        omega = unit_ball_volume(dim)
        r_arr = np.asarray(r, dtype=float)
        whole = omega * r_arr**dim
        result = whole - inner
    else:
        result = ball_ball_intersection(d, a_outer, r, dim) - inner
    result = np.maximum(result, 0.0)
    if np.ndim(d) == 0 and np.ndim(r) == 0:
        return float(result)
    return result


def _cap_volume_reference(r: float, height: float, dim: int) -> float:
    """Second route for the cap volume, by quadrature of the profile.

    ``height`` is the cap height h in [0, 2r]; the cap is the slab
    {y in B(0, r): y_1 >= r - h}. Used to cross-validate the betainc path.
    """
    dim = _validated_dim(dim)
    r = float(r)
    height = float(height)
    if r < 0 or not 0 <= height <= 2 * r + 1e-12 * r:
        raise ValueError("cap height must lie in [0, 2r]")
    if r == 0:
        return 0.0
    slice_omega = math.pi ** ((dim - 1) / 2.0) / math.gamma((dim - 1) / 2.0 + 1.0)
    s0 = max(-1.0, min(1.0, (r - height) / r))

    def profile(s):
        return (1.0 - s * s) ** (0.5 * (dim - 1))

    integral = adaptive_quadrature(profile, s0, 1.0, rel_tol=1e-13, abs_tol=1e-300)
    return slice_omega * r**dim * integral.value
