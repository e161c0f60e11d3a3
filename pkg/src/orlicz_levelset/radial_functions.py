"""Radial test functions and their Orlicz modulars.

Every function here is radial, u(x) = profile(|x|), which is what makes the
level-set estimators tractable: sampling and outer-term quadrature only ever
touch the profile. Three concrete shapes ship:

* ``PiecewiseConstantRadial``: constant on half-open annuli [r_{i-1}, r_i),
  zero outside the last edge. The exact estimator works on these.
* ``RadialProfile``: arbitrary profile callable with finite support (an
  infinite support_radius is representable but the modular refuses it, since
  a certified tail bound needs decay structure a bare callable does not have).
* ``Gaussian``: amplitude * exp(-(r/width)^2), optionally restricted to
  r >= inner_radius so truncation tails stay in the family. Carries certified
  closed-form tail bounds through the incomplete gamma function.

``modular(u, phi)`` evaluates integral Phi(|u|) dx over R^N with certified
relative error; ``truncate`` splits u at a radius into inside + tail pieces
that sum pointwise to u.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Union

import numpy as np
from scipy.special import gammaincc

from .geometry import MAX_DIMENSION, unit_ball_volume
from .quadrature import adaptive_quadrature
from .young import YoungFunction

__all__ = [
    "PiecewiseConstantRadial",
    "RadialProfile",
    "Gaussian",
    "TestFunction",
    "TruncationPair",
    "indicator",
    "truncate",
    "modular",
]


def _check_dim(dim) -> int:
    if not isinstance(dim, (int, np.integer)) or not 1 <= int(dim) <= MAX_DIMENSION:
        raise ValueError(f"dimension must be an integer in [1, {MAX_DIMENSION}], got {dim!r}")
    return int(dim)


class _RadialBase:
    """Shared point evaluation; subclasses provide ``profile`` and ``dim``."""

    def evaluate(self, x) -> float:
        arr = np.atleast_1d(np.asarray(x, dtype=float))
        if arr.shape != (self.dim,):
            raise ValueError(
                f"point has shape {arr.shape}, expected ({self.dim},) for dimension {self.dim}"
            )
        if not np.all(np.isfinite(arr)):
            raise ValueError("point coordinates must be finite")
        return float(self.profile(float(np.linalg.norm(arr))))

    __call__ = evaluate


@dataclass(frozen=True)
class PiecewiseConstantRadial(_RadialBase):
    """u = c_i on the annulus r_{i-1} <= |x| < r_i (with r_0 = 0), else 0."""

    radii: tuple
    values: tuple
    dim: int

    def __post_init__(self):
        object.__setattr__(self, "radii", tuple(float(r) for r in self.radii))
        object.__setattr__(self, "values", tuple(float(c) for c in self.values))
        object.__setattr__(self, "dim", _check_dim(self.dim))
        if len(self.radii) == 0 or len(self.radii) != len(self.values):
            raise ValueError("need one value per annulus edge")
        edges = np.array(self.radii)
        if edges[0] <= 0 or np.any(np.diff(edges) <= 0) or not np.all(np.isfinite(edges)):
            raise ValueError("annulus edges must be positive, finite, strictly increasing")
        if not all(math.isfinite(c) for c in self.values):
            raise ValueError("annulus values must be finite")

    @property
    def support_radius(self) -> float:
        return self.radii[-1]

    def profile(self, r):
        edges = np.concatenate([[0.0], np.asarray(self.radii)])
        lookup = np.concatenate([np.asarray(self.values), [0.0]])
        r_arr = np.asarray(r, dtype=float)
        idx = np.searchsorted(edges, r_arr, side="right") - 1
        out = lookup[np.clip(idx, 0, len(self.values))]
        if np.ndim(r) == 0:
            return float(out)
        return out

    def scaled(self, gamma: float) -> "PiecewiseConstantRadial":
        return PiecewiseConstantRadial(
            self.radii, tuple(gamma * c for c in self.values), self.dim
        )


def indicator(radius: float, value: float, dim: int) -> PiecewiseConstantRadial:
    """value * (indicator of the ball of the given radius): the one-piece case."""
    return PiecewiseConstantRadial((radius,), (value,), dim)


@dataclass(frozen=True)
class RadialProfile(_RadialBase):
    """u(x) = profile_fn(|x|) for |x| < support_radius, zero beyond.

    ``breakpoints`` lists known kink radii, forwarded to the quadratures.
    """

    profile_fn: Callable
    support_radius: float
    dim: int
    breakpoints: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "dim", _check_dim(self.dim))
        object.__setattr__(self, "support_radius", float(self.support_radius))
        object.__setattr__(
            self, "breakpoints", tuple(sorted(float(b) for b in self.breakpoints))
        )
        if not self.support_radius > 0:
            raise ValueError("support radius must be positive")

    def profile(self, r):
        r_arr = np.asarray(r, dtype=float)
        vals = np.asarray(self.profile_fn(r_arr), dtype=float)
        out = np.where(r_arr < self.support_radius, vals, 0.0)
        if np.ndim(r) == 0:
            return float(out)
        return out

    def scaled(self, gamma: float) -> "RadialProfile":
        fn = self.profile_fn
        return RadialProfile(
            lambda r: gamma * np.asarray(fn(r), dtype=float),
            self.support_radius,
            self.dim,
            self.breakpoints,
        )


@dataclass(frozen=True)
class Gaussian(_RadialBase):
    """u(x) = amplitude * exp(-(|x|/width)^2), restricted to |x| >= inner_radius.

    inner_radius = 0 is the plain Gaussian; positive values represent the tail
    left over after truncation, keeping certified tail bounds available.
    """

    amplitude: float
    width: float
    dim: int
    inner_radius: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "dim", _check_dim(self.dim))
        object.__setattr__(self, "amplitude", float(self.amplitude))
        object.__setattr__(self, "width", float(self.width))
        object.__setattr__(self, "inner_radius", float(self.inner_radius))
        if not (math.isfinite(self.amplitude) and self.width > 0 and self.inner_radius >= 0):
            raise ValueError("need finite amplitude, positive width, nonnegative inner radius")

    @property
    def support_radius(self) -> float:
        return math.inf

    def profile(self, r):
        r_arr = np.asarray(r, dtype=float)
        vals = self.amplitude * np.exp(-((r_arr / self.width) ** 2))
        out = np.where(r_arr >= self.inner_radius, vals, 0.0)
        if np.ndim(r) == 0:
            return float(out)
        return out

    def scaled(self, gamma: float) -> "Gaussian":
        return Gaussian(gamma * self.amplitude, self.width, self.dim, self.inner_radius)


TestFunction = Union[PiecewiseConstantRadial, RadialProfile, Gaussian]


class TruncationPair(NamedTuple):
    truncated: TestFunction  # u restricted to the open ball of the cut radius
    tail: TestFunction  # the remainder; truncated + tail == u pointwise


def truncate(u: TestFunction, radius: float) -> TruncationPair:
    """Split u at |x| = radius into (u * chi_ball, u * chi_complement)."""
    radius = float(radius)
    if not (radius > 0 and math.isfinite(radius)):
        raise ValueError("truncation radius must be positive and finite")

    if isinstance(u, PiecewiseConstantRadial):
        if radius >= u.support_radius:
            return TruncationPair(u, indicator(radius, 0.0, u.dim))
        inner_r, inner_c, outer_r, outer_c = [], [], [radius], [0.0]
        for r_out, c in zip(u.radii, u.values):
            if r_out <= radius:
                inner_r.append(r_out)
                inner_c.append(c)
            else:
                if not inner_r or inner_r[-1] < radius:
                    # the cut lands inside this annulus: split it
                    inner_r.append(radius)
                    inner_c.append(c)
                outer_r.append(r_out)
                outer_c.append(c)
        if inner_r[-1] < radius:
            inner_r.append(radius)
            inner_c.append(0.0)
        if len(outer_r) == 1:
            tail: TestFunction = indicator(radius, 0.0, u.dim)
        else:
            tail = PiecewiseConstantRadial(tuple(outer_r), tuple(outer_c), u.dim)
        return TruncationPair(
            PiecewiseConstantRadial(tuple(inner_r), tuple(inner_c), u.dim), tail
        )

    if isinstance(u, Gaussian):
        cut = max(radius, u.inner_radius)
        prof = u.profile
        inside = RadialProfile(
            prof, radius, u.dim, breakpoints=(u.inner_radius,) if u.inner_radius > 0 else ()
        )
        return TruncationPair(inside, Gaussian(u.amplitude, u.width, u.dim, cut))

    if isinstance(u, RadialProfile):
        if radius >= u.support_radius:
            return TruncationPair(u, indicator(radius, 0.0, u.dim))
        prof = u.profile
        inside = RadialProfile(prof, radius, u.dim, breakpoints=u.breakpoints)

        def tail_fn(r, _prof=prof, _cut=radius):
            r_arr = np.asarray(r, dtype=float)
            return np.where(r_arr >= _cut, np.asarray(_prof(r_arr), dtype=float), 0.0)

        tail = RadialProfile(
            tail_fn, u.support_radius, u.dim, breakpoints=u.breakpoints + (radius,)
        )
        return TruncationPair(inside, tail)

    raise TypeError(f"not a known test function: {type(u).__name__}")


def _gaussian_radial_mass(u: Gaussian, beyond: float) -> float:
    """integral over |x| > beyond of |u| dx, exactly, via the incomplete gamma."""
    dim = u.dim
    omega = unit_ball_volume(dim)
    z = (beyond / u.width) ** 2
    return (
        abs(u.amplitude)
        * dim
        * omega
        * (u.width**dim / 2.0)
        * math.gamma(dim / 2.0)
        * float(gammaincc(dim / 2.0, z))
    )


def _gaussian_tail_bound(u: Gaussian, phi: YoungFunction, beyond: float) -> float:
    """Upper bound on integral over |x| > beyond of Phi(|u|) dx.

    |u| <= z0 := |u(beyond)| out there, and convexity with Phi(0) = 0 gives
    Phi(z) <= (z / z0) Phi(z0), so the bound is Phi(z0)/z0 times the radial
    mass of |u| beyond the cutoff.
    """
    z0 = abs(u.profile(beyond)) if beyond >= u.inner_radius else abs(u.amplitude)
    if z0 == 0.0:
        return 0.0
    return phi(z0) / z0 * _gaussian_radial_mass(u, beyond)


def _radial_modular_integral(
    profile, phi: YoungFunction, dim: int, lo: float, hi: float, breakpoints, rel_tol: float
) -> float:
    omega = unit_ball_volume(dim)

    def integrand(r):
        return phi(np.abs(np.asarray(profile(r), dtype=float))) * r ** (dim - 1)

    result = adaptive_quadrature(
        integrand, lo, hi, rel_tol=rel_tol, abs_tol=0.0, breakpoints=breakpoints
    )
    return dim * omega * result.value


def modular(u: TestFunction, phi: YoungFunction, rel_tol: float = 1e-10) -> float:
    """integral over R^N of Phi(|u(x)|) dx, with relative error <= rel_tol.

    Piecewise-constant functions get the exact closed form; finite-support
    profiles are integrated radially; Gaussians add a certified tail bound and
    grow the quadrature window until the tail is below rel_tol/2 of the value.
    """
    if not (0 < rel_tol < 1):
        raise ValueError("rel_tol must lie in (0, 1)")

    if isinstance(u, PiecewiseConstantRadial):
        omega = unit_ball_volume(u.dim)
        edges = (0.0,) + u.radii
        return math.fsum(
            phi(abs(c)) * omega * (ro**u.dim - ri**u.dim)
            for c, ri, ro in zip(u.values, edges[:-1], edges[1:])
        )

    if isinstance(u, RadialProfile):
        if math.isinf(u.support_radius):
            raise ValueError(
                "modular of an infinite-support RadialProfile is not supported: "
                "no certified tail bound exists for an arbitrary profile; "
                "use the Gaussian variant or a finite support radius"
            )
        return _radial_modular_integral(
            u.profile, phi, u.dim, 0.0, u.support_radius, u.breakpoints, rel_tol
        )

    if isinstance(u, Gaussian):
        if u.amplitude == 0.0:
            return 0.0
        window = max(6.0 * u.width, u.inner_radius + 6.0 * u.width)
        for _ in range(64):
            value = _radial_modular_integral(
                u.profile, phi, u.dim, u.inner_radius, window, (), rel_tol / 2.0
            )
            tail = _gaussian_tail_bound(u, phi, window)
            if tail <= 0.5 * rel_tol * value or (value == 0.0 and tail == 0.0):
                return value
            window *= 1.5
        raise RuntimeError("gaussian modular window failed to capture the tail")

    raise TypeError(f"not a known test function: {type(u).__name__}")
