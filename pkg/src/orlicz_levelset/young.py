"""Young functions and their doubling constants.

A Young function here is a continuous convex Phi: [0, inf) -> [0, inf) with
Phi(0) = 0, nondecreasing, and (for every shipped family) strictly positive on
(0, inf). Positivity is a constructor obligation because the level-set
machinery divides by Phi values; a function vanishing on an interval (0, a]
would poison every critical-radius computation downstream.

The doubling constant is the least k with Phi(2t) <= k Phi(t) for all t > 0;
``delta2_constant`` estimates it as the maximum ratio over a log grid and
attaches the closed form where one is known. Convexity with Phi(0) = 0 forces
k >= 2, so the estimate is clamped there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

__all__ = [
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
]


class DegenerateYoungFunctionError(ValueError):
    """Phi vanished (or underflowed to zero) at a positive argument where a
    ratio needed Phi > 0."""


def _as_nonnegative_array(t):
    arr = np.asarray(t, dtype=float)
    if arr.size and (np.any(arr < 0) or not np.all(np.isfinite(arr))):
        raise ValueError("Young functions take nonnegative finite arguments")
    return arr


@dataclass(frozen=True)
class YoungFunction:
    """Base class; subclasses implement ``_values`` on a 1-d float array."""

    def __call__(self, t):
        arr = _as_nonnegative_array(t)
        if arr.ndim == 0:
            return float(self._values(arr.reshape(1))[0])
        return self._values(arr)

    def _values(self, t: np.ndarray) -> np.ndarray:  # pragma: no cover
        raise NotImplementedError

    @property
    def analytic_doubling(self) -> Optional[float]:
        return None

    @property
    def label(self) -> str:
        return type(self).__name__


@dataclass(frozen=True)
class Power(YoungFunction):
    """Phi(t) = t^p with p >= 1."""

    p: float

    def __post_init__(self):
        if not (np.isfinite(self.p) and self.p >= 1):
            raise ValueError(f"power exponent must satisfy p >= 1, got {self.p}")

    def _values(self, t):
        return np.power(t, self.p)

    @property
    def analytic_doubling(self):
        return 2.0**self.p

    @property
    def label(self):
        return f"power(p={self.p})"


@dataclass(frozen=True)
class PowerLog(YoungFunction):
    """Phi(t) = t^p log(1 + t) with p >= 1."""

    p: float

    def __post_init__(self):
        if not (np.isfinite(self.p) and self.p >= 1):
            raise ValueError(f"power exponent must satisfy p >= 1, got {self.p}")

    def _values(self, t):
        return np.power(t, self.p) * np.log1p(t)

    @property
    def analytic_doubling(self):
        # ratio = 2^p log(1+2t)/log(1+t) decreases from 2^(p+1) (t -> 0) to 2^p.
        return 2.0 ** (self.p + 1)

    @property
    def label(self):
        return f"power_log(p={self.p})"


# Series coefficients for (1+t)log(1+t) - t = sum_{k>=2} (-1)^k t^k / (k(k-1)).
_LLOGL_SERIES_ORDER = 60
_LLOGL_COEFFS = np.array(
    [(-1.0) ** k / (k * (k - 1)) for k in range(_LLOGL_SERIES_ORDER, 1, -1)]
)


@dataclass(frozen=True)
class LLogL(YoungFunction):
    """Phi(t) = (1 + t) log(1 + t) - t, the L log L integrand.

    Behaves like t^2/2 near zero; the closed form loses all precision there by
    cancellation, so small arguments go through the alternating series.
    """

    def _values(self, t):
        out = np.empty_like(t)
        small = t < 0.5
        ts = t[small]
        # Horner on the tail of the series, then the leading t^2 factor.
        acc = np.zeros_like(ts)
        for c in _LLOGL_COEFFS:
            acc = acc * ts + c
        out[small] = acc * ts * ts
        tb = t[~small]
        out[~small] = (1.0 + tb) * np.log1p(tb) - tb
        return out

    @property
    def analytic_doubling(self):
        # Phi(2t)/Phi(t) decreases from 4 (the t -> 0 limit, where Phi ~ t^2/2) to 2.
        return 4.0

    @property
    def label(self):
        return "llogl"


@dataclass(frozen=True)
class PiecewiseLinearConvex(YoungFunction):
    """Piecewise linear interpolant through (t_i, Phi_i), extended with the
    final slope beyond the last node.

    The constructor enforces shape (nodes from the origin, strictly increasing
    abscissas, positive values past the origin) but deliberately not convexity
    or monotonicity: ``certify_young`` exists to report on those, including for
    intentionally broken inputs.
    """

    breakpoints: tuple

    def __post_init__(self):
        pts = tuple((float(a), float(b)) for a, b in self.breakpoints)
        object.__setattr__(self, "breakpoints", pts)
        if len(pts) < 2:
            raise ValueError("need at least the origin and one more node")
        ts = np.array([a for a, _ in pts])
        vs = np.array([b for _, b in pts])
        if ts[0] != 0.0 or vs[0] != 0.0:
            raise ValueError("first node must be (0, 0)")
        if np.any(np.diff(ts) <= 0):
            raise ValueError("node abscissas must be strictly increasing")
        if not np.all(np.isfinite(vs)):
            raise ValueError("node values must be finite")
        if np.any(vs[1:] <= 0.0):
            raise ValueError(
                "node values past the origin must be positive; a Young function "
                "vanishing on an interval is not supported"
            )

    def _nodes(self):
        ts = np.array([a for a, _ in self.breakpoints])
        vs = np.array([b for _, b in self.breakpoints])
        return ts, vs

    def _values(self, t):
        ts, vs = self._nodes()
        out = np.interp(t, ts, vs)
        beyond = t > ts[-1]
        if np.any(beyond):
            slope = (vs[-1] - vs[-2]) / (ts[-1] - ts[-2])
            out[beyond] = vs[-1] + slope * (t[beyond] - ts[-1])
        return out

    @property
    def label(self):
        return f"piecewise_linear({len(self.breakpoints)} nodes)"


def default_delta2_grid() -> np.ndarray:
    """400 log-spaced points on [1e-9, 1e9]."""
    return np.geomspace(1e-9, 1e9, 400)


@dataclass(frozen=True)
class Delta2Estimate:
    estimate: float
    analytic: Optional[float]


def delta2_constant(phi: YoungFunction, grid=None) -> Delta2Estimate:
    """Estimate the doubling constant as max Phi(2t)/Phi(t) over a log grid.

    The grid must span at least [1e-6, 1e6] so both asymptotic regimes are
    seen. The estimate never exceeds the true constant and is clamped below
    at the universal floor of 2.
    """
    if grid is None:
        grid = default_delta2_grid()
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0 or np.any(grid <= 0) or not np.all(np.isfinite(grid)):
        raise ValueError("delta2 grid must be nonempty with positive finite entries")
    if grid.min() > 1e-6 or grid.max() < 1e6:
        raise ValueError("delta2 grid must span at least [1e-6, 1e6]")
    vals = phi(grid)
    if np.any(vals == 0.0):
        bad = float(grid[vals == 0.0][0])
        raise DegenerateYoungFunctionError(
            f"Phi({bad!r}) evaluated to zero; doubling ratio undefined there"
        )
    ratio = phi(2.0 * grid) / vals
    return Delta2Estimate(max(float(np.max(ratio)), 2.0), phi.analytic_doubling)


@dataclass(frozen=True)
class YoungReport:
    zero_at_origin: bool
    monotone: bool
    midpoint_convex: bool


def certify_young(phi: YoungFunction, grid=None, rel_tol: float = 1e-12) -> YoungReport:
    """Check the Young-function axioms on a grid, to relative tolerance.

    Midpoint convexity is tested on every pair of grid points; with the
    default 200-point grid that is 2e4 midpoint evaluations, all vectorized.
    """
    if grid is None:
        grid = np.geomspace(1e-9, 1e9, 200)
    grid = np.asarray(grid, dtype=float)
    if np.any(np.diff(grid) < 0) or np.any(grid < 0):
        raise ValueError("certification grid must be sorted and nonnegative")

    zero_at_origin = abs(phi(0.0)) <= 1e-12

    vals = phi(grid)
    scale = np.maximum(np.abs(vals[:-1]), np.abs(vals[1:]))
    monotone = bool(np.all(vals[1:] - vals[:-1] >= -rel_tol * scale))

    left, right = np.meshgrid(grid, grid, indexing="ij")
    keep = left < right
    a, b = left[keep], right[keep]
    mid_vals = phi(0.5 * (a + b))
    chord = 0.5 * (phi(a) + phi(b))
    midpoint_convex = bool(np.all(mid_vals <= chord * (1.0 + rel_tol) + 1e-300))

    return YoungReport(zero_at_origin, monotone, midpoint_convex)


def phi_inverse(phi: YoungFunction, target: float, bracket=(1e-30, 1e30)) -> float:
    """Least t with Phi(t) >= target, found by bisection on the monotone Phi.

    Useful for picking sweep thresholds that land a prescribed Phi(t) value,
    e.g. a grid point whose bracket width is a given fraction of the limit.
    """
    target = float(target)
    if not (target > 0 and math.isfinite(target)):
        raise ValueError(f"inverse target must be positive and finite, got {target}")
    lo, hi = (float(b) for b in bracket)
    if not (0 < lo < hi):
        raise ValueError("bracket must satisfy 0 < lo < hi")
    if phi(lo) >= target:
        return lo
    if phi(hi) < target:
        raise ValueError(f"Phi({hi}) = {phi(hi)} < {target}: target not bracketed")
    for _ in range(200):
        mid = math.sqrt(lo * hi)
        if phi(mid) >= target:
            hi = mid
        else:
            lo = mid
    return hi
