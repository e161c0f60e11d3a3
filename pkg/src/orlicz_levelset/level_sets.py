"""Estimators for the 2N-dimensional measure of difference-quotient level sets.

For a radial u on R^N, a Young function Phi and a threshold t > 0, the target
set is

    E_t = {(x, y) : x != y,  Phi(|u(x) - u(y)|) / |x - y|^N  >=  Phi(t)},

whose measure weighted by Phi(t) approximates twice the unit-ball volume times
the modular of u as t -> 0+. Three routes to |E_t| ship:

* ``exact_piecewise``: for piecewise-constant-radial u, reduces the 2N-fold
  integral to radial quadratures of exact ball-annulus volumes. No sampling.
* ``semi_analytic_compact``: for compactly supported u. Pairs with one point
  outside the support are integrated exactly (the fiber over x is the part of
  the ball B(x, rho(x)) beyond the support ball); pairs inside go to plain
  uniform Monte Carlo over B_S x B_S.
* ``monte_carlo_full``: same outer term, but the inner part is stratified over
  annulus pairs when u is piecewise; for unbounded u everything refers to the
  truncation u * chi_{B_S} and a certified bias bound for the discarded tail
  is attached.

Monte Carlo results are deterministic functions of (seed, samples,
stratification): every stratum is cut into fixed-size chunks, each chunk gets
its own SeedSequence-derived stream, and chunk hit counts are integers, so the
reduction is independent of worker count and scheduling order.

The critical radius rho = (Phi(|u|) / Phi(t))^(1/N) is evaluated in log space
to survive extreme Phi ratios.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .geometry import ball_annulus_intersection, unit_ball_volume
from .quadrature import adaptive_quadrature
from .radial_functions import (
    Gaussian,
    PiecewiseConstantRadial,
    RadialProfile,
    TestFunction,
    modular,
    truncate,
)
from .young import Power, YoungFunction

__all__ = [
    "MeasureEstimate",
    "exact_piecewise",
    "semi_analytic_compact",
    "monte_carlo_full",
    "phi_weighted",
    "direct_power_weighted",
    "indicator_closed_form",
    "ESTIMATOR_METHODS",
]

ESTIMATOR_METHODS = ("exact_piecewise", "semi_analytic_compact", "monte_carlo_full")

_CHUNK = 1 << 17
_MIN_MC_SAMPLES = 10_000


@dataclass(frozen=True)
class MeasureEstimate:
    """One estimate of |E_t| (or of Phi(t)|E_t| after weighting).

    ``std_error`` covers only the sampled part (zero for exact routes);
    ``bias_bound`` is a certified bound on truncation bias, zero when nothing
    was truncated. ``flags`` carries non-fatal warnings.
    """

    value: float
    std_error: float
    bias_bound: float
    method: str
    sample_count: int = 0
    flags: tuple = ()


# --- comparison strategies -------------------------------------------------
#
# Every estimator needs two things derived from (Phi, t): a hit test for
# sampled pairs and a critical-radius map for the outer term. Bundling them
# lets the power-law specialization reuse the identical sampling code with
# direct p-power arithmetic, which is what makes the dual-route agreement
# check meaningful.


@dataclass(frozen=True)
class _Comparator:
    hit: Callable  # (|u(x)-u(y)| array, |x-y| array) -> bool array
    fiber_radius: Callable  # |u| array -> rho array
    fiber_radius_scalar: Callable  # float delta -> float rho
    weight: float  # Phi(t), the scale applied by the weighted wrappers
    bias_phi: YoungFunction  # Young function for truncation-bias modulars


def _validated_threshold(t: float) -> float:
    t = float(t)
    if not (t > 0 and math.isfinite(t)):
        raise ValueError(f"threshold must be positive and finite, got {t}")
    return t


def _orlicz_comparator(phi: YoungFunction, t: float, dim: int) -> _Comparator:
    t = _validated_threshold(t)
    phi_t = phi(t)
    if not (phi_t > 0 and math.isfinite(phi_t)):
        raise ValueError(f"Phi(t) must be positive and finite, got Phi({t}) = {phi_t}")
    log_phi_t = math.log(phi_t)

    def hit(du, dist):
        return phi(du) >= phi_t * dist**dim

    def fiber_radius(vals):
        with np.errstate(divide="ignore"):
            log_phi = np.log(phi(vals))
        return np.exp((log_phi - log_phi_t) / dim)

    def fiber_radius_scalar(delta):
        return math.exp((math.log(phi(delta)) - log_phi_t) / dim)

    return _Comparator(hit, fiber_radius, fiber_radius_scalar, phi_t, phi)


def _power_comparator(p: float, t: float, dim: int) -> _Comparator:
    # Direct |du|^p >= t^p |x-y|^N arithmetic. The threshold goes through the
    # same numpy ufunc as Power.__call__ so hit tests agree bit for bit with
    # the Orlicz route under shared samples.
    if not (np.isfinite(p) and p >= 1):
        raise ValueError(f"power exponent must satisfy p >= 1, got {p}")
    t = _validated_threshold(t)
    t_pow = float(np.power(np.asarray(t, dtype=float), p))

    def hit(du, dist):
        return np.power(du, p) >= t_pow * dist**dim

    def fiber_radius(vals):
        return np.power(vals / t, p / dim)

    def fiber_radius_scalar(delta):
        return float(np.power(delta / t, p / dim))

    return _Comparator(hit, fiber_radius, fiber_radius_scalar, t_pow, Power(p))


# --- exact route for piecewise-constant u ----------------------------------


def _pair_kinks(lo, hi, r, a_inner, a_outer):
    pts = {a_inner + r, abs(a_inner - r)}
    if math.isfinite(a_outer):
        pts |= {a_outer + r, abs(a_outer - r)}
    return tuple(p for p in pts if lo < p < hi)


def _exact_piecewise_value(
    u: PiecewiseConstantRadial, comparator: _Comparator, tol: float
) -> float:
    dim = u.dim
    omega = unit_ball_volume(dim)
    edges = (0.0,) + u.radii
    vals = u.values
    pieces = len(vals)
    terms = []
    for i in range(pieces):
        lo, hi = edges[i], edges[i + 1]
        for j in range(pieces + 1):  # j == pieces is the zero exterior
            other = 0.0 if j == pieces else vals[j]
            delta = abs(vals[i] - other)
            if delta == 0.0:
                continue
            radius = comparator.fiber_radius_scalar(delta)
            if not math.isfinite(radius):
                raise ValueError(
                    f"critical radius overflowed for value gap {delta}; threshold too small"
                )
            if radius == 0.0:
                continue
            if j == pieces:
                a_in, a_out = edges[pieces], math.inf
            else:
                a_in, a_out = edges[j], edges[j + 1]

            def integrand(s, _r=radius, _a=a_in, _b=a_out):
                return ball_annulus_intersection(s, _r, _a, _b, dim) * s ** (dim - 1)

            part = adaptive_quadrature(
                integrand,
                lo,
                hi,
                rel_tol=0.5 * tol,
                abs_tol=0.0,
                breakpoints=_pair_kinks(lo, hi, radius, a_in, a_out),
            )
            term = dim * omega * part.value
            # exterior pairs stand in for their mirror images (x outside the
            # support, y inside), which have the same measure by symmetry
            terms.append(2.0 * term if j == pieces else term)
    return math.fsum(terms)


# --- outer term (one point beyond the ball B_S) ----------------------------


def _outer_breakpoints(u: TestFunction) -> tuple:
    if isinstance(u, PiecewiseConstantRadial):
        return u.radii
    if isinstance(u, RadialProfile):
        return u.breakpoints
    if isinstance(u, Gaussian):
        return (u.inner_radius,) if u.inner_radius > 0 else ()
    return ()


def _outer_value(u: TestFunction, comparator: _Comparator, S: float, tol: float) -> float:
    """Measure of {(x, y): |x| < S <= |y|, hit} plus its mirror image.

    Beyond B_S the function vanishes, so the fiber over x is the part of the
    ball B(x, rho(x)) outside B_S, and the mirror set has equal measure.
    """
    dim = u.dim
    omega = unit_ball_volume(dim)

    def integrand(s):
        vals = np.abs(np.asarray(u.profile(s), dtype=float))
        rho = comparator.fiber_radius(vals)
        return ball_annulus_intersection(s, rho, S, math.inf, dim) * s ** (dim - 1)

    part = adaptive_quadrature(
        integrand,
        0.0,
        S,
        rel_tol=0.5 * tol,
        abs_tol=0.0,
        breakpoints=tuple(b for b in _outer_breakpoints(u) if 0.0 < b < S),
    )
    return 2.0 * dim * omega * part.value


# --- inner Monte Carlo -----------------------------------------------------


def _sample_radii(rng, r_in: float, r_out: float, dim: int, n: int) -> np.ndarray:
    # Inverse CDF of the radial law in an annulus: uniform in r^dim.
    w = rng.random(n)
    return ((1.0 - w) * r_in**dim + w * r_out**dim) ** (1.0 / dim)


def _sample_directions(rng, n: int, dim: int) -> np.ndarray:
    v = rng.standard_normal((n, dim))
    norms = np.linalg.norm(v, axis=1)
    norms[norms == 0.0] = 1.0
    return v / norms[:, None]


def _chunk_hits(profile, hit_fn, stratum, dim: int, n: int, seed_seq) -> int:
    rng = np.random.default_rng(seed_seq)
    (x_in, x_out), (y_in, y_out) = stratum
    rx = _sample_radii(rng, x_in, x_out, dim, n)
    ux = _sample_directions(rng, n, dim)
    ry = _sample_radii(rng, y_in, y_out, dim, n)
    uy = _sample_directions(rng, n, dim)
    dist = np.linalg.norm(rx[:, None] * ux - ry[:, None] * uy, axis=1)
    du = np.abs(np.asarray(profile(rx), dtype=float) - np.asarray(profile(ry), dtype=float))
    return int(np.count_nonzero(hit_fn(du, dist)))


def _inner_mc(
    u: TestFunction,
    comparator: _Comparator,
    strata: list,
    weights: list,
    samples: int,
    seed,
    workers: int,
) -> tuple[float, float, int]:
    if not strata:
        return 0.0, 0.0, 0
    if seed is None:
        raise ValueError("a seed is required for Monte Carlo estimation")
    seed = int(seed)
    if seed < 0:
        raise ValueError("seed must be nonnegative")
    if samples < 1:
        raise ValueError("need at least one Monte Carlo sample")
    workers = max(1, int(workers))

    total_weight = math.fsum(weights)
    alloc = [max(1, round(samples * w / total_weight)) for w in weights]
    tasks = []
    for si, n in enumerate(alloc):
        for chunk_start in range(0, n, _CHUNK):
            tasks.append((si, chunk_start // _CHUNK, min(_CHUNK, n - chunk_start)))

    def run(task):
        si, ci, m = task
        ss = np.random.SeedSequence(entropy=seed, spawn_key=(si, ci))
        return si, _chunk_hits(u.profile, comparator.hit, strata[si], u.dim, m, ss)

    hits = [0] * len(strata)
    if workers > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for si, h in pool.map(run, tasks):
                hits[si] += h
    else:
        for task in tasks:
            si, h = run(task)
            hits[si] += h

    value = math.fsum(w * h / n for w, h, n in zip(weights, hits, alloc))
    variance = math.fsum(
        w * w * (h / n) * (1.0 - h / n) / n for w, h, n in zip(weights, hits, alloc)
    )
    return value, math.sqrt(max(variance, 0.0)), sum(alloc)


def _single_stratum(S: float, dim: int) -> tuple[list, list]:
    ball_volume = unit_ball_volume(dim) * S**dim
    return [((0.0, S), (0.0, S))], [ball_volume * ball_volume]


def _piecewise_strata(u: PiecewiseConstantRadial, S: float) -> tuple[list, list]:
    """Unordered annulus pairs with differing values, weights 2 V_i V_j.

    Sampling unordered pairs once with doubled weight makes the estimate
    invariant under swapping the roles of the two strata, mirroring the
    symmetry of the underlying set. Same-value pairs cannot produce hits and
    are skipped deterministically.
    """
    edges = [0.0, *u.radii]
    values = list(u.values)
    if S > u.support_radius:
        edges.append(S)
        values.append(0.0)
    omega = unit_ball_volume(u.dim)
    volumes = [
        omega * (edges[k + 1] ** u.dim - edges[k] ** u.dim) for k in range(len(values))
    ]
    strata, weights = [], []
    for i in range(len(values)):
        for j in range(i + 1, len(values)):
            if values[i] == values[j]:
                continue
            strata.append(((edges[i], edges[i + 1]), (edges[j], edges[j + 1])))
            weights.append(2.0 * volumes[i] * volumes[j])
    return strata, weights


def _resolve_truncation(u: TestFunction, truncation_radius) -> float:
    support = u.support_radius
    if truncation_radius is None:
        if not math.isfinite(support):
            raise ValueError("truncation_radius is required for unbounded functions")
        return support
    S = float(truncation_radius)
    if not (S > 0 and math.isfinite(S)):
        raise ValueError("truncation radius must be positive and finite")
    if math.isfinite(support) and S < support:
        raise ValueError(f"truncation radius {S} lies inside the support (radius {support})")
    return S


# --- core dispatch shared by both comparison strategies --------------------


def _estimate(
    u: TestFunction,
    comparator: _Comparator,
    method: str,
    *,
    tol: float,
    mc_samples: int,
    seed,
    truncation_radius,
    workers: int,
) -> MeasureEstimate:
    if method == "exact_piecewise":
        if not isinstance(u, PiecewiseConstantRadial):
            raise ValueError(
                "exact_piecewise needs a piecewise-constant-radial function, "
                f"got {type(u).__name__}"
            )
        return MeasureEstimate(
            _exact_piecewise_value(u, comparator, tol), 0.0, 0.0, "exact_piecewise"
        )

    if method == "semi_analytic_compact":
        S = u.support_radius
        if not math.isfinite(S):
            raise ValueError("semi_analytic_compact needs a compactly supported function")
        outer = _outer_value(u, comparator, S, tol)
        strata, weights = _single_stratum(S, u.dim)
        inner, std_error, count = _inner_mc(
            u, comparator, strata, weights, int(mc_samples), seed, workers
        )
        return MeasureEstimate(outer + inner, std_error, 0.0, "semi_analytic_compact", count)

    if method == "monte_carlo_full":
        samples = int(mc_samples)
        if samples < _MIN_MC_SAMPLES:
            raise ValueError(f"monte_carlo_full needs at least {_MIN_MC_SAMPLES} samples")
        S = _resolve_truncation(u, truncation_radius)
        outer = _outer_value(u, comparator, S, tol)
        if isinstance(u, PiecewiseConstantRadial):
            strata, weights = _piecewise_strata(u, S)
        else:
            strata, weights = _single_stratum(S, u.dim)
        inner, std_error, count = _inner_mc(
            u, comparator, strata, weights, samples, seed, workers
        )
        value = outer + inner

        bias_bound = 0.0
        flags: tuple = ()
        if not math.isfinite(u.support_radius):
            tail_doubled = truncate(u, S).tail.scaled(2.0)
            bias_bound = (
                2.0
                * unit_ball_volume(u.dim)
                / comparator.weight
                * modular(tail_doubled, comparator.bias_phi, rel_tol=min(tol, 1e-10))
            )
            if bias_bound > tol * abs(value):
                flags = ("bias_bound_exceeds_tolerance",)
        return MeasureEstimate(value, std_error, bias_bound, "monte_carlo_full", count, flags)

    raise ValueError(f"unknown method {method!r}; expected one of {ESTIMATOR_METHODS}")


# --- public estimators -----------------------------------------------------


def exact_piecewise(
    u: TestFunction, phi: YoungFunction, t: float, *, tol: float = 1e-9
) -> MeasureEstimate:
    """|E_t| for piecewise-constant-radial u by exact fiber-volume quadrature."""
    comparator = _orlicz_comparator(phi, t, u.dim)
    return _estimate(
        u,
        comparator,
        "exact_piecewise",
        tol=tol,
        mc_samples=0,
        seed=None,
        truncation_radius=None,
        workers=1,
    )


def semi_analytic_compact(
    u: TestFunction,
    phi: YoungFunction,
    t: float,
    *,
    tol: float = 1e-9,
    mc_samples: int = 100_000,
    seed=None,
    workers: int = 1,
) -> MeasureEstimate:
    """|E_t| for compactly supported u: exact outer term, uniform MC inside.

    The quoted std_error covers only the inner Monte Carlo term.
    """
    comparator = _orlicz_comparator(phi, t, u.dim)
    return _estimate(
        u,
        comparator,
        "semi_analytic_compact",
        tol=tol,
        mc_samples=mc_samples,
        seed=seed,
        truncation_radius=None,
        workers=workers,
    )


def monte_carlo_full(
    u: TestFunction,
    phi: YoungFunction,
    t: float,
    *,
    truncation_radius: Optional[float] = None,
    samples: int = 100_000,
    seed=None,
    tol: float = 1e-9,
    workers: int = 1,
) -> MeasureEstimate:
    """|E_t| by stratified Monte Carlo on B_S x B_S plus the exact outer term.

    For unbounded u the value refers to the truncation u * chi_{B_S};
    ``bias_bound`` certifies the gap to the untruncated measure and a flag
    (not an error) is raised when it exceeds ``tol`` relative to the value.
    """
    comparator = _orlicz_comparator(phi, t, u.dim)
    return _estimate(
        u,
        comparator,
        "monte_carlo_full",
        tol=tol,
        mc_samples=samples,
        seed=seed,
        truncation_radius=truncation_radius,
        workers=workers,
    )


def indicator_closed_form(
    dim: int, radius: float, height: float, phi: YoungFunction, t: float
) -> tuple[Optional[float], bool]:
    """Closed form of Phi(t)|E_t| for u = height * chi_{B_radius}.

    When the critical radius rho = (Phi(height)/Phi(t))^(1/N) covers the
    doubled support, every hit pair has exactly one point inside the ball and
    the measure telescopes to

        2 omega^2 radius^N Phi(height)  -  2 Phi(t) omega^2 radius^(2N).

    Returns (value, True) in that regime and (None, False) otherwise; outside
    it the formula is wrong, so the value is withheld rather than reported.
    """
    omega = unit_ball_volume(dim)
    radius = float(radius)
    height = abs(float(height))
    if not (radius > 0 and math.isfinite(radius) and math.isfinite(height)):
        raise ValueError("need a positive finite radius and finite height")
    t = _validated_threshold(t)
    phi_t = phi(t)
    phi_c = phi(height)
    if phi_t <= 0:
        raise ValueError(f"Phi(t) must be positive, got {phi_t}")
    if phi_c == 0.0:
        return 0.0, True
    rho = math.exp((math.log(phi_c) - math.log(phi_t)) / dim)
    if rho < 2.0 * radius:
        return None, False
    value = (
        2.0 * omega**2 * radius**dim * phi_c
        - 2.0 * phi_t * omega**2 * radius ** (2 * dim)
    )
    return value, True


def phi_weighted(
    u: TestFunction,
    phi: YoungFunction,
    t: float,
    *,
    method: str = "exact_piecewise",
    tol: float = 1e-9,
    mc_samples: int = 100_000,
    seed=None,
    truncation_radius: Optional[float] = None,
    workers: int = 1,
) -> MeasureEstimate:
    """Phi(t) * |E_t| with value, std_error and bias_bound all scaled.

    This is the quantity whose t -> 0 limit is twice the unit-ball volume
    times the modular; in this weighting the truncation bias bound is
    constant in t.
    """
    comparator = _orlicz_comparator(phi, t, u.dim)
    estimate = _estimate(
        u,
        comparator,
        method,
        tol=tol,
        mc_samples=mc_samples,
        seed=seed,
        truncation_radius=truncation_radius,
        workers=workers,
    )
    return replace(
        estimate,
        value=comparator.weight * estimate.value,
        std_error=comparator.weight * estimate.std_error,
        bias_bound=comparator.weight * estimate.bias_bound,
    )


def direct_power_weighted(
    u: TestFunction,
    p: float,
    t: float,
    *,
    method: str = "exact_piecewise",
    tol: float = 1e-9,
    mc_samples: int = 100_000,
    seed=None,
    truncation_radius: Optional[float] = None,
    workers: int = 1,
) -> MeasureEstimate:
    """t^p * |E_t| for Phi(t) = t^p, computed with direct power arithmetic.

    An independent route around the Young-function machinery: the hit test is
    |du|^p >= t^p |x-y|^N and the critical radius is (|u|/t)^(p/N). Under a
    shared seed the sample points coincide with the Orlicz route's, so the
    two must agree to rounding; the verdict layer exploits that.
    """
    comparator = _power_comparator(p, t, u.dim)
    estimate = _estimate(
        u,
        comparator,
        method,
        tol=tol,
        mc_samples=mc_samples,
        seed=seed,
        truncation_radius=truncation_radius,
        workers=workers,
    )
    return replace(
        estimate,
        value=comparator.weight * estimate.value,
        std_error=comparator.weight * estimate.std_error,
        bias_bound=comparator.weight * estimate.bias_bound,
    )
