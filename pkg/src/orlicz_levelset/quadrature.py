"""Adaptive panel quadrature used by the volume and modular integrals.

One scheme for the whole package: split [a, b] into panels, apply a fixed
Gauss-Legendre pair (10 and 21 nodes) on each panel, use the difference of the
two rules as the panel error, and keep bisecting the worst panel until the
summed error meets ``max(abs_tol, rel_tol * |integral|)``. Known kinks can be
passed as ``breakpoints`` so the initial panels already respect them.

The integrand must accept a float ndarray and return one of the same shape.
"""

from __future__ import annotations

import heapq
import math
from typing import Callable, Iterable, NamedTuple

import numpy as np

__all__ = ["QuadratureResult", "QuadratureConvergenceError", "adaptive_quadrature"]

_NODES_LO, _WEIGHTS_LO = np.polynomial.legendre.leggauss(10)
_NODES_HI, _WEIGHTS_HI = np.polynomial.legendre.leggauss(21)
# Single vectorized call per panel: first 10 entries feed the low rule.
_NODES_ALL = np.concatenate([_NODES_LO, _NODES_HI])


class QuadratureResult(NamedTuple):
    value: float
    error: float
    panels: int


class QuadratureConvergenceError(RuntimeError):
    """Panel budget exhausted before the tolerance was met.

    Carries the partial value and its error estimate so callers can decide
    whether the partial answer is still usable.
    """

    def __init__(self, message: str, value: float, error: float):
        super().__init__(message)
        self.value = value
        self.error = error


def _eval_panel(f: Callable, lo: float, hi: float) -> tuple[float, float]:
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    ys = np.asarray(f(mid + half * _NODES_ALL), dtype=float)
    if ys.shape != _NODES_ALL.shape:
        raise ValueError("integrand must return an array matching its input shape")
    if not np.all(np.isfinite(ys)):
        raise ValueError(f"integrand returned non-finite values on [{lo}, {hi}]")
    coarse = half * float(_WEIGHTS_LO @ ys[:10])
    fine = half * float(_WEIGHTS_HI @ ys[10:])
    return fine, abs(fine - coarse)


def adaptive_quadrature(
    f: Callable,
    a: float,
    b: float,
    *,
    rel_tol: float = 1e-10,
    abs_tol: float = 0.0,
    breakpoints: Iterable[float] = (),
    max_panels: int = 1_000_000,
) -> QuadratureResult:
    """Integrate ``f`` over [a, b] to the requested tolerance.

    Raises QuadratureConvergenceError (carrying the partial value) if the
    panel budget runs out first.
    """
    a = float(a)
    b = float(b)
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError("integration endpoints must be finite")
    if rel_tol < 0 or abs_tol < 0:
        raise ValueError("tolerances must be nonnegative")
    if b <= a:
        if b == a:
            return QuadratureResult(0.0, 0.0, 0)
        raise ValueError("upper endpoint below lower endpoint")

    edges = sorted({a, b, *(float(p) for p in breakpoints if a < float(p) < b)})

    heap: list[tuple[float, int, float, float, float]] = []
    counter = 0
    total_value = 0.0
    total_error = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        value, err = _eval_panel(f, lo, hi)
        heapq.heappush(heap, (-err, counter, lo, hi, value))
        counter += 1
        total_value += value
        total_error += err

    # Panels narrower than a few ulps cannot be split further; park them.
    done: list[tuple[float, float, float, float]] = []

    while total_error > max(abs_tol, rel_tol * abs(total_value)):
        if not heap:
            break
        neg_err, _, lo, hi, value = heapq.heappop(heap)
        width_floor = 16 * np.finfo(float).eps * max(abs(lo), abs(hi), 1.0)
        if hi - lo <= width_floor:
            done.append((lo, hi, value, -neg_err))
            continue
        if counter + 2 > max_panels:
            heapq.heappush(heap, (neg_err, counter, lo, hi, value))
            value, error = _collect(heap, done)
            raise QuadratureConvergenceError(
                f"quadrature used {counter} panels without reaching tolerance "
                f"(value ~ {value}, error ~ {error})",
                value,
                error,
            )
        mid = 0.5 * (lo + hi)
        v1, e1 = _eval_panel(f, lo, mid)
        v2, e2 = _eval_panel(f, mid, hi)
        total_value += v1 + v2 - value
        total_error += e1 + e2 - (-neg_err)
        heapq.heappush(heap, (-e1, counter, lo, mid, v1))
        counter += 1
        heapq.heappush(heap, (-e2, counter, mid, hi, v2))
        counter += 1

    value, error = _collect(heap, done)
    if error > max(abs_tol, rel_tol * abs(value)):
        raise QuadratureConvergenceError(
            f"quadrature stalled on panels at the width floor (error ~ {error})",
            value,
            error,
        )
    return QuadratureResult(value, error, counter)


def _collect(heap, done) -> tuple[float, float]:
    # Accumulate in interval order so the result does not depend on heap layout.
    panels = [(lo, hi, v, -e) for e, _, lo, hi, v in heap]
    panels.extend(done)
    panels.sort()
    value = math.fsum(p[2] for p in panels)
    error = math.fsum(p[3] for p in panels)
    return value, error
