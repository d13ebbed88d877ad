"""Adaptive quadrature helpers for expectations against catalog marginals.

Bounded supports integrate in probability space (u = cdf) with QUADPACK.
Unbounded supports split into a probability-space bulk plus a dyadic
interval-doubling sweep of the far tail in natural space, which is where
divergence detection lives: partial sums that blow up, or segment
contributions that refuse to decay geometrically, flag the integral as
divergent (returned as ``inf``).
"""

import math

import numpy as np
from scipy import integrate

from .errors import QuadratureError

__all__ = ["unit_quad", "dyadic_tail_integral", "expectation", "partial_expectation"]

# Partial sums past this are reported divergent outright.
DIVERGENCE_SUM_CAP = 1e12
MAX_DOUBLINGS = 220
# The bulk covers cdf values up to 1 - 2**-BULK_SPLIT_EXP.
BULK_SPLIT_EXP = 12
MAX_QUAD_EVALS = 10**6


def unit_quad(f, lo: float = 0.0, hi: float = 1.0, *, tol: float = 1e-10,
              points=None) -> float:
    """Adaptive quadrature of ``f`` over a finite interval.

    Raises QuadratureError when QUADPACK cannot reach the tolerance within
    the evaluation budget.
    """
    if hi <= lo:
        return 0.0
    kwargs = {"epsabs": tol, "epsrel": tol, "limit": 500, "full_output": 1}
    if points is not None:
        pts = sorted(p for p in points if lo < p < hi)
        if pts:
            kwargs["points"] = pts
    value, abserr, info, *rest = integrate.quad(f, lo, hi, **kwargs)
    if rest:  # QUADPACK emitted a convergence message
        message = rest[0]
        if abserr > max(tol, 1e-7 * abs(value)) * 50:
            raise QuadratureError(f"quadrature failed on [{lo}, {hi}]: {message}")
    if info["neval"] > MAX_QUAD_EVALS:
        raise QuadratureError("quadrature evaluation budget exceeded")
    return value


def dyadic_tail_integral(f, start: float, *, tol: float = 1e-10,
                         sum_cap: float = DIVERGENCE_SUM_CAP,
                         max_doublings: int = MAX_DOUBLINGS,
                         scale: float = 1.0):
    """Integrate ``f`` over [start, inf) by interval doubling.

    Returns ``(value, diverged)``.  ``scale`` sets the magnitude against
    which convergence is judged (use the bulk integral when available).
    Segment contributions of an eventually power-like integrand decay
    geometrically, so a geometric extrapolation closes the remaining tail;
    persistent growth or decay ratios pinned near one flag divergence.
    """
    if start <= 0:
        raise ValueError("dyadic tail integration needs a positive start")
    total = 0.0
    prev_seg = None
    ratio = None
    grow_run = 0
    lo = start
    for _ in range(max_doublings):
        hi = lo * 2.0
        seg, _ = integrate.quad(f, lo, hi, epsabs=tol * 0.1, epsrel=1e-10, limit=200)
        total += seg
        if abs(total) > sum_cap:
            return math.inf, True
        ref = max(abs(total), abs(scale), 1e-300)
        if prev_seg is None:
            if abs(seg) <= tol * ref:
                return total, False
        else:
            ratio = abs(seg) / max(abs(prev_seg), 1e-300)
            if ratio >= 1.0 and abs(seg) > tol * ref:
                grow_run += 1
                if grow_run >= 2:
                    return math.inf, True
            else:
                grow_run = 0
            if abs(seg) <= tol * ref and abs(prev_seg) <= tol * ref:
                return total, False
            if ratio < 1.0:
                geometric_tail = seg * ratio / (1.0 - ratio)
                if abs(geometric_tail) <= tol * ref:
                    return total + geometric_tail, False
        prev_seg = seg
        lo = hi
    # Budget exhausted: close with the geometric extrapolation if the decay
    # is safely sub-unit, otherwise declare divergence (ratios that creep up
    # to one are the signature of a logarithmically divergent integral).
    if ratio is not None and ratio < 0.995 and prev_seg is not None:
        return total + prev_seg * ratio / (1.0 - ratio), False
    return math.inf, True


def expectation(marginal, fn, *, tol: float = 1e-10) -> float:
    """E[fn(T)] for T distributed as ``marginal``.

    Returns ``inf`` when the divergence heuristics trigger.  ``fn`` must be
    evaluable at scalar floats inside the support.
    """
    lo, hi = marginal.support
    if not marginal.is_continuous:
        return float(fn(lo))
    if math.isfinite(hi):
        return unit_quad(lambda u: fn(marginal.quantile(u)), tol=tol)
    split = 1.0 - 2.0 ** (-BULK_SPLIT_EXP)
    bulk = unit_quad(lambda u: fn(marginal.quantile(u)), 0.0, split, tol=tol)
    y_split = marginal.quantile(split)
    tail, diverged = dyadic_tail_integral(
        lambda y: fn(y) * marginal.density(y), y_split, tol=tol, scale=bulk)
    if diverged:
        return math.inf
    return bulk + tail


def partial_expectation(marginal, fn, u_hi: float, *, tol: float = 1e-10) -> float:
    """Integral of fn against the marginal restricted to cdf values below u_hi."""
    u_hi = min(max(u_hi, 0.0), 1.0)
    if u_hi <= 0.0:
        return 0.0
    if not marginal.is_continuous:
        lo, _ = marginal.support
        return float(fn(lo)) if u_hi >= 1.0 else 0.0
    if u_hi >= 1.0:
        return expectation(marginal, fn, tol=tol)
    return unit_quad(lambda u: fn(marginal.quantile(u)), 0.0, u_hi, tol=tol)
