"""Kernel catalog for the bivariate mixing structure.

A kernel is a centered, bounded function of one coordinate; the product of
an x-kernel and a y-kernel tilts the product of the marginals.  Each kernel
is bound to its marginal at construction so that derived constants
(centering offsets, bounds, the limit at +infinity) are fixed data.
"""

import math

import numpy as np
from scipy import integrate

from .errors import DomainError, NoLimitError
from .quadrature import unit_quad

__all__ = [
    "Kernel",
    "FgmKernel",
    "ScaledFgmKernel",
    "TruncatedExpKernel",
    "ExpKernel",
    "PowerKernel",
    "ReciprocalKernel",
]

_U_EPS = 1e-16


def _mean_of(kernel) -> float:
    """Quadrature mean of the kernel under its bound marginal."""
    m = kernel.marginal
    if not m.is_continuous:
        return float(kernel.phi(m.support[0]))
    return unit_quad(lambda u: kernel.phi(m.quantile(u)), 0.0, 1.0 - _U_EPS, tol=1e-12)


def _probe_tail_limit(kernel) -> float:
    # Evaluate at extreme quantiles 1 - 10**-j and require the values to
    # stabilize; kernels without a finite limit blow up or drift here.
    vals = [float(kernel.phi(kernel.marginal.quantile(1.0 - 10.0 ** (-j))))
            for j in range(4, 9)]
    diffs = [abs(b - a) for a, b in zip(vals, vals[1:])]
    if not all(math.isfinite(v) for v in vals) or max(diffs) >= 1e-6:
        raise NoLimitError(f"{type(kernel).__name__} does not stabilize at infinity: {vals}")
    return vals[-1]


class Kernel:
    """Base kernel interface."""

    kind = "abstract"

    def __init__(self, marginal):
        self.marginal = marginal

    def phi(self, t):
        raise NotImplementedError

    @property
    def bound(self) -> float:
        """Supremum of |phi| over the marginal's support (inf if unbounded)."""
        raise NotImplementedError

    @property
    def tail_limit(self) -> float:
        """Limit of phi at +infinity; NoLimitError when none exists."""
        return _probe_tail_limit(self)

    def centering_residual(self) -> float:
        """|E phi(T)| under the bound marginal, by quadrature."""
        return abs(_mean_of(self))

    def upper_partial(self, x):
        """Integral of phi over (x, inf) against the bound marginal's law.

        Vectorized in x.  The default integrates in probability space;
        closed-form kernels override.
        """
        m = self.marginal

        def one(xs: float) -> float:
            u0 = float(np.asarray(m.cdf(xs)))
            if u0 >= 1.0 - _U_EPS:
                return 0.0
            return unit_quad(lambda u: self.phi(m.quantile(u)), u0, 1.0 - _U_EPS, tol=1e-10)

        arr = np.asarray(x, dtype=float)
        if arr.ndim == 0:
            return one(float(arr))
        return np.array([one(v) for v in arr.ravel()]).reshape(arr.shape)


class FgmKernel(Kernel):
    """phi(t) = 1 - 2 V(t); centered for continuous V, bounded by one."""

    kind = "fgm"

    def phi(self, t):
        # 2 * tail - 1 equals 1 - 2V without cancellation deep in the tail.
        return 2.0 * np.asarray(self.marginal.tail(t)) - 1.0

    @property
    def bound(self):
        return 1.0

    @property
    def tail_limit(self):
        return -1.0

    def upper_partial(self, x):
        tail = np.asarray(self.marginal.tail(x))
        out = -tail * (1.0 - tail)
        return float(out) if out.ndim == 0 else out


class ScaledFgmKernel(Kernel):
    """phi(t) = limit * (2 V(t) - 1): a centered kernel with prescribed
    positive limit at infinity."""

    kind = "scaled_fgm"

    def __init__(self, marginal, limit: float):
        super().__init__(marginal)
        if limit == 0:
            raise DomainError("a zero limit degenerates the kernel")
        self.limit = float(limit)

    def phi(self, t):
        return self.limit * (1.0 - 2.0 * np.asarray(self.marginal.tail(t)))

    @property
    def bound(self):
        return abs(self.limit)

    @property
    def tail_limit(self):
        return self.limit

    def upper_partial(self, x):
        tail = np.asarray(self.marginal.tail(x))
        out = self.limit * tail * (1.0 - tail)
        return float(out) if out.ndim == 0 else out


class TruncatedExpKernel(Kernel):
    """phi(x) = (exp(-x) - c) for x >= 0 and 0 below, with c chosen so the
    kernel is centered: c = E[exp(-X); X >= 0] / P(X >= 0)."""

    kind = "trunc_exp"

    def __init__(self, marginal):
        super().__init__(marginal)
        u0 = float(np.asarray(marginal.cdf(0.0)))
        if u0 >= 1.0:
            raise DomainError("the marginal carries no mass on [0, inf)")
        num = unit_quad(lambda u: math.exp(-marginal.quantile(u)),
                        u0, 1.0 - _U_EPS, tol=1e-12)
        self.offset = num / (1.0 - u0)

    def phi(self, t):
        arr = np.asarray(t, dtype=float)
        out = np.where(arr >= 0.0, np.exp(-np.maximum(arr, 0.0)) - self.offset, 0.0)
        return float(out) if out.ndim == 0 else out

    @property
    def bound(self):
        lo, _ = self.marginal.support
        top = math.exp(-max(lo, 0.0)) - self.offset
        return max(abs(top), self.offset)

    @property
    def tail_limit(self):
        return -self.offset

    def upper_partial(self, x):
        # Decomposed as E[exp(-T); T > x] - offset * P(T > x): both factors
        # carry relative precision, so the result stays meaningful deep in
        # the tail where the two parts nearly cancel.
        m = self.marginal

        def exp_tail(xs: float) -> float:
            start = max(xs, max(m.support[0], 0.0) if xs < 0 else xs)
            if xs < 0:
                start = max(m.support[0], 0.0)
            val, _ = integrate.quad(lambda t: math.exp(-t) * m.density(t),
                                    start, math.inf,
                                    epsabs=0.0, epsrel=1e-12, limit=300)
            return val

        def one(xs: float) -> float:
            t = float(np.asarray(m.tail(max(xs, 0.0))))
            if xs < 0:
                t = float(np.asarray(m.tail(0.0)))
            return exp_tail(xs) - self.offset * t

        arr = np.asarray(x, dtype=float)
        if arr.ndim == 0:
            return one(float(arr))
        return np.array([one(v) for v in arr.ravel()]).reshape(arr.shape)


class ExpKernel(Kernel):
    """phi(y) = exp(-y) - E exp(-Y), for positive-support marginals."""

    kind = "exp"

    def __init__(self, marginal):
        super().__init__(marginal)
        if marginal.is_continuous:
            self.offset = unit_quad(lambda u: math.exp(-marginal.quantile(u)),
                                    0.0, 1.0 - _U_EPS, tol=1e-12)
        else:
            self.offset = math.exp(-marginal.support[0])

    def phi(self, t):
        out = np.exp(-np.asarray(t, dtype=float)) - self.offset
        return float(out) if out.ndim == 0 else out

    @property
    def bound(self):
        lo, hi = self.marginal.support
        top = math.exp(-lo) - self.offset
        bottom = self.offset - (math.exp(-hi) if math.isfinite(hi) else 0.0)
        return max(abs(top), abs(bottom))

    @property
    def tail_limit(self):
        return -self.offset


class PowerKernel(Kernel):
    """phi(t) = t**p - E T**p; bounded (and hence usable) only when the
    marginal's support is bounded."""

    kind = "power"

    def __init__(self, marginal, exponent: float):
        super().__init__(marginal)
        if exponent <= 0:
            raise DomainError("PowerKernel needs a positive exponent")
        self.exponent = float(exponent)
        mu = marginal.moment(exponent)
        if not math.isfinite(mu):
            raise DomainError("the centering moment diverges for this marginal")
        self.offset = mu

    def phi(self, t):
        out = np.asarray(t, dtype=float) ** self.exponent - self.offset
        return float(out) if out.ndim == 0 else out

    @property
    def bound(self):
        lo, hi = self.marginal.support
        if not math.isfinite(hi):
            return math.inf
        return max(abs(hi ** self.exponent - self.offset),
                   abs(lo ** self.exponent - self.offset))

    @property
    def tail_limit(self):
        lo, hi = self.marginal.support
        if math.isfinite(hi):
            return hi ** self.exponent - self.offset
        return _probe_tail_limit(self)


class ReciprocalKernel(Kernel):
    """phi(y) = 1/(1+y) - E[1/(1+Y)].

    Its tail adjustment decays like 1/y, which buys back one power of y in
    the product-tail constant relative to the plain moment.
    """

    kind = "reciprocal"

    def __init__(self, marginal):
        super().__init__(marginal)
        if marginal.support[0] < 0:
            raise DomainError("ReciprocalKernel expects a nonnegative support")
        if marginal.is_continuous:
            self.offset = unit_quad(lambda u: 1.0 / (1.0 + marginal.quantile(u)),
                                    0.0, 1.0 - _U_EPS, tol=1e-12)
        else:
            self.offset = 1.0 / (1.0 + marginal.support[0])

    def phi(self, t):
        out = 1.0 / (1.0 + np.asarray(t, dtype=float)) - self.offset
        return float(out) if out.ndim == 0 else out

    @property
    def bound(self):
        lo, hi = self.marginal.support
        top = 1.0 / (1.0 + lo) - self.offset
        bottom = self.offset - (1.0 / (1.0 + hi) if math.isfinite(hi) else 0.0)
        return max(abs(top), abs(bottom))

    @property
    def tail_limit(self):
        return -self.offset
