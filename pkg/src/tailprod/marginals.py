"""Catalog of univariate marginal distributions with exact tails and samplers.

Every family exposes closed-form ``tail``/``cdf``, an exact ``quantile`` for
inverse-transform sampling, moments with divergence reporting (divergent
moments come back as ``inf``), and the regular-variation index where the
family has one.  All point functions accept scalars or numpy arrays.

Families
--------
Pareto(alpha, scale)
    P(X > x) = (scale / x)**alpha for x >= scale.
ShiftedPareto(alpha, scale, shift)
    A Pareto translated left by ``shift``; supported on the whole line when
    shifted past zero, which is how two-sided net losses are modelled.
LogPareto(alpha, beta)
    P(Y > y) = y**-alpha * (log y)**-beta beyond the point where that
    expression crosses one; realizes a regularly varying law whose alpha-th
    moment diverges logarithmically.
Uniform(lo, hi), Exponential(rate), Degenerate(location)
    Light-tailed and point-mass companions.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from .errors import DomainError, UnsupportedError

__all__ = [
    "Marginal",
    "Pareto",
    "ShiftedPareto",
    "LogPareto",
    "Uniform",
    "Exponential",
    "Degenerate",
]

_E = math.e


def _apply(x, fn):
    """Evaluate an array function, returning a float for scalar input."""
    arr = np.asarray(x, dtype=float)
    out = fn(arr)
    if arr.ndim == 0:
        return float(out)
    return out


class Marginal:
    """Common interface of the distribution catalog."""

    is_continuous = True

    @property
    def support(self):
        raise NotImplementedError

    def tail(self, x):
        """P(X > x); total on the reals."""
        raise NotImplementedError

    def cdf(self, x):
        return _apply(x, lambda a: 1.0 - np.asarray(self.tail(a)))

    def quantile(self, p):
        """inf{x : cdf(x) >= p} for p in (0, 1)."""
        raise NotImplementedError

    def density(self, x):
        raise NotImplementedError

    def sample(self, rng, size=None):
        """Inverse-transform sample; deterministic given the stream state."""
        gen = rng.generator() if hasattr(rng, "generator") else rng
        u = gen.random(size)
        return self.quantile(u)

    def moment(self, p: float) -> float:
        """E[X**p] for p >= 0; ``inf`` when the moment diverges."""
        raise NotImplementedError

    @property
    def rv_index(self):
        """Regular-variation index of the tail, or None for lighter tails."""
        return None

    def _check_prob(self, p):
        arr = np.asarray(p, dtype=float)
        if np.any(arr <= 0.0) or np.any(arr >= 1.0):
            raise DomainError("probability must lie strictly inside (0, 1)")

    def _check_moment_order(self, p):
        if p < 0:
            raise DomainError("moment order must be nonnegative")


@dataclass(frozen=True)
class Pareto(Marginal):
    """Type-I Pareto on [scale, inf)."""

    alpha: float
    scale: float = 1.0

    def __post_init__(self):
        if self.alpha <= 0 or self.scale <= 0:
            raise DomainError("Pareto requires alpha > 0 and scale > 0")

    @property
    def support(self):
        return (self.scale, math.inf)

    def tail(self, x):
        return _apply(x, lambda a: np.where(a < self.scale, 1.0,
                                            (self.scale / np.maximum(a, self.scale)) ** self.alpha))

    def quantile(self, p):
        self._check_prob(p)
        return _apply(p, lambda a: self.scale * (1.0 - a) ** (-1.0 / self.alpha))

    def density(self, x):
        a, s = self.alpha, self.scale
        return _apply(x, lambda t: np.where(t < s, 0.0, a * s ** a * np.maximum(t, s) ** (-a - 1.0)))

    def moment(self, p):
        self._check_moment_order(p)
        if p >= self.alpha:
            return math.inf
        return self.scale ** p * self.alpha / (self.alpha - p)

    @property
    def rv_index(self):
        return self.alpha


@dataclass(frozen=True)
class ShiftedPareto(Marginal):
    """Pareto(alpha, scale) translated left by ``shift``."""

    alpha: float
    scale: float = 1.0
    shift: float = 0.0

    def __post_init__(self):
        if self.alpha <= 0 or self.scale <= 0:
            raise DomainError("ShiftedPareto requires alpha > 0 and scale > 0")

    @property
    def support(self):
        return (self.scale - self.shift, math.inf)

    def _base(self):
        return Pareto(self.alpha, self.scale)

    def tail(self, x):
        return _apply(x, lambda a: np.asarray(self._base().tail(a + self.shift)))

    def quantile(self, p):
        return _apply(p, lambda a: np.asarray(self._base().quantile(a)) - self.shift)

    def density(self, x):
        return _apply(x, lambda a: np.asarray(self._base().density(a + self.shift)))

    def moment(self, p):
        self._check_moment_order(p)
        lo = self.scale - self.shift
        if lo < 0:
            raise UnsupportedError(
                "moments of a support crossing zero are undefined for fractional orders")
        if self.shift == 0:
            return self._base().moment(p)
        if p >= self.alpha:
            return math.inf
        from .quadrature import expectation
        return expectation(self, lambda y: y ** p)

    @property
    def rv_index(self):
        return self.alpha


@dataclass(frozen=True)
class LogPareto(Marginal):
    """Tail y**-alpha * (log y)**-beta beyond its crossing point with one.

    The tail is set to one below the unique point y1 > 1 where the expression
    equals one, making it continuous and nonincreasing; the ``onset``
    parameter records where callers may rely on the pure asymptotic form and
    must be at least e.
    """

    alpha: float
    beta: float
    onset: float = _E

    def __post_init__(self):
        if self.alpha <= 0 or self.beta <= 0:
            raise DomainError("LogPareto requires alpha > 0 and beta > 0")
        if self.onset < _E:
            raise DomainError("LogPareto onset must be at least e")
        # Support starts where y**-alpha (log y)**-beta crosses one, i.e. at
        # the root of alpha*t + beta*log(t) = 0 with t = log y.
        t1 = optimize.brentq(lambda t: self.alpha * t + self.beta * math.log(t),
                             1e-280, 1.0, xtol=1e-300, rtol=8.9e-16)
        object.__setattr__(self, "_t1", t1)

    @property
    def support(self):
        return (math.exp(self._t1), math.inf)

    def tail(self, y):
        lo = math.exp(self._t1)

        def f(arr):
            out = np.ones_like(arr)
            big = arr > lo
            if np.any(big):
                t = np.log(arr[big])
                out[big] = np.exp(-self.alpha * t - self.beta * np.log(t))
            return out

        return _apply(y, f)

    def quantile(self, p):
        self._check_prob(p)

        def f(arr):
            # Solve alpha*t + beta*log(t) = -log(1-p) by guarded Newton from
            # t1, where the left side is increasing and concave in t.
            w = -np.log1p(-arr)
            t = np.full_like(arr, self._t1)
            for _ in range(80):
                g = self.alpha * t + self.beta * np.log(t) - w
                step = g / (self.alpha + self.beta / t)
                t = t - step
                if np.max(np.abs(step)) <= 1e-16 * np.max(t):
                    break
            return np.exp(t)

        return _apply(p, f)

    def density(self, y):
        lo = math.exp(self._t1)

        def f(arr):
            out = np.zeros_like(arr)
            big = arr > lo
            if np.any(big):
                t = np.log(arr[big])
                out[big] = np.exp(-(self.alpha + 1.0) * t - self.beta * np.log(t)) \
                    * (self.alpha + self.beta / t)
            return out

        return _apply(y, f)

    def moment(self, p):
        self._check_moment_order(p)
        # In t = log y the integrand is exp((p-alpha) t) * t**-beta * (alpha + beta/t):
        # divergent for p > alpha, and for p == alpha exactly when beta <= 1.
        if p > self.alpha:
            return math.inf
        t1 = self._t1
        if p == self.alpha:
            if self.beta <= 1.0:
                return math.inf
            return self.alpha * t1 ** (1.0 - self.beta) / (self.beta - 1.0) + t1 ** (-self.beta)
        val, _ = integrate.quad(
            lambda t: math.exp((p - self.alpha) * t) * t ** (-self.beta)
            * (self.alpha + self.beta / t),
            t1, math.inf, epsabs=1e-12, epsrel=1e-12, limit=400)
        return val

    @property
    def rv_index(self):
        return self.alpha


@dataclass(frozen=True)
class Uniform(Marginal):
    lo: float = 0.0
    hi: float = 1.0

    def __post_init__(self):
        if not (0.0 <= self.lo < self.hi):
            raise DomainError("Uniform requires 0 <= lo < hi")

    @property
    def support(self):
        return (self.lo, self.hi)

    def tail(self, x):
        lo, hi = self.lo, self.hi
        return _apply(x, lambda a: np.clip((hi - a) / (hi - lo), 0.0, 1.0))

    def quantile(self, p):
        self._check_prob(p)
        return _apply(p, lambda a: self.lo + a * (self.hi - self.lo))

    def density(self, x):
        lo, hi = self.lo, self.hi
        return _apply(x, lambda a: np.where((a >= lo) & (a <= hi), 1.0 / (hi - lo), 0.0))

    def moment(self, p):
        self._check_moment_order(p)
        if p == 0:
            return 1.0
        return (self.hi ** (p + 1) - self.lo ** (p + 1)) / ((p + 1) * (self.hi - self.lo))


@dataclass(frozen=True)
class Exponential(Marginal):
    rate: float = 1.0

    def __post_init__(self):
        if self.rate <= 0:
            raise DomainError("Exponential requires rate > 0")

    @property
    def support(self):
        return (0.0, math.inf)

    def tail(self, x):
        return _apply(x, lambda a: np.where(a < 0, 1.0, np.exp(-self.rate * np.maximum(a, 0.0))))

    def quantile(self, p):
        self._check_prob(p)
        return _apply(p, lambda a: -np.log1p(-a) / self.rate)

    def density(self, x):
        return _apply(x, lambda a: np.where(a < 0, 0.0, self.rate * np.exp(-self.rate * np.maximum(a, 0.0))))

    def moment(self, p):
        self._check_moment_order(p)
        return math.gamma(p + 1.0) / self.rate ** p


@dataclass(frozen=True)
class Degenerate(Marginal):
    """Point mass at a positive location."""

    location: float

    is_continuous = False

    def __post_init__(self):
        if self.location <= 0:
            raise DomainError("Degenerate requires a positive location")

    @property
    def support(self):
        return (self.location, self.location)

    def tail(self, x):
        return _apply(x, lambda a: np.where(a < self.location, 1.0, 0.0))

    def quantile(self, p):
        raise UnsupportedError("quantile of a point mass is not defined here")

    def density(self, x):
        raise UnsupportedError("a point mass has no density")

    def sample(self, rng, size=None):
        if size is None:
            return self.location
        return np.full(size, self.location, dtype=float)

    def moment(self, p):
        self._check_moment_order(p)
        return self.location ** p
