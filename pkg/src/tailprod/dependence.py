"""Conditionally dependent bivariate models.

Each model couples a real-valued first coordinate (distribution F) with a
positive second coordinate (distribution G) and exposes:

* ``cond_tail(x, y)``   -- P(X > x | Y = y), closed form per variant;
* ``tail_adjustment(y)``-- the positive function s with
  P(X > x | Y = y) ~ tail_F(x) * s(y) uniformly in y, normalized so that
  E s(Y) = 1;  outside the support of Y it is defined to be one;
* ``validate()``        -- the parameter/kernel admissibility checks;
* exact joint sampling and the joint cdf.

Variants: a kernel-tilted product (Sarmanov family, FGM as the special
case), the Frank and AMH copulas, and a difference construction that
subtracts the second coordinate from the first.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .errors import (
    DomainError,
    RejectionStallError,
    UnsupportedMarginalError,
    ValidationError,
)
from .marginals import Marginal
from .quadrature import expectation, partial_expectation, unit_quad

__all__ = [
    "ValidationCheck",
    "ValidationReport",
    "CdModel",
    "SarmanovModel",
    "FrankModel",
    "AmhModel",
    "ShiftModel",
    "shift_construct",
]

# Tolerance on |E phi| for the centering condition.
CENTERING_TOL = 1e-8
# Floating slack when checking nonnegativity of the density tilt.
TILT_SLACK = 1e-12
# Grid resolution per coordinate for validity checks.
GRID_POINTS = 1000
MAX_REJECTION_ROUNDS = 10_000
MIN_ACCEPTANCE = 1e-6


@dataclass
class ValidationCheck:
    name: str
    passed: bool
    mandatory: bool = True
    detail: str = ""
    witness: tuple = None

    def as_dict(self):
        d = {"name": self.name, "passed": self.passed, "mandatory": self.mandatory,
             "detail": self.detail}
        if self.witness is not None:
            d["witness"] = list(self.witness)
        return d


@dataclass
class ValidationReport:
    checks: list
    non_cd: bool = False

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks if c.mandatory)

    def failures(self):
        return [c for c in self.checks if c.mandatory and not c.passed]

    def as_dict(self):
        return {"ok": self.ok, "non_cd": self.non_cd,
                "checks": [c.as_dict() for c in self.checks]}


def _pair(x, y, fn):
    """Broadcast a two-argument array function, scalarizing scalar input."""
    ax = np.asarray(x, dtype=float)
    ay = np.asarray(y, dtype=float)
    out = fn(ax, ay)
    if ax.ndim == 0 and ay.ndim == 0:
        return float(out)
    return out


def _generator(rng):
    return rng.generator() if hasattr(rng, "generator") else rng


class CdModel:
    """Base class: a validated bivariate law with a tail-adjustment function."""

    kind = "abstract"

    def __init__(self, marginal_x: Marginal, marginal_y: Marginal):
        self.marginal_x = marginal_x
        self.marginal_y = marginal_y
        self._report = None

    # -- validation ------------------------------------------------------

    def validate(self) -> ValidationReport:
        if self._report is None:
            self._report = self._run_checks()
        return self._report

    def require_valid(self):
        report = self.validate()
        if not report.ok:
            names = ", ".join(c.name for c in report.failures())
            raise ValidationError(f"{self.kind} model failed checks: {names}")
        return report

    def _run_checks(self) -> ValidationReport:
        raise NotImplementedError

    @property
    def non_cd(self) -> bool:
        return False

    # -- law -------------------------------------------------------------

    def cond_tail(self, x, y):
        """P(X > x | Y = y) for y strictly inside the support of Y."""
        raise NotImplementedError

    def tail_adjustment(self, y):
        """The function s(y); equal to one outside the support of Y."""
        raise NotImplementedError

    @property
    def adjustment_tail_limit(self) -> float:
        """Exact limit of the adjustment function as y grows; drives the
        analytic divergence classification of E[Y**p s(Y)]."""
        raise NotImplementedError

    def joint_cdf(self, x, y):
        raise NotImplementedError

    def sample_joint_chunk(self, gen, size: int):
        raise NotImplementedError

    def sample_joint(self, rng):
        x, y = self.sample_joint_chunk(_generator(rng), 1)
        return float(x[0]), float(y[0])

    # -- helpers ---------------------------------------------------------

    def _check_y_interior(self, y):
        lo, hi = self.marginal_y.support
        arr = np.asarray(y, dtype=float)
        if np.any(arr <= lo) or np.any(arr >= hi):
            raise DomainError(
                f"y must lie strictly inside the support ({lo}, {hi}) of Y")

    def _y_support_mask(self, arr):
        lo, hi = self.marginal_y.support
        return (arr >= lo) & (arr <= hi)

    def _adjustment_points(self, formula, y):
        """Apply ``formula`` on the support of Y and one elsewhere."""

        def f(arr):
            out = np.ones_like(arr)
            mask = self._y_support_mask(arr)
            if np.any(mask):
                out[mask] = formula(arr[mask])
            return out

        arr = np.asarray(y, dtype=float)
        res = f(arr)
        return float(res) if arr.ndim == 0 else res


def _support_grid(marginal, n=GRID_POINTS, extra=()):
    """Representative points of a marginal's support for range probing."""
    if not marginal.is_continuous:
        return np.array([marginal.support[0]])
    u = (np.arange(n) + 0.5) / n
    u = np.concatenate(([1e-9], u, [1.0 - 1e-9]))
    pts = np.asarray(marginal.quantile(u))
    lo, hi = marginal.support
    ends = [lo] if math.isfinite(lo) else []
    if math.isfinite(hi):
        ends.append(hi)
    pts = np.concatenate([pts, ends, list(extra)]) if (ends or extra) else pts
    return np.sort(pts)


def _kernel_range(kernel):
    """(min, max, argmin, argmax) of the kernel over its marginal support."""
    lo, hi = kernel.marginal.support
    extra = []
    if lo < 0.0 < hi:
        extra = [-1e-12, 0.0]  # straddle the truncation point of x-kernels
    grid = _support_grid(kernel.marginal, extra=extra)
    vals = np.asarray(kernel.phi(grid), dtype=float)
    points = list(grid)
    values = list(vals)
    if not math.isfinite(hi):
        try:
            values.append(float(kernel.tail_limit))
            points.append(math.inf)
        except Exception:
            pass
    values = np.asarray(values)
    imin, imax = int(np.argmin(values)), int(np.argmax(values))
    return values[imin], values[imax], points[imin], points[imax]


class SarmanovModel(CdModel):
    """Product law tilted by 1 + theta * phi_x(x) * phi_y(y).

    Parameters
    ----------
    theta : float
        Tilt strength; zero gives independence.
    kernel_x, kernel_y : Kernel
        Centered kernels bound to ``marginal_x`` / ``marginal_y``.
    marginal_x, marginal_y : Marginal
        The marginal distributions (Y must have positive support).
    """

    kind = "sarmanov"

    def __init__(self, theta, kernel_x, kernel_y, marginal_x, marginal_y):
        super().__init__(marginal_x, marginal_y)
        if kernel_x.marginal is not marginal_x or kernel_y.marginal is not marginal_y:
            raise DomainError("kernels must be bound to the model marginals")
        self.theta = float(theta)
        self.kernel_x = kernel_x
        self.kernel_y = kernel_y

    @property
    def independent(self) -> bool:
        return self.theta == 0.0

    @property
    def kernel_x_limit(self) -> float:
        return self.kernel_x.tail_limit

    def _run_checks(self):
        checks = []
        if self.marginal_y.support[0] < 0:
            checks.append(ValidationCheck("y-support-positive", False,
                                          detail="Y must have positive support"))
        else:
            checks.append(ValidationCheck("y-support-positive", True))
        if self.independent:
            # The tilt vanishes; kernel conditions are vacuous.
            checks.append(ValidationCheck("independent-case", True, mandatory=False,
                                          detail="theta = 0, kernels unused"))
            return ValidationReport(checks)

        if not self.marginal_y.is_continuous:
            checks.append(ValidationCheck("y-marginal-continuous", False,
                                          detail="dependent models need continuous Y"))
        else:
            checks.append(ValidationCheck("y-marginal-continuous", True))

        for label, kernel in (("x", self.kernel_x), ("y", self.kernel_y)):
            resid = kernel.centering_residual()
            checks.append(ValidationCheck(
                f"kernel-{label}-centered", resid <= CENTERING_TOL,
                detail=f"|E phi| = {resid:.3e}"))
            b = kernel.bound
            checks.append(ValidationCheck(
                f"kernel-{label}-bounded", math.isfinite(b),
                detail=f"sup |phi| = {b:.6g}"))

        if not (math.isfinite(self.kernel_x.bound) and math.isfinite(self.kernel_y.bound)):
            return ValidationReport(checks)

        min1, max1, at_min1, at_max1 = _kernel_range(self.kernel_x)
        min2, max2, at_min2, at_max2 = _kernel_range(self.kernel_y)
        corners = [
            (min1 * min2, (at_min1, at_min2)),
            (min1 * max2, (at_min1, at_max2)),
            (max1 * min2, (at_max1, at_min2)),
            (max1 * max2, (at_max1, at_max2)),
        ]
        worst, witness = min(((1.0 + self.theta * float(p), w) for p, w in corners),
                             key=lambda t: t[0])
        checks.append(ValidationCheck(
            "density-tilt-nonnegative", bool(worst >= -TILT_SLACK),
            detail=f"min over grid corners of 1 + theta*phi_x*phi_y = {worst:.6g}",
            witness=tuple(float(v) for v in witness) if worst < -TILT_SLACK else None))

        try:
            d1 = self.kernel_x.tail_limit
            checks.append(ValidationCheck("x-kernel-limit-exists", True,
                                          detail=f"limit = {d1:.6g}"))
        except Exception as exc:
            checks.append(ValidationCheck("x-kernel-limit-exists", False,
                                          detail=str(exc)))
            return ValidationReport(checks)

        ygrid = _support_grid(self.marginal_y)
        s_vals = 1.0 + self.theta * d1 * np.asarray(self.kernel_y.phi(ygrid))
        i = int(np.argmin(s_vals))
        checks.append(ValidationCheck(
            "tail-adjustment-positive", bool(s_vals[i] > 0.0),
            detail=f"min s over grid = {s_vals[i]:.6g}",
            witness=(float(ygrid[i]),) if s_vals[i] <= 0.0 else None))
        s_cap = 1.0 + abs(self.theta * d1) * self.kernel_y.bound
        checks.append(ValidationCheck(
            "tail-adjustment-bounded", bool(np.max(s_vals) <= s_cap + 1e-9),
            mandatory=False, detail=f"sup s = {np.max(s_vals):.6g} <= {s_cap:.6g}"))
        return ValidationReport(checks)

    def cond_tail(self, x, y):
        self._check_y_interior(y)

        def f(ax, ay):
            base = np.asarray(self.marginal_x.tail(ax))
            if self.independent:
                return np.broadcast_to(base, np.broadcast(ax, ay).shape).copy()
            tilt = self.theta * np.asarray(self.kernel_y.phi(ay)) \
                * np.asarray(self.kernel_x.upper_partial(ax))
            return np.clip(base + tilt, 0.0, 1.0)

        return _pair(x, y, f)

    def tail_adjustment(self, y):
        if self.independent:
            arr = np.asarray(y, dtype=float)
            return 1.0 if arr.ndim == 0 else np.ones_like(arr)
        d1 = self.kernel_x.tail_limit
        return self._adjustment_points(
            lambda a: 1.0 + self.theta * d1 * np.asarray(self.kernel_y.phi(a)), y)

    @property
    def adjustment_tail_limit(self):
        if self.independent:
            return 1.0
        hi = self.marginal_y.support[1]
        phi_end = self.kernel_y.tail_limit if not math.isfinite(hi) \
            else float(np.asarray(self.kernel_y.phi(hi)))
        return 1.0 + self.theta * self.kernel_x.tail_limit * phi_end

    def joint_cdf(self, x, y):
        def f(ax, ay):
            base = np.asarray(self.marginal_x.cdf(ax)) * np.asarray(self.marginal_y.cdf(ay))
            if self.independent:
                return base
            return base + self.theta * np.asarray(self.kernel_x.upper_partial(ax)) \
                * np.asarray(self.kernel_y.upper_partial(ay))

        return _pair(x, y, f)

    def sample_joint_chunk(self, gen, size: int):
        y = np.asarray(self.marginal_y.sample(gen, size), dtype=float)
        if self.independent:
            x = np.asarray(self.marginal_x.sample(gen, size), dtype=float)
            return x, y
        ceiling = 1.0 + abs(self.theta) * self.kernel_x.bound * self.kernel_y.bound
        if 1.0 / ceiling < MIN_ACCEPTANCE:
            raise RejectionStallError(
                f"acceptance probability 1/{ceiling:.3g} below {MIN_ACCEPTANCE}")
        phi_y = np.asarray(self.kernel_y.phi(y))
        x = np.empty(size, dtype=float)
        pending = np.arange(size)
        for _ in range(MAX_REJECTION_ROUNDS):
            if pending.size == 0:
                return x, y
            cand = np.asarray(self.marginal_x.sample(gen, pending.size), dtype=float)
            u = gen.random(pending.size)
            accept_p = (1.0 + self.theta * np.asarray(self.kernel_x.phi(cand))
                        * phi_y[pending]) / ceiling
            keep = u < accept_p
            x[pending[keep]] = cand[keep]
            pending = pending[~keep]
        raise RejectionStallError("rejection sampler failed to converge")


class FrankModel(CdModel):
    """Frank-copula coupling of the marginals, for positive theta."""

    kind = "frank"

    def __init__(self, theta, marginal_x, marginal_y):
        super().__init__(marginal_x, marginal_y)
        if theta <= 0:
            raise DomainError("the Frank coupling requires theta > 0")
        self.theta = float(theta)

    def _run_checks(self):
        checks = [
            ValidationCheck("theta-positive", self.theta > 0,
                            detail=f"theta = {self.theta}"),
            ValidationCheck("y-support-positive", self.marginal_y.support[0] >= 0),
            ValidationCheck("y-marginal-continuous", self.marginal_y.is_continuous),
        ]
        return ValidationReport(checks)

    def cond_tail(self, x, y):
        self._check_y_interior(y)
        th = self.theta

        def f(ax, ay):
            fbar = np.asarray(self.marginal_x.tail(ax))
            fx = 1.0 - fbar
            gy = np.asarray(self.marginal_y.cdf(ay))
            num = -math.exp(-th) * np.expm1(th * fbar)
            den = math.expm1(-th) + np.expm1(-th * fx) * np.expm1(-th * gy)
            return np.clip(num / den, 0.0, 1.0)

        return _pair(x, y, f)

    def tail_adjustment(self, y):
        th = self.theta
        norm = -math.expm1(-th)
        return self._adjustment_points(
            lambda a: th * np.exp(-th * np.asarray(self.marginal_y.tail(a))) / norm, y)

    @property
    def adjustment_tail_limit(self):
        return self.theta / -math.expm1(-self.theta)

    def joint_cdf(self, x, y):
        th = self.theta

        def f(ax, ay):
            gu = np.expm1(-th * np.asarray(self.marginal_x.cdf(ax)))
            gv = np.expm1(-th * np.asarray(self.marginal_y.cdf(ay)))
            return -np.log1p(gu * gv / math.expm1(-th)) / th

        return _pair(x, y, f)

    def sample_joint_chunk(self, gen, size: int):
        th = self.theta
        v = gen.random(size)
        p = gen.random(size)
        # Invert the conditional copula u | v in closed form.
        gu = p * math.expm1(-th) / (np.exp(-th * v) - p * np.expm1(-th * v))
        u = np.clip(-np.log1p(gu) / th, 1e-15, 1.0 - 1e-15)
        x = np.asarray(self.marginal_x.quantile(u), dtype=float)
        y = np.asarray(self.marginal_y.quantile(np.clip(v, 1e-15, 1 - 1e-15)), dtype=float)
        return x, y


class AmhModel(CdModel):
    """AMH-copula coupling for theta in [-1, 1).

    The boundary value theta = -1 yields a legitimate joint law whose
    conditional tail is *not* uniformly comparable to tail_F * s; it is kept
    constructible (flagged ``non_cd``) to exercise the diagnostic.
    """

    kind = "amh"

    def __init__(self, theta, marginal_x, marginal_y):
        super().__init__(marginal_x, marginal_y)
        if not (-1.0 <= theta < 1.0):
            raise DomainError("the AMH coupling requires theta in [-1, 1)")
        self.theta = float(theta)

    @property
    def non_cd(self) -> bool:
        return self.theta == -1.0

    def _run_checks(self):
        checks = [
            ValidationCheck("theta-range", -1.0 <= self.theta < 1.0,
                            detail=f"theta = {self.theta}"),
            ValidationCheck("y-support-positive", self.marginal_y.support[0] >= 0),
            ValidationCheck("y-marginal-continuous", self.marginal_y.is_continuous),
            ValidationCheck("conditionally-dependent", not self.non_cd, mandatory=False,
                            detail="boundary theta = -1 is not CD" if self.non_cd else ""),
        ]
        return ValidationReport(checks, non_cd=self.non_cd)

    def cond_tail(self, x, y):
        self._check_y_interior(y)
        th = self.theta

        def f(ax, ay):
            fbar = np.asarray(self.marginal_x.tail(ax))
            gbar = np.asarray(self.marginal_y.tail(ay))
            num = (1.0 + th - 2.0 * th * gbar - th * fbar + th * th * fbar * gbar ** 2) * fbar
            den = (1.0 - th * fbar * gbar) ** 2
            return np.clip(num / den, 0.0, 1.0)

        return _pair(x, y, f)

    def tail_adjustment(self, y):
        th = self.theta
        if self.non_cd:
            formula = lambda a: 2.0 * np.asarray(self.marginal_y.tail(a))
        else:
            formula = lambda a: 1.0 + th * (1.0 - 2.0 * np.asarray(self.marginal_y.tail(a)))
        return self._adjustment_points(formula, y)

    @property
    def adjustment_tail_limit(self):
        return 0.0 if self.non_cd else 1.0 + self.theta

    def restricted_uniformity_edge(self) -> float:
        """Largest y below which the boundary law is still uniformly
        comparable: tail_G(y) = 1/sqrt(3)."""
        return float(self.marginal_y.quantile(1.0 - 1.0 / math.sqrt(3.0)))

    def joint_cdf(self, x, y):
        th = self.theta

        def f(ax, ay):
            fx = np.asarray(self.marginal_x.cdf(ax))
            gy = np.asarray(self.marginal_y.cdf(ay))
            return fx * gy / (1.0 - th * (1.0 - fx) * (1.0 - gy))

        return _pair(x, y, f)

    def sample_joint_chunk(self, gen, size: int):
        th = self.theta
        v = gen.random(size)
        p = gen.random(size)
        if th == 0.0:
            u = p
        else:
            # The conditional copula is quadratic in w = 1 - u.
            a = th * (1.0 - v)
            A = p * a * a - th
            B = 1.0 + th - 2.0 * p * a
            C = p - 1.0
            u = 1.0 - _quadratic_root_in_unit(A, B, C)
        u = np.clip(u, 1e-15, 1.0 - 1e-15)
        x = np.asarray(self.marginal_x.quantile(u), dtype=float)
        y = np.asarray(self.marginal_y.quantile(np.clip(v, 1e-15, 1 - 1e-15)), dtype=float)
        return x, y


def _quadratic_root_in_unit(A, B, C):
    """Root of A w**2 + B w + C = 0 inside [0, 1], preferring the smaller one.

    Uses the numerically stable split q = -(B + sign(B) sqrt(disc)) / 2 and
    falls back to the linear solution where A vanishes.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    C = np.asarray(C, dtype=float)
    linear = np.abs(A) < 1e-14
    disc = np.maximum(B * B - 4.0 * A * C, 0.0)
    sq = np.sqrt(disc)
    q = -0.5 * (B + np.where(B >= 0, sq, -sq))
    with np.errstate(divide="ignore", invalid="ignore"):
        r1 = np.where(linear, np.inf, q / np.where(A == 0, 1.0, A))
        r2 = np.where(q == 0, np.inf, C / np.where(q == 0, 1.0, q))
        rlin = np.where(np.abs(B) > 0, -C / np.where(B == 0, 1.0, B), np.inf)
    roots = np.stack([np.where(linear, rlin, r1), np.where(linear, rlin, r2)])
    eps = 1e-12
    ok = (roots >= -eps) & (roots <= 1.0 + eps)
    roots = np.where(ok, roots, np.inf)
    w = np.min(roots, axis=0)
    w = np.where(np.isfinite(w), w, 0.0)
    return np.clip(w, 0.0, 1.0)


class _DifferenceTailMarginal(Marginal):
    """Marginal of X = xi - eta, with the tail computed by quadrature."""

    def __init__(self, base_model):
        self._base = base_model
        self._cache = {}

    @property
    def support(self):
        lo_x, hi_x = self._base.marginal_x.support
        lo_y, hi_y = self._base.marginal_y.support
        return (lo_x - hi_y, hi_x - lo_y if math.isfinite(hi_x) else math.inf)

    def tail(self, x):
        def one(v: float) -> float:
            if v not in self._cache:
                self._cache[v] = min(max(expectation(
                    self._base.marginal_y,
                    lambda w: self._base.cond_tail(v + w, w), tol=1e-11), 0.0), 1.0)
            return self._cache[v]

        arr = np.asarray(x, dtype=float)
        if arr.ndim == 0:
            return one(float(arr))
        return np.array([one(float(v)) for v in arr.ravel()]).reshape(arr.shape)

    def quantile(self, p):
        self._check_prob(p)

        def one(prob: float) -> float:
            target = 1.0 - prob
            lo, hi = 0.0, 1.0
            while self.tail(hi) > target:
                lo, hi = hi, hi * 2.0
                if hi > 1e308:
                    raise DomainError("quantile out of range")
            lo_x = self.support[0]
            start = lo_x if math.isfinite(lo_x) else -1e12
            return optimize.brentq(lambda v: self.tail(v) - target,
                                   min(start, lo), hi, xtol=1e-12, rtol=8.9e-16)

        arr = np.asarray(p, dtype=float)
        if arr.ndim == 0:
            return one(float(arr))
        return np.array([one(float(v)) for v in arr.ravel()]).reshape(arr.shape)

    def sample(self, rng, size=None):
        gen = _generator(rng)
        x, _ = self._base.sample_joint_chunk(gen, size if size is not None else 1)
        return float(x[0]) if size is None else x

    def moment(self, p):
        raise NotImplementedError("moments of the difference law are not provided")

    @property
    def rv_index(self):
        return self._base.marginal_x.rv_index


class ShiftModel(CdModel):
    """The pair (xi - eta, eta) built from a base pair (xi, eta).

    Keeps the conditional-tail comparability of the base while introducing
    functional dependence between the coordinates; the adjustment function is
    the base one renormalized to unit mean.
    """

    kind = "shift"

    def __init__(self, base: CdModel):
        base.require_valid()
        if base.validate().non_cd:
            raise ValidationError("the base pair must be conditionally dependent")
        if base.marginal_x.rv_index is None:
            raise UnsupportedMarginalError(
                "the first base marginal must come from the regularly varying catalog")
        if base.marginal_x.support[0] < 0 or base.marginal_y.support[0] < 0:
            raise UnsupportedMarginalError("base marginals must have positive support")
        self.base = base
        self._norm = expectation(base.marginal_y,
                                 lambda y: base.tail_adjustment(y), tol=1e-12)
        super().__init__(_DifferenceTailMarginal(base), base.marginal_y)

    def _run_checks(self):
        checks = [
            ValidationCheck("base-valid", self.base.validate().ok),
            ValidationCheck("base-conditionally-dependent", not self.base.validate().non_cd),
            ValidationCheck("adjustment-normalizer-finite",
                            math.isfinite(self._norm) and self._norm > 0,
                            detail=f"E s0(Y) = {self._norm:.12g}"),
        ]
        return ValidationReport(checks)

    def cond_tail(self, x, y):
        self._check_y_interior(y)
        return _pair(x, y, lambda ax, ay: np.asarray(self.base.cond_tail(ax + ay, ay)))

    def tail_adjustment(self, y):
        return self._adjustment_points(
            lambda a: np.asarray(self.base.tail_adjustment(a)) / self._norm, y)

    @property
    def adjustment_tail_limit(self):
        return self.base.adjustment_tail_limit / self._norm

    def joint_cdf(self, x, y):
        def one(xv, yv):
            u_hi = float(np.asarray(self.marginal_y.cdf(yv)))
            return partial_expectation(
                self.marginal_y,
                lambda w: 1.0 - self.base.cond_tail(xv + w, w), u_hi, tol=1e-11)

        ax, ay = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        if ax.ndim == 0 and ay.ndim == 0:
            return one(float(ax), float(ay))
        bx, by = np.broadcast_arrays(ax, ay)
        flat = [one(float(a), float(b)) for a, b in zip(bx.ravel(), by.ravel())]
        return np.array(flat).reshape(bx.shape)

    def sample_joint_chunk(self, gen, size: int):
        xi, eta = self.base.sample_joint_chunk(gen, size)
        return xi - eta, eta


def shift_construct(base: CdModel) -> ShiftModel:
    """Build the difference pair (xi - eta, eta) from a validated base pair."""
    return ShiftModel(base)


def independent_pair(marginal_x, marginal_y) -> SarmanovModel:
    """Convenience: the independent coupling as a zero-tilt model."""
    from .kernels import FgmKernel
    return SarmanovModel(0.0, FgmKernel(marginal_x), FgmKernel(marginal_y),
                         marginal_x, marginal_y)
