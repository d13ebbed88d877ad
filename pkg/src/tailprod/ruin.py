"""Discrete-time risk model with dependent net losses and discount factors.

Period i contributes a net loss X_i discounted back to time zero through the
product of the discount factors Y_1..Y_i; the pair (X_i, Y_i) is drawn from
a conditionally dependent law, i.i.d. across periods:

    S_n = sum_{i<=n} X_i * prod_{j<=i} Y_j.

Ruin by time n means the running maximum of S exceeds the initial wealth x.
The asymptotic predictions estimated and verified here:

    psi(x, n) ~ C * (1 - r**n) / (1 - r) * tail_F(x),
    psi(x)    ~ C / (1 - r)            * tail_F(x),     r = E Y**alpha < 1,

with C = E[Y**alpha s(Y)] the product-tail constant, and the per-term tails
P(X_i Y_i .. Y_1 > x) ~ r**(i-1) * C * tail_F(x).
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .engine import RngStream, proportion_stderr, run_blocks, DEFAULT_BLOCK_SIZE
from .errors import (
    CaseIIOnlyWarning,
    ContractionError,
    DivergentError,
    DomainError,
    InsufficientHitsWarning,
    NotCdError,
)
from .estimators import (
    TailRatioReport,
    _build_report,
    _score_thresholds,
    breiman_constant,
    moment_condition_report,
)

__all__ = [
    "RiskModel",
    "RuinResult",
    "asymptotic_psi_n",
    "asymptotic_psi_inf",
    "psi_finite_mc",
    "psi_infinite_mc",
    "term_tail_mc",
    "sample_terminal",
]

MIN_SAMPLES = 10_000
LOW_HIT_CUTOFF = 100
# Convention threshold: treat E Y**alpha within this of one as exactly one.
UNIT_MOMENT_TOL = 1e-12
# Safety factor on the geometric truncation bound for the infinite horizon.
TRUNCATION_SAFETY = 10.0


class RiskModel:
    """A validated pair law plus the tail index driving the asymptotics."""

    def __init__(self, pair_model, alpha=None):
        pair_model.require_valid()
        if pair_model.non_cd:
            raise NotCdError("the risk model needs a conditionally dependent pair")
        self.pair_model = pair_model
        if alpha is None:
            alpha = pair_model.marginal_x.rv_index
        if alpha is None:
            raise DomainError("alpha is required for a non-regularly-varying loss marginal")
        self.alpha = float(alpha)
        self._discount_moment = None
        self._constant = None

    @property
    def discount_moment(self) -> float:
        """E Y**alpha, exact per marginal family."""
        if self._discount_moment is None:
            self._discount_moment = self.pair_model.marginal_y.moment(self.alpha)
        return self._discount_moment

    @property
    def constant(self) -> float:
        """The product-tail constant E[Y**alpha s(Y)] by quadrature."""
        if self._constant is None:
            self._constant = breiman_constant(self.pair_model, self.alpha)
        return self._constant

    def require_finite_constant(self):
        if not math.isfinite(self.constant):
            raise DivergentError("E[Y**alpha s(Y)] diverges")
        return self.constant


@dataclass
class RuinRow:
    x: float
    hits: int
    psi_hat: float
    stderr: float
    prediction: float
    ratio_to_prediction: float

    def as_dict(self):
        return dict(x=self.x, hits=self.hits, psi_hat=self.psi_hat,
                    stderr=self.stderr, prediction=self.prediction,
                    ratio_to_prediction=self.ratio_to_prediction)


@dataclass
class RuinResult:
    x_grid: list
    rows: list
    horizon: str            # "finite" | "infinite"
    n: int                  # steps simulated (truncation depth when infinite)
    n_samples: int
    seed: int

    @property
    def psi_hat(self):
        return [r.psi_hat for r in self.rows]

    def as_dict(self):
        return {"x_grid": list(self.x_grid), "rows": [r.as_dict() for r in self.rows],
                "horizon": self.horizon, "n": self.n,
                "n_samples": self.n_samples, "seed": self.seed}


def asymptotic_psi_n(risk: RiskModel, n: int) -> float:
    """Multiplier of tail_F(x) in the finite-horizon prediction."""
    if n < 1:
        raise DomainError("n must be at least 1")
    c = risk.require_finite_constant()
    r = risk.discount_moment
    if not math.isfinite(r):
        raise DivergentError("E Y**alpha diverges")
    if abs(r - 1.0) < UNIT_MOMENT_TOL:
        return n * c
    return c * (1.0 - r ** n) / (1.0 - r)


def asymptotic_psi_inf(risk: RiskModel, *, epsilon: float = 0.1) -> float:
    """Multiplier of tail_F(x) in the infinite-horizon prediction.

    Requires the contraction E Y**alpha < 1.  When only the weaker moment
    hypothesis holds the value is still returned, with a warning attached.
    """
    c = risk.require_finite_constant()
    r = risk.discount_moment
    if not (math.isfinite(r) and r < 1.0):
        raise ContractionError(f"E Y**alpha = {r} is not < 1")
    conditions = moment_condition_report(risk.pair_model, risk.alpha, epsilon)
    if not conditions.case_i and conditions.case_ii:
        warnings.warn(
            "only the weaker moment condition holds; the infinite-horizon "
            "prediction rests on the stronger one", CaseIIOnlyWarning, stacklevel=2)
    return c / (1.0 - r)


def _path_task(model, thresholds, n_steps):
    def task(gen, size):
        discount = np.ones(size)
        total = np.zeros(size)
        running_max = np.full(size, -math.inf)
        for _ in range(n_steps):
            x, y = model.sample_joint_chunk(gen, size)
            discount *= y
            total += x * discount
            np.maximum(running_max, total, out=running_max)
        return _score_thresholds(running_max, thresholds)

    return task


def _ruin_result(risk, x_grid, merged, multiplier, horizon, n_steps, seed):
    tails = np.asarray(risk.pair_model.marginal_x.tail(np.asarray(x_grid, dtype=float)))
    rows = []
    for i, x in enumerate(x_grid):
        hits = int(merged.counts[i])
        n = merged.n_samples
        if hits < LOW_HIT_CUTOFF:
            warnings.warn(f"x = {x}: only {hits} hits, interval unreliable",
                          InsufficientHitsWarning, stacklevel=3)
        psi_hat = hits / n
        prediction = multiplier * float(tails[i])
        rows.append(RuinRow(x=float(x), hits=hits, psi_hat=psi_hat,
                            stderr=proportion_stderr(hits, n),
                            prediction=prediction,
                            ratio_to_prediction=psi_hat / prediction))
    return RuinResult(x_grid=[float(x) for x in x_grid], rows=rows, horizon=horizon,
                      n=n_steps, n_samples=merged.n_samples, seed=seed)


def _check_grid(x_grid, n_samples):
    x_grid = [float(x) for x in x_grid]
    if n_samples < MIN_SAMPLES:
        raise DomainError(f"n_samples must be at least {MIN_SAMPLES}")
    if any(b >= a for a, b in zip(x_grid[1:], x_grid)):
        raise DomainError("x_grid must be strictly ascending")
    return x_grid


def psi_finite_mc(risk: RiskModel, x_grid, n: int, n_samples: int, seed: int, *,
                  workers: int = 1, block_size: int = DEFAULT_BLOCK_SIZE) -> RuinResult:
    """Estimate psi(x, n) = P(max_{k<=n} S_k > x) over the whole grid in one pass."""
    if n < 1:
        raise DomainError("n must be at least 1")
    x_grid = _check_grid(x_grid, n_samples)
    merged = run_blocks(_path_task(risk.pair_model, x_grid, n), n_samples,
                        RngStream(seed), workers=workers, block_size=block_size)
    return _ruin_result(risk, x_grid, merged, asymptotic_psi_n(risk, n),
                        "finite", n, seed)


def truncation_depth(risk: RiskModel, x_max: float, tail_tol: float) -> int:
    """Depth n* at which the geometric per-term bound drops below
    tail_tol * tail_F(x_max) with a safety factor."""
    c = risk.require_finite_constant()
    r = risk.discount_moment
    if not (math.isfinite(r) and r < 1.0):
        raise ContractionError(f"E Y**alpha = {r} is not < 1")
    target = tail_tol * float(np.asarray(risk.pair_model.marginal_x.tail(x_max))) \
        / TRUNCATION_SAFETY
    depth = math.ceil(math.log(target * (1.0 - r) / c) / math.log(r))
    return max(int(depth), 1)


def psi_infinite_mc(risk: RiskModel, x_grid, n_samples: int, seed: int, *,
                    tail_tol: float = 1e-3, workers: int = 1,
                    block_size: int = DEFAULT_BLOCK_SIZE) -> RuinResult:
    """Estimate psi(x) = P(sup_n S_n > x) by adaptive horizon truncation.

    The simulated depth is recorded on the result (``n``); the truncation
    bias at the largest grid point is below tail_tol * tail_F(max x) by the
    geometric decay of the per-term tails.
    """
    if not (0.0 < tail_tol < 0.01):
        raise DomainError("tail_tol must lie in (0, 0.01)")
    x_grid = _check_grid(x_grid, n_samples)
    depth = truncation_depth(risk, max(x_grid), tail_tol)
    merged = run_blocks(_path_task(risk.pair_model, x_grid, depth), n_samples,
                        RngStream(seed), workers=workers, block_size=block_size)
    return _ruin_result(risk, x_grid, merged, asymptotic_psi_inf(risk),
                        "infinite", depth, seed)


def term_tail_mc(risk: RiskModel, i: int, x_grid, n_samples: int, seed: int, *,
                 workers: int = 1, block_size: int = DEFAULT_BLOCK_SIZE) -> TailRatioReport:
    """Monte Carlo of P(X_i Y_i .. Y_1 > x) / tail_F(x) for one term.

    The pair (X_i, Y_i) is drawn jointly; the earlier discount factors are
    independent marginal draws.  Predicted constant: r**(i-1) * C.
    """
    if i < 1:
        raise DomainError("the term index starts at 1")
    x_grid = _check_grid(x_grid, n_samples)
    model = risk.pair_model

    def task(gen, size):
        x, y = model.sample_joint_chunk(gen, size)
        product = x * y
        for _ in range(i - 1):
            product *= np.asarray(model.marginal_y.sample(gen, size), dtype=float)
        return _score_thresholds(product, x_grid)

    merged = run_blocks(task, n_samples, RngStream(seed),
                        workers=workers, block_size=block_size)
    predicted = risk.discount_moment ** (i - 1) * risk.require_finite_constant()
    return _build_report(model, x_grid, merged, seed, predicted)


def sample_terminal(risk: RiskModel, n: int, n_samples: int, seed: int, *,
                    reversed_form: bool = False) -> np.ndarray:
    """Terminal values S_n (or the reversed-discount form T_n) for law checks.

    T_n accumulates T <- (T + X) * Y, which weights each loss by all *later*
    discount factors; it shares the law of S_n because the pairs are i.i.d.
    """
    gen = RngStream(seed).generator()
    model = risk.pair_model
    if reversed_form:
        total = np.zeros(n_samples)
        for _ in range(n):
            x, y = model.sample_joint_chunk(gen, n_samples)
            total = (total + x) * y
        return total
    discount = np.ones(n_samples)
    total = np.zeros(n_samples)
    for _ in range(n):
        x, y = model.sample_joint_chunk(gen, n_samples)
        discount *= y
        total += x * discount
    return total


def ruin_bounds_counts(risk: RiskModel, x_grid, n: int, n_samples: int, seed: int):
    """Counts of {S_n > x}, {max_k S_k > x} and {sum X_i^+ D_i > x} on shared
    paths; the middle is sandwiched by the outer two pathwise."""
    x_grid = [float(x) for x in x_grid]
    gen = RngStream(seed).generator()
    model = risk.pair_model
    discount = np.ones(n_samples)
    total = np.zeros(n_samples)
    total_plus = np.zeros(n_samples)
    running_max = np.full(n_samples, -math.inf)
    for _ in range(n):
        x, y = model.sample_joint_chunk(gen, n_samples)
        discount *= y
        total += x * discount
        total_plus += np.maximum(x, 0.0) * discount
        np.maximum(running_max, total, out=running_max)
    return (_score_thresholds(total, x_grid),
            _score_thresholds(running_max, x_grid),
            _score_thresholds(total_plus, x_grid))
