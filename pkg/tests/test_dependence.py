import math

import numpy as np
import pytest
from scipy import stats

import tailprod as tp
from tailprod.errors import (
    DomainError,
    RejectionStallError,
    UnsupportedMarginalError,
    ValidationError,
)
from tailprod.quadrature import expectation

from conftest import SEED


def model_battery(request):
    names = ["fgm_model", "independent_model", "exp_kernel_model", "frank_model",
             "amh_model", "amh_boundary", "shift_model", "weakened_model"]
    return [(n, request.getfixturevalue(n)) for n in names]


# ---------------------------------------------------------------- validation

def test_fgm_reference_valid(fgm_model):
    report = fgm_model.validate()
    assert report.ok and not report.non_cd
    assert all(c.passed for c in report.checks)


def test_sarmanov_overdriven_theta_fails(pareto21, unit_uniform):
    m = tp.SarmanovModel(3.0, tp.FgmKernel(pareto21), tp.FgmKernel(unit_uniform),
                         pareto21, unit_uniform)
    report = m.validate()
    assert not report.ok
    failed = {c.name for c in report.failures()}
    assert "density-tilt-nonnegative" in failed
    tilt = next(c for c in report.checks if c.name == "density-tilt-nonnegative")
    assert tilt.witness is not None  # the offending grid corner is reported
    # Both kernels span [-1, 1], so the worst corner value is 1 - 3 = -2.
    assert "-2" in tilt.detail
    with pytest.raises(ValidationError):
        m.require_valid()


def test_frank_always_valid(pareto21, unit_uniform):
    for theta in [0.5, 2.0, 5.0]:
        assert tp.FrankModel(theta, pareto21, unit_uniform).validate().ok
    with pytest.raises(DomainError):
        tp.FrankModel(0.0, pareto21, unit_uniform)
    with pytest.raises(DomainError):
        tp.FrankModel(-1.0, pareto21, unit_uniform)


def test_amh_boundary_flagged(amh_boundary):
    report = amh_boundary.validate()
    assert report.ok            # constructible and sampleable
    assert report.non_cd        # but flagged
    assert amh_boundary.non_cd
    with pytest.raises(DomainError):
        tp.AmhModel(1.0, amh_boundary.marginal_x, amh_boundary.marginal_y)


def test_degenerate_y_needs_independence(pareto21):
    G = tp.Degenerate(1.0)
    independent = tp.independent_pair(pareto21, G)
    assert independent.validate().ok
    tilted = tp.SarmanovModel(0.5, tp.FgmKernel(pareto21), tp.FgmKernel(G),
                              pareto21, G)
    assert not tilted.validate().ok


def test_shift_requires_catalog_marginal(unit_uniform):
    light = tp.independent_pair(tp.Exponential(1.0), unit_uniform)
    with pytest.raises(UnsupportedMarginalError):
        tp.shift_construct(light)
    boundary = tp.AmhModel(-1.0, tp.Pareto(2.0, 1.0), unit_uniform)
    with pytest.raises(ValidationError):
        tp.shift_construct(boundary)


# ------------------------------------------------------------ conditional tail

def test_fgm_cond_tail_closed_form(fgm_model, pareto21):
    # Reduction oracle: tail(x) * (1 - theta*phi2(y)*cdf(x)) for the FGM tilt.
    x = math.sqrt(2.0)
    y = 0.25
    oracle = pareto21.tail(x) * (1.0 - 0.5 * (1.0 - 2.0 * y) * pareto21.cdf(x))
    assert oracle == pytest.approx(0.4375, abs=1e-12)
    assert fgm_model.cond_tail(x, y) == pytest.approx(0.4375, abs=1e-12)


def test_frank_cond_tail_below_support(frank_model):
    for y in [0.1, 0.5, 0.9]:
        assert frank_model.cond_tail(0.5, y) == pytest.approx(1.0, abs=1e-14)


def test_amh_zero_theta_reduces_to_tail(pareto21, unit_uniform):
    m = tp.AmhModel(0.0, pareto21, unit_uniform)
    for x in [0.5, 2.0, 11.0]:
        assert m.cond_tail(x, 0.4) == pytest.approx(pareto21.tail(x), rel=1e-14)


def test_cond_tail_domain(fgm_model):
    with pytest.raises(DomainError):
        fgm_model.cond_tail(2.0, 1.5)
    with pytest.raises(DomainError):
        fgm_model.cond_tail(2.0, 0.0)


def test_cond_tail_broadcasts(fgm_model):
    ys = np.array([0.2, 0.5, 0.8])
    out = fgm_model.cond_tail(3.0, ys)
    assert out.shape == (3,)
    single = fgm_model.cond_tail(3.0, 0.5)
    assert isinstance(single, float)
    assert single == pytest.approx(out[1])


# --------------------------------------------------------------- adjustment s

def test_fgm_adjustment_value(fgm_model):
    # 1 + theta * d1 * phi2 with d1 = -1, phi2(0.25) = 0.5.
    assert fgm_model.tail_adjustment(0.25) == pytest.approx(0.75, abs=1e-14)


def test_frank_adjustment_attains_upper_bound(frank_model):
    theta = frank_model.theta
    bound = theta / (1.0 - math.exp(-theta))
    assert frank_model.tail_adjustment(1.0) == pytest.approx(bound, rel=1e-14)


def test_zero_theta_adjustment_is_one(independent_model):
    ys = np.linspace(0.01, 0.99, 25)
    assert np.allclose(independent_model.tail_adjustment(ys), 1.0)


def test_adjustment_off_support_is_one(fgm_model, frank_model, amh_model):
    for m in [fgm_model, frank_model, amh_model]:
        assert m.tail_adjustment(5.0) == 1.0
        assert m.tail_adjustment(-3.0) == 1.0


def test_amh_boundary_adjustment(amh_boundary, unit_uniform):
    y = 0.3
    assert amh_boundary.tail_adjustment(y) == pytest.approx(2.0 * unit_uniform.tail(y))


@pytest.mark.parametrize("name", ["fgm_model", "exp_kernel_model", "frank_model",
                                  "amh_model", "amh_boundary", "shift_model",
                                  "weakened_model"])
def test_adjustment_mass_is_one(name, request):
    model = request.getfixturevalue(name)
    assert tp.mean_tail_adjustment(model) == pytest.approx(1.0, abs=1e-8)


def test_adjustment_bounded_by_analytic_cap(fgm_model, frank_model, amh_model,
                                            weakened_model):
    ys = np.linspace(1e-6, 1.0 - 1e-6, 2001)
    cap_frank = frank_model.theta / (1.0 - math.exp(-frank_model.theta))
    assert np.max(frank_model.tail_adjustment(ys)) <= cap_frank + 1e-12
    assert np.max(amh_model.tail_adjustment(ys)) <= 1.0 + abs(amh_model.theta) + 1e-12
    assert np.max(fgm_model.tail_adjustment(ys)) <= 1.5 + 1e-12  # 1 + |theta d1| b2
    G = weakened_model.marginal_y
    grid = np.asarray(G.quantile(np.linspace(0.001, 0.999, 999)))
    cap = 1.0 + abs(weakened_model.theta * 1.0) * weakened_model.kernel_y.bound
    assert np.max(weakened_model.tail_adjustment(grid)) <= cap + 1e-12


# ------------------------------------------------------- marginal consistency

@pytest.mark.parametrize("name", ["fgm_model", "independent_model", "exp_kernel_model",
                                  "frank_model", "amh_model", "amh_boundary",
                                  "shift_model", "weakened_model"])
def test_marginal_consistency(name, request):
    """Integrating the conditional tail against G recovers the X tail."""
    model = request.getfixturevalue(name)
    F, G = model.marginal_x, model.marginal_y
    for u in np.linspace(0.05, 0.995, 20):
        x = float(np.asarray(F.quantile(u)))
        integral = expectation(G, lambda y: model.cond_tail(x, y), tol=1e-11)
        assert integral == pytest.approx(float(np.asarray(F.tail(x))), abs=1e-7)


# ---------------------------------------------------------------- copula cdf

def test_copula_corners(frank_model, amh_model):
    for m in [frank_model, amh_model]:
        for x in [1.5, 3.0, 10.0]:
            fx = float(np.asarray(m.marginal_x.cdf(x)))
            assert m.joint_cdf(x, 0.0) == pytest.approx(0.0, abs=1e-14)
            assert m.joint_cdf(x, 1.0) == pytest.approx(fx, rel=1e-12)


def test_sarmanov_joint_cdf_reduces_to_product(independent_model):
    m = independent_model
    assert m.joint_cdf(2.0, 0.3) == pytest.approx(
        float(np.asarray(m.marginal_x.cdf(2.0))) * 0.3, rel=1e-12)


def test_fgm_joint_cdf_closed_form(fgm_model):
    # Classic tilted-product form: F G (1 + theta (1-F)(1-G)).
    F, G = fgm_model.marginal_x, fgm_model.marginal_y
    for x, y in [(1.5, 0.25), (3.0, 0.7), (10.0, 0.9)]:
        fx = float(np.asarray(F.cdf(x)))
        gy = float(np.asarray(G.cdf(y)))
        oracle = fx * gy * (1.0 + 0.5 * (1.0 - fx) * (1.0 - gy))
        assert fgm_model.joint_cdf(x, y) == pytest.approx(oracle, rel=1e-12)


# -------------------------------------------------------------- uniform limit

@pytest.mark.parametrize("name", ["fgm_model", "exp_kernel_model", "frank_model",
                                  "amh_model", "weakened_model", "shift_model"])
def test_cd_ratio_tends_to_one_pointwise(name, request):
    model = request.getfixturevalue(name)
    F, G = model.marginal_x, model.marginal_y
    ys = np.asarray(G.quantile(np.array([0.1, 0.5, 0.9])))
    prev = None
    for k in [1, 2, 3, 4]:
        x = float(np.asarray(F.quantile(1.0 - 10.0 ** (-k))))
        dev = np.max(np.abs(
            np.asarray(model.cond_tail(x, ys))
            / (float(np.asarray(F.tail(x))) * np.asarray(model.tail_adjustment(ys)))
            - 1.0))
        if prev is not None:
            # Strict decay until the quadrature noise floor is reached.
            assert dev < prev or max(dev, prev) < 1e-9
        prev = dev
    assert prev < 1e-2


# ------------------------------------------------------------------- sampling

def test_sample_joint_deterministic(fgm_model):
    a = fgm_model.sample_joint(tp.RngStream(SEED))
    b = fgm_model.sample_joint(tp.RngStream(SEED))
    assert a == b


def test_independent_sampler_is_product_law(independent_model):
    n = 10 ** 5
    gen = tp.RngStream(SEED).generator()
    x, y = independent_model.sample_joint_chunk(gen, n)
    F, G = independent_model.marginal_x, independent_model.marginal_y
    assert stats.kstest(x, lambda v: np.asarray(F.cdf(v))).statistic < 1.63 / math.sqrt(n)
    assert stats.kstest(y, lambda v: np.asarray(G.cdf(v))).statistic < 1.63 / math.sqrt(n)
    # Rank correlation, robust to the heavy tail of X.
    corr = stats.spearmanr(x, y).statistic
    assert abs(corr) < 3.0 / math.sqrt(n)


@pytest.mark.parametrize("name", ["fgm_model", "exp_kernel_model", "frank_model",
                                  "amh_model", "amh_boundary", "weakened_model"])
def test_sampler_marginals(name, request):
    model = request.getfixturevalue(name)
    n = 10 ** 5
    gen = tp.RngStream(SEED).generator()
    x, y = model.sample_joint_chunk(gen, n)
    F, G = model.marginal_x, model.marginal_y
    crit = 1.63 / math.sqrt(n)
    assert stats.kstest(x, lambda v: np.asarray(F.cdf(v))).statistic < crit
    assert stats.kstest(y, lambda v: np.asarray(G.cdf(v))).statistic < crit


@pytest.mark.parametrize("name", ["fgm_model", "frank_model", "amh_model"])
def test_sampler_joint_law(name, request):
    """Empirical rectangle probabilities match the joint cdf."""
    model = request.getfixturevalue(name)
    n = 10 ** 5
    gen = tp.RngStream(SEED + 1).generator()
    x, y = model.sample_joint_chunk(gen, n)
    F, G = model.marginal_x, model.marginal_y
    x0 = float(np.asarray(F.quantile(0.9)))
    y0 = float(np.asarray(G.quantile(0.5)))
    # P(X > x0, Y <= y0) = G(y0) - C(x0, y0).
    target = float(np.asarray(G.cdf(y0))) - model.joint_cdf(x0, y0)
    emp = float(np.mean((x > x0) & (y <= y0)))
    stderr = math.sqrt(target * (1.0 - target) / n)
    assert abs(emp - target) <= 3.0 * stderr


def test_frank_conditional_inversion_round_trip(frank_model):
    # The sampled u must invert the conditional copula: C_{u|v}(u|v) = p.
    th = frank_model.theta
    gen = tp.RngStream(SEED).generator()
    v = gen.random(1000)
    p = gen.random(1000)
    gu = p * math.expm1(-th) / (np.exp(-th * v) - p * np.expm1(-th * v))
    u = -np.log1p(gu) / th
    back = np.expm1(-th * u) * np.exp(-th * v) \
        / (math.expm1(-th) + np.expm1(-th * u) * np.expm1(-th * v))
    assert np.max(np.abs(back - p)) < 1e-10


def test_amh_conditional_inversion_round_trip(amh_model):
    th = amh_model.theta
    gen = tp.RngStream(SEED).generator()
    v = gen.random(1000)
    p = gen.random(1000)
    from tailprod.dependence import _quadratic_root_in_unit
    a = th * (1.0 - v)
    w = _quadratic_root_in_unit(p * a * a - th, 1.0 + th - 2.0 * p * a, p - 1.0)
    u = 1.0 - w
    back = u * (1.0 - th * (1.0 - u)) / (1.0 - th * (1.0 - u) * (1.0 - v)) ** 2
    assert np.max(np.abs(back - p)) < 1e-9


def test_rejection_stall_reported(pareto21, unit_uniform):
    m = tp.SarmanovModel(1e7, tp.ScaledFgmKernel(pareto21, 1.0),
                         tp.FgmKernel(unit_uniform), pareto21, unit_uniform)
    with pytest.raises(RejectionStallError):
        m.sample_joint_chunk(tp.RngStream(SEED).generator(), 10)


# ---------------------------------------------------------------------- shift

def test_shift_adjustment_is_identity_for_independent_base(shift_model):
    ys = np.linspace(0.01, 0.99, 99)
    assert np.max(np.abs(np.asarray(shift_model.tail_adjustment(ys)) - 1.0)) < 1e-8
    assert tp.mean_tail_adjustment(shift_model) == pytest.approx(1.0, abs=1e-8)


def test_shift_marginal_tail_closed_form(shift_model):
    # For the independent Pareto(2,1) minus U(0,1) base:
    # tail(x) = 1 - x^2/(1+x) for x in [0,1), 1/(x(x+1)) for x >= 1.
    assert shift_model.marginal_x.tail(10.0) == pytest.approx(1.0 / 110.0, abs=1e-10)
    assert shift_model.marginal_x.tail(0.5) == pytest.approx(1.0 - 0.25 / 1.5, abs=1e-10)
    assert shift_model.marginal_x.tail(-1.0) == 1.0


def test_shift_sum_recovers_first_coordinate(shift_model, pareto21):
    n = 10 ** 5
    gen = tp.RngStream(SEED).generator()
    x, y = shift_model.sample_joint_chunk(gen, n)
    ks = stats.kstest(x + y, lambda v: np.asarray(pareto21.cdf(v))).statistic
    assert ks < 1.63 / math.sqrt(n)


def test_shift_dependence_despite_unit_adjustment(shift_model):
    n = 10 ** 5
    gen = tp.RngStream(SEED).generator()
    x, y = shift_model.sample_joint_chunk(gen, n)
    assert float(np.corrcoef(x, y)[0, 1]) < -0.05


def test_shift_cond_tail_shifts_base(shift_model, pareto21):
    # Independent base: P(X > x | Y = y) = tail_xi(x + y).
    assert shift_model.cond_tail(3.0, 0.5) == pytest.approx(pareto21.tail(3.5), rel=1e-12)


def test_shift_quantile_inverts_tail(shift_model):
    for p in [0.3, 0.9, 0.999]:
        x = shift_model.marginal_x.quantile(p)
        assert shift_model.marginal_x.cdf(x) == pytest.approx(p, abs=1e-9)
