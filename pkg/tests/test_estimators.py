import math
import warnings

import numpy as np
import pytest
from scipy import integrate

import tailprod as tp
from tailprod.engine import proportion_stderr
from tailprod.errors import DomainError, InsufficientHitsWarning, NotCdError

from conftest import SEED

MC_BATTERY = ["fgm_model", "independent_model", "exp_kernel_model", "frank_model",
              "amh_model", "amh_boundary", "shift_model", "weakened_model"]


# ------------------------------------------------------------------ constants

def test_breiman_constant_reference(fgm_model):
    # Oracle: s(y) = 0.5 + y for this tilt, so the constant is
    # int_0^1 y^2 (0.5 + y) dy = 5/12; evaluate the integral independently.
    oracle = integrate.quad(lambda y: y ** 2 * (0.5 + y), 0.0, 1.0)[0]
    assert oracle == pytest.approx(5.0 / 12.0, abs=1e-14)
    assert tp.breiman_constant(fgm_model) == pytest.approx(5.0 / 12.0, abs=1e-8)


def test_breiman_independence_reduction(independent_model, unit_uniform):
    value = tp.breiman_constant(independent_model, 2.0)
    assert value == pytest.approx(unit_uniform.moment(2.0), abs=1e-12)


def test_breiman_monte_carlo(fgm_model):
    mean, stderr = tp.breiman_constant_mc(fgm_model, n_samples=10 ** 5, seed=SEED)
    assert abs(mean - 5.0 / 12.0) <= 3.0 * stderr
    assert tp.breiman_constant(fgm_model, method="monte_carlo",
                               n_samples=10 ** 5, seed=SEED) == mean


def test_breiman_rejects_non_cd(amh_boundary):
    with pytest.raises(NotCdError):
        tp.breiman_constant(amh_boundary)


def test_breiman_weakened_moment(weakened_model):
    # The plain moment diverges but the adjusted constant is finite.
    assert weakened_model.marginal_y.moment(2.0) == math.inf
    value = tp.breiman_constant(weakened_model)
    assert math.isfinite(value) and value > 0
    # Independent oracle: s(y) = theta/(1+y), constant = theta E[Y^2/(1+Y)].
    G = weakened_model.marginal_y
    lo = G.support[0]
    oracle = weakened_model.theta * integrate.quad(
        lambda y: y ** 2 / (1.0 + y) * np.asarray(G.density(y)), lo, math.inf,
        epsabs=1e-12, epsrel=1e-12, limit=600)[0]
    assert value == pytest.approx(oracle, rel=1e-6)


def test_breiman_divergent_when_adjustment_stays_flat(pareto21):
    # An FGM tilt keeps s bounded away from zero, so the constant inherits
    # the divergence of E Y**2 under the log-perturbed marginal.
    G = tp.LogPareto(2.0, 1.0)
    m = tp.SarmanovModel(0.5, tp.FgmKernel(pareto21), tp.FgmKernel(G), pareto21, G)
    assert tp.breiman_constant(m) == math.inf


def test_breiman_degenerate_y(pareto21):
    m = tp.independent_pair(pareto21, tp.Degenerate(0.5))
    assert tp.breiman_constant(m, 2.0) == pytest.approx(0.25, abs=1e-14)


def test_alpha_resolution(pareto21, unit_uniform):
    m = tp.independent_pair(tp.Exponential(1.0), unit_uniform)
    with pytest.raises(DomainError):
        tp.breiman_constant(m)
    assert tp.breiman_constant(m, 2.0) == pytest.approx(1.0 / 3.0, abs=1e-10)


# --------------------------------------------------------------- exact oracle

def test_product_tail_degenerate_y(pareto21):
    m = tp.independent_pair(pareto21, tp.Degenerate(1.0))
    for x in [2.0, 5.0, 40.0]:
        assert tp.product_tail_exact(m, x) == pytest.approx(pareto21.tail(x), rel=1e-12)


def test_product_tail_independent_closed_form(independent_model):
    for x in [1.0, 2.0, 5.0, 10.0, 100.0, 1000.0]:
        assert abs(tp.product_tail_exact(independent_model, x) - 1.0 / (3.0 * x * x)) <= 1e-9


def test_product_tail_fgm_closed_form(fgm_model):
    # Polynomial reduction of the tilted integral:
    # P(XY > x) = (5/12) x^-2 - (1/15) x^-4 for x >= 1.
    for x in [2.0, 10.0, 100.0]:
        oracle = (5.0 / 12.0) * x ** -2 - (1.0 / 15.0) * x ** -4
        assert tp.product_tail_exact(fgm_model, x) == pytest.approx(oracle, abs=1e-11)
    ratio = tp.product_tail_exact(fgm_model, 100.0) / fgm_model.marginal_x.tail(100.0)
    assert 0.40 <= ratio <= 0.42


@pytest.mark.parametrize("name", MC_BATTERY)
def test_asymptote_agreement(name, request):
    """The oracle ratio approaches the predicted constant deep in the tail."""
    model = request.getfixturevalue(name)
    if model.non_cd:
        return
    F = model.marginal_x
    x = float(np.asarray(F.quantile(1.0 - 1e-6)))
    ratio = tp.product_tail_exact(model, x) / float(np.asarray(F.tail(x)))
    constant = tp.breiman_constant(model)
    if not math.isfinite(constant):
        return
    assert ratio == pytest.approx(constant, rel=0.02)


# ------------------------------------------------------------------ muc ratio

@pytest.mark.parametrize("name", MC_BATTERY)
def test_oracle_agreement(name, request):
    """MC hit rates match the quadrature oracle within 3 binomial stderr."""
    model = request.getfixturevalue(name)
    F = model.marginal_x
    thresholds = [float(np.asarray(F.quantile(1.0 - q)))
                  for q in [0.05, 0.02, 0.01, 0.005, 0.002]]
    n = 2 * 10 ** 5
    report = tp.tail_ratio_mc(model, thresholds, n, seed=SEED)
    for stat in report.stats:
        exact = tp.product_tail_exact(model, stat.x)
        stderr = max(proportion_stderr(stat.hits, n),
                     math.sqrt(exact * (1.0 - exact) / n))
        assert abs(stat.p_hat - exact) <= 3.0 * stderr


def test_tail_ratio_report_fields(fgm_model):
    report = tp.tail_ratio_mc(fgm_model, [5.0, 10.0], 10 ** 4, seed=SEED)
    assert report.predicted_constant == pytest.approx(5.0 / 12.0, abs=1e-8)
    assert report.seed == SEED
    for stat in report.stats:
        assert 0 <= stat.hits <= report.n_samples
        assert stat.ci_lo <= stat.ratio <= stat.ci_hi


def test_tail_ratio_degenerate_y_is_exact_identity(pareto21):
    m = tp.independent_pair(pareto21, tp.Degenerate(1.0))
    thresholds = [4.0, 10.0]
    n = 10 ** 4
    report = tp.tail_ratio_mc(m, thresholds, n, seed=SEED)
    # With Y a unit point mass the product is X itself: reproduce the same
    # draws through the same stream layout and compare counts exactly.
    from tailprod.engine import RngStream, block_layout, DEFAULT_BLOCK_SIZE
    hits = np.zeros(len(thresholds), dtype=np.int64)
    for i, size in enumerate(block_layout(n, DEFAULT_BLOCK_SIZE)):
        gen = RngStream(SEED).derive(i).generator()
        x, y = m.sample_joint_chunk(gen, size)
        assert np.all(y == 1.0)
        for j, t in enumerate(thresholds):
            hits[j] += np.count_nonzero(x > t)
    assert [s.hits for s in report.stats] == hits.tolist()
    assert report.predicted_constant == pytest.approx(1.0, abs=1e-12)


def test_tail_ratio_preconditions(fgm_model):
    with pytest.raises(DomainError):
        tp.tail_ratio_mc(fgm_model, [10.0], 100, seed=SEED)          # too few samples
    with pytest.raises(DomainError):
        tp.tail_ratio_mc(fgm_model, [2.0], 10 ** 4, seed=SEED)       # outside tail region
    with pytest.raises(DomainError):
        tp.tail_ratio_mc(fgm_model, [20.0, 10.0], 10 ** 4, seed=SEED)  # not ascending


def test_insufficient_hits_warning(fgm_model):
    with pytest.warns(InsufficientHitsWarning):
        tp.tail_ratio_mc(fgm_model, [300.0], 10 ** 4, seed=SEED)


def test_non_cd_report_has_no_constant(amh_boundary):
    report = tp.tail_ratio_mc(amh_boundary, [5.0, 10.0], 10 ** 4, seed=SEED)
    assert report.predicted_constant is None


# ----------------------------------------------------------------- diagnostic

def test_diagnostic_frank_consistent(frank_model):
    diag = tp.cd_diagnostic(frank_model, [10.0, 100.0, 1000.0])
    assert diag.verdict == "consistent_with_cd"
    sups = diag.sup_deviations
    assert all(b < a for a, b in zip(sups, sups[1:]))
    assert sups[-1] < 0.05


def test_diagnostic_boundary_amh_flagged(amh_boundary):
    diag = tp.cd_diagnostic(amh_boundary, [10.0, 100.0, 1000.0], "tail_extended")
    assert diag.verdict == "not_cd"
    assert all(r.sup_deviation > 1.0 for r in diag.rows)


def test_diagnostic_boundary_amh_fixed_grid_inconclusive(amh_boundary):
    # Without the tail-extended probes the failing region is never visited:
    # the deviation still decays, which is exactly why the extended policy
    # exists.
    diag = tp.cd_diagnostic(amh_boundary, [10.0, 100.0, 1000.0])
    assert diag.verdict == "consistent_with_cd"


def test_diagnostic_restricted_region(amh_boundary):
    edge = amh_boundary.restricted_uniformity_edge()
    # tail_G at the edge equals 1/sqrt(3).
    assert amh_boundary.marginal_y.tail(edge) == pytest.approx(1.0 / math.sqrt(3.0), rel=1e-12)
    diag = tp.cd_diagnostic(amh_boundary, [10.0, 100.0, 1000.0], y_max=edge)
    sups = diag.sup_deviations
    assert all(b < a for a, b in zip(sups, sups[1:]))
    assert sups[-1] < 1e-4


@pytest.mark.parametrize("name", ["fgm_model", "exp_kernel_model", "frank_model",
                                  "amh_model", "weakened_model"])
def test_diagnostic_monotone_decay(name, request):
    model = request.getfixturevalue(name)
    diag = tp.cd_diagnostic(model, [10.0, 100.0, 1000.0, 10000.0])
    sups = diag.sup_deviations
    assert all(b < a for a, b in zip(sups, sups[1:]))


def test_diagnostic_grid_validation(fgm_model):
    with pytest.raises(DomainError):
        tp.cd_diagnostic(fgm_model, [100.0, 10.0])
    with pytest.raises(DomainError):
        tp.cd_diagnostic(fgm_model, [10.0, 100.0], "bogus")


def test_diagnostic_records_argmax(amh_boundary):
    diag = tp.cd_diagnostic(amh_boundary, [100.0], "tail_extended")
    row = diag.rows[0]
    # The worst deviation sits at the extended probe tail_G(y) = tail_F(x)/10.
    expected_y = float(np.asarray(
        amh_boundary.marginal_y.quantile(1.0 - amh_boundary.marginal_x.tail(100.0) / 10.0)))
    assert row.argmax_y == pytest.approx(expected_y, rel=1e-9)


# ----------------------------------------------------------- moment condition

def test_moment_condition_cases(fgm_model, weakened_model, pareto21):
    strong = tp.moment_condition_report(fgm_model)
    assert strong.case_i and strong.case_ii
    weak = tp.moment_condition_report(weakened_model)
    assert weak.case_i and weak.case_ii  # the reciprocal decay buys the epsilon
    # A marginal whose index sits between alpha and alpha + epsilon gives a
    # law satisfying only the plain condition.
    G = tp.LogPareto(2.05, 2.0)
    m = tp.SarmanovModel(0.5, tp.FgmKernel(pareto21), tp.FgmKernel(G), pareto21, G)
    report = tp.moment_condition_report(m, epsilon=0.1)
    assert report.case_ii and not report.case_i


def test_mean_tail_adjustment_requires_continuous_y(pareto21):
    m = tp.independent_pair(pareto21, tp.Degenerate(1.0))
    with pytest.raises(DomainError):
        tp.mean_tail_adjustment(m)
