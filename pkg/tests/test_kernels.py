import math

import numpy as np
import pytest
from scipy import integrate

import tailprod as tp
from tailprod.errors import DomainError, NoLimitError

PARETO = tp.Pareto(2.0, 1.0)
UNIT = tp.Uniform(0.0, 1.0)
TWO_SIDED = tp.ShiftedPareto(2.0, 1.0, 3.0)

ALL_KERNELS = [
    tp.FgmKernel(PARETO),
    tp.FgmKernel(UNIT),
    tp.ScaledFgmKernel(PARETO, 1.0),
    tp.ScaledFgmKernel(PARETO, -2.5),
    tp.TruncatedExpKernel(PARETO),
    tp.TruncatedExpKernel(TWO_SIDED),
    tp.ExpKernel(UNIT),
    tp.ExpKernel(tp.Exponential(1.0)),
    tp.PowerKernel(UNIT, 2.0),
    tp.ReciprocalKernel(UNIT),
    tp.ReciprocalKernel(tp.LogPareto(2.0, 1.0)),
]


@pytest.mark.parametrize("kernel", ALL_KERNELS, ids=lambda k: f"{k.kind}-{type(k.marginal).__name__}")
def test_centering(kernel):
    assert kernel.centering_residual() <= 1e-8


def test_fgm_limit():
    assert tp.FgmKernel(PARETO).tail_limit == -1.0


def test_scaled_fgm_limit():
    assert tp.ScaledFgmKernel(PARETO, 2.0).tail_limit == 2.0


def test_truncated_exp_offset_oracle():
    # On a positive support the offset is E exp(-X); independent quadrature.
    oracle = integrate.quad(lambda x: math.exp(-x) * 2.0 * x ** -3.0, 1.0, math.inf,
                            epsabs=1e-13, epsrel=1e-13)[0]
    k = tp.TruncatedExpKernel(PARETO)
    assert k.offset == pytest.approx(oracle, rel=1e-10)
    assert k.tail_limit == pytest.approx(-oracle, rel=1e-10)


def test_truncated_exp_indicator():
    k = tp.TruncatedExpKernel(TWO_SIDED)
    assert k.phi(-1.0) == 0.0
    assert k.phi(0.0) == pytest.approx(1.0 - k.offset)
    assert k.phi(np.array([-5.0, 0.5])).shape == (2,)


def test_exp_kernel_offset_closed_form():
    # E exp(-Y) over U(0,1) is 1 - 1/e.
    k = tp.ExpKernel(UNIT)
    assert k.offset == pytest.approx(1.0 - math.exp(-1.0), rel=1e-12)
    assert k.tail_limit == pytest.approx(-(1.0 - math.exp(-1.0)), rel=1e-12)


def test_reciprocal_offset_closed_form():
    # E 1/(1+Y) over U(0,1) is log 2.
    k = tp.ReciprocalKernel(UNIT)
    assert k.offset == pytest.approx(math.log(2.0), rel=1e-12)


def test_power_kernel_bounded_support():
    k = tp.PowerKernel(UNIT, 2.0)
    assert k.bound == pytest.approx(max(1.0 - 1.0 / 3.0, 1.0 / 3.0))
    assert k.tail_limit == pytest.approx(1.0 - 1.0 / 3.0)


def test_power_kernel_unbounded_support_rejected():
    k = tp.PowerKernel(PARETO, 1.0)
    assert k.bound == math.inf
    with pytest.raises(NoLimitError):
        k.tail_limit
    with pytest.raises(DomainError):
        tp.PowerKernel(PARETO, 2.0)  # centering moment diverges


def test_fgm_upper_partial_closed_form_matches_quadrature():
    k = tp.FgmKernel(PARETO)
    generic = tp.kernels.Kernel.upper_partial
    for x in [0.5, 1.5, 3.0, 20.0]:
        assert k.upper_partial(x) == pytest.approx(generic(k, x), abs=1e-9)


def test_upper_partial_total_is_centering():
    # Integrating phi over the whole support must give zero.
    for kernel in [tp.TruncatedExpKernel(PARETO), tp.ExpKernel(UNIT),
                   tp.ReciprocalKernel(UNIT)]:
        lo = kernel.marginal.support[0]
        assert abs(kernel.upper_partial(lo - 1.0)) <= 1e-8


def test_phi_vectorized():
    k = tp.FgmKernel(PARETO)
    out = k.phi(np.array([1.0, 2.0, 4.0]))
    assert out.shape == (3,)
    assert out[0] == pytest.approx(1.0)  # tail = 1 at the support edge
