import pytest

import tailprod as tp

# Project-wide seed for every stochastic test; results are deterministic.
SEED = 20250810


@pytest.fixture(scope="session")
def pareto21():
    return tp.Pareto(2.0, 1.0)


@pytest.fixture(scope="session")
def unit_uniform():
    return tp.Uniform(0.0, 1.0)


@pytest.fixture(scope="session")
def fgm_model(pareto21, unit_uniform):
    """Reference model: FGM tilt with theta = 0.5 over Pareto(2,1) x U(0,1)."""
    return tp.SarmanovModel(0.5, tp.FgmKernel(pareto21), tp.FgmKernel(unit_uniform),
                            pareto21, unit_uniform)


@pytest.fixture(scope="session")
def independent_model(pareto21, unit_uniform):
    return tp.independent_pair(pareto21, unit_uniform)


@pytest.fixture(scope="session")
def exp_kernel_model(pareto21, unit_uniform):
    return tp.SarmanovModel(1.0, tp.TruncatedExpKernel(pareto21),
                            tp.ExpKernel(unit_uniform), pareto21, unit_uniform)


@pytest.fixture(scope="session")
def frank_model(pareto21, unit_uniform):
    return tp.FrankModel(2.0, pareto21, unit_uniform)


@pytest.fixture(scope="session")
def amh_model(pareto21, unit_uniform):
    return tp.AmhModel(-0.5, pareto21, unit_uniform)


@pytest.fixture(scope="session")
def amh_boundary(pareto21, unit_uniform):
    return tp.AmhModel(-1.0, pareto21, unit_uniform)


@pytest.fixture(scope="session")
def shift_model(pareto21, unit_uniform):
    return tp.shift_construct(tp.independent_pair(pareto21, unit_uniform))


@pytest.fixture(scope="session")
def weakened_model(pareto21):
    """Reciprocal y-kernel over a log-perturbed heavy tail: the alpha-th
    moment of Y diverges while E[Y**alpha s(Y)] stays finite."""
    G = tp.LogPareto(2.0, 1.0)
    k2 = tp.ReciprocalKernel(G)
    theta = 1.0 / k2.offset  # makes s(y) = theta * d1 / (1 + y) with d1 = 1
    return tp.SarmanovModel(theta, tp.ScaledFgmKernel(pareto21, 1.0), k2,
                            pareto21, G)
