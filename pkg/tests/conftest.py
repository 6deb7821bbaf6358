"""Shared fixtures and random instance generators for the test suite.

The generators keep coefficients inside the ranges the validators accept
(R bounded away from zero, Q - S^2/R >= 0, M >= 0) and small enough that
one-unit-horizon dynamics stay well conditioned.
"""

import numpy as np
import pytest

from lqrl.model import (
    Constant,
    CostSpec,
    DriftParams,
    GeneralLqModel,
    LqModel,
    Sampled,
    ThetaBox,
    TimeGrid,
)
from lqrl.policy import GaussianPolicy
from lqrl.inference import Prior


# ---------------------------------------------------------------------------
# default benchmark

def benchmark_model() -> LqModel:
    cost = CostSpec.create(Q=1.0, R=1.0, M=0.5)
    return LqModel.create(DriftParams(0.3, 1.0), 0.5, 1.0, 1.0, cost)


def benchmark_box() -> ThetaBox:
    return ThetaBox(-2.0, 2.0, 0.2, 3.0)


def benchmark_prior() -> Prior:
    return Prior(DriftParams(0.0, 0.5), np.eye(2))


@pytest.fixture(scope="session")
def default_model():
    return benchmark_model()


# ---------------------------------------------------------------------------
# random instances

def sampled(rng, lo, hi, T=1.0, knots=5):
    """Piecewise-linear coefficient with values drawn uniformly in [lo, hi]."""
    return Sampled(rng.uniform(lo, hi, size=knots), T)


def random_cost(rng, T=1.0) -> CostSpec:
    Q = sampled(rng, 0.05, 1.5, T)
    R = sampled(rng, 0.5, 2.0, T)
    # A constant S below sqrt(min Q * min R) keeps Q - S^2/R >= 0 everywhere.
    q_min = Q.values.min()
    r_min = R.values.min()
    S = Constant(rng.uniform(-0.8, 0.8) * np.sqrt(q_min * r_min))
    return CostSpec(
        Q=Q,
        S=S,
        R=R,
        p=sampled(rng, -0.5, 0.5, T),
        q=sampled(rng, -0.5, 0.5, T),
        M=float(rng.uniform(0.0, 1.0)),
        m_bar=float(rng.uniform(-0.5, 0.5)),
    )


def random_lq_model(rng, T=1.0) -> LqModel:
    theta = DriftParams(float(rng.uniform(-0.7, 0.7)), float(rng.uniform(0.3, 1.2)))
    sigma = sampled(rng, 0.2, 0.8, T)
    x0 = float(rng.uniform(-1.0, 1.0))
    return LqModel.create(theta, sigma, x0, T, random_cost(rng, T))


def random_general_model(rng, T=1.0) -> GeneralLqModel:
    return GeneralLqModel.create(
        A=sampled(rng, -0.7, 0.7, T),
        B=sampled(rng, 0.3, 1.0, T),
        b_bar=sampled(rng, -0.5, 0.5, T),
        C=sampled(rng, -0.5, 0.5, T),
        D=sampled(rng, -0.5, 0.5, T),
        sigma_bar=sampled(rng, 0.2, 0.8, T),
        x0=float(rng.uniform(-1.0, 1.0)),
        T=T,
        cost=random_cost(rng, T),
    )


def random_policy(rng, T=1.0) -> GaussianPolicy:
    return GaussianPolicy(
        k=sampled(rng, -0.5, 0.5, T),
        K=sampled(rng, -0.8, 0.2, T),
        lam=sampled(rng, 0.1, 0.5, T),
    )


def random_exec_grid(rng, T=1.0) -> TimeGrid:
    return TimeGrid(T, int(rng.choice([8, 16])))


# ---------------------------------------------------------------------------
# acceptance reporting: collect one PASS/FAIL line per criterion and echo
# them in the terminal summary so they survive pytest's capture.

@pytest.fixture(scope="session")
def acceptance_log(request):
    lines = getattr(request.config, "_acceptance_lines", None)
    if lines is None:
        lines = []
        request.config._acceptance_lines = lines
    return lines


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
