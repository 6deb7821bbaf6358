"""Conjugate drift estimation: sufficient statistics, posterior, truncation."""

import math

import numpy as np
import pytest

from lqrl.dynamics import EpisodeTrajectory, simulate_episode
from lqrl.inference import (
    Prior,
    SufficientStats,
    accumulate,
    lambda_min,
    posterior,
    truncate,
)
from lqrl.model import Constant, DriftParams, TimeGrid
from lqrl.policy import NoisePath, RandomisedPolicy, sample_noise_path

from conftest import benchmark_box, benchmark_model, random_policy


def handmade_traj(grid: TimeGrid, states, actions) -> EpisodeTrajectory:
    return EpisodeTrajectory(
        grid=grid,
        states=np.asarray(states, dtype=float),
        actions=np.asarray(actions, dtype=float),
        noise=NoisePath(grid=grid, draws=np.zeros(grid.n)),
        dW=np.zeros(grid.n),
    )


def test_constant_path_gram_by_hand():
    # X == c and a == 0 on [0, 1] with unit noise: the Gram matrix is
    # c^2 in the state slot, zero elsewhere, and no increments means b = 0.
    c = 1.7
    grid = TimeGrid(1.0, 4)
    traj = handmade_traj(grid, np.full(5, c), np.zeros(5))
    stats = accumulate(SufficientStats.zero(), traj, 1.0)
    assert stats.episode_count == 1
    assert stats.G == pytest.approx(np.array([[c * c, 0.0], [0.0, 0.0]]), abs=1e-12)
    assert stats.b == pytest.approx(np.zeros(2), abs=1e-15)


def test_noise_weighting_scales_the_gram():
    grid = TimeGrid(1.0, 4)
    traj = handmade_traj(grid, np.full(5, 2.0), np.zeros(5))
    narrow = accumulate(SufficientStats.zero(), traj, 0.5)
    wide = accumulate(SufficientStats.zero(), traj, 1.0)
    assert narrow.G[0, 0] == pytest.approx(4.0 * wide.G[0, 0], rel=1e-13)


def test_accumulate_is_additive():
    model = benchmark_model()
    grid = TimeGrid(model.T, 20)
    rng = np.random.default_rng(42)
    base = random_policy(rng)

    def episode():
        pol = RandomisedPolicy(base=base, noise=sample_noise_path(grid, rng))
        return simulate_episode(model, pol, rng)

    t1, t2 = episode(), episode()
    joint = accumulate(accumulate(SufficientStats.zero(), t1, model.sigma_bar), t2, model.sigma_bar)
    s1 = accumulate(SufficientStats.zero(), t1, model.sigma_bar)
    s2 = accumulate(SufficientStats.zero(), t2, model.sigma_bar)
    assert joint.episode_count == 2
    assert joint.G == pytest.approx(s1.G + s2.G, rel=1e-13)
    assert joint.b == pytest.approx(s1.b + s2.b, rel=1e-13)


def test_zero_information_returns_the_prior():
    prior = Prior(DriftParams(0.3, 1.1), np.array([[2.0, 0.4], [0.4, 1.0]]))
    post = posterior(SufficientStats.zero(), prior)
    assert post.theta_hat.A == pytest.approx(0.3, abs=1e-12)
    assert post.theta_hat.B == pytest.approx(1.1, abs=1e-12)
    assert post.V == pytest.approx(prior.V0, abs=1e-12)
    assert post.theta_trunc is None


def test_flat_prior_recovers_least_squares():
    """With V0 = 1e8 I the posterior mean must match solve(G, b)."""
    model = benchmark_model()
    grid = TimeGrid(model.T, 50)
    rng = np.random.default_rng(1234)
    stats = SufficientStats.zero()
    for _ in range(30):
        base = random_policy(rng)
        pol = RandomisedPolicy(base=base, noise=sample_noise_path(grid, rng))
        stats = accumulate(stats, simulate_episode(model, pol, rng), model.sigma_bar)
    ls = np.linalg.solve(stats.G, stats.b)
    post = posterior(stats, Prior(DriftParams(0.0, 0.0), 1e8 * np.eye(2)))
    got = np.array([post.theta_hat.A, post.theta_hat.B])
    assert np.max(np.abs(got - ls)) < 1e-6 * max(1.0, np.max(np.abs(ls)))
    # thirty exploratory episodes identify the true drift to within ~0.3
    assert abs(post.theta_hat.A - model.theta_star.A) < 0.5
    assert abs(post.theta_hat.B - model.theta_star.B) < 0.5


def test_posterior_covariance_never_grows():
    model = benchmark_model()
    grid = TimeGrid(model.T, 30)
    rng = np.random.default_rng(5)
    prior = Prior(DriftParams(0.0, 0.5), np.eye(2))
    stats = SufficientStats.zero()
    last = math.inf
    for _ in range(6):
        base = random_policy(rng)
        pol = RandomisedPolicy(base=base, noise=sample_noise_path(grid, rng))
        stats = accumulate(stats, simulate_episode(model, pol, rng), model.sigma_bar)
        lam = lambda_min(posterior(stats, prior).V)
        assert lam <= last + 1e-15
        assert lam > 0.0
        last = lam


def test_truncation_clips_into_the_box():
    box = benchmark_box()
    post = posterior(
        SufficientStats.zero(), Prior(DriftParams(5.0, 0.0001), 1e6 * np.eye(2))
    )
    cut = truncate(post, box)
    assert cut.theta_trunc.A == pytest.approx(box.A_hi)
    assert cut.theta_trunc.B == pytest.approx(box.B_lo)
    # the un-truncated estimate is kept alongside
    assert cut.theta_hat.A == pytest.approx(5.0, abs=1e-9)


def test_left_endpoint_sums_converge_at_first_order():
    """Feed the estimator a smooth deterministic path and check the
    discretisation error of both statistics decays like 1/n."""

    def x_of(t):
        return np.sin(2.3 * t + 0.4)

    g_exact = 0.5 - (np.sin(2 * 2.3 + 0.8) - np.sin(0.8)) / (4 * 2.3)  # int x^2 dt
    b_exact = 0.5 * (x_of(1.0) ** 2 - x_of(0.0) ** 2)  # int x dx

    g_err, b_err, ns = [], [], (32, 64, 128, 256)
    for n in ns:
        grid = TimeGrid(1.0, n)
        traj = handmade_traj(grid, x_of(grid.knots), np.zeros(n + 1))
        stats = accumulate(SufficientStats.zero(), traj, 1.0)
        g_err.append(abs(stats.G[0, 0] - g_exact))
        b_err.append(abs(stats.b[0] - b_exact))
    for errs in (g_err, b_err):
        slope = np.polyfit(np.log(ns), np.log(errs), 1)[0]
        assert -1.2 < slope < -0.8


def test_accumulate_rejects_vanishing_noise():
    grid = TimeGrid(1.0, 4)
    traj = handmade_traj(grid, np.ones(5), np.zeros(5))
    with pytest.raises(ValueError):
        accumulate(SufficientStats.zero(), traj, 0.0)
    with pytest.raises(ValueError):
        accumulate(SufficientStats.zero(), traj, Constant(-0.3))


def test_lambda_min_matches_eigvalsh():
    rng = np.random.default_rng(9)
    for _ in range(25):
        r = rng.normal(size=(2, 2))
        sym = r + r.T
        assert lambda_min(sym) == pytest.approx(np.linalg.eigvalsh(sym)[0], abs=1e-12)


def test_prior_validation():
    with pytest.raises(ValueError):
        Prior(DriftParams(0.0, 1.0), np.array([[1.0, 0.5], [0.4, 1.0]]))  # asymmetric
    with pytest.raises(ValueError):
        Prior(DriftParams(0.0, 1.0), np.array([[1.0, 2.0], [2.0, 1.0]]))  # indefinite
    with pytest.raises(ValueError):
        Prior(DriftParams(0.0, 1.0), np.zeros((2, 2)))


def test_stats_shape_validation():
    with pytest.raises(ValueError):
        SufficientStats(G=np.zeros((3, 3)), b=np.zeros(2), episode_count=0)
