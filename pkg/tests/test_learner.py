"""Episodic learning loop: schedules, determinism, policy updates, slope fits."""

import math

import numpy as np
import pytest

from lqrl.inference import Prior
from lqrl.learner import (
    LearnerConfig,
    LearningDiverged,
    RegretRecord,
    curve_slope,
    loglog_slope,
    regret_slope,
    run_learning,
    schedule_rho,
)
from lqrl.model import DriftParams

from conftest import benchmark_box, benchmark_model, benchmark_prior


def small_config(algorithm: str, episodes: int = 40, **kw) -> LearnerConfig:
    return LearnerConfig(
        model=benchmark_model(),
        box=benchmark_box(),
        prior=benchmark_prior(),
        algorithm=algorithm,
        episodes=episodes,
        exec_steps=kw.pop("exec_steps", 20),
        **kw,
    )


def test_schedule_values():
    assert schedule_rho("alg1", 1.0, 1) == pytest.approx(math.log(2.0), abs=1e-15)
    assert schedule_rho("alg1", 2.0, 4) == pytest.approx(math.log(5.0), abs=1e-15)
    assert schedule_rho("alg2", 1.0, 4) == pytest.approx(2.0 * math.log(5.0), abs=1e-15)
    # decaying vs increasing
    assert schedule_rho("alg1", 1.0, 400) < schedule_rho("alg1", 1.0, 4)
    assert schedule_rho("alg2", 1.0, 400) > schedule_rho("alg2", 1.0, 4)
    with pytest.raises(ValueError):
        schedule_rho("alg3", 1.0, 1)
    with pytest.raises(ValueError):
        schedule_rho("alg1", 1.0, 0)


def test_config_validation():
    with pytest.raises(ValueError):
        small_config("nope")
    with pytest.raises(ValueError):
        small_config("alg1", episodes=0)
    with pytest.raises(ValueError):
        small_config("alg1", rho0=0.0)


def test_single_episode_run():
    res = run_learning(small_config("alg1", episodes=1), master_seed=3)
    assert res.costs.shape == (1,)
    assert res.regret.cumulative.shape == (1,)
    assert res.theta_used.shape == (1, 2)
    assert np.isfinite(res.costs[0])
    box = benchmark_box()
    assert box.contains(DriftParams(*res.theta_used[0]))
    # the first executed policy comes from the prior mean with width rho0/(2R)
    assert res.policy_lam0[0] == pytest.approx(math.sqrt(0.5), abs=1e-12)


def test_alg2_initial_width_is_rho0_itself():
    # the proximal variant starts from lam == rho0 (a width, not a variance)
    res = run_learning(small_config("alg2", episodes=1, rho0=0.7), master_seed=3)
    assert res.policy_lam0[0] == pytest.approx(0.7, abs=1e-15)


def test_runs_are_reproducible():
    a = run_learning(small_config("alg1", episodes=15), master_seed=11)
    b = run_learning(small_config("alg1", episodes=15), master_seed=11)
    for name in ("costs", "theta_hat", "theta_used", "policy_K0", "policy_lam0"):
        assert np.array_equal(getattr(a, name), getattr(b, name)), name
    c = run_learning(small_config("alg1", episodes=15), master_seed=12)
    assert not np.array_equal(a.costs, c.costs)


def test_alg1_always_executes_the_latest_greedy_gains():
    res = run_learning(small_config("alg1", episodes=30), master_seed=5)
    # the policy run in episode m+1 is rebuilt from the posterior of episode m
    assert np.array_equal(res.policy_K0[1:], res.candidate_K0[:-1])


def test_alg2_mixes_gains_convexly():
    res = run_learning(small_config("alg2", episodes=45), master_seed=5)
    prev, cand, nxt = res.policy_K0[:-1], res.candidate_K0[:-1], res.policy_K0[1:]
    lo = np.minimum(prev, cand) - 1e-9
    hi = np.maximum(prev, cand) + 1e-9
    assert np.all((nxt >= lo) & (nxt <= hi))
    # exploration widths only ever contract
    assert np.all(np.diff(res.policy_lam0) <= 1e-15)


def test_regret_accumulates_cleanly():
    res = run_learning(small_config("alg1", episodes=100), master_seed=0)
    assert res.regret.flagged == ()
    assert res.regret.cumulative[-1] > 0
    assert np.allclose(res.regret.cumulative, np.cumsum(res.costs - res.optimal_value))
    # rho follows the published decay schedule
    expect = [schedule_rho("alg1", 1.0, m) for m in range(1, 101)]
    assert np.allclose(res.rho, expect)


def test_estimation_error_definition_and_progress():
    res = run_learning(small_config("alg1", episodes=100), master_seed=1)
    star = benchmark_model().theta_star
    manual = np.sqrt(
        (res.theta_used[:, 0] - star.A) ** 2 + (res.theta_used[:, 1] - star.B) ** 2
    )
    assert np.allclose(res.estimation_error, manual)
    assert res.estimation_error[-1] < res.estimation_error[0]


def test_blow_up_guard_surfaces_as_divergence():
    cfg = small_config("alg1", episodes=3, blow_up=1e-6)
    with pytest.raises(LearningDiverged):
        run_learning(cfg, master_seed=0)


def test_regret_record_flags_negative_increments():
    rec = RegretRecord.from_increments(np.array([1.0, -1e-3, 2.0]))
    assert rec.flagged == (2,)
    assert np.allclose(rec.cumulative, [1.0, 1.0 - 1e-3, 3.0 - 1e-3])
    clean = RegretRecord.from_increments(np.array([0.5, -1e-12, 0.2]))
    assert clean.flagged == ()


def test_loglog_slope_recovers_exact_power_laws():
    x = np.geomspace(10, 1000, 15)
    assert loglog_slope(x, 3.0 * x ** 0.5) == pytest.approx(0.5, abs=1e-12)
    assert loglog_slope(x, 7.0 / x) == pytest.approx(-1.0, abs=1e-12)


def test_curve_slope_with_noise_brackets_the_truth():
    rng = np.random.default_rng(2)
    x = np.geomspace(20, 2000, 12)
    runs = 3.0 * x ** -0.5 * rng.lognormal(0.0, 0.05, size=(40, x.size))
    est = curve_slope(runs, x, n_boot=400, rng=np.random.default_rng(3))
    assert est.ci_lo < -0.5 < est.ci_hi
    assert abs(est.slope + 0.5) < 0.05


def test_regret_slope_input_contract():
    x = np.arange(1, 101, dtype=float)
    curves = np.tile(2.0 * x ** 0.6, (12, 1))
    est = regret_slope(curves)
    assert est.slope == pytest.approx(0.6, abs=1e-6)
    with pytest.raises(ValueError):
        regret_slope(curves[:5])
    with pytest.raises(ValueError):
        curve_slope(np.ones((12, 4)), np.arange(1.0, 6.0))  # shape mismatch
    with pytest.raises(ValueError):
        curve_slope(np.zeros((12, 5)) - 1.0, np.arange(1.0, 6.0))  # negative mean
