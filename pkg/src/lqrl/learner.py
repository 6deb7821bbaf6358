"""Episodic learning loop: execute the current policy, update the posterior,
re-solve the Riccati pair at the truncated estimate, and schedule exploration.

Two variants share the loop and differ only in how the next policy is formed:

* "alg1" rebuilds the entropy-regularised greedy policy at every episode with
  a decaying weight rho_m = rho0 m^{-1/2} ln(m+1);
* "alg2" takes a proximal step towards the greedy gains with an increasing
  weight rho_m = rho0 m^{1/2} ln(m+1), so the policy is a convex mixture of
  everything seen so far and its variance contracts by precision addition.

Episode costs are recorded exactly (conditional moment ODEs, not Monte
Carlo), so regret curves carry no simulation noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dynamics import conditional_cost_exact, optimal_cost, simulate_episode
from .inference import Prior, SufficientStats, accumulate, lambda_min, posterior, truncate
from .model import Constant, LqModel, ThetaBox, TimeGrid
from .policy import (
    GaussianPolicy,
    RandomisedPolicy,
    exploratory_policy,
    proximal_update,
    sample_noise_path,
)
from .riccati import RiccatiBlowUp, solve_riccati

__all__ = [
    "LearnerConfig",
    "RegretRecord",
    "LearningResult",
    "LearningDiverged",
    "SlopeEstimate",
    "schedule_rho",
    "run_learning",
    "loglog_slope",
    "curve_slope",
    "regret_slope",
]

ALGORITHMS = ("alg1", "alg2")


class LearningDiverged(RuntimeError):
    """Riccati blow-up at some posterior estimate; carries the episode index."""

    def __init__(self, episode: int, theta, detail: str):
        self.episode = episode
        self.theta = theta
        super().__init__(f"episode {episode}: {detail}")


def schedule_rho(algorithm: str, rho0: float, m: int) -> float:
    """Exploration weight applied in the policy update after episode m."""
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    if m < 1:
        raise ValueError("episode index is 1-based")
    if algorithm == "alg1":
        return rho0 * m ** -0.5 * math.log(m + 1.0)
    return rho0 * m ** 0.5 * math.log(m + 1.0)


@dataclass(frozen=True)
class LearnerConfig:
    model: LqModel
    box: ThetaBox
    prior: Prior
    algorithm: str
    rho0: float = 1.0
    episodes: int = 2000
    exec_steps: int = 50
    sim_refine: int = 1
    ode_refine: int = 4
    riccati_oversample: int = 10
    blow_up: float = 1e12
    master_seed: int = 0

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"algorithm must be one of {ALGORITHMS}")
        if self.episodes < 1 or self.exec_steps < 1 or self.sim_refine < 1:
            raise ValueError("episodes, exec_steps and sim_refine must be positive")
        if self.rho0 <= 0:
            raise ValueError("rho0 must be positive")


@dataclass(frozen=True)
class RegretRecord:
    """Cumulative regret against the optimal value; episodes whose exact
    increment dips below -allowance are flagged rather than clipped."""

    cumulative: np.ndarray
    increments: np.ndarray
    allowance: float = 1e-8
    flagged: tuple = field(default=())

    @staticmethod
    def from_increments(increments: np.ndarray, allowance: float = 1e-8) -> "RegretRecord":
        bad = tuple(int(i) + 1 for i in np.nonzero(increments < -allowance)[0])
        return RegretRecord(
            cumulative=np.cumsum(increments),
            increments=increments,
            allowance=allowance,
            flagged=bad,
        )


@dataclass(frozen=True)
class LearningResult:
    config: LearnerConfig
    master_seed: int
    costs: np.ndarray
    optimal_value: float
    regret: RegretRecord
    theta_hat: np.ndarray
    theta_used: np.ndarray
    V_entries: np.ndarray
    lambda_min_Vinv: np.ndarray
    rho: np.ndarray
    policy_K0: np.ndarray
    policy_lam0: np.ndarray
    candidate_K0: np.ndarray
    final_policy: GaussianPolicy

    @property
    def estimation_error(self) -> np.ndarray:
        star = self.config.model.theta_star.as_array()
        return np.hypot(self.theta_used[:, 0] - star[0], self.theta_used[:, 1] - star[1])


def run_learning(config: LearnerConfig, master_seed: int | None = None) -> LearningResult:
    """Run one learning trajectory; fully determined by the config and seed."""
    seed = config.master_seed if master_seed is None else master_seed
    model = config.model
    cost = model.cost
    exec_grid = TimeGrid(model.T, config.exec_steps)
    theta0 = config.box.clip(config.prior.theta0.A, config.prior.theta0.B)

    def gains_at(theta, episode):
        try:
            sol = solve_riccati(
                theta, cost, exec_grid, config.riccati_oversample, config.blow_up
            )
        except RiccatiBlowUp as exc:
            raise LearningDiverged(episode, theta, str(exc)) from exc
        return sol.gains()

    gains0 = gains_at(theta0, 0)
    if config.algorithm == "alg1":
        policy = exploratory_policy(gains0, config.rho0, cost)
    else:
        policy = GaussianPolicy(k=gains0.k, K=gains0.K, lam=Constant(config.rho0))

    J_star = optimal_cost(model)
    N = config.episodes
    costs = np.empty(N)
    theta_hat = np.empty((N, 2))
    theta_used = np.empty((N, 2))
    V_entries = np.empty((N, 3))
    lmin = np.empty(N)
    rho_seq = np.empty(N)
    policy_K0 = np.empty(N)
    policy_lam0 = np.empty(N)
    candidate_K0 = np.empty(N)
    stats = SufficientStats.zero()

    for m in range(1, N + 1):
        rng_noise = np.random.Generator(
            np.random.Philox(np.random.SeedSequence(entropy=seed, spawn_key=(m, 0)))
        )
        rng_sim = np.random.Generator(
            np.random.Philox(np.random.SeedSequence(entropy=seed, spawn_key=(m, 1)))
        )
        noise = sample_noise_path(exec_grid, rng_noise, seed=(seed, m, 0))
        executed = RandomisedPolicy(policy, noise)
        policy_K0[m - 1] = policy.K(0.0)
        policy_lam0[m - 1] = policy.lam(0.0)

        traj = simulate_episode(model, executed, rng_sim, config.sim_refine)
        costs[m - 1] = conditional_cost_exact(model, executed, config.ode_refine)

        stats = accumulate(stats, traj, model.sigma_bar)
        post = truncate(posterior(stats, config.prior), config.box)
        theta_m = post.theta_trunc
        theta_hat[m - 1] = post.theta_hat.as_array()
        theta_used[m - 1] = theta_m.as_array()
        V_entries[m - 1] = (post.V[0, 0], post.V[0, 1], post.V[1, 1])
        Vinv = np.linalg.inv(post.V)
        lmin[m - 1] = lambda_min(Vinv)

        gains = gains_at(theta_m, m)
        candidate_K0[m - 1] = gains.K(0.0)
        rho_m = schedule_rho(config.algorithm, config.rho0, m)
        rho_seq[m - 1] = rho_m
        if config.algorithm == "alg1":
            policy = exploratory_policy(gains, rho_m, cost)
        else:
            policy, _ = proximal_update(policy, gains, rho_m, cost)

    return LearningResult(
        config=config,
        master_seed=seed,
        costs=costs,
        optimal_value=J_star,
        regret=RegretRecord.from_increments(costs - J_star),
        theta_hat=theta_hat,
        theta_used=theta_used,
        V_entries=V_entries,
        lambda_min_Vinv=lmin,
        rho=rho_seq,
        policy_K0=policy_K0,
        policy_lam0=policy_lam0,
        candidate_K0=candidate_K0,
        final_policy=policy,
    )


# ---------------------------------------------------------------------------
# slope fits


def loglog_slope(x, y) -> float:
    """Least-squares slope of log y against log x."""
    lx = np.log(np.asarray(x, dtype=float))
    ly = np.log(np.asarray(y, dtype=float))
    A = np.column_stack([lx, np.ones_like(lx)])
    coef, *_ = np.linalg.lstsq(A, ly, rcond=None)
    return float(coef[0])


@dataclass(frozen=True)
class SlopeEstimate:
    slope: float
    ci_lo: float
    ci_hi: float
    n_boot: int


def curve_slope(
    curves: np.ndarray,
    x_values: np.ndarray,
    n_boot: int = 1000,
    rng: np.random.Generator | None = None,
) -> SlopeEstimate:
    """Slope of the across-run mean of positive curves on a log-log scale,
    with a bootstrap-over-runs percentile interval."""
    curves = np.atleast_2d(np.asarray(curves, dtype=float))
    x = np.asarray(x_values, dtype=float)
    if curves.shape[1] != x.shape[0]:
        raise ValueError("one column per x value, please")
    mean = curves.mean(axis=0)
    if np.any(mean <= 0):
        raise ValueError("mean curve must be positive for a log-log fit")
    slope = loglog_slope(x, mean)
    if rng is None:
        rng = np.random.default_rng(0)
    R = curves.shape[0]
    boot = np.empty(n_boot)
    for i in range(n_boot):
        pick = rng.integers(0, R, size=R)
        bm = curves[pick].mean(axis=0)
        if np.any(bm <= 0):
            boot[i] = np.nan
        else:
            boot[i] = loglog_slope(x, bm)
    good = boot[~np.isnan(boot)]
    lo, hi = np.percentile(good, [2.5, 97.5]) if good.size else (np.nan, np.nan)
    return SlopeEstimate(slope=slope, ci_lo=float(lo), ci_hi=float(hi), n_boot=n_boot)


def regret_slope(
    regret_curves: np.ndarray,
    N_values=None,
    n_boot: int = 1000,
    rng: np.random.Generator | None = None,
) -> SlopeEstimate:
    """Growth exponent of mean cumulative regret over at least 10 runs.

    `regret_curves` has one row per run, column m holding Reg(m).  The fit
    uses ~20 geometrically spaced episode counts (or the given N_values).
    """
    curves = np.atleast_2d(np.asarray(regret_curves, dtype=float))
    if curves.shape[0] < 10:
        raise ValueError("need at least 10 runs for a stable slope estimate")
    N = curves.shape[1]
    if N_values is None:
        N_values = np.unique(
            np.round(np.geomspace(max(10, N // 10), N, 20)).astype(int)
        )
    idx = np.asarray(N_values, dtype=int) - 1
    return curve_slope(curves[:, idx], np.asarray(N_values, float), n_boot, rng)
