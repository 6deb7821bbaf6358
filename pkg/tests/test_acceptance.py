"""Benchmark gate: ten numbered criteria, one PASS/FAIL line each.

Every criterion prints a summary line through the `acceptance_log` fixture
(echoed in pytest's terminal summary) and then asserts, so the printed verdict
always matches the test outcome.  The expensive inputs -- the 100k-draw gap
study and the two 50-seed learning ensembles -- are built once per session and
shared.

Criterion 8 is a known, genuine failure of the benchmark itself, not of the
code: the exploration schedule carries a log factor that makes the collected
information grow like m^0.7 inside the fit window, so the measured decay of
the squared estimation error (about m^-0.84) is steeper than the m^-1/2
envelope the criterion brackets.  The test reports the measured slope and
fails honestly rather than widening the band.
"""

import math
from time import perf_counter

import numpy as np
import pytest

from lqrl.dynamics import (
    execution_gap_study,
    closed_form_gap,
    general_conditional_cost_exact,
    general_relaxed_cost_exact,
    mc_cost,
    repetition_bias,
)
from lqrl.learner import LearnerConfig, loglog_slope, regret_slope, run_learning
from lqrl.model import (
    Constant,
    CostSpec,
    DriftParams,
    GeneralLqModel,
    TimeGrid,
)
from lqrl.policy import (
    GaussianPolicy,
    NoisePath,
    RandomisedPolicy,
    exploratory_policy,
    mixing_identity_check,
    proximal_update,
    regularised_hamiltonian_objective,
)
from lqrl.riccati import FeedbackGains, greedy_action, hamiltonian, solve_riccati

from conftest import (
    benchmark_box,
    benchmark_model,
    benchmark_prior,
    random_cost,
    random_general_model,
    random_lq_model,
    random_policy,
)

SEEDS = range(50)
EPISODES = 2000


def report(log, num, ok, detail):
    log.append(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"criterion {num}: {detail}"


# ---------------------------------------------------------------------------
# shared heavy inputs


@pytest.fixture(scope="module")
def gap_study():
    """Mean/p95 execution gaps on meshes 8..256 with 1e5 draws each."""
    t0 = perf_counter()
    model = benchmark_model()
    box, prior = benchmark_box(), benchmark_prior()
    theta0 = box.clip(prior.theta0.A, prior.theta0.B)
    sol = solve_riccati(theta0, model.cost, TimeGrid(model.T, 50))
    base = exploratory_policy(sol.gains(), 1.0, model.cost)
    rows = execution_gap_study(
        GeneralLqModel.embed(model), base, (8, 16, 32, 64, 128, 256),
        100000, np.random.default_rng(0),
    )
    return rows, perf_counter() - t0


def _ensemble(algorithm):
    cfg = LearnerConfig(
        model=benchmark_model(),
        box=benchmark_box(),
        prior=benchmark_prior(),
        algorithm=algorithm,
        episodes=EPISODES,
    )
    t0 = perf_counter()
    runs = [run_learning(cfg, master_seed=s) for s in SEEDS]
    return runs, perf_counter() - t0


@pytest.fixture(scope="module")
def alg1_ensemble():
    return _ensemble("alg1")


@pytest.fixture(scope="module")
def alg2_ensemble():
    return _ensemble("alg2")


# ---------------------------------------------------------------------------
# criteria


def test_criterion_1_riccati_closed_form(acceptance_log):
    t0 = perf_counter()
    theta, cost = DriftParams(0.0, 1.0), CostSpec.create(Q=1.0, R=1.0)
    sol = solve_riccati(theta, cost, TimeGrid(1.0, 10000), oversample=1)
    err = float(np.max(np.abs(sol.P - np.tanh(1.0 - sol.grid.knots))))
    errs = []
    for n in (100, 200, 400):
        s = solve_riccati(theta, cost, TimeGrid(1.0, n), oversample=1)
        errs.append(float(np.max(np.abs(s.P - np.tanh(1.0 - s.grid.knots)))))
    orders = [math.log2(errs[i] / errs[i + 1]) for i in range(2)]
    el = perf_counter() - t0
    ok = err <= 1e-8 and all(3.6 <= o <= 4.4 for o in orders) and el < 1.0
    report(
        acceptance_log, 1, ok,
        f"tanh max error {err:.2e} (tol 1e-8), observed orders "
        f"{orders[0]:.2f}/{orders[1]:.2f} in [3.6, 4.4], {el:.2f} s (< 1 s)",
    )


def test_criterion_2_pointwise_minimisers(acceptance_log):
    t0 = perf_counter()
    rng = np.random.default_rng(12)

    worst_arg = 0.0
    for _ in range(100):
        cost = random_cost(rng)
        theta = DriftParams(float(rng.uniform(-0.7, 0.7)), float(rng.uniform(0.3, 1.2)))
        sol = solve_riccati(theta, cost, TimeGrid(1.0, 100))
        t = float(rng.uniform(0.0, 1.0))
        x = float(rng.uniform(-2.0, 2.0))
        a_star = greedy_action(sol, t, x)
        y = 2.0 * (sol.P_fn()(t) * x + sol.eta_fn()(t))
        H = lambda a: hamiltonian(theta, cost, t, x, a, y)
        fm, f0, fp = H(a_star + 0.12), H(a_star + 0.37), H(a_star + 0.62)
        vertex = a_star + 0.37 - 0.5 * 0.25 * (fp - fm) / (fp - 2.0 * f0 + fm)
        worst_arg = max(worst_arg, abs(a_star - vertex))

    worst_margin = 0.0
    for _ in range(50):
        cost = random_cost(rng)
        theta = DriftParams(float(rng.uniform(-0.7, 0.7)), float(rng.uniform(0.3, 1.2)))
        sol = solve_riccati(theta, cost, TimeGrid(1.0, 100))
        prev = random_policy(rng)
        rho = float(rng.uniform(0.3, 3.0))
        new, _ = proximal_update(prev, sol.gains(), rho, cost)
        t = float(rng.uniform(0.0, 1.0))
        x = float(rng.uniform(-2.0, 2.0))
        P_t, eta_t = sol.P_fn()(t), sol.eta_fn()(t)
        pv = (prev.mean(t, x), prev.sd(t))

        def obj(mu, sd):
            return regularised_hamiltonian_objective(
                t, x, mu, sd, theta, cost, P_t, eta_t, rho, prev=pv
            )

        mu0, sd0 = new.mean(t, x), new.sd(t)
        mus = np.linspace(mu0 - 0.6, mu0 + 0.6, 41)
        sds = np.linspace(0.4 * sd0, 2.5 * sd0, 41)
        margin = float(obj(mus[:, None], sds[None, :]).min() - obj(mu0, sd0))
        worst_margin = min(worst_margin, margin)

    el = perf_counter() - t0
    ok = worst_arg <= 1e-8 and worst_margin >= -1e-9 and el < 10.0
    report(
        acceptance_log, 2, ok,
        f"greedy vs numerical argmin: worst {worst_arg:.2e} (tol 1e-8) on 100 "
        f"instances; proximal 41x41 grid margin {worst_margin:+.2e} (>= -1e-9) "
        f"on 50 instances; {el:.1f} s (< 10 s)",
    )


def test_criterion_3_gap_oracle_triangle(acceptance_log):
    t0 = perf_counter()
    rng = np.random.default_rng(33)
    worst_pair = 0.0
    worst_z = 0.0
    for _ in range(50):
        model = random_general_model(rng)
        base = random_policy(rng)
        n = int(rng.integers(6, 15))
        grid = TimeGrid(model.T, n)
        pol = RandomisedPolicy(base, NoisePath(grid, rng.standard_normal(n)))

        predicted = closed_form_gap(model, pol)
        ode_diff = general_conditional_cost_exact(
            model, pol, ode_refine=30
        ) - general_relaxed_cost_exact(model, base, n_steps=2048)
        worst_pair = max(worst_pair, abs(predicted - ode_diff))

        refine = -(-256 // n)  # put the Euler bias well below the MC noise
        est_c, se_c = mc_cost(model, pol, 10000, rng, sim_refine=refine)
        est_r, se_r = mc_cost(model, base, 10000, rng, grid=TimeGrid(model.T, 256))
        mc_gap = est_c - est_r
        se = math.hypot(se_c, se_r)
        worst_z = max(
            worst_z, abs(predicted - mc_gap) / se, abs(ode_diff - mc_gap) / se
        )
    el = perf_counter() - t0
    ok = worst_pair <= 1e-4 and worst_z <= 3.0 and el < 300.0
    report(
        acceptance_log, 3, ok,
        f"50 instances: worst |expansion - ODE difference| {worst_pair:.2e} "
        f"(tol 1e-4); worst deviation from 1e4-path Monte Carlo {worst_z:.2f} SE "
        f"(<= 3); {el:.0f} s (< 300 s)",
    )


def test_criterion_4_repetition_bias(acceptance_log):
    t0 = perf_counter()
    out = repetition_bias(1.0, 1.0, 100000, np.random.default_rng(0))
    z = abs(out.empirical - out.analytic) / out.se
    el = perf_counter() - t0
    ok = (
        out.analytic == pytest.approx((math.e ** 2 - 3.0) / 2.0, abs=1e-12)
        and z <= 3.0
        and el < 30.0
    )
    report(
        acceptance_log, 4, ok,
        f"1e5 agents: empirical {out.empirical:.5f} vs (e^2-3)/2 = "
        f"{out.analytic:.5f}, off by {z:.2f} SE (<= 3); {el:.1f} s (< 30 s)",
    )


def test_criterion_5_mean_gap_mesh_rate(acceptance_log, gap_study):
    rows, build_s = gap_study
    t0 = perf_counter()
    ns = np.array([r.mesh_n for r in rows], dtype=float)
    slope = loglog_slope(1.0 / ns, np.abs([r.mean_gap for r in rows]))
    el = build_s + perf_counter() - t0
    ok = 0.75 <= slope <= 1.25 and el < 600.0
    report(
        acceptance_log, 5, ok,
        f"|mean gap| vs mesh width over n = 8..256, 1e5 draws each: slope "
        f"{slope:.3f} in [0.75, 1.25]; {el:.1f} s (< 600 s)",
    )


def test_criterion_6_p95_gap_rate(acceptance_log, gap_study):
    rows, build_s = gap_study
    ns = np.array([r.mesh_n for r in rows], dtype=float)
    slope = loglog_slope(ns, [r.p95_abs_gap for r in rows])
    ok = -0.65 <= slope <= -0.35
    report(
        acceptance_log, 6, ok,
        f"p95 |gap| vs cell count, same draws: slope {slope:.3f} in "
        f"[-0.65, -0.35] (sqrt-width pathwise rate)",
    )


def test_criterion_7_deterministic_recursions(acceptance_log):
    t0 = perf_counter()
    cost = CostSpec.create(Q=1.0, R=1.0)
    gains = FeedbackGains(K=Constant(-0.4), k=Constant(0.1), theta=DriftParams(0.3, 1.0))
    # constant coefficients keep every iterate a Constant, so 1e4 proximal
    # steps stay cheap; the envelope band below is stated for lam^1 = 1
    pol = GaussianPolicy(k=gains.k, K=gains.K, lam=Constant(1.0))
    worst_identity = 0.0
    worst_bound = -math.inf
    ratios = []
    for m in range(1, 10001):
        rho_m = 1.0 * m ** 0.5 * math.log(m + 1.0)
        new, weight = proximal_update(pol, gains, rho_m, cost)
        worst_identity = max(
            worst_identity, mixing_identity_check(pol, new, weight)
        )
        h_m = weight.h(0.0)
        worst_bound = max(worst_bound, h_m - 1.0 / m)
        lam2 = new.sd(0.0) ** 2
        mm = m + 1
        if 2 <= mm <= 10000:
            ratios.append(lam2 / (mm ** -0.5 * math.log(mm + 1.0)))
        pol = new
    lo, hi = min(ratios), max(ratios)
    el = perf_counter() - t0
    ok = (
        worst_identity <= 1e-12
        and worst_bound <= 1e-12
        and 0.10 <= lo <= hi <= 0.45
        and el < 5.0
    )
    report(
        acceptance_log, 7, ok,
        f"mixing identity defect {worst_identity:.1e} (tol 1e-12); "
        f"max(h_m - 1/m) {worst_bound:+.1e} over m <= 1e4; envelope ratio in "
        f"[{lo:.3f}, {hi:.3f}] within [0.10, 0.45]; {el:.1f} s (< 5 s)",
    )


def test_criterion_8_estimation_rate(acceptance_log, alg1_ensemble):
    runs, build_s = alg1_ensemble
    t0 = perf_counter()
    sq = np.vstack([r.estimation_error for r in runs]) ** 2
    m_vals = np.unique(np.round(np.geomspace(100, EPISODES, 20)).astype(int))
    mean_sq = sq.mean(axis=0)[m_vals - 1]
    slope = loglog_slope(m_vals, mean_sq)
    el = build_s + perf_counter() - t0
    ok = -0.65 <= slope <= -0.35 and el < 900.0
    detail = (
        f"50 seeds x {EPISODES} episodes: mean |theta_m - theta*|^2 slope "
        f"{slope:.3f} vs [-0.65, -0.35] over m in [100, 2000]; {el:.0f} s (< 900 s)"
    )
    if not (-0.65 <= slope <= -0.35):
        detail += (
            " -- expected: the increasing exploration schedule's log factor "
            "makes collected information grow ~m^0.7 in this window, so the "
            "decay overshoots the m^-1/2 envelope (an upper bound, not a rate)"
        )
    report(acceptance_log, 8, ok, detail)


def test_criterion_9_regret_rates(acceptance_log, alg1_ensemble, alg2_ensemble):
    t0 = perf_counter()
    N_vals = np.unique(np.round(np.geomspace(200, EPISODES, 20)).astype(int))
    details = []
    ok = True
    build_s = 0.0
    for label, (runs, secs) in (("alg1", alg1_ensemble), ("alg2", alg2_ensemble)):
        build_s += secs
        curves = np.vstack([r.regret.cumulative for r in runs])
        est = regret_slope(curves, N_values=N_vals)
        mean_curve = curves.mean(axis=0)[N_vals - 1]
        scaled = mean_curve / (np.sqrt(N_vals) * np.log(N_vals))
        spread = float(scaled.max() / scaled.min())
        ok = ok and 0.40 <= est.slope <= 0.70 and spread < 2.0
        details.append(
            f"{label} slope {est.slope:.3f} in [0.40, 0.70], "
            f"Reg/(sqrt(N) ln N) spread {spread:.2f}x (< 2x)"
        )
    el = build_s + perf_counter() - t0
    ok = ok and el < 1800.0
    report(
        acceptance_log, 9, ok,
        "; ".join(details) + f"; {el:.0f} s (< 1800 s)",
    )


def test_criterion_10_exploration_cost_identity(acceptance_log):
    t0 = perf_counter()
    rng = np.random.default_rng(88)
    n = 2048
    worst = 0.0
    for _ in range(100):
        model = random_lq_model(rng)
        pol = random_policy(rng)
        det = GaussianPolicy(pol.k, pol.K, Constant(0.0))
        gm = GeneralLqModel.embed(model)
        diff = general_relaxed_cost_exact(gm, pol, n_steps=n) - general_relaxed_cost_exact(
            gm, det, n_steps=n
        )
        th = np.linspace(0.0, model.T, 2 * n + 1)
        vals = model.cost.R.on(th) * pol.lam.on(th) ** 2
        h = model.T / n
        premium = h / 6.0 * float(
            np.sum(vals[0:-2:2] + 4.0 * vals[1::2] + vals[2::2])
        )
        worst = max(worst, abs(diff - premium))
    el = perf_counter() - t0
    ok = worst <= 1e-8 and el < 5.0
    report(
        acceptance_log, 10, ok,
        f"relaxed minus deterministic vs int R lam^2 dt on 100 instances: "
        f"worst defect {worst:.2e} (tol 1e-8); {el:.1f} s (< 5 s)",
    )
