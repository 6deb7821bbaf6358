"""Benchmark harness.

Subcommands
    riccati-check    solver self-test against closed forms (+ optional dt sweep)
    repetition-bias  bias of the repeated-execution cost estimate vs. closed form
    execution-gap    mesh/draw law of the execution gap
    run-alg1         episodic learning with decaying entropy regularisation
    run-alg2         episodic learning with proximal (KL) updates
    replot           regenerate every SVG from the CSVs in an output directory

All experiment output is CSV (comma separated, '.' decimal, LF endings, one
header row); plots are derived from the CSVs alone, so `replot` reproduces
them byte for byte.  Exit codes: 0 ok, 2 invalid configuration, 3 tolerance
failure, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys

import numpy as np

from .dynamics import (
    execution_gap_study,
    repetition_bias,
    simulate_episode,
)
from .inference import Prior
from .learner import (
    LearnerConfig,
    loglog_slope,
    regret_slope,
    run_learning,
)
from .model import (
    Constant,
    CostSpec,
    DriftParams,
    GeneralLqModel,
    LqModel,
    Sampled,
    ThetaBox,
    TimeGrid,
    ValidationError,
    as_time_function,
)
from .plotting import line_plot
from .policy import GaussianPolicy, RandomisedPolicy, exploratory_policy, sample_noise_path
from .riccati import solve_riccati

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_TOLERANCE = 3
EXIT_IO = 4


class ToleranceFailure(RuntimeError):
    """An experiment ran fine but missed its accuracy gate."""


# ---------------------------------------------------------------------------
# configuration files: flat "key = value" lines, '#' comments


_DEFAULTS = {
    "A_star": "0.3",
    "B_star": "1.0",
    "sigma_bar": "0.5",
    "x0": "1.0",
    "T": "1.0",
    "Q": "1.0",
    "S": "0.0",
    "R": "1.0",
    "p": "0.0",
    "q": "0.0",
    "M": "0.5",
    "m_bar": "0.0",
    "theta_box": "-2.0, 2.0, 0.2, 3.0",
    "theta0_A": "0.0",
    "theta0_B": "0.5",
    "V0_11": "1.0",
    "V0_12": "0.0",
    "V0_22": "1.0",
    "algorithm": "alg1",
    "rho0": "1.0",
    "episodes": "2000",
    "exec_steps": "50",
    "sim_refine": "1",
    "seeds": "0:50",
}

_KNOWN_KEYS = frozenset(_DEFAULTS)


def parse_config_file(path: str) -> dict:
    """Read a flat key = value file; unknown keys are rejected, later
    assignments win."""
    raw = dict(_DEFAULTS)
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            if "=" not in text:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {text!r}")
            key, value = (s.strip() for s in text.split("=", 1))
            if key not in _KNOWN_KEYS:
                raise ValueError(f"{path}:{lineno}: unknown configuration key {key!r}")
            raw[key] = value
    return raw


def _floats(text: str) -> list:
    parts = [p for chunk in text.split(",") for p in chunk.split()] if text else []
    return [float(p) for p in parts]


def _coefficient(text: str, T: float):
    vals = _floats(text)
    if not vals:
        raise ValueError("empty coefficient value")
    if len(vals) == 1:
        return Constant(vals[0])
    return Sampled(np.array(vals), T)


def parse_seed_spec(text: str) -> list:
    """Seed lists: '0:50' (half-open range), '3', or '1,4,9'."""
    text = text.strip()
    if ":" in text:
        lo, hi = text.split(":", 1)
        lo, hi = int(lo), int(hi)
        if hi <= lo:
            raise ValueError(f"empty seed range {text!r}")
        return list(range(lo, hi))
    return [int(p) for p in text.replace(",", " ").split()]


class Setup:
    """Everything a command needs, built from one configuration dict."""

    def __init__(self, raw: dict):
        T = float(raw["T"])
        cost = CostSpec(
            Q=_coefficient(raw["Q"], T),
            S=_coefficient(raw["S"], T),
            R=_coefficient(raw["R"], T),
            p=_coefficient(raw["p"], T),
            q=_coefficient(raw["q"], T),
            M=float(raw["M"]),
            m_bar=float(raw["m_bar"]),
        )
        self.model = LqModel.create(
            theta_star=DriftParams(float(raw["A_star"]), float(raw["B_star"])),
            sigma_bar=_coefficient(raw["sigma_bar"], T),
            x0=float(raw["x0"]),
            T=T,
            cost=cost,
        )
        box_vals = _floats(raw["theta_box"])
        if len(box_vals) != 4:
            raise ValueError("theta_box needs four numbers: A_lo, A_hi, B_lo, B_hi")
        self.box = ThetaBox(*box_vals)
        self.prior = Prior(
            theta0=DriftParams(float(raw["theta0_A"]), float(raw["theta0_B"])),
            V0=np.array(
                [
                    [float(raw["V0_11"]), float(raw["V0_12"])],
                    [float(raw["V0_12"]), float(raw["V0_22"])],
                ]
            ),
        )
        self.algorithm = raw["algorithm"]
        self.rho0 = float(raw["rho0"])
        self.episodes = int(raw["episodes"])
        self.exec_steps = int(raw["exec_steps"])
        self.sim_refine = int(raw["sim_refine"])
        self.seeds = parse_seed_spec(raw["seeds"])


def load_setup(args) -> Setup:
    raw = parse_config_file(args.config) if args.config else dict(_DEFAULTS)
    return Setup(raw)


def resolve_out(args) -> str:
    out = args.out or os.environ.get("LQRL_DEFAULT_OUT") or "lqrl_out"
    os.makedirs(out, exist_ok=True)
    return out


# ---------------------------------------------------------------------------
# CSV helpers


def _cell(v) -> str:
    if isinstance(v, float):  # np.float64 included; repr of the builtin round-trips
        return repr(float(v))
    return str(v)


def write_csv(path: str, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_cell(v) for v in row])


def read_csv(path: str):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def _column(rows, header, name) -> np.ndarray:
    i = header.index(name)
    return np.array([float(r[i]) for r in rows])


# ---------------------------------------------------------------------------
# riccati-check


_SWEEP_DTS = (1e-2, 5e-3, 2.5e-3)


def _closed_form_cases():
    tanh_cost = CostSpec.create(Q=1.0, R=1.0)
    a = 0.4
    exp_cost = CostSpec.create(R=1.0, M=1.0, m_bar=0.7)
    return [
        (
            "tanh",
            DriftParams(0.0, 1.0),
            tanh_cost,
            lambda t: np.tanh(1.0 - t),
            lambda t: np.zeros_like(t),
        ),
        (
            "exp",
            DriftParams(a, 0.0),
            exp_cost,
            lambda t: np.exp(2 * a * (1.0 - t)),
            lambda t: 0.7 * np.exp(a * (1.0 - t)),
        ),
    ]


def _plot_riccati(out: str):
    header, rows = read_csv(os.path.join(out, "riccati_solution.csv"))
    t = _column(rows, header, "t")
    line_plot(
        os.path.join(out, "riccati_check.svg"),
        [
            ("P", t, _column(rows, header, "P")),
            ("eta", t, _column(rows, header, "eta")),
            ("K", t, _column(rows, header, "K")),
            ("k", t, _column(rows, header, "k")),
        ],
        title="Backward Riccati pair and feedback gains",
        xlabel="t",
        ylabel="value",
    )


def cmd_riccati_check(args) -> int:
    setup = load_setup(args)
    out = resolve_out(args)
    model = setup.model
    sol = solve_riccati(
        model.theta_star, model.cost, TimeGrid(model.T, setup.exec_steps)
    )
    gains = sol.gains()
    t = sol.grid.knots
    write_csv(
        os.path.join(out, "riccati_solution.csv"),
        ["t", "P", "eta", "K", "k"],
        zip(t.tolist(), sol.P.tolist(), sol.eta.tolist(),
            gains.K.knot_values().tolist(), gains.k.knot_values().tolist()),
    )

    dts = _SWEEP_DTS if args.dt_sweep else _SWEEP_DTS[:1]
    rows = []
    worst = 0.0
    orders = []
    for name, theta, cost, exactP, exactEta in _closed_form_cases():
        errs = []
        for dt in dts:
            grid = TimeGrid(1.0, round(1.0 / dt))
            s = solve_riccati(theta, cost, grid, oversample=1)
            tk = s.grid.knots
            eP = float(np.max(np.abs(s.P - exactP(tk))))
            eE = float(np.max(np.abs(s.eta - exactEta(tk))))
            errs.append((dt, eP, eE))
        for i, (dt, eP, eE) in enumerate(errs):
            if i == 0:
                order = ""
            else:
                ratio = errs[i - 1][1] / eP
                order = math.log2(ratio) / math.log2(errs[i - 1][0] / dt)
                orders.append(order)
            rows.append((name, dt, eP, eE, order))
        worst = max(worst, errs[-1][1], errs[-1][2])
    write_csv(
        os.path.join(out, "riccati_check.csv"),
        ["case", "dt", "err_P", "err_eta", "order"],
        rows,
    )
    if args.plot:
        _plot_riccati(out)
    if worst > args.tol:
        raise ToleranceFailure(
            f"closed-form error {worst:.3e} exceeds tolerance {args.tol:.3e}"
        )
    if args.dt_sweep and any(not (3.6 <= o <= 4.4) for o in orders):
        raise ToleranceFailure(f"observed RK4 orders {orders} leave [3.6, 4.4]")
    print(f"riccati-check ok: worst closed-form error {worst:.3e}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# repetition-bias


def _plot_repetition(out: str):
    header, rows = read_csv(os.path.join(out, "repetition_bias.csv"))
    n = _column(rows, header, "n_agents")
    err = np.abs(_column(rows, header, "empirical") - _column(rows, header, "analytic"))
    band = 3.0 * _column(rows, header, "se")
    line_plot(
        os.path.join(out, "repetition_bias.svg"),
        [("abs error", n, err), ("3 SE", n, band)],
        title="Repeated-execution bias vs closed form",
        xlabel="agents",
        ylabel="absolute error",
        xlog=True,
        ylog=True,
    )


def cmd_repetition_bias(args) -> int:
    out = resolve_out(args)
    seeds = parse_seed_spec(args.seeds) if args.seeds else [0]
    rng = np.random.default_rng(seeds[0])
    sweep = sorted({c for c in (100, 1000, 10000, args.agents) if c <= args.agents})
    rows = []
    final = None
    for n_agents in sweep:
        r = repetition_bias(args.mu, args.lam, n_agents, rng)
        rows.append((n_agents, r.empirical, r.se, r.analytic))
        final = r
    write_csv(
        os.path.join(out, "repetition_bias.csv"),
        ["n_agents", "empirical", "se", "analytic"],
        rows,
    )
    if args.plot:
        _plot_repetition(out)
    gap = abs(final.empirical - final.analytic)
    if gap > 3.0 * final.se:
        raise ToleranceFailure(
            f"bias estimate off by {gap:.3e} > 3 SE = {3 * final.se:.3e} "
            f"at {final.n_agents} agents"
        )
    print(
        f"repetition-bias ok: {final.empirical:.6f} vs {final.analytic:.6f} "
        f"(+- {final.se:.2e}) at {final.n_agents} agents"
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# execution-gap


_GAP_MESHES = (8, 16, 32, 64, 128, 256)


def _scale_lam(f, s: float):
    if isinstance(f, Sampled):
        return Sampled(f.values * s, f.T)
    return Constant(f.value * s)


def _plot_gap(out: str):
    header, rows = read_csv(os.path.join(out, "execution_gap.csv"))
    n = _column(rows, header, "mesh_n")
    mean = np.abs(_column(rows, header, "mean_gap"))
    p95 = _column(rows, header, "p95_abs_gap")
    line_plot(
        os.path.join(out, "execution_gap.svg"),
        [("|mean gap|", n, mean), ("p95 |gap|", n, p95)],
        title="Execution gap vs mesh",
        xlabel="cells",
        ylabel="gap",
        xlog=True,
        ylog=True,
    )


def cmd_execution_gap(args) -> int:
    setup = load_setup(args)
    out = resolve_out(args)
    model = setup.model
    # Execute the learner's initial policy (gains from the prior mean), not the
    # greedy policy for theta_star.  At the optimal gains the mean gap vanishes
    # identically -- the feedback is a stationary point of the cost, so the
    # frozen-noise perturbation has no first-order mean effect -- and the
    # mesh-width law is invisible.
    theta0 = setup.box.clip(setup.prior.theta0.A, setup.prior.theta0.B)
    sol = solve_riccati(theta0, model.cost, TimeGrid(model.T, setup.exec_steps))
    base = exploratory_policy(sol.gains(), setup.rho0, model.cost)
    if args.lambda_scale != 1.0:
        base = GaussianPolicy(base.k, base.K, _scale_lam(base.lam, args.lambda_scale))
    seeds = parse_seed_spec(args.seeds) if args.seeds else [0]
    rng = np.random.default_rng(seeds[0])
    study = execution_gap_study(
        GeneralLqModel.embed(model), base, _GAP_MESHES, args.draws, rng
    )
    write_csv(
        os.path.join(out, "execution_gap.csv"),
        ["mesh_n", "mean_gap", "se_mean_gap", "p95_abs_gap", "n_draws"],
        [(r.mesh_n, r.mean_gap, r.se_mean_gap, r.p95_abs_gap, r.n_draws) for r in study],
    )
    if args.plot:
        _plot_gap(out)
    ns = np.array([r.mesh_n for r in study], dtype=float)
    mean_slope = loglog_slope(model.T / ns, np.abs([r.mean_gap for r in study]))
    p95_slope = loglog_slope(ns, [r.p95_abs_gap for r in study])
    print(
        f"execution-gap: mean-gap slope {mean_slope:.3f} in mesh width, "
        f"p95 slope {p95_slope:.3f} in cell count"
    )
    if not (0.75 <= mean_slope <= 1.25):
        raise ToleranceFailure(f"mean-gap slope {mean_slope:.3f} leaves [0.75, 1.25]")
    if not (-0.65 <= p95_slope <= -0.35):
        raise ToleranceFailure(f"p95 slope {p95_slope:.3f} leaves [-0.65, -0.35]")
    return EXIT_OK


# ---------------------------------------------------------------------------
# run-alg1 / run-alg2


def _fit_points(N: int, lo_default: int = 100) -> np.ndarray:
    lo = max(1, min(lo_default, max(10, N // 10), N))
    return np.unique(np.round(np.geomspace(lo, N, 20)).astype(int))


def _run_one(payload):
    cfg, seed = payload
    return seed, run_learning(cfg, master_seed=seed)


def _plot_runs(out: str):
    agg = os.path.join(out, "aggregate.csv")
    header, rows = read_csv(agg)
    N = _column(rows, header, "N")
    mean = _column(rows, header, "mean_regret")
    guide = np.sqrt(N) * np.log(N)
    guide = guide * mean[-1] / guide[-1]
    line_plot(
        os.path.join(out, "regret.svg"),
        [("mean regret", N, mean), ("sqrt(N) log N (scaled)", N, guide)],
        title="Cumulative regret",
        xlabel="episodes",
        ylabel="regret",
        xlog=True,
        ylog=True,
    )
    est = os.path.join(out, "estimation.csv")
    header, rows = read_csv(est)
    m = _column(rows, header, "episode")
    err = _column(rows, header, "mean_error")
    guide = err[0] * np.sqrt(m[0] / m)
    line_plot(
        os.path.join(out, "estimation.svg"),
        [("mean |theta - theta*|", m, err), ("m^-1/2 (scaled)", m, guide)],
        title="Parameter estimation error",
        xlabel="episodes",
        ylabel="error",
        xlog=True,
        ylog=True,
    )


def cmd_run(args, algorithm: str) -> int:
    setup = load_setup(args)
    out = os.path.join(resolve_out(args), algorithm)
    os.makedirs(out, exist_ok=True)
    episodes = args.episodes or setup.episodes
    exec_steps = args.exec_steps or setup.exec_steps
    if args.seeds:
        seeds = parse_seed_spec(args.seeds)
    else:
        seeds = setup.seeds
    if args.runs:
        if args.runs > len(seeds):
            raise ValueError(
                f"--runs {args.runs} exceeds the {len(seeds)} configured seeds"
            )
        seeds = seeds[: args.runs]
    cfg = LearnerConfig(
        model=setup.model,
        box=setup.box,
        prior=setup.prior,
        algorithm=algorithm,
        rho0=setup.rho0,
        episodes=episodes,
        exec_steps=exec_steps,
        sim_refine=setup.sim_refine,
    )

    payloads = [(cfg, s) for s in seeds]
    if args.parallel > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=args.parallel) as pool:
            results = dict(pool.map(_run_one, payloads))
    else:
        results = dict(map(_run_one, payloads))

    N = episodes
    episodes_col = np.arange(1, N + 1)
    for seed in seeds:
        res = results[seed]
        write_csv(
            os.path.join(out, f"regret_{seed}.csv"),
            ["episode", "cost", "cum_regret"],
            zip(episodes_col.tolist(), res.costs.tolist(), res.regret.cumulative.tolist()),
        )
        write_csv(
            os.path.join(out, f"posterior_{seed}.csv"),
            [
                "episode",
                "theta_hat_A",
                "theta_hat_B",
                "V_11",
                "V_12",
                "V_22",
                "theta_A",
                "theta_B",
                "lambda_min_Vinv",
            ],
            zip(
                episodes_col.tolist(),
                res.theta_hat[:, 0].tolist(),
                res.theta_hat[:, 1].tolist(),
                res.V_entries[:, 0].tolist(),
                res.V_entries[:, 1].tolist(),
                res.V_entries[:, 2].tolist(),
                res.theta_used[:, 0].tolist(),
                res.theta_used[:, 1].tolist(),
                res.lambda_min_Vinv.tolist(),
            ),
        )

    # sample trajectory under the first seed's final policy
    first = results[seeds[0]]
    rng_noise = np.random.Generator(
        np.random.Philox(np.random.SeedSequence(entropy=seeds[0], spawn_key=(N + 1, 0)))
    )
    rng_sim = np.random.Generator(
        np.random.Philox(np.random.SeedSequence(entropy=seeds[0], spawn_key=(N + 1, 1)))
    )
    noise = sample_noise_path(TimeGrid(setup.model.T, exec_steps), rng_noise)
    traj = simulate_episode(
        setup.model,
        RandomisedPolicy(first.final_policy, noise),
        rng_sim,
        cfg.sim_refine,
    )
    xi = np.repeat(noise.draws, cfg.sim_refine)
    traj_rows = []
    for j, t in enumerate(traj.grid.knots.tolist()):
        dW = traj.dW[j] if j < traj.grid.n else ""
        z = xi[j] if j < traj.grid.n else xi[-1]
        traj_rows.append((t, traj.states[j], traj.actions[j], z, dW))
    write_csv(
        os.path.join(out, "trajectory.csv"),
        ["t", "X", "action", "xi", "dW"],
        traj_rows,
    )

    curves = np.vstack([results[s].regret.cumulative for s in seeds])
    errors = np.vstack([results[s].estimation_error for s in seeds])
    fitN = _fit_points(N, lo_default=max(10, N // 10))
    if len(seeds) >= 10:
        sl = regret_slope(curves, N_values=fitN)
        slope_fields = (sl.slope, sl.ci_lo, sl.ci_hi)
    else:
        slope_fields = ("", "", "")
    mean_curve = curves.mean(axis=0)
    se_curve = (
        curves.std(axis=0, ddof=1) / math.sqrt(len(seeds))
        if len(seeds) > 1
        else np.zeros(N)
    )
    write_csv(
        os.path.join(out, "aggregate.csv"),
        ["N", "mean_regret", "se_regret", "slope", "slope_ci_lo", "slope_ci_hi"],
        [
            (int(nv), mean_curve[nv - 1], se_curve[nv - 1], *slope_fields)
            for nv in fitN
        ],
    )
    fitM = _fit_points(N)
    mean_err = errors.mean(axis=0)
    se_err = (
        errors.std(axis=0, ddof=1) / math.sqrt(len(seeds))
        if len(seeds) > 1
        else np.zeros(N)
    )
    est_slope = loglog_slope(fitM, mean_err[fitM - 1]) if len(seeds) > 1 else ""
    write_csv(
        os.path.join(out, "estimation.csv"),
        ["episode", "mean_error", "se_error", "slope"],
        [(int(mv), mean_err[mv - 1], se_err[mv - 1], est_slope) for mv in fitM],
    )
    if args.plot:
        _plot_runs(out)
    flagged = sorted({e for s in seeds for e in results[s].regret.flagged})
    if flagged:
        print(f"warning: regret increments below -1e-8 at episodes {flagged}")
    print(
        f"{algorithm}: {len(seeds)} runs x {N} episodes; "
        f"mean Reg(N) = {mean_curve[-1]:.3f}"
        + (f", slope = {slope_fields[0]:.3f}" if len(seeds) >= 10 else "")
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# replot


def cmd_replot(args) -> int:
    out = args.out or os.environ.get("LQRL_DEFAULT_OUT") or "lqrl_out"
    if not os.path.isdir(out):
        raise OSError(f"output directory {out!r} does not exist")
    made = 0
    if os.path.exists(os.path.join(out, "riccati_solution.csv")):
        _plot_riccati(out)
        made += 1
    if os.path.exists(os.path.join(out, "repetition_bias.csv")):
        _plot_repetition(out)
        made += 1
    if os.path.exists(os.path.join(out, "execution_gap.csv")):
        _plot_gap(out)
        made += 1
    for alg in ("alg1", "alg2"):
        sub = os.path.join(out, alg)
        if os.path.exists(os.path.join(sub, "aggregate.csv")):
            _plot_runs(sub)
            made += 1
    print(f"replot: regenerated plots for {made} result set(s) in {out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lqrl",
        description="Benchmarks for episodic linear-quadratic reinforcement "
        "learning with Gaussian relaxed policies.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config=True):
        if config:
            p.add_argument("--config", help="flat key = value configuration file")
        p.add_argument("--out", help="output directory (default $LQRL_DEFAULT_OUT or lqrl_out)")
        p.add_argument("--plot", action="store_true", help="write SVG plots")
        p.add_argument("--seeds", help="seed list: '0:50', '7', or '1,2,3'")

    p = sub.add_parser("riccati-check", help="solver self-test against closed forms")
    common(p)
    p.add_argument("--dt-sweep", action="store_true", help="verify 4th-order convergence")
    p.add_argument("--tol", type=float, default=1e-8, help="closed-form error gate")
    p.set_defaults(func=cmd_riccati_check)

    p = sub.add_parser("repetition-bias", help="repeated-execution bias experiment")
    common(p, config=False)
    p.add_argument("--mu", type=float, default=1.0, help="drift rate (nonzero)")
    p.add_argument("--lambda", dest="lam", type=float, default=1.0, help="action noise scale")
    p.add_argument("--agents", type=int, default=100000, help="largest agent count")
    p.set_defaults(func=cmd_repetition_bias)

    p = sub.add_parser("execution-gap", help="execution-gap mesh/draw law")
    common(p)
    p.add_argument("--draws", type=int, default=100000, help="noise draws per mesh")
    p.add_argument("--lambda-scale", type=float, default=1.0, help="scale the policy noise")
    p.set_defaults(func=cmd_execution_gap)

    for alg in ("alg1", "alg2"):
        p = sub.add_parser(f"run-{alg}", help=f"episodic learning runs ({alg})")
        common(p)
        p.add_argument("--episodes", type=int, help="episodes per run (default from config)")
        p.add_argument("--runs", type=int, help="use the first RUNS configured seeds")
        p.add_argument("--exec-steps", type=int, help="execution grid cells")
        p.add_argument("--parallel", type=int, default=1, help="worker processes")
        p.set_defaults(func=lambda a, _alg=alg: cmd_run(a, _alg))

    p = sub.add_parser("replot", help="regenerate SVGs from CSVs")
    p.add_argument("--out", help="output directory to scan")
    p.set_defaults(func=cmd_replot)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ToleranceFailure as exc:
        print(f"tolerance failure: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE
    except (ValidationError, ValueError) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
