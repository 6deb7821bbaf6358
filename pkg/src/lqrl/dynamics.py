"""Episode simulation and cost evaluation.

Three routes to a cost number, kept deliberately independent so they can
cross-check each other:

* pathwise Monte Carlo (Euler-Maruyama + left-endpoint quadrature),
* exact conditional/relaxed costs via the first two moment ODEs (RK4, with
  the running cost integrated as a joint state),
* the closed-form execution-gap expansion, which prices the effect of the
  frozen per-cell noise without simulating anything.

Also hosts the repetition-bias experiment and the execution-gap study used by
the CLI.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._kernels import euler_maruyama, moment_cost
from .model import (
    CostSpec,
    GeneralLqModel,
    LqModel,
    TimeGrid,
)
from .policy import GaussianPolicy, NoisePath, RandomisedPolicy, sample_noise_path
from .riccati import solve_riccati

__all__ = [
    "EpisodeTrajectory",
    "ConditionalMoments",
    "GapFunctions",
    "GapCoefficients",
    "RepetitionBias",
    "GapStudyRow",
    "simulate_episode",
    "simulate_general",
    "pathwise_cost",
    "conditional_moments",
    "conditional_cost_exact",
    "relaxed_cost_exact",
    "general_conditional_cost_exact",
    "general_relaxed_cost_exact",
    "mc_cost",
    "optimal_cost",
    "gap_cell_coefficients",
    "closed_form_gap",
    "gap_functions",
    "mean_execution_gap",
    "execution_gap_study",
    "repetition_bias",
]


# ---------------------------------------------------------------------------
# trajectories


@dataclass(frozen=True)
class EpisodeTrajectory:
    """One simulated path: states and actions at the knots of `grid`, the
    frozen execution noise that generated the actions, and the Brownian
    increments (recorded so estimators can reuse the exact same path)."""

    grid: TimeGrid
    states: np.ndarray
    actions: np.ndarray
    noise: NoisePath
    dW: np.ndarray

    def __post_init__(self):
        if self.states.shape != (self.grid.n + 1,):
            raise ValueError("states must live on the grid knots")
        if self.actions.shape != (self.grid.n + 1,):
            raise ValueError("actions must live on the grid knots")
        if self.dW.shape != (self.grid.n,):
            raise ValueError("need one Brownian increment per step")


@dataclass(frozen=True)
class ConditionalMoments:
    """First two conditional moments on an ODE grid; must satisfy the
    Cauchy-Schwarz bound m2 >= m1^2 (up to solver tolerance)."""

    grid: TimeGrid
    m1: np.ndarray
    m2: np.ndarray

    def __post_init__(self):
        if self.m1.shape != (self.grid.n + 1,) or self.m2.shape != (self.grid.n + 1,):
            raise ValueError("moments must live on the grid knots")
        gap = float(np.min(self.m2 - self.m1 ** 2))
        if gap < -1e-9:
            raise ValueError(f"m2 < m1^2 by {-gap:g}: moment integration is broken")


def _general_arrays(model: GeneralLqModel, t: np.ndarray):
    return (
        model.A.on(t),
        model.B.on(t),
        model.b_bar.on(t),
        model.C.on(t),
        model.D.on(t),
        model.sigma_bar.on(t),
    )


def _policy_arrays(base: GaussianPolicy, t: np.ndarray):
    return base.k.on(t), base.K.on(t), base.lam.on(t)


def simulate_episode(
    model: LqModel,
    policy: RandomisedPolicy,
    rng: np.random.Generator,
    sim_refine: int = 1,
) -> EpisodeTrajectory:
    """Euler-Maruyama path of the drift-control model under the executed
    policy; the simulation grid refines the execution grid by `sim_refine`."""
    return simulate_general(
        GeneralLqModel.embed(model), policy, rng, sim_refine=sim_refine
    )


def simulate_general(
    model: GeneralLqModel,
    policy,
    rng: np.random.Generator,
    mode: str = "randomised",
    sim_refine: int = 1,
    grid: TimeGrid | None = None,
) -> EpisodeTrajectory:
    """Simulate the general model under either execution convention.

    mode="randomised": `policy` is a RandomisedPolicy; its frozen draws are
    held constant on each execution cell and the simulation grid refines the
    execution grid by `sim_refine`.

    mode="relaxed": `policy` is a GaussianPolicy and `grid` is the simulation
    grid; a fresh action draw is taken on every step (sampled before the
    Brownian increments).
    """
    if mode == "randomised":
        if not isinstance(policy, RandomisedPolicy):
            raise TypeError("randomised mode needs a RandomisedPolicy")
        sim = policy.noise.grid.refine(sim_refine)
        zeta = np.repeat(policy.noise.draws, sim_refine)
        base = policy.base
        noise = policy.noise
    elif mode == "relaxed":
        if not isinstance(policy, GaussianPolicy):
            raise TypeError("relaxed mode needs a GaussianPolicy")
        if grid is None:
            raise ValueError("relaxed mode needs an explicit simulation grid")
        sim = grid
        noise = sample_noise_path(sim, rng)
        zeta = noise.draws
        base = policy
    else:
        raise ValueError(f"unknown mode {mode!r}")
    t = sim.knots
    Aa, Ba, bb, Ca, Da, sg = _general_arrays(model, t[:-1])
    kk, KK, lam = _policy_arrays(base, t)
    dW = rng.standard_normal(sim.n) * math.sqrt(sim.dt)
    states, actions = euler_maruyama(
        model.x0, sim.dt, Aa, Ba, bb, Ca, Da, sg, kk, KK, lam, zeta, dW
    )
    return EpisodeTrajectory(grid=sim, states=states, actions=actions, noise=noise, dW=dW)


def pathwise_cost(cost: CostSpec, traj: EpisodeTrajectory) -> float:
    """Left-endpoint quadrature of the running cost along one path, plus the
    terminal cost."""
    t = traj.grid.knots[:-1]
    x = traj.states[:-1]
    a = traj.actions[:-1]
    run = (
        cost.Q.on(t) * x * x
        + 2.0 * cost.S.on(t) * x * a
        + cost.R.on(t) * a * a
        + 2.0 * cost.p.on(t) * x
        + 2.0 * cost.q.on(t) * a
    )
    xT = traj.states[-1]
    return float(np.sum(run) * traj.grid.dt + cost.M * xT * xT + 2.0 * cost.m_bar * xT)


# ---------------------------------------------------------------------------
# exact evaluators via the moment ODEs


def _cost_arrays(cost: CostSpec, th: np.ndarray):
    return (
        cost.Q.on(th),
        cost.S.on(th),
        cost.R.on(th),
        cost.p.on(th),
        cost.q.on(th),
    )


def _run_general_moments(
    model: GeneralLqModel,
    base: GaussianPolicy,
    ode_grid: TimeGrid,
    zeta_step: np.ndarray,
    relaxed: bool,
):
    """Shared RK4 driver for the conditional and relaxed moment systems."""
    nf = ode_grid.n
    th = np.linspace(0.0, model.T, 2 * nf + 1)
    Aa, Ba, bb, Ca, Da, sg = _general_arrays(model, th)
    kk, KK, lam = _policy_arrays(base, th)
    Q, S, R, p, q = _cost_arrays(model.cost, th)

    a1 = Aa + Ba * KK
    gam = Ca + Da * KK
    d0 = sg + Da * kk
    a00 = Ba * kk + bb
    b2 = 2.0 * a1 + gam * gam
    b10 = 2.0 * a00 + 2.0 * gam * d0
    c2 = Q + 2.0 * S * KK + R * KK * KK
    c10 = (2.0 * S + 2.0 * R * KK) * kk + 2.0 * p + 2.0 * q * KK
    c00 = R * kk * kk + 2.0 * q * kk
    zero = np.zeros_like(th)
    if relaxed:
        a01 = b11 = c11 = b01 = b02 = c01 = c02 = zero
        b00 = d0 * d0 + Da * Da * lam * lam
        c00 = c00 + R * lam * lam
    else:
        a01 = Ba * lam
        b11 = 2.0 * Ba * lam + 2.0 * gam * Da * lam
        b00 = d0 * d0
        b01 = 2.0 * d0 * Da * lam
        b02 = Da * Da * lam * lam
        c11 = (2.0 * S + 2.0 * R * KK) * lam
        c01 = 2.0 * R * kk * lam + 2.0 * q * lam
        c02 = R * lam * lam
    m1s, m2s, total, min_gap = moment_cost(
        a1, a00, a01, b2, b10, b11, b00, b01, b02,
        c2, c10, c11, c00, c01, c02,
        zeta_step, ode_grid.dt, model.x0, float(model.cost.M), 2.0 * float(model.cost.m_bar),
    )
    return m1s, m2s, total, min_gap


def conditional_moments(
    model: LqModel, policy: RandomisedPolicy, ode_refine: int = 10
) -> ConditionalMoments:
    """Exact conditional moments of the executed policy, given its draws."""
    ode = policy.noise.grid.refine(ode_refine)
    zeta = np.repeat(policy.noise.draws, ode_refine)
    m1s, m2s, _, _ = _run_general_moments(
        GeneralLqModel.embed(model), policy.base, ode, zeta, relaxed=False
    )
    return ConditionalMoments(grid=ode, m1=m1s, m2=m2s)


def conditional_cost_exact(
    model: LqModel, policy: RandomisedPolicy, ode_refine: int = 10
) -> float:
    """Cost of the executed policy conditional on its frozen draws, computed
    exactly from the moment ODEs (no Monte Carlo error)."""
    return general_conditional_cost_exact(
        GeneralLqModel.embed(model), policy, ode_refine
    )


def general_conditional_cost_exact(
    model: GeneralLqModel, policy: RandomisedPolicy, ode_refine: int = 10
) -> float:
    ode = policy.noise.grid.refine(ode_refine)
    zeta = np.repeat(policy.noise.draws, ode_refine)
    _, _, total, min_gap = _run_general_moments(
        model, policy.base, ode, zeta, relaxed=False
    )
    if min_gap < -1e-9:
        raise ValueError(f"moment integration violated m2 >= m1^2 by {-min_gap:g}")
    return float(total)


def _simpson_half(vals: np.ndarray, h: float) -> float:
    """Composite Simpson for values tabulated at half resolution (2n+1 nodes
    for n steps of size h)."""
    return float(h / 6.0 * np.sum(vals[:-2:2] + 4.0 * vals[1::2] + vals[2::2]))


def relaxed_cost_exact(
    model: LqModel, policy: GaussianPolicy, n_steps: int = 1024
) -> float:
    """Cost of the relaxed policy, via the identity

        J(nu) = J(deterministic mean feedback) + int_0^T R lam^2 dt,

    which holds because action noise is undiluted by the drift-only dynamics
    yet still paid for through the quadratic action cost."""
    ode = TimeGrid(model.T, n_steps)
    zeta = np.zeros(n_steps)
    _, _, det_cost, _ = _run_general_moments(
        GeneralLqModel.embed(model), policy, ode, zeta, relaxed=False
    )
    th = np.linspace(0.0, model.T, 2 * n_steps + 1)
    lam = policy.lam.on(th)
    penalty = _simpson_half(model.cost.R.on(th) * lam * lam, ode.dt)
    return float(det_cost) + penalty


def general_relaxed_cost_exact(
    model: GeneralLqModel, policy: GaussianPolicy, n_steps: int = 1024
) -> float:
    """Relaxed cost for the general model, straight from the moment ODEs (the
    action noise now also feeds the diffusion through D)."""
    ode = TimeGrid(model.T, n_steps)
    zeta = np.zeros(n_steps)
    _, _, total, _ = _run_general_moments(model, policy, ode, zeta, relaxed=True)
    return float(total)


def optimal_cost(
    model: LqModel, grid: TimeGrid | None = None, oversample: int = 10
) -> float:
    """Value of the optimal (deterministic) feedback,

        J* = P_0 x0^2 + 2 eta_0 x0 + int_0^T [sigma^2 P - (B eta + q)^2 / R] dt.
    """
    if grid is None:
        grid = TimeGrid(model.T, 256)
    sol = solve_riccati(model.theta_star, model.cost, grid, oversample=oversample)
    t = sol.grid.knots
    sig = model.sigma_bar.on(t)
    B = model.theta_star.B
    rest = (B * sol.eta + model.cost.q.on(t)) ** 2 / model.cost.R.on(t)
    integrand = sig * sig * sol.P - rest
    # composite Simpson on the fine knots (their count is odd by construction)
    h = sol.grid.dt
    chi = h / 3.0 * (
        integrand[0]
        + integrand[-1]
        + 4.0 * np.sum(integrand[1:-1:2])
        + 2.0 * np.sum(integrand[2:-1:2])
    )
    x0 = model.x0
    return float(sol.P[0] * x0 * x0 + 2.0 * sol.eta[0] * x0 + chi)


# ---------------------------------------------------------------------------
# Monte Carlo


def mc_cost(
    model,
    policy,
    n_paths: int,
    rng: np.random.Generator,
    sim_refine: int = 1,
    grid: TimeGrid | None = None,
    chunk: int = 20000,
):
    """Monte Carlo cost estimate, returned as (estimate, standard_error).

    A RandomisedPolicy is executed with its frozen draws (only the Brownian
    motion is resampled across paths); a GaussianPolicy is run in relaxed
    mode with fresh action draws every step (needs `grid`).
    """
    if isinstance(model, LqModel):
        model = GeneralLqModel.embed(model)
    if isinstance(policy, RandomisedPolicy):
        sim = policy.noise.grid.refine(sim_refine)
        zeta_fixed = np.repeat(policy.noise.draws, sim_refine)
        base = policy.base
        relaxed = False
    elif isinstance(policy, GaussianPolicy):
        if grid is None:
            raise ValueError("relaxed-mode Monte Carlo needs a simulation grid")
        sim = grid
        zeta_fixed = None
        base = policy
        relaxed = True
    else:
        raise TypeError(f"unsupported policy type {type(policy).__name__}")

    t = sim.knots
    h = sim.dt
    Aa, Ba, bb, Ca, Da, sg = _general_arrays(model, t[:-1])
    kk, KK, lam = _policy_arrays(base, t)
    Q, S, R, p, q = _cost_arrays(model.cost, t[:-1])
    sqh = math.sqrt(h)

    costs = np.empty(n_paths)
    done = 0
    while done < n_paths:
        c = min(chunk, n_paths - done)
        X = np.full(c, model.x0)
        acc = np.zeros(c)
        for j in range(sim.n):
            if relaxed:
                z = rng.standard_normal(c)
            else:
                z = zeta_fixed[j]
            a = kk[j] + KK[j] * X + lam[j] * z
            acc += (
                Q[j] * X * X
                + 2.0 * S[j] * X * a
                + R[j] * a * a
                + 2.0 * p[j] * X
                + 2.0 * q[j] * a
            )
            dW = rng.standard_normal(c) * sqh
            X = X + (Aa[j] * X + Ba[j] * a + bb[j]) * h + (Ca[j] * X + Da[j] * a + sg[j]) * dW
        acc = acc * h + model.cost.M * X * X + 2.0 * model.cost.m_bar * X
        costs[done : done + c] = acc
        done += c
    est = float(np.mean(costs))
    se = float(np.std(costs, ddof=1) / math.sqrt(n_paths)) if n_paths > 1 else math.inf
    return est, se


# ---------------------------------------------------------------------------
# closed-form execution gap


@dataclass(frozen=True)
class GapFunctions:
    """The three gap kernels tabulated on a uniform grid: h1, h2 on the knots
    and h3 on the product grid (first index t, second r; on the diagonal the
    r <= t branch is used)."""

    times: np.ndarray
    h1: np.ndarray
    h2: np.ndarray
    h3: np.ndarray

    def __post_init__(self):
        n = self.times.shape[0]
        if self.h1.shape != (n,) or self.h2.shape != (n,) or self.h3.shape != (n, n):
            raise ValueError("kernel tabulations do not match the time grid")


@dataclass(frozen=True)
class GapCoefficients:
    """Per-cell reduction of the execution-gap expansion for one policy and
    execution grid: for draws zeta,

        gap = c1 . zeta + c2 . (zeta^2 - 1) + zeta' C3 zeta,

    so the exact mean gap over draws is trace(C3)."""

    grid: TimeGrid
    c1: np.ndarray
    c2: np.ndarray
    C3: np.ndarray

    def gap(self, draws: np.ndarray):
        Z = np.atleast_2d(np.asarray(draws, dtype=float))
        g = Z @ self.c1 + (Z * Z - 1.0) @ self.c2 + np.sum((Z @ self.C3) * Z, axis=1)
        return float(g[0]) if np.ndim(draws) == 1 else g

    def mean_gap(self) -> float:
        return float(np.trace(self.C3))


def _cumtrapz(y: np.ndarray, h: float) -> np.ndarray:
    """Cumulative trapezoid from the left end, same length as y, first entry 0."""
    out = np.empty_like(y)
    out[0] = 0.0
    np.cumsum(0.5 * h * (y[:-1] + y[1:]), out=out[1:])
    return out


def _gap_pieces(model: GeneralLqModel, base: GaussianPolicy, nf: int):
    """Fine-grid ingredients of the gap kernels.

    Works in the convention of the running cost used here (linear terms carry
    a factor 2), which shows up in beta and the constant block of h1.
    """
    T = model.T
    t = np.linspace(0.0, T, nf + 1)
    h = T / nf
    Aa, Ba, bb, Ca, Da, sg = _general_arrays(model, t)
    kk, KK, lam = _policy_arrays(base, t)
    Q, S, R, p, q = _cost_arrays(model.cost, t)
    M = float(model.cost.M)

    gam = Ca + Da * KK
    d0 = sg + Da * kk
    f1 = np.exp(_cumtrapz(Aa + Ba * KK, h))
    f2 = np.exp(_cumtrapz(2.0 * (Aa + Ba * KK) + gam * gam, h))
    kappa = f1 * (model.x0 + _cumtrapz((Ba * kk + bb) / f1, h))
    f3 = 2.0 * (Ba * kk + bb) + 2.0 * gam * d0
    f4 = 2.0 * Ba + 2.0 * Da * gam
    f5 = 2.0 * Da * d0 + f4 * kappa
    Gam = Q + 2.0 * S * KK + R * KK * KK
    beta = 2.0 * S * kk + 2.0 * R * KK * kk + 2.0 * p + 2.0 * q * KK

    def tail(y):
        c = _cumtrapz(y, h)
        return c[-1] - c

    I1 = tail(beta * f1)
    I2 = tail(Gam * f2)
    I3 = tail(f3 * f1 / f2)
    I6 = tail(I2 * f3 * f1 / f2)

    h1 = (
        2.0 * model.cost.m_bar * f1[-1] / f1 * Ba
        + M * f2[-1] / f2 * f5
        + kappa * (2.0 * S + 2.0 * R * KK)
        + 2.0 * R * kk
        + 2.0 * q
        + f5 / f2 * I2
        + Ba / f1 * (I1 + M * f2[-1] * I3 + I6)
    )
    h2 = R + M * f2[-1] / f2 * Da * Da + Da * Da / f2 * I2
    # separable factors of h3: r <= t branch u(t) v(r), t <= r branch w(t) z(r)
    u = M * f2[-1] / f2 * f4 * f1 + (2.0 * S + 2.0 * R * KK) * f1
    v = Ba / f1
    w = Ba / f1
    z = f4 * f1 / f2 * I2
    return t, h, lam, h1, h2, u, v, w, z


def gap_functions(model: GeneralLqModel, base: GaussianPolicy, n: int = 256) -> GapFunctions:
    """Tabulate the gap kernels on a uniform (n+1)-point grid."""
    t, _, _, h1, h2, u, v, w, z = _gap_pieces(model, base, n)
    h3 = np.where(
        np.arange(n + 1)[:, None] >= np.arange(n + 1)[None, :],
        np.outer(u, v),
        np.outer(w, z),
    )
    return GapFunctions(times=t, h1=h1.copy(), h2=h2.copy(), h3=h3)


def gap_cell_coefficients(
    model: GeneralLqModel,
    base: GaussianPolicy,
    exec_grid: TimeGrid,
    n_fine: int = 4096,
) -> GapCoefficients:
    """Reduce the gap expansion to per-cell coefficients of the draws.

    The fine quadrature grid is aligned with the execution cells (n_fine is
    rounded up to a multiple of the cell count) so every kernel integral
    splits exactly along cell boundaries.
    """
    n = exec_grid.n
    m = max(1, -(-n_fine // n))
    nf = n * m
    t, h, lam, h1, h2, u, v, w, z = _gap_pieces(model, base, nf)

    def cells(y):
        s = 0.5 * h * (y[:-1] + y[1:])
        return s.reshape(n, m).sum(axis=1)

    c1 = cells(h1 * lam)
    c2 = cells(h2 * lam * lam)
    U = cells(u * lam)
    V = cells(v * lam)
    W = cells(w * lam)
    Zc = cells(z * lam)
    C3 = np.tril(np.outer(U, V), -1) + np.triu(np.outer(W, Zc), 1)
    ul, vl, wl, zl = u * lam, v * lam, w * lam, z * lam
    for i in range(n):
        sl = slice(i * m, (i + 1) * m + 1)
        a, b, cc, d = ul[sl], vl[sl], wl[sl], zl[sl]
        phi = _cumtrapz(b, h)
        psi = _cumtrapz(d, h)
        psi = psi[-1] - psi
        g = a * phi + cc * psi
        C3[i, i] = 0.5 * h * np.sum(g[:-1] + g[1:])
    return GapCoefficients(grid=exec_grid, c1=c1, c2=c2, C3=C3)


def closed_form_gap(
    model: GeneralLqModel, policy: RandomisedPolicy, n_fine: int = 4096
) -> float:
    """Predicted cost difference J(executed) - J(relaxed) for one frozen set of
    draws, straight from the expansion (no simulation)."""
    coeffs = gap_cell_coefficients(model, policy.base, policy.noise.grid, n_fine)
    return coeffs.gap(policy.noise.draws)


def mean_execution_gap(
    model: GeneralLqModel, base: GaussianPolicy, exec_grid: TimeGrid, n_fine: int = 4096
) -> float:
    """Exact mean of the execution gap over the noise draws."""
    return gap_cell_coefficients(model, base, exec_grid, n_fine).mean_gap()


@dataclass(frozen=True)
class GapStudyRow:
    mesh_n: int
    mean_gap: float
    se_mean_gap: float
    p95_abs_gap: float
    n_draws: int
    exact_mean_gap: float


def execution_gap_study(
    model: GeneralLqModel,
    base: GaussianPolicy,
    meshes,
    n_draws: int,
    rng: np.random.Generator,
    n_fine: int = 4096,
    chunk: int = 20000,
):
    """Sample the gap law on a list of execution meshes.

    For each mesh the per-cell coefficients are computed once and then
    evaluated on `n_draws` standard normal draw vectors in chunks.
    """
    rows = []
    for mesh_n in meshes:
        coeffs = gap_cell_coefficients(model, base, TimeGrid(model.T, mesh_n), n_fine)
        gaps = np.empty(n_draws)
        done = 0
        while done < n_draws:
            c = min(chunk, n_draws - done)
            Z = rng.standard_normal((c, mesh_n))
            gaps[done : done + c] = coeffs.gap(Z)
            done += c
        rows.append(
            GapStudyRow(
                mesh_n=int(mesh_n),
                mean_gap=float(np.mean(gaps)),
                se_mean_gap=float(np.std(gaps, ddof=1) / math.sqrt(n_draws)),
                p95_abs_gap=float(np.quantile(np.abs(gaps), 0.95)),
                n_draws=int(n_draws),
                exact_mean_gap=coeffs.mean_gap(),
            )
        )
    return rows


# ---------------------------------------------------------------------------
# repetition bias


@dataclass(frozen=True)
class RepetitionBias:
    empirical: float
    se: float
    analytic: float
    n_agents: int


def repetition_bias(
    mu: float,
    lam: float,
    n_agents: int,
    rng: np.random.Generator,
    n_steps: int = 256,
) -> RepetitionBias:
    """Bias of estimating a relaxed cost by re-running one frozen draw per agent.

    Each agent freezes a single standard normal draw zeta and plays a = lam*zeta
    in dx = (mu x + a) dt on [0, 1] from x = 0, paying int (mu x + a)^2 dt; the
    relaxed cost of the same policy is lam^2, and the mean excess over agents
    estimates the closed-form bias lam^2 (e^{2 mu} - 1 - 2 mu) / (2 mu).
    """
    if mu == 0.0:
        raise ValueError("mu = 0 makes the bias formula degenerate; pick mu != 0")
    if n_agents < 2:
        raise ValueError("need at least two agents for a standard error")
    zeta = rng.standard_normal(n_agents)
    a = lam * zeta
    h = 1.0 / n_steps
    x = np.zeros(n_agents)
    c = np.zeros(n_agents)
    for _ in range(n_steps):
        # RK4 on (x, c) jointly: x' = mu x + a, c' = (mu x + a)^2
        k1 = mu * x + a
        k2 = mu * (x + 0.5 * h * k1) + a
        k3 = mu * (x + 0.5 * h * k2) + a
        k4 = mu * (x + h * k3) + a
        c += h / 6.0 * (k1 * k1 + 2.0 * k2 * k2 + 2.0 * k3 * k3 + k4 * k4)
        x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    excess = c - lam * lam
    analytic = lam * lam * (math.exp(2.0 * mu) - 1.0 - 2.0 * mu) / (2.0 * mu)
    return RepetitionBias(
        empirical=float(np.mean(excess)),
        se=float(np.std(excess, ddof=1) / math.sqrt(n_agents)),
        analytic=analytic,
        n_agents=n_agents,
    )
