"""Backward Riccati pair for the scalar LQ problem, feedback gains, and the
pointwise Hamiltonian.

The value function of the model is V(t,x) = P_t x^2 + 2 eta_t x + chi_t with

    P'   + 2 A P - (B P + S)^2 / R + Q = 0,          P_T   = M,
    eta' + (A - (B P + S) B / R) eta + p - (B P + S) q / R = 0,   eta_T = m_bar,

and the greedy feedback is a = K_t x + k_t with K = -(B P + S)/R and
k = -(B eta + q)/R.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import riccati_backward
from .model import CostSpec, DriftParams, Sampled, TimeFunction, TimeGrid

__all__ = [
    "RiccatiSolution",
    "FeedbackGains",
    "RiccatiBlowUp",
    "solve_riccati",
    "hamiltonian",
    "greedy_action",
]


class RiccatiBlowUp(RuntimeError):
    """The backward sweep left the guard interval before reaching t = 0."""

    def __init__(self, which: str, time: float, bound: float):
        self.which = which
        self.time = time
        self.bound = bound
        super().__init__(
            f"|{which}| exceeded {bound:g} at t = {time:.6g} during the backward sweep"
        )


@dataclass(frozen=True)
class FeedbackGains:
    """Affine feedback a = K(t) x + k(t) for drift parameters theta."""

    K: TimeFunction
    k: TimeFunction
    theta: DriftParams


@dataclass(frozen=True)
class RiccatiSolution:
    """P and eta tabulated on a fine uniform grid (terminal values exact)."""

    P: np.ndarray
    eta: np.ndarray
    theta: DriftParams
    grid: TimeGrid
    cost: CostSpec

    def P_fn(self) -> TimeFunction:
        return Sampled(self.P, self.grid.T)

    def eta_fn(self) -> TimeFunction:
        return Sampled(self.eta, self.grid.T)

    @property
    def min_P(self) -> float:
        return float(self.P.min())

    def gains(self) -> FeedbackGains:
        t = self.grid.knots
        B = self.theta.B
        R = self.cost.R.on(t)
        K = -(B * self.P + self.cost.S.on(t)) / R
        k = -(B * self.eta + self.cost.q.on(t)) / R
        return FeedbackGains(
            K=Sampled(K, self.grid.T), k=Sampled(k, self.grid.T), theta=self.theta
        )


def solve_riccati(
    theta: DriftParams,
    cost: CostSpec,
    grid: TimeGrid,
    oversample: int = 10,
    blow_up: float = 1e12,
) -> RiccatiSolution:
    """Solve the backward pair with classical RK4 on `grid` refined by
    `oversample`; P is marched at half the eta step so that eta's stages see
    exact P values.  Raises RiccatiBlowUp if either sweep exceeds `blow_up`.
    """
    if oversample < 1:
        raise ValueError("oversample must be >= 1")
    fine = grid.refine(oversample)
    nf = fine.n
    h = fine.dt
    tq = np.linspace(0.0, grid.T, 4 * nf + 1)
    P_half, eta, p_blow, e_blow = riccati_backward(
        theta.A,
        theta.B,
        cost.Q.on(tq),
        cost.S.on(tq),
        cost.R.on(tq),
        cost.p.on(tq),
        cost.q.on(tq),
        float(cost.M),
        float(cost.m_bar),
        nf,
        h,
        float(blow_up),
    )
    if p_blow >= 0:
        raise RiccatiBlowUp("P", p_blow * 0.5 * h, blow_up)
    if e_blow >= 0:
        raise RiccatiBlowUp("eta", e_blow * h, blow_up)
    return RiccatiSolution(P=P_half[::2].copy(), eta=eta, theta=theta, grid=fine, cost=cost)


def hamiltonian(
    theta: DriftParams, cost: CostSpec, t: float, x: float, a: float, y: float
) -> float:
    """H(t, x, a, y) = (A x + B a) y + f(t, x, a)."""
    return (theta.A * x + theta.B * a) * y + cost.f(t, x, a)


def greedy_action(sol: RiccatiSolution, t: float, x: float) -> float:
    """Minimiser of a -> H(t, x, a, V_x(t, x)) along the solved value function."""
    B = sol.theta.B
    P = sol.P_fn()(t)
    eta = sol.eta_fn()(t)
    R = sol.cost.R(t)
    return -((B * P + sol.cost.S(t)) * x + B * eta + sol.cost.q(t)) / R
