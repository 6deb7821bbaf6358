"""Relaxed Gaussian feedback policies, their execution noise, and the two
policy-improvement steps (entropy-regularised greedy and proximal mixing).

A relaxed policy is nu_t(. | x) = N(k_t + K_t x, lam_t^2); executing it on a
partition freezes one standard normal draw per cell (NoisePath) and plays the
affine control a = k + K x + lam * zeta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import Constant, CostSpec, Sampled, TimeFunction, TimeGrid
from .riccati import FeedbackGains

__all__ = [
    "GaussianPolicy",
    "NoisePath",
    "RandomisedPolicy",
    "MixingWeight",
    "exploratory_policy",
    "proximal_update",
    "mixing_identity_check",
    "sample_noise_path",
    "eval_randomised",
    "gaussian_kl",
    "regularised_hamiltonian_objective",
]

LAMBDA_FLOOR = 1e-12


_APPLY_MIN_STEPS = 1024


def _apply(op, *fns: TimeFunction) -> TimeFunction:
    """Combine time functions pointwise; stays Constant when every input is.

    Sampled results are tabulated on at least _APPLY_MIN_STEPS steps so that a
    nonlinear op applied to a coarsely sampled input (for instance the width
    sqrt(rho / 2R) of an exploratory policy) does not inherit the coarse grid's
    interpolation error.  The tabulation grid is a refinement of the finest
    input grid (and of the others too while that stays cheap), so piecewise-
    linear inputs are reproduced exactly rather than resampled with drift.
    """
    sampled = [f for f in fns if isinstance(f, Sampled)]
    if not sampled:
        vals = [np.float64(f.value) for f in fns]  # type: ignore[union-attr]
        return Constant(float(op(*vals)))
    T = sampled[0].T
    for f in sampled[1:]:
        if abs(f.T - T) > 1e-9 * max(1.0, T):
            raise ValueError("cannot combine sampled coefficients on different horizons")
    n = max(f.values.size - 1 for f in sampled)
    n *= max(1, -(-_APPLY_MIN_STEPS // n))
    for f in sampled:
        nf = f.values.size - 1
        aligned = n // math.gcd(n, nf) * nf
        if aligned <= 16 * _APPLY_MIN_STEPS:
            n = aligned
    t = np.linspace(0.0, T, n + 1)
    return Sampled(np.asarray(op(*[f.on(t) for f in fns]), dtype=float), T)


@dataclass(frozen=True)
class GaussianPolicy:
    """nu_t(. | x) = N(k(t) + K(t) x, lam(t)^2)."""

    k: TimeFunction
    K: TimeFunction
    lam: TimeFunction

    def mean(self, t: float, x: float) -> float:
        return self.k(t) + self.K(t) * x

    def sd(self, t: float) -> float:
        return self.lam(t)


@dataclass(frozen=True)
class NoisePath:
    """One frozen execution draw per cell of `grid`; `seed` records how the
    draws were generated (opaque metadata, not interpreted here)."""

    grid: TimeGrid
    draws: np.ndarray
    seed: object = field(default=None, compare=False)

    def __post_init__(self):
        d = np.asarray(self.draws, dtype=float)
        if d.shape != (self.grid.n,):
            raise ValueError(
                f"need one draw per cell: expected shape ({self.grid.n},), got {d.shape}"
            )
        object.__setattr__(self, "draws", d)


@dataclass(frozen=True)
class RandomisedPolicy:
    """A Gaussian policy executed with frozen per-cell noise."""

    base: GaussianPolicy
    noise: NoisePath


@dataclass(frozen=True)
class MixingWeight:
    """Time-dependent convex weight h(t) in [0, 1] from a proximal step."""

    h: TimeFunction

    def __post_init__(self):
        vals = self.h.knot_values()
        if np.any(vals < -1e-12) or np.any(vals > 1.0 + 1e-12):
            raise ValueError("mixing weight must take values in [0, 1]")


def sample_noise_path(grid: TimeGrid, rng: np.random.Generator, seed=None) -> NoisePath:
    """Draw the iid standard normal execution noise for one episode."""
    return NoisePath(grid=grid, draws=rng.standard_normal(grid.n), seed=seed)


def eval_randomised(policy: RandomisedPolicy, t: float, x: float) -> float:
    """Action of the executed policy at (t, x): the draw of the cell containing
    t (cells are left-closed; t = T reuses the final cell's draw)."""
    i = policy.noise.grid.interval_index(t)
    b = policy.base
    return b.k(t) + b.K(t) * x + b.lam(t) * policy.noise.draws[i]


def exploratory_policy(gains: FeedbackGains, rho: float, cost: CostSpec) -> GaussianPolicy:
    """Entropy-regularised greedy policy: mean k + K x, variance rho / (2 R)."""
    if rho < 0:
        raise ValueError("exploration weight rho must be nonnegative")
    lam = _apply(lambda R: np.sqrt(rho / (2.0 * R)), cost.R)
    return GaussianPolicy(k=gains.k, K=gains.K, lam=lam)


def proximal_update(
    prev: GaussianPolicy, gains: FeedbackGains, rho: float, cost: CostSpec
):
    """One proximal (KL-regularised) policy improvement step.

    Mixes the candidate gains into the previous mean with weight
    h = 2R / (2R + rho lam^-2) and tightens the variance by precision
    addition, lam'^-2 = 2R/rho + lam^-2.  Returns (new_policy, MixingWeight).
    """
    if rho <= 0:
        raise ValueError("proximal step needs rho > 0")

    def new_lam(R, lam):
        lam = np.maximum(lam, LAMBDA_FLOOR)
        return 1.0 / np.sqrt(2.0 * R / rho + lam ** -2.0)

    def weight(R, lam):
        lam = np.maximum(lam, LAMBDA_FLOOR)
        return 2.0 * R / (2.0 * R + rho * lam ** -2.0)

    lam1 = _apply(new_lam, cost.R, prev.lam)
    h = _apply(weight, cost.R, prev.lam)
    mix = lambda h, new, old: h * new + (1.0 - h) * old  # noqa: E731
    k1 = _apply(mix, h, gains.k, prev.k)
    K1 = _apply(mix, h, gains.K, prev.K)
    return GaussianPolicy(k=k1, K=K1, lam=lam1), MixingWeight(h)


def mixing_identity_check(
    prev: GaussianPolicy, new: GaussianPolicy, weight: MixingWeight
) -> float:
    """Sup defect of the identity h = 1 - (lam')^2 / lam^2 linking the mixing
    weight to the variance contraction."""
    defect = _apply(
        lambda lp, ln, h: h - (1.0 - ln ** 2 / np.maximum(lp, LAMBDA_FLOOR) ** 2),
        prev.lam,
        new.lam,
        weight.h,
    )
    return defect.sup_norm()


def gaussian_kl(mu1: float, sd1: float, mu2: float, sd2: float) -> float:
    """KL(N(mu1, sd1^2) || N(mu2, sd2^2)), with the degenerate conventions
    KL = 0 for identical parameters and +inf when either sd vanishes
    otherwise."""
    if sd1 < 0 or sd2 < 0:
        raise ValueError("standard deviations must be nonnegative")
    if mu1 == mu2 and sd1 == sd2:
        return 0.0
    if sd1 == 0.0 or sd2 == 0.0:
        return math.inf
    return (
        math.log(sd2 / sd1)
        + (sd1 * sd1 + (mu1 - mu2) ** 2) / (2.0 * sd2 * sd2)
        - 0.5
    )


def regularised_hamiltonian_objective(
    t,
    x,
    mu,
    sd,
    theta,
    cost: CostSpec,
    P_t: float,
    eta_t: float,
    rho: float,
    prev=None,
):
    """Objective whose minimiser over (mu, sd) is the improved policy at (t, x).

    Integrates the Hamiltonian H(t, x, a, V_x) against N(mu, sd^2) and adds
    rho times either the negative entropy (prev is None: exploratory step) or
    KL against the previous Gaussian prev = (mu_prev, sd_prev) (proximal
    step).  Accepts numpy arrays in mu / sd for grid scans.
    """
    mu = np.asarray(mu, dtype=float)
    sd = np.asarray(sd, dtype=float)
    y = 2.0 * (P_t * x + eta_t)
    expected_h = (
        (theta.A * x + theta.B * mu) * y
        + cost.Q(t) * x * x
        + 2.0 * cost.S(t) * x * mu
        + cost.R(t) * (mu * mu + sd * sd)
        + 2.0 * cost.p(t) * x
        + 2.0 * cost.q(t) * mu
    )
    if prev is None:
        reg = -0.5 * np.log(2.0 * math.pi * math.e * sd * sd)
    else:
        mu_p, sd_p = prev
        reg = (
            np.log(sd_p / sd)
            + (sd * sd + (mu - mu_p) ** 2) / (2.0 * sd_p * sd_p)
            - 0.5
        )
    out = expected_h + rho * reg
    return out if out.shape else float(out)
