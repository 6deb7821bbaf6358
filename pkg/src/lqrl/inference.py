"""Bayesian estimation of the drift pair theta = (A, B) from observed episodes.

The likelihood of a diffusion path is Gaussian in theta, so with a Gaussian
prior the posterior stays Gaussian and everything reduces to two sufficient
statistics accumulated across episodes:

    G += int Z_t Z_t' / sigma_t^2 dt,      b += sum Z_t (X_{t+dt} - X_t) / sigma_t^2,

with regressor Z_t = (X_t, a_t).  Time integrals use left-endpoint sums on the
simulation grid and the stochastic integral uses forward increments, matching
how the paths are generated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import EpisodeTrajectory
from .model import DriftParams, ThetaBox, as_time_function

__all__ = [
    "SufficientStats",
    "Prior",
    "PosteriorState",
    "accumulate",
    "posterior",
    "truncate",
    "lambda_min",
]

_DET_GUARD = 1e-300


@dataclass(frozen=True)
class SufficientStats:
    """Accumulated Gram matrix and projected increments; immutable, so each
    episode produces a new instance."""

    G: np.ndarray
    b: np.ndarray
    episode_count: int

    @staticmethod
    def zero() -> "SufficientStats":
        return SufficientStats(G=np.zeros((2, 2)), b=np.zeros(2), episode_count=0)

    def __post_init__(self):
        if self.G.shape != (2, 2) or self.b.shape != (2,):
            raise ValueError("stats must be a 2x2 Gram matrix and a length-2 vector")


@dataclass(frozen=True)
class Prior:
    """Gaussian prior N(theta0, V0) on the drift pair."""

    theta0: DriftParams
    V0: np.ndarray

    def __post_init__(self):
        V = np.asarray(self.V0, dtype=float)
        if V.shape != (2, 2):
            raise ValueError("prior covariance must be 2x2")
        if abs(V[0, 1] - V[1, 0]) > 1e-12 * (1.0 + abs(V[0, 1])):
            raise ValueError("prior covariance must be symmetric")
        if V[0, 0] <= 0 or V[1, 1] <= 0 or _det2(V) <= 0:
            raise ValueError("prior covariance must be positive definite")
        object.__setattr__(self, "V0", V)


@dataclass(frozen=True)
class PosteriorState:
    """Posterior mean and covariance; theta_trunc is the box-clipped mean and
    stays None until `truncate` is applied."""

    theta_hat: DriftParams
    V: np.ndarray
    theta_trunc: DriftParams | None = None


def _det2(M: np.ndarray) -> float:
    return float(M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0])


def _inv2(M: np.ndarray) -> np.ndarray:
    d = _det2(M)
    if abs(d) < _DET_GUARD:
        raise ArithmeticError(f"2x2 inverse lost: |det| = {abs(d):g} < {_DET_GUARD:g}")
    return np.array([[M[1, 1], -M[0, 1]], [-M[1, 0], M[0, 0]]]) / d


def lambda_min(M: np.ndarray) -> float:
    """Smaller eigenvalue of a symmetric 2x2 matrix."""
    tr = M[0, 0] + M[1, 1]
    disc = (M[0, 0] - M[1, 1]) ** 2 + 4.0 * M[0, 1] * M[1, 0]
    return float(0.5 * (tr - np.sqrt(max(disc, 0.0))))


def accumulate(
    stats: SufficientStats, traj: EpisodeTrajectory, sigma_bar
) -> SufficientStats:
    """Fold one observed episode into the sufficient statistics."""
    sig = as_time_function(sigma_bar, traj.grid.T).on(traj.grid.knots[:-1])
    if np.any(sig <= 0):
        raise ValueError("inference needs strictly positive observation noise")
    w = 1.0 / (sig * sig)
    X = traj.states[:-1]
    a = traj.actions[:-1]
    dX = np.diff(traj.states)
    dt = traj.grid.dt
    G = stats.G + dt * np.array(
        [
            [np.sum(w * X * X), np.sum(w * X * a)],
            [np.sum(w * X * a), np.sum(w * a * a)],
        ]
    )
    b = stats.b + np.array([np.sum(w * X * dX), np.sum(w * a * dX)])
    return SufficientStats(G=G, b=b, episode_count=stats.episode_count + 1)


def posterior(stats: SufficientStats, prior: Prior) -> PosteriorState:
    """Conjugate update: V = (V0^-1 + G)^-1, theta_hat = V (V0^-1 theta0 + b)."""
    V0inv = _inv2(prior.V0)
    V = _inv2(V0inv + stats.G)
    mean = V @ (V0inv @ prior.theta0.as_array() + stats.b)
    return PosteriorState(theta_hat=DriftParams(float(mean[0]), float(mean[1])), V=V)


def truncate(post: PosteriorState, box: ThetaBox) -> PosteriorState:
    """Clip the posterior mean into the admissible box, coordinate by
    coordinate."""
    return PosteriorState(
        theta_hat=post.theta_hat,
        V=post.V,
        theta_trunc=box.clip(post.theta_hat.A, post.theta_hat.B),
    )
