"""Domain types: time grids, time-varying coefficients, cost specifications,
and the two controlled-SDE models, with validation of the standing assumptions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

__all__ = [
    "TimeGrid",
    "TimeFunction",
    "Constant",
    "Sampled",
    "as_time_function",
    "CostSpec",
    "DriftParams",
    "LqModel",
    "GeneralLqModel",
    "ThetaBox",
    "ValidationError",
    "NonPositiveR",
    "NonPositiveSigma",
    "ConvexityDefect",
    "NegativeTerminalWeight",
    "validate_lq_model",
    "validate_general_model",
]

# Slack for "is t inside [0, T]" checks: grid knots computed as i*dt can
# overshoot T by a few ulp.
_TIME_EPS = 1e-9


class ValidationError(ValueError):
    """A model violates one of the standing assumptions."""


class NonPositiveR(ValidationError):
    pass


class NonPositiveSigma(ValidationError):
    pass


class ConvexityDefect(ValidationError):
    """Q - S^2/R < 0 somewhere: the running cost is not convex in the action."""


class NegativeTerminalWeight(ValidationError):
    pass


@dataclass(frozen=True)
class TimeGrid:
    """Uniform partition of [0, T] into n steps (n+1 knots)."""

    T: float
    n: int

    def __post_init__(self):
        if not (self.T > 0):
            raise ValueError(f"horizon must be positive, got T={self.T}")
        if self.n < 1:
            raise ValueError(f"need at least one step, got n={self.n}")

    @property
    def dt(self) -> float:
        return self.T / self.n

    @property
    def knots(self) -> np.ndarray:
        return np.linspace(0.0, self.T, self.n + 1)

    def refine(self, factor: int) -> "TimeGrid":
        """Subdivide every step into `factor` equal parts."""
        if factor < 1:
            raise ValueError("refinement factor must be >= 1")
        return TimeGrid(self.T, self.n * factor)

    def refines(self, coarser: "TimeGrid") -> bool:
        """True if every knot of `coarser` is a knot of self (integer refinement)."""
        return (
            abs(self.T - coarser.T) <= _TIME_EPS * max(1.0, self.T)
            and self.n % coarser.n == 0
        )

    def interval_index(self, t: float) -> int:
        """Index i with t in [t_i, t_{i+1}); t = T maps to the last interval.

        Intervals are left-closed right-open, so a knot belongs to the
        interval it starts.
        """
        if t < -_TIME_EPS or t > self.T + _TIME_EPS:
            raise ValueError(f"t={t} outside [0, {self.T}]")
        u = t / self.dt
        i = int(math.floor(u))
        # float jitter: t barely below knot i+1 should still round up to it
        if (u - i) > 1.0 - 1e-9:
            i += 1
        return min(max(i, 0), self.n - 1)


class TimeFunction:
    """A coefficient on [0, T]: either constant or sampled with linear interpolation.

    Instances are immutable; `f(t)` evaluates, `f.on(times)` evaluates on an
    array, `f.sup_norm()` gives max |f| over the representation knots.
    """

    def __call__(self, t: float) -> float:
        raise NotImplementedError

    def on(self, times: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def sup_norm(self) -> float:
        raise NotImplementedError

    def knot_values(self) -> np.ndarray:
        """Values at the function's own representation knots."""
        raise NotImplementedError


@dataclass(frozen=True)
class Constant(TimeFunction):
    value: float

    def __call__(self, t: float) -> float:
        return self.value

    def on(self, times: np.ndarray) -> np.ndarray:
        return np.full(np.shape(times), self.value, dtype=float)

    def sup_norm(self) -> float:
        return abs(self.value)

    def knot_values(self) -> np.ndarray:
        return np.array([self.value])


@dataclass(frozen=True)
class Sampled(TimeFunction):
    """Values on a uniform grid over [0, T], linearly interpolated between knots."""

    values: np.ndarray
    T: float

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size < 2:
            raise ValueError("Sampled needs a 1-D array with at least two knots")
        if not (self.T > 0):
            raise ValueError("Sampled horizon must be positive")
        object.__setattr__(self, "values", v)

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.T, self.values.size)

    def _check_domain(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < -_TIME_EPS * max(1.0, self.T)) or np.any(
            t > self.T * (1 + _TIME_EPS) + _TIME_EPS
        ):
            raise ValueError(f"time outside [0, {self.T}]")

    def __call__(self, t: float) -> float:
        self._check_domain(t)
        return float(np.interp(t, self.times, self.values))

    def on(self, times: np.ndarray) -> np.ndarray:
        self._check_domain(times)
        return np.interp(times, self.times, self.values)

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def knot_values(self) -> np.ndarray:
        return self.values


def as_time_function(x, T: float | None = None) -> TimeFunction:
    """Coerce a float, array, or TimeFunction into a TimeFunction."""
    if isinstance(x, TimeFunction):
        return x
    if np.isscalar(x):
        return Constant(float(x))
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        return Constant(float(arr))
    if T is None:
        raise ValueError("sampled coefficient needs a horizon T")
    return Sampled(arr, T)


@dataclass(frozen=True)
class CostSpec:
    """Running cost f(t,x,a) = Q x^2 + 2 S x a + R a^2 + 2 p x + 2 q a and
    terminal cost g(x) = M x^2 + 2 m_bar x.

    The terminal linear coefficient is called m_bar here to keep `m` free for
    episode indices.
    """

    Q: TimeFunction
    S: TimeFunction
    R: TimeFunction
    p: TimeFunction
    q: TimeFunction
    M: float
    m_bar: float

    @staticmethod
    def create(Q=0.0, S=0.0, R=1.0, p=0.0, q=0.0, M=0.0, m_bar=0.0, T: float | None = None) -> "CostSpec":
        return CostSpec(
            Q=as_time_function(Q, T),
            S=as_time_function(S, T),
            R=as_time_function(R, T),
            p=as_time_function(p, T),
            q=as_time_function(q, T),
            M=float(M),
            m_bar=float(m_bar),
        )

    def f(self, t: float, x: float, a: float) -> float:
        """The running cost at a point."""
        return (
            self.Q(t) * x * x
            + 2.0 * self.S(t) * x * a
            + self.R(t) * a * a
            + 2.0 * self.p(t) * x
            + 2.0 * self.q(t) * a
        )

    def g(self, x: float) -> float:
        """The terminal cost."""
        return self.M * x * x + 2.0 * self.m_bar * x


@dataclass(frozen=True)
class DriftParams:
    """Drift parameter pair theta = (A, B)."""

    A: float
    B: float

    def as_array(self) -> np.ndarray:
        return np.array([self.A, self.B])


@dataclass(frozen=True)
class ThetaBox:
    """Compact box of admissible drift parameters."""

    A_lo: float
    A_hi: float
    B_lo: float
    B_hi: float

    def __post_init__(self):
        if not (self.A_lo < self.A_hi and self.B_lo < self.B_hi):
            raise ValueError("box bounds must satisfy lo < hi in each coordinate")

    def contains(self, theta: DriftParams) -> bool:
        return (
            self.A_lo <= theta.A <= self.A_hi and self.B_lo <= theta.B <= self.B_hi
        )

    def contains_interior(self, theta: DriftParams) -> bool:
        return (
            self.A_lo < theta.A < self.A_hi and self.B_lo < theta.B < self.B_hi
        )

    def clip(self, A: float, B: float) -> DriftParams:
        return DriftParams(
            A=min(max(A, self.A_lo), self.A_hi),
            B=min(max(B, self.B_lo), self.B_hi),
        )


@dataclass(frozen=True)
class LqModel:
    """Scalar controlled SDE dX = (A* X + B* a) dt + sigma_bar dW with quadratic cost.

    `diagnostic=True` marks a model built by `LqModel.noiseless`, which is the
    only constructor allowed to carry sigma_bar = 0 (deterministic ODE tests);
    the inference machinery divides by sigma_bar^2 and refuses such models.
    """

    theta_star: DriftParams
    sigma_bar: TimeFunction
    x0: float
    T: float
    cost: CostSpec
    diagnostic: bool = field(default=False, compare=False)

    @staticmethod
    def create(theta_star, sigma_bar, x0, T, cost) -> "LqModel":
        model = LqModel(
            theta_star=theta_star,
            sigma_bar=as_time_function(sigma_bar, T),
            x0=float(x0),
            T=float(T),
            cost=cost,
        )
        validate_lq_model(model)
        return model

    @staticmethod
    def noiseless(theta_star, sigma_bar, x0, T, cost) -> "LqModel":
        """Like `create` but allows sigma_bar == 0 (deterministic dynamics)."""
        model = LqModel(
            theta_star=theta_star,
            sigma_bar=as_time_function(sigma_bar, T),
            x0=float(x0),
            T=float(T),
            cost=cost,
            diagnostic=True,
        )
        validate_lq_model(model)
        return model


@dataclass(frozen=True)
class GeneralLqModel:
    """Controlled diffusion dX = (A x + B a + b_bar) dt + (C x + D a + sigma_bar) dW
    with the same quadratic cost convention as LqModel."""

    A: TimeFunction
    B: TimeFunction
    b_bar: TimeFunction
    C: TimeFunction
    D: TimeFunction
    sigma_bar: TimeFunction
    x0: float
    T: float
    cost: CostSpec

    @staticmethod
    def create(A, B, b_bar, C, D, sigma_bar, x0, T, cost) -> "GeneralLqModel":
        model = GeneralLqModel(
            A=as_time_function(A, T),
            B=as_time_function(B, T),
            b_bar=as_time_function(b_bar, T),
            C=as_time_function(C, T),
            D=as_time_function(D, T),
            sigma_bar=as_time_function(sigma_bar, T),
            x0=float(x0),
            T=float(T),
            cost=cost,
        )
        validate_general_model(model)
        return model

    @staticmethod
    def embed(model: LqModel) -> "GeneralLqModel":
        """Embed the drift-control model (C = D = b_bar = 0)."""
        return GeneralLqModel(
            A=Constant(model.theta_star.A),
            B=Constant(model.theta_star.B),
            b_bar=Constant(0.0),
            C=Constant(0.0),
            D=Constant(0.0),
            sigma_bar=model.sigma_bar,
            x0=model.x0,
            T=model.T,
            cost=model.cost,
        )


def _check_knots(f: TimeFunction, T: float, n_min: int = 200) -> np.ndarray:
    """Values of f on the grid used for validation checks.

    Piecewise-linear data attains its extremes at knots, so knotwise checks
    are exact for Sampled; for Constant one point would do, but a shared grid
    keeps the combined Q - S^2/R check simple.
    """
    if isinstance(f, Constant):
        n = n_min
    else:
        n = max(n_min, f.knot_values().size - 1)
    return f.on(np.linspace(0.0, T, n + 1))


def validate_lq_model(model: LqModel) -> None:
    """Check the standing assumptions at grid knots; raise a ValidationError
    variant naming the first violated inequality."""
    T = model.T
    n = 200
    for f in (model.cost.Q, model.cost.S, model.cost.R, model.sigma_bar):
        if isinstance(f, Sampled):
            n = max(n, f.values.size - 1)
    times = np.linspace(0.0, T, n + 1)
    R = model.cost.R.on(times)
    if np.any(R <= 0):
        raise NonPositiveR(f"R must be positive; min R = {R.min()}")
    sig = model.sigma_bar.on(times)
    if model.diagnostic:
        if np.any(sig < 0):
            raise NonPositiveSigma("sigma_bar must be nonnegative")
    else:
        if np.any(sig <= 0):
            raise NonPositiveSigma(f"sigma_bar must be positive; min = {sig.min()}")
    Q = model.cost.Q.on(times)
    S = model.cost.S.on(times)
    defect = Q - S * S / R
    if np.any(defect < 0):
        raise ConvexityDefect(f"Q - S^2/R >= 0 violated; min = {defect.min()}")
    if model.cost.M < 0:
        raise NegativeTerminalWeight(f"M must be >= 0, got {model.cost.M}")


def validate_general_model(model: GeneralLqModel) -> None:
    """Boundedness only: every coefficient must have a finite sup-norm."""
    names = ("A", "B", "b_bar", "C", "D", "sigma_bar")
    for name in names:
        f: TimeFunction = getattr(model, name)
        s = f.sup_norm()
        if not np.isfinite(s):
            raise ValidationError(f"coefficient {name} is not bounded (sup={s})")
    for name in ("Q", "S", "R", "p", "q"):
        f = getattr(model.cost, name)
        if not np.isfinite(f.sup_norm()):
            raise ValidationError(f"cost coefficient {name} is not bounded")
    if not (np.isfinite(model.cost.M) and np.isfinite(model.cost.m_bar)):
        raise ValidationError("terminal cost weights must be finite")
