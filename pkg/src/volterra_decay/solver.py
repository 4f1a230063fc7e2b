"""Numerical solutions on a uniform grid, computed two independent ways.

``solve_picard`` iterates the integral operator T directly, using an O(n)
recursive product-trapezoid rule for the exponential-kernel convolution.
``solve_ode`` integrates the equivalent ODE ``u' = -a u + h(u) + F`` with
classical RK4.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.signal import lfilter

from .certify import Certificate
from .problem import Problem, eval_f, eval_h

DIVERGENCE_LIMIT = 1e6
DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 200
DEFAULT_SLACK = 1e-6


class DivergenceError(RuntimeError):
    """Raised when a trajectory's modulus exceeds ``DIVERGENCE_LIMIT``."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


@dataclass(frozen=True)
class Grid:
    T: float
    n: int

    def __post_init__(self):
        if not self.T > 0:
            raise ValueError(f"horizon T must be > 0, got {self.T!r}")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"step count n must be an integer >= 1, got {self.n!r}")
        object.__setattr__(self, "T", float(self.T))
        object.__setattr__(self, "n", int(self.n))

    @property
    def dt(self) -> float:
        return self.T / self.n

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.n + 1) * self.dt


@dataclass(frozen=True, eq=False)
class Trajectory:
    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values)
        if values.shape != (self.grid.n + 1,):
            raise ValueError(f"expected {self.grid.n + 1} values, got shape {values.shape}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def t(self) -> np.ndarray:
        return self.grid.nodes

    @property
    def modulus(self) -> np.ndarray:
        return np.abs(self.values)

    def sup_distance(self, other: "Trajectory") -> float:
        if other.grid != self.grid:
            raise ValueError("trajectories live on different grids")
        return float(np.max(np.abs(self.values - other.values)))


@dataclass(frozen=True)
class BoundReport:
    max_ratio: float
    violated_at: int | None
    slack: float

    @property
    def holds(self) -> bool:
        return self.max_ratio <= 1.0 + self.slack

    def as_dict(self) -> dict:
        return {
            "max_ratio": self.max_ratio,
            "violated_at": self.violated_at,
            "slack": self.slack,
            "holds": self.holds,
        }


@dataclass(frozen=True, eq=False)
class PicardResult:
    trajectory: Trajectory
    iterations: int
    final_delta: float
    converged: bool
    deltas: tuple[float, ...] = field(default=())

    @property
    def ratios(self) -> np.ndarray:
        """Successive-difference ratios delta[m+1] / delta[m]."""
        d = np.asarray(self.deltas)
        with np.errstate(divide="ignore", invalid="ignore"):
            return d[1:] / d[:-1]


def convolve_exp(a: float, w, dt: float) -> np.ndarray:
    """I_k ~ int_0^{t_k} exp(-a(t_k - s)) w(s) ds for samples w_k = w(t_k).

    Trapezoid on each cell with the history propagated exactly by
    exp(-a dt):  I_{k+1} = E I_k + dt/2 (E w_k + w_{k+1}).
    The recurrence is a first-order IIR filter, run in O(n).
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    w = np.asarray(w)
    decay = math.exp(-a * dt)
    x = np.empty_like(w, dtype=np.result_type(w, np.float64))
    x[0] = 0.0
    x[1:] = 0.5 * dt * (decay * w[:-1] + w[1:])
    return lfilter([1.0], [1.0, -decay], x)


def sample_forcing(problem: Problem, grid: Grid) -> np.ndarray:
    return np.asarray(eval_f(problem.f, grid.nodes), dtype=problem.dtype)


def apply_T(problem: Problem, u: Trajectory) -> Trajectory:
    w = eval_h(problem.h, np.asarray(u.values, dtype=problem.dtype))
    values = convolve_exp(problem.a, w, u.grid.dt) + sample_forcing(problem, u.grid)
    return Trajectory(u.grid, values)


def solve_picard(
    problem: Problem,
    grid: Grid,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> PicardResult:
    """Fixed-point iteration u <- T(u) starting from u = f.

    Stops once the sup-norm change drops to ``tol``. Hitting ``max_iter``
    returns ``converged=False``; a sup-norm above ``DIVERGENCE_LIMIT``
    raises :class:`DivergenceError`.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    u = Trajectory(grid, sample_forcing(problem, grid))
    deltas = []
    for m in range(1, max_iter + 1):
        nxt = apply_T(problem, u)
        if not np.all(np.isfinite(nxt.values)) or np.max(nxt.modulus) > DIVERGENCE_LIMIT:
            raise DivergenceError(f"Picard iterate {m} exceeded {DIVERGENCE_LIMIT:g} in sup-norm")
        delta = nxt.sup_distance(u)
        deltas.append(delta)
        u = nxt
        if delta <= tol:
            return PicardResult(u, m, delta, True, tuple(deltas))
    return PicardResult(u, max_iter, deltas[-1], False, tuple(deltas))


def rk4(rhs: Callable, y0, grid: Grid, dtype=None) -> np.ndarray:
    """Classical four-stage Runge-Kutta for y' = rhs(t, y) on ``grid``."""
    dt = grid.dt
    half = 0.5 * dt
    if dtype is None:
        dtype = complex if isinstance(y0, complex) else float
    out = np.empty(grid.n + 1, dtype=dtype)
    y = y0
    out[0] = y
    for k in range(grid.n):
        t = k * dt
        k1 = rhs(t, y)
        k2 = rhs(t + half, y + half * k1)
        k3 = rhs(t + half, y + half * k2)
        k4 = rhs(t + dt, y + dt * k3)
        y = y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not abs(y) <= DIVERGENCE_LIMIT:
            raise DivergenceError(f"RK4 solution exceeded {DIVERGENCE_LIMIT:g} at t={t + dt:g}", t + dt)
        out[k + 1] = y
    return out


def solve_ode(problem: Problem, grid: Grid) -> Trajectory:
    a, a1 = problem.a, problem.f.rate
    nl = problem.h
    # F(t) = f' + a f = A (a - a1) exp(-a1 t)
    F0 = problem.f.amplitude * (a - a1)

    def rhs(t, u):
        return -a * u + eval_h(nl, u) + F0 * math.exp(-a1 * t)

    u0 = complex(problem.f.amplitude) if problem.is_complex else problem.f.amplitude
    return Trajectory(grid, rk4(rhs, u0, grid, problem.dtype))


def envelope_ratio(modulus, t, R: float, p: float, slack: float) -> BoundReport:
    """max_k modulus_k * R * exp(p t_k) against 1 + slack."""
    ratio = np.asarray(modulus) * R * np.exp(p * np.asarray(t))
    bad = np.flatnonzero(ratio > 1.0 + slack)
    return BoundReport(
        max_ratio=float(np.max(ratio)),
        violated_at=int(bad[0]) if bad.size else None,
        slack=slack,
    )


def verify_bound(u: Trajectory, cert: Certificate, slack: float = DEFAULT_SLACK) -> BoundReport:
    if not cert.overall:
        raise ValueError("cannot verify against a failed certificate")
    return envelope_ratio(u.modulus, u.t, cert.R, cert.p, slack)
