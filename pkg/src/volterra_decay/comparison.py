"""Scalar differential-inequality comparison with exponential envelopes.

For ``g >= 0`` satisfying

    g' <= -a g + alpha(t, g) + beta(t)

with ``alpha = c_alpha g^b_alpha``, ``beta = c_beta exp(-r_beta t)`` and a
candidate ``mu = R_mu exp(p_mu t)``, the conditions

    alpha(t, 1/mu) + beta(t) <= (a - mu'/mu) / mu      (all t >= 0)
    g(0) mu(0) <= 1

yield ``g(t) <= 1/mu(t)`` for every ``t >= 0``. This module checks the two
conditions, integrates the majorant ODE ``w' = -a w + alpha(t, w) + beta(t)``
and compares supplied trajectories against ``1/mu``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .certify import Certificate
from .problem import Problem, envelope_constants
from .solver import DEFAULT_SLACK, BoundReport, Grid, Trajectory, envelope_ratio, rk4


@dataclass(frozen=True)
class InequalitySpec:
    a: float
    c_alpha: float
    b_alpha: float
    c_beta: float
    r_beta: float
    R_mu: float
    p_mu: float
    g0: float

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError("a must be positive")
        if self.c_alpha < 0 or self.c_beta < 0:
            raise ValueError("c_alpha and c_beta must be non-negative")
        if self.b_alpha < 1:
            raise ValueError("b_alpha must be >= 1 for local Lipschitz continuity")
        if not self.r_beta > 0:
            raise ValueError("r_beta must be positive")
        if not self.R_mu > 0:
            raise ValueError("R_mu must be positive")
        if self.g0 < 0:
            raise ValueError("g0 must be non-negative")

    def alpha(self, t, g):
        return self.c_alpha * np.abs(g) ** self.b_alpha

    def beta(self, t):
        return self.c_beta * np.exp(-self.r_beta * t)

    def mu(self, t):
        return self.R_mu * np.exp(self.p_mu * t)

    def mu_prime(self, t):
        return self.p_mu * self.mu(t)


class MuCondition(NamedTuple):
    holds: bool
    worst_margin: float
    method: str  # "analytic" (t = 0 dominance) or "grid"


def _tail_is_monotone(s: InequalitySpec) -> bool:
    # mu * alpha(t, 1/mu) = c_alpha R^(1-b) exp(-(b-1) p t) and
    # mu * beta(t) = c_beta R exp(-(r_beta - p) t) are non-increasing in t
    # while the scaled right side a - p_mu is constant.
    alpha_ok = s.c_alpha == 0 or (s.b_alpha >= 1 and s.p_mu >= 0)
    beta_ok = s.c_beta == 0 or s.r_beta >= s.p_mu
    return alpha_ok and beta_ok


def check_mu_condition(s: InequalitySpec, grid: Grid) -> MuCondition:
    """Check alpha(t, 1/mu) + beta(t) <= (a - mu'/mu) / mu.

    The grid test runs on every node. When the exponential families make
    the scaled left side non-increasing, the t = 0 test covers all
    t >= 0 and decides ``holds``; otherwise only the grid verdict is
    available. ``worst_margin`` is min over nodes of rhs - lhs.
    """
    t = grid.nodes
    w = 1.0 / s.mu(t)
    lhs = s.alpha(t, w) + s.beta(t)
    rhs = w * (s.a - s.mu_prime(t) / s.mu(t))
    worst = float(np.min(rhs - lhs))
    if _tail_is_monotone(s):
        lhs0 = s.c_alpha / s.R_mu**s.b_alpha + s.c_beta
        rhs0 = (s.a - s.p_mu) / s.R_mu
        return MuCondition(bool(lhs0 <= rhs0), worst, "analytic")
    return MuCondition(worst >= 0.0, worst, "grid")


def check_initial_condition(s: InequalitySpec) -> bool:
    return s.g0 * s.R_mu <= 1.0


def integrate_majorant(s: InequalitySpec, w0: float, grid: Grid) -> Trajectory:
    """RK4 solution of w' = -a w + alpha(t, w) + beta(t), w(0) = w0."""
    if w0 < 0:
        raise ValueError("w0 must be non-negative")
    a, ca, ba, cb, rb = s.a, s.c_alpha, s.b_alpha, s.c_beta, s.r_beta

    def rhs(t, w):
        return -a * w + ca * abs(w) ** ba + cb * math.exp(-rb * t)

    return Trajectory(grid, rk4(rhs, float(w0), grid, float))


def compare_to_envelope(
    g_values, s: InequalitySpec, grid: Grid, slack: float = DEFAULT_SLACK
) -> BoundReport:
    g_values = np.asarray(g_values, dtype=float)
    if np.any(g_values < 0):
        raise ValueError("g_values must be non-negative")
    return envelope_ratio(g_values, grid.nodes, s.R_mu, s.p_mu, slack)


def spec_from_problem(p: Problem, cert: Certificate) -> InequalitySpec:
    """The scalar inequality satisfied by g = |u| for a certified problem."""
    if not cert.overall:
        raise ValueError("spec_from_problem needs a passing certificate")
    env = envelope_constants(p)
    return InequalitySpec(
        a=p.a,
        c_alpha=env.c_h,
        b_alpha=p.h.b,
        c_beta=env.c_F,
        r_beta=p.f.rate,
        R_mu=cert.R,
        p_mu=cert.p,
        g0=abs(p.f.amplitude),
    )
