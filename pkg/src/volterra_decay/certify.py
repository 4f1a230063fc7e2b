"""Sufficient conditions for global existence and exponential decay.

A passing :class:`Certificate` guarantees ``|u(t)| <= exp(-p t) / R`` for
all ``t >= 0`` together with a contraction factor ``q`` for the integral
operator on the ball ``{||u|| <= 1/R}``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .problem import Family, Problem, envelope_constants

DEFAULT_MARGIN = 0.02


class Condition(str, enum.Enum):
    GROWTH = "GrowthCondition"
    DIRECT = "DirectCondition"
    INITIAL = "InitialCondition"
    SELF_MAP = "SelfMap"
    CONTRACTION = "Contraction"
    EXPONENT = "ExponentCondition"


@dataclass(frozen=True)
class ConditionCheck:
    name: Condition
    lhs: float
    rhs: float
    strict: bool = False
    passed: bool = field(init=False)

    def __post_init__(self):
        ok = self.lhs < self.rhs if self.strict else self.lhs <= self.rhs
        object.__setattr__(self, "passed", bool(ok))

    def as_dict(self) -> dict:
        return {
            "name": self.name.value,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "strict": self.strict,
            "pass": self.passed,
        }


@dataclass(frozen=True)
class Certificate:
    """Outcome of :func:`certify`.

    ``R`` and ``q`` are ``None`` only when the exponent gate ``b >= 2``
    fails, in which case ``ledger`` is empty and ``reason`` says why.
    ``literal`` holds informational values for the single-constant form of
    the hypotheses (``c = max(c_h, c_f)``); it never affects ``overall``.
    """

    R: float | None
    p: float
    q: float | None
    ledger: tuple[ConditionCheck, ...]
    reason: str | None = None
    literal: dict = field(default_factory=dict)

    @property
    def overall(self) -> bool:
        return self.reason is None and all(c.passed for c in self.ledger)

    def check(self, name: Condition) -> ConditionCheck:
        for c in self.ledger:
            if c.name is Condition(name):
                return c
        raise KeyError(name)

    @property
    def failed(self) -> list[str]:
        return [c.name.value for c in self.ledger if not c.passed]

    def mu(self, t):
        """mu(t) = R exp(p t); the envelope is 1/mu."""
        return self.R * np.exp(self.p * t)

    def envelope(self, t):
        return 1.0 / self.mu(t)


def radius(b: float) -> float:
    """(b-1)^(1/b), the minimiser of R -> R^(1-b) + R over R > 0."""
    if not b >= 2.0:
        raise ValueError(f"radius requires b >= 2, got {b!r}")
    return (b - 1.0) ** (1.0 / b)


def decay_rate(a: float, a1: float, margin: float = DEFAULT_MARGIN) -> float:
    if not (a > 0 and a1 > 0):
        raise ValueError("rates a and a1 must be positive")
    if not 0.0 <= margin < 1.0:
        raise ValueError(f"margin must lie in [0, 1), got {margin!r}")
    return (1.0 - margin) * min(0.25 * a, a1)


def check_growth(a: float, b: float, c_h: float) -> ConditionCheck:
    lhs = b / (b - 1.0) ** ((b - 1.0) / b)
    rhs = 3.0 * a / (4.0 * c_h) if c_h > 0 else math.inf
    return ConditionCheck(Condition.GROWTH, lhs, rhs)


def check_direct(
    a: float, b: float, c_h: float, c_F: float, R: float, p: float, a1: float | None = None
) -> ConditionCheck:
    """c_h / R^(b-1) + c_F R <= a - p.

    Both left-hand terms, multiplied through by R exp(p t), decay in t when
    p < a1, so the t = 0 value dominates every t >= 0.
    """
    if a1 is not None and p >= a1:
        raise ValueError(f"decay rate p={p} must be below the forcing rate a1={a1}")
    lhs = c_h / R ** (b - 1.0) + c_F * R
    return ConditionCheck(Condition.DIRECT, lhs, a - p)


def check_exponent(b: float) -> ConditionCheck:
    """b^b <= 2^b (b-1)^(b-1), compared in log form."""
    lhs = b * math.log(b)
    rhs = b * math.log(2.0) + (b - 1.0) * math.log(b - 1.0)
    return ConditionCheck(Condition.EXPONENT, lhs, rhs)


def check_initial(f0_abs: float, R: float) -> ConditionCheck:
    return ConditionCheck(Condition.INITIAL, f0_abs * R, 1.0)


def check_contraction(
    a: float, b: float, c_h: float, R: float, c_f: float = 0.0
) -> tuple[ConditionCheck, ConditionCheck, float]:
    """Return (contraction check, self-map check, q).

    q = c_h / (R^(b-1) a) bounds the Lipschitz constant of T on the ball of
    radius 1/R; the self-map check is c_f + c_h / (a R^b) <= 1/R.
    """
    q = c_h / (R ** (b - 1.0) * a)
    contraction = ConditionCheck(Condition.CONTRACTION, q, 1.0, strict=True)
    self_map = ConditionCheck(Condition.SELF_MAP, c_f + c_h / (a * R**b), 1.0 / R)
    return contraction, self_map, q


def certify(problem: Problem, margin: float = DEFAULT_MARGIN) -> Certificate:
    if not 0.0 < margin < 1.0:
        raise ValueError(f"margin must lie in (0, 1), got {margin!r}")
    a, a1 = problem.a, problem.f.rate
    p = decay_rate(a, a1, margin)
    nl = problem.h
    if nl.family not in (Family.INTEGER_POWER, Family.MODULUS_POWER) or nl.b < 2.0:
        return Certificate(R=None, p=p, q=None, ledger=(), reason="hypothesis b >= 2 violated")

    b = nl.b
    env = envelope_constants(problem)
    R = radius(b)
    contraction, self_map, q = check_contraction(a, b, env.c_h, R, env.c_f)
    ledger = (
        check_growth(a, b, env.c_h),
        check_direct(a, b, env.c_h, env.c_F, R, p, a1),
        check_initial(abs(problem.f.amplitude), R),
        check_exponent(b),
        self_map,
        contraction,
    )

    c = max(env.c_h, env.c_f)
    literal = {
        "c": c,
        "c_below_0.75": c < 0.75,
        "self_map_lhs": c * R,
        "self_map_rhs": 1.0 / (1.0 + 1.0 / (a * R**b)),
    }
    return Certificate(R=R, p=p, q=q, ledger=ledger, literal=literal)
