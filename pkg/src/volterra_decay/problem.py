"""Equation instances for u(t) = int_0^t exp(-a(t-s)) h(u(s)) ds + f(t).

The nonlinearity ``h`` and forcing ``f`` are restricted to closed-form
families so that their growth envelopes are exact and their derivatives
analytic.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


class Family(str, enum.Enum):
    ZERO = "zero"
    LINEAR = "linear"
    INTEGER_POWER = "integer_power"
    MODULUS_POWER = "modulus_power"


class ForcingFamily(str, enum.Enum):
    EXP_DECAY = "exp_decay"


def _as_scalar(z: complex) -> complex | float:
    # keep real inputs real so that real problems produce real trajectories
    z = complex(z)
    return z.real if z.imag == 0.0 else z


@dataclass(frozen=True)
class Nonlinearity:
    """h(u) from one of the builtin families.

    ``zero``           h(u) = 0
    ``linear``         h(u) = lam * u            (b is forced to 1)
    ``integer_power``  h(u) = lam * u**b          (integer b)
    ``modulus_power``  h(u) = lam * u * |u|**(b-1)
    """

    family: Family
    lam: complex | float = 0.0
    b: float = 1.0

    def __post_init__(self):
        family = Family(self.family)
        object.__setattr__(self, "family", family)
        object.__setattr__(self, "lam", _as_scalar(self.lam))
        b = float(self.b)
        if family is Family.LINEAR:
            b = 1.0
        if not math.isfinite(b) or b < 1.0:
            raise ValueError(f"exponent b must be >= 1, got {self.b!r}")
        if family is Family.INTEGER_POWER and not b.is_integer():
            raise ValueError(f"integer_power needs an integer exponent, got {self.b!r}")
        object.__setattr__(self, "b", b)

    @property
    def c_h(self) -> float:
        if self.family is Family.ZERO:
            return 0.0
        return abs(self.lam)

    @property
    def is_complex(self) -> bool:
        return isinstance(self.lam, complex)

    def __call__(self, u):
        return eval_h(self, u)


@dataclass(frozen=True)
class Forcing:
    """f(t) = A exp(-a1 t)."""

    amplitude: complex | float
    rate: float
    family: ForcingFamily = ForcingFamily.EXP_DECAY

    def __post_init__(self):
        object.__setattr__(self, "family", ForcingFamily(self.family))
        object.__setattr__(self, "amplitude", _as_scalar(self.amplitude))
        rate = float(self.rate)
        if not rate > 0.0:
            raise ValueError(f"forcing rate a1 must be > 0, got {self.rate!r}")
        object.__setattr__(self, "rate", rate)

    @property
    def is_complex(self) -> bool:
        return isinstance(self.amplitude, complex)


@dataclass(frozen=True)
class Problem:
    a: float
    h: Nonlinearity
    f: Forcing

    def __post_init__(self):
        a = float(self.a)
        if not a > 0.0:
            raise ValueError(f"kernel rate a must be > 0, got {self.a!r}")
        object.__setattr__(self, "a", a)

    @property
    def is_complex(self) -> bool:
        return self.h.is_complex or self.f.is_complex

    @property
    def dtype(self):
        return np.complex128 if self.is_complex else np.float64


class Envelopes(NamedTuple):
    c_h: float
    c_f: float
    c_F: float


def eval_h(nl: Nonlinearity, u):
    """Evaluate h at a scalar or array ``u``."""
    fam = nl.family
    if fam is Family.ZERO:
        return u * 0.0
    if fam is Family.LINEAR:
        return nl.lam * u
    if fam is Family.INTEGER_POWER:
        return nl.lam * u ** int(nl.b)
    return nl.lam * u * abs(u) ** (nl.b - 1.0)


def eval_f(fc: Forcing, t):
    return fc.amplitude * np.exp(-fc.rate * t)


def eval_f_prime(fc: Forcing, t):
    return -fc.rate * fc.amplitude * np.exp(-fc.rate * t)


def eval_F(p: Problem, t):
    """Forcing of the reduced ODE u' = -a u + h(u) + F, with F = f' + a f."""
    return eval_f_prime(p.f, t) + p.a * eval_f(p.f, t)


def envelope_constants(p: Problem) -> Envelopes:
    """Tight constants with |h(u)| <= c_h |u|^b, |f| + a|f'| <= c_f e^{-a1 t}
    and |F| <= c_F e^{-a1 t}."""
    amp = abs(p.f.amplitude)
    a1 = p.f.rate
    return Envelopes(
        c_h=p.h.c_h,
        c_f=amp * (1.0 + p.a * a1),
        c_F=amp * abs(p.a - a1),
    )
