"""Volterra-Hammerstein equations with exponential kernel: solvers and decay certificates."""

from .certify import Certificate, Condition, ConditionCheck, certify, radius
from .comparison import InequalitySpec, spec_from_problem
from .problem import Family, Forcing, Nonlinearity, Problem, envelope_constants
from .solver import BoundReport, Grid, Trajectory, solve_ode, solve_picard, verify_bound

__all__ = [
    "BoundReport",
    "Certificate",
    "Condition",
    "ConditionCheck",
    "Family",
    "Forcing",
    "Grid",
    "InequalitySpec",
    "Nonlinearity",
    "Problem",
    "Trajectory",
    "certify",
    "envelope_constants",
    "radius",
    "solve_ode",
    "solve_picard",
    "spec_from_problem",
    "verify_bound",
]
