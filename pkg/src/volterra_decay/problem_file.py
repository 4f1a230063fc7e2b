"""YAML problem files.

Schema (``im`` parts default to 0; a bare number is accepted for a real
complex field)::

    a: 2.0
    nonlinearity:
      family: integer_power        # zero | linear | integer_power | modulus_power
      lambda: {re: -0.5, im: 0.0}
      b: 2
    forcing:
      A: {re: 0.1, im: 0.0}
      a1: 1.0
    grid: {T: 20.0, n: 20000}      # optional
    solver:                        # optional
      tol: 1.0e-12
      max_iter: 200
      margin: 0.02
      slack: 1.0e-6
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import yaml

from .certify import DEFAULT_MARGIN
from .problem import Family, Forcing, Nonlinearity, Problem
from .solver import DEFAULT_MAX_ITER, DEFAULT_SLACK, DEFAULT_TOL, Grid

DEFAULT_T = 20.0
DEFAULT_N = 20000


class ProblemFileError(ValueError):
    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        self.field = path
        self.line = line
        where = f"line {line}: " if line is not None else ""
        what = f"{path}: " if path else ""
        super().__init__(f"{where}{what}{message}")


@dataclass(frozen=True)
class SolverOptions:
    tol: float = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER
    margin: float = DEFAULT_MARGIN
    slack: float = DEFAULT_SLACK


@dataclass(frozen=True)
class ProblemFile:
    problem: Problem
    grid: Grid = field(default_factory=lambda: Grid(DEFAULT_T, DEFAULT_N))
    options: SolverOptions = field(default_factory=SolverOptions)

    def with_overrides(self, T=None, n=None, margin=None, slack=None) -> "ProblemFile":
        grid = Grid(T if T is not None else self.grid.T, n if n is not None else self.grid.n)
        opts = self.options
        if margin is not None:
            opts = replace(opts, margin=margin)
        if slack is not None:
            opts = replace(opts, slack=slack)
        return replace(self, grid=grid, options=opts)


def _line_index(node, prefix="", out=None) -> dict[str, int]:
    """Map dotted key paths to 1-based source lines."""
    if out is None:
        out = {}
    out.setdefault(prefix, node.start_mark.line + 1)
    if isinstance(node, yaml.MappingNode):
        for key, value in node.value:
            path = f"{prefix}.{key.value}" if prefix else str(key.value)
            out[path] = key.start_mark.line + 1
            _line_index(value, path, out)
    return out


class _Reader:
    def __init__(self, data, lines):
        self.data = data
        self.lines = lines

    def error(self, path, message):
        line = self.lines.get(path)
        if line is None and "." in path:
            line = self.lines.get(path.rsplit(".", 1)[0])
        return ProblemFileError(message, path, line)

    def get(self, path, required=True):
        node = self.data
        for part in path.split("."):
            if not isinstance(node, dict):
                parent = path.rsplit(".", 1)[0]
                raise self.error(parent, f"expected a mapping, got {type(node).__name__}")
            if part not in node:
                if required:
                    raise self.error(path, "missing required field")
                return None
            node = node[part]
        return node

    def number(self, path, required=True, default=None) -> float:
        raw = self.get(path, required=required and default is None)
        if raw is None:
            return default
        if isinstance(raw, bool):
            raise self.error(path, f"expected a number, got {raw!r}")
        if isinstance(raw, str):
            # PyYAML reads "1e-12" (no dot) as a string
            try:
                raw = float(raw)
            except ValueError:
                raise self.error(path, f"expected a number, got {raw!r}") from None
        if not isinstance(raw, (int, float)) or not math.isfinite(raw):
            raise self.error(path, f"expected a finite number, got {raw!r}")
        return float(raw)

    def integer(self, path, default) -> int:
        raw = self.get(path, required=False)
        if raw is None:
            return default
        if isinstance(raw, bool) or not isinstance(raw, int):
            raise self.error(path, f"expected an integer, got {raw!r}")
        return raw

    def complex_(self, path, default=None) -> complex:
        raw = self.get(path, required=default is None)
        if raw is None:
            return default
        if isinstance(raw, dict):
            unknown = set(raw) - {"re", "im"}
            if unknown:
                raise self.error(path, f"unexpected keys {sorted(unknown)}; expected re, im")
            return complex(self.number(f"{path}.re"), self.number(f"{path}.im", default=0.0))
        return complex(self.number(path))


def parse_problem(text: str) -> ProblemFile:
    try:
        root = yaml.compose(text, Loader=yaml.SafeLoader)
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        raise ProblemFileError(f"malformed YAML: {getattr(exc, 'problem', exc)}", line=line) from None
    if not isinstance(data, dict):
        raise ProblemFileError("expected a mapping at top level", line=1)
    r = _Reader(data, _line_index(root))

    family_raw = r.get("nonlinearity.family")
    try:
        family = Family(family_raw)
    except ValueError:
        choices = ", ".join(f.value for f in Family)
        raise r.error("nonlinearity.family", f"expected one of {choices}, got {family_raw!r}") from None

    try:
        nl = Nonlinearity(
            family,
            r.complex_("nonlinearity.lambda", default=0j if family is Family.ZERO else None),
            r.number("nonlinearity.b", default=1.0),
        )
    except ValueError as exc:
        raise r.error("nonlinearity.b", str(exc)) from None
    try:
        forcing = Forcing(r.complex_("forcing.A"), r.number("forcing.a1"))
    except ValueError as exc:
        raise r.error("forcing.a1", str(exc)) from None
    try:
        problem = Problem(r.number("a"), nl, forcing)
    except ValueError as exc:
        raise r.error("a", str(exc)) from None
    try:
        grid = Grid(r.number("grid.T", default=DEFAULT_T), r.integer("grid.n", DEFAULT_N))
    except ValueError as exc:
        raise r.error("grid", str(exc)) from None
    options = SolverOptions(
        tol=r.number("solver.tol", default=DEFAULT_TOL),
        max_iter=r.integer("solver.max_iter", DEFAULT_MAX_ITER),
        margin=r.number("solver.margin", default=DEFAULT_MARGIN),
        slack=r.number("solver.slack", default=DEFAULT_SLACK),
    )
    if not 0.0 < options.margin < 1.0:
        raise r.error("solver.margin", f"expected a value in (0, 1), got {options.margin!r}")
    if not options.tol > 0:
        raise r.error("solver.tol", "expected a positive number")
    if options.max_iter < 1:
        raise r.error("solver.max_iter", "expected a positive integer")
    if options.slack < 0:
        raise r.error("solver.slack", "expected a non-negative number")
    return ProblemFile(problem, grid, options)


def load_problem(path) -> ProblemFile:
    with open(path, encoding="utf-8") as fh:
        return parse_problem(fh.read())


def _complex_dict(z) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def to_dict(pf: ProblemFile) -> dict:
    p = pf.problem
    return {
        "a": p.a,
        "nonlinearity": {
            "family": p.h.family.value,
            "lambda": _complex_dict(p.h.lam),
            "b": p.h.b,
        },
        "forcing": {"A": _complex_dict(p.f.amplitude), "a1": p.f.rate},
        "grid": {"T": pf.grid.T, "n": pf.grid.n},
        "solver": {
            "tol": pf.options.tol,
            "max_iter": pf.options.max_iter,
            "margin": pf.options.margin,
            "slack": pf.options.slack,
        },
    }


def dump_problem(pf: ProblemFile) -> str:
    return yaml.safe_dump(to_dict(pf), sort_keys=False)
