"""Registry of the sixteen benchmark problems.

>>> entry = registry()["G8"]
>>> entry.problem.dimension, entry.problem.n_constraints
(2, 2)
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Optional

import numpy as np

from ..problem import ProblemSpec, ViolationNorm, eval_violation, in_unrelaxable, relax_equalities
from .problems import BEST_KNOWN, BUILDERS, OPTIMA

__all__ = ["BenchmarkEntry", "StartPointError", "registry", "best_known", "start_point",
           "validate_registry", "manifest", "load_problem_config", "build_problem", "NAMES"]

NAMES = tuple(BUILDERS)
START_KINDS = ("midpoint", "feasible", "infeasible")
FEASIBILITY_TOL = 1e-5
EQUALITY_TOL = 1e-4


class StartPointError(LookupError):
    pass


@dataclass(frozen=True)
class BenchmarkEntry:
    problem: ProblemSpec
    f_opt: float
    feasible_start: Optional[np.ndarray] = None
    infeasible_start: Optional[np.ndarray] = None
    equality_indices: tuple = ()
    optimum: Optional[np.ndarray] = None
    provenance: dict = field(default_factory=dict, compare=False)

    @property
    def name(self) -> str:
        return self.problem.name

    @property
    def dimension(self) -> int:
        return self.problem.dimension

    @property
    def n_constraints(self) -> int:
        return self.problem.n_constraints


def build_problem(name: str, lower=None, upper=None, start=None) -> tuple[ProblemSpec, tuple]:
    """Construct the problem ``name`` (optionally with overridden bounds and start).

    Equalities are appended after the inequalities in relaxed form; the
    second return value lists their indices.
    """
    if name not in BUILDERS:
        raise KeyError(f"unknown benchmark {name!r}; known: {', '.join(NAMES)}")
    f, ineq, eq, lo, up = BUILDERS[name]()
    cons = list(ineq) + relax_equalities(eq, EQUALITY_TOL)
    eq_idx = tuple(range(len(ineq), len(cons)))
    lo = lo if lower is None else np.asarray(lower, dtype=float)
    up = up if upper is None else np.asarray(upper, dtype=float)
    spec = ProblemSpec(name=name, dimension=lo.size, objective=f, lower=lo, upper=up,
                       relaxable=tuple(cons), default_start=start, best_known=BEST_KNOWN[name])
    return spec, eq_idx


def _stored_starts() -> dict:
    text = resources.files(__package__).joinpath("starts.json").read_text()
    return json.loads(text)


def _checked_start(spec: ProblemSpec, x, kind: str):
    if x is None:
        return None
    x = np.asarray(x, dtype=float)
    if not in_unrelaxable(x, spec):
        raise ValueError(f"stored {kind} start of {spec.name} is outside the bounds")
    g = eval_violation(x, spec, ViolationNorm.L1)
    if kind == "feasible" and not g < FEASIBILITY_TOL:
        raise ValueError(f"stored feasible start of {spec.name} has g = {g:.3g}")
    if kind == "infeasible" and not g >= FEASIBILITY_TOL:
        raise ValueError(f"stored infeasible start of {spec.name} has g = {g:.3g}")
    x.flags.writeable = False
    return x


@lru_cache(maxsize=1)
def _registry() -> tuple:
    starts = _stored_starts()
    entries = []
    for name in NAMES:
        spec, eq_idx = build_problem(name)
        stored = starts.get(name, {})
        opt = OPTIMA.get(name)
        entries.append(BenchmarkEntry(
            problem=spec,
            f_opt=BEST_KNOWN[name],
            feasible_start=_checked_start(spec, stored.get("feasible"), "feasible"),
            infeasible_start=_checked_start(spec, stored.get("infeasible"), "infeasible"),
            equality_indices=eq_idx,
            optimum=None if opt is None else np.asarray(opt, dtype=float),
            provenance=stored.get("provenance", {}),
        ))
    return tuple(entries)


def registry() -> dict[str, BenchmarkEntry]:
    """All sixteen entries keyed by name, in table order."""
    return {e.name: e for e in _registry()}


def best_known(name: str) -> float:
    try:
        return BEST_KNOWN[name]
    except KeyError:
        raise KeyError(f"unknown benchmark {name!r}") from None


def start_point(name: str, kind: str = "midpoint") -> np.ndarray:
    entry = registry().get(name)
    if entry is None:
        raise KeyError(f"unknown benchmark {name!r}")
    if kind not in START_KINDS:
        raise ValueError(f"start kind must be one of {START_KINDS}, got {kind!r}")
    p = entry.problem
    if kind == "midpoint":
        if not (np.all(np.isfinite(p.lower)) and np.all(np.isfinite(p.upper))):
            raise StartPointError(f"{name} has unbounded variables; no midpoint start")
        return (p.lower + p.upper) / 2
    x = entry.feasible_start if kind == "feasible" else entry.infeasible_start
    if x is None:
        raise StartPointError(f"no stored {kind} start for {name}; use kind='midpoint'")
    return np.array(x)


def validate_registry() -> list[dict]:
    """Evaluate each coded problem at its published optimal solution.

    One dict per entry with a published vector: ``name``, ``f``, ``f_opt``,
    ``f_error``, ``g`` and ``ok`` (relative f error within 1e-3 and g <= 1e-4).
    """
    report = []
    for e in _registry():
        if e.optimum is None:
            continue
        x = e.optimum
        inside = in_unrelaxable(x, e.problem)
        f = float(e.problem.objective(x))
        g = eval_violation(x, e.problem, ViolationNorm.L1)
        err = abs(f - e.f_opt)
        ok = inside and err <= 1e-3 * max(1.0, abs(e.f_opt)) and g <= 1e-4
        report.append({"name": e.name, "f": f, "f_opt": e.f_opt, "f_error": err, "g": g,
                       "in_bounds": inside, "ok": bool(ok)})
    return report


def _jsonable(x):
    return None if x is None else [float(v) for v in x]


def manifest() -> list[dict]:
    out = []
    for e in _registry():
        p = e.problem
        out.append({
            "name": e.name, "n": p.dimension, "m": p.n_constraints,
            "lower": _jsonable(p.lower), "upper": _jsonable(p.upper), "f_opt": e.f_opt,
            "equality_indices": list(e.equality_indices),
            "midpoint": _jsonable((p.lower + p.upper) / 2),
            "feasible_start": _jsonable(e.feasible_start),
            "infeasible_start": _jsonable(e.infeasible_start),
        })
    return out


def load_problem_config(path) -> tuple[ProblemSpec, tuple]:
    """Build a problem from a JSON config file.

    Keys: ``base`` (a built-in name whose objective and constraints are
    used), optional ``name``, ``dimension``, ``lower``, ``upper``, ``start``.
    ``start`` may be a point or one of the start kinds of the base entry.
    """
    cfg = json.loads(Path(path).read_text())
    base = cfg.get("base")
    if base not in BUILDERS:
        raise ValueError(f"config 'base' must name a built-in problem, got {base!r}")
    spec, eq_idx = build_problem(base, cfg.get("lower"), cfg.get("upper"))
    dim = cfg.get("dimension", spec.dimension)
    if dim != spec.dimension:
        raise ValueError(f"{base} has dimension {spec.dimension}, config says {dim}")
    start = cfg.get("start")
    if isinstance(start, str):
        start = start_point(base, start)
    name = cfg.get("name", base)
    spec = ProblemSpec(name=name, dimension=spec.dimension, objective=spec.objective,
                       lower=spec.lower, upper=spec.upper, relaxable=spec.relaxable,
                       default_start=start, best_known=spec.best_known)
    if start is not None and not in_unrelaxable(spec.default_start, spec):
        raise ValueError(f"config start point lies outside the bounds of {name}")
    return spec, eq_idx

