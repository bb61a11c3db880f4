"""Problem definitions and the scalar functions the solvers evaluate.

A problem is ``min f(x)`` over ``x`` in the intersection of a relaxable set
``{c_i(x) <= 0}`` and an unrelaxable set (box bounds plus optional linear
inequalities ``a.x <= b``). Points outside the unrelaxable set are never
passed to the objective or constraint evaluators.
"""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

logger = logging.getLogger(__name__)

Evaluator = Callable[[np.ndarray], float]

INF = math.inf


class DimensionError(ValueError):
    """Raised when a point does not match the problem dimension."""


class ViolationNorm(enum.Enum):
    L1 = "l1"
    L2_SQUARED = "l2sq"

    @classmethod
    def parse(cls, value: "ViolationNorm | str") -> "ViolationNorm":
        if isinstance(value, cls):
            return value
        key = str(value).lower().replace("-", "").replace("_", "")
        aliases = {"l1": cls.L1, "l2": cls.L2_SQUARED, "l2sq": cls.L2_SQUARED,
                   "l2squared": cls.L2_SQUARED}
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown violation norm {value!r}") from None


@dataclass(frozen=True)
class MeritParams:
    delta_bar: float
    big_c: float = 100.0
    norm: ViolationNorm = ViolationNorm.L1

    def __post_init__(self):
        if not self.delta_bar >= 0:
            raise ValueError("delta_bar must be nonnegative")
        if not self.big_c > 1:
            raise ValueError("big_c must exceed 1")


@dataclass(frozen=True)
class ProblemSpec:
    """An optimization problem with relaxable and unrelaxable constraints.

    ``relaxable`` holds one callable per constraint ``c_i``, each returning a
    float where ``c_i(x) <= 0`` means satisfied. ``linear`` rows ``(a, b)``
    describe unrelaxable inequalities ``a.x <= b``; they are membership-only
    (no projection support).
    """

    name: str
    dimension: int
    objective: Evaluator
    lower: np.ndarray
    upper: np.ndarray
    relaxable: tuple = ()
    linear: tuple = ()
    default_start: Optional[np.ndarray] = None
    best_known: Optional[float] = None

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        lower = np.broadcast_to(np.asarray(self.lower, dtype=float), (self.dimension,)).copy()
        upper = np.broadcast_to(np.asarray(self.upper, dtype=float), (self.dimension,)).copy()
        if np.any(lower > upper):
            raise ValueError(f"{self.name}: lower bound exceeds upper bound")
        lower.flags.writeable = False
        upper.flags.writeable = False
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "relaxable", tuple(self.relaxable))
        rows = []
        for a, b in self.linear:
            a = np.asarray(a, dtype=float)
            if a.shape != (self.dimension,):
                raise DimensionError(f"{self.name}: linear row has shape {a.shape}")
            rows.append((a, float(b)))
        object.__setattr__(self, "linear", tuple(rows))
        if self.default_start is not None:
            object.__setattr__(self, "default_start", self._check(self.default_start))

    @property
    def n_constraints(self) -> int:
        return len(self.relaxable)

    @property
    def bounds_only(self) -> bool:
        return not self.linear

    def _check(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dimension,):
            raise DimensionError(
                f"{self.name}: expected a point of dimension {self.dimension}, got shape {x.shape}")
        return x

    def constraint_values(self, x) -> np.ndarray:
        x = self._check(x)
        return np.array([c(x) for c in self.relaxable], dtype=float)


@dataclass(frozen=True)
class EvaluatedPoint:
    x: np.ndarray
    f_val: float
    g_val: float
    merit_val: float
    in_omega_nr: bool
    error: Optional[str] = field(default=None, compare=False)


def in_unrelaxable(x, p: ProblemSpec) -> bool:
    """Exact membership test for the box and the linear inequalities."""
    x = p._check(x)
    if np.any(x < p.lower) or np.any(x > p.upper):
        return False
    return all(float(a @ x) <= b for a, b in p.linear)


def violation_from_values(values, norm: ViolationNorm = ViolationNorm.L1) -> float:
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return 0.0
    if np.any(np.isnan(values)):
        return INF
    pos = np.maximum(values, 0.0)
    if norm is ViolationNorm.L1:
        return float(np.sum(pos))
    return float(np.sum(pos * pos))


def eval_violation(x, p: ProblemSpec, norm: ViolationNorm = ViolationNorm.L1) -> float:
    return violation_from_values(p.constraint_values(x), norm)


def barrier_value(h: Evaluator, x, p: ProblemSpec) -> float:
    """Return ``h(x)`` inside the unrelaxable set and +inf outside it.

    ``h`` is not called when ``x`` lies outside.
    """
    if not in_unrelaxable(x, p):
        return INF
    return float(h(p._check(x)))


def merit_value(x, p: ProblemSpec, mp: MeritParams) -> EvaluatedPoint:
    """Evaluate ``f``, ``g`` and ``M = f + delta_bar * g`` at ``x``.

    Non-finite evaluator output at an admissible point is mapped to an
    infinite merit and reported in ``EvaluatedPoint.error``.
    """
    x = p._check(x)
    if not in_unrelaxable(x, p):
        return EvaluatedPoint(x, INF, INF, INF, False)
    error = None
    f = float(p.objective(x))
    g = eval_violation(x, p, mp.norm)
    if not math.isfinite(f):
        error = f"non-finite objective {f!r}"
        f = INF
    if not math.isfinite(g):
        error = error or "non-finite constraint value"
        g = INF
    if error:
        logger.debug("%s at %s: %s", p.name, x, error)
        return EvaluatedPoint(x, f, g, INF, True, error)
    # delta_bar == 0 must give exactly f (no 0 * g rounding surprises)
    merit = f + mp.delta_bar * g if g else f
    return EvaluatedPoint(x, f, g, merit, True)


def relax_equalities(equalities: Sequence[Evaluator], tol: float = 1e-4) -> list:
    """Turn each equality ``h(x) = 0`` into the inequality ``|h(x)| - tol <= 0``."""
    if not tol > 0:
        raise ValueError("tol must be positive")

    def relaxed(h):
        return lambda x: abs(h(x)) - tol

    return [relaxed(h) for h in equalities]


def is_feasible(ep: EvaluatedPoint, tol: float = 1e-5) -> bool:
    return bool(ep.in_omega_nr and ep.g_val < tol)
