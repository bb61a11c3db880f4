"""Merit-function evolution strategy with a restoration phase.

Main iterations rank offspring by the merit ``M = f + delta_bar * g`` and
accept the recombined trial mean under a sufficient-decrease test on either
the violation ``g`` (far from feasibility) or ``M``. When the trial mean
reduces ``g`` but not ``M`` the solver switches to Restoration, which ranks
by ``g`` alone until progress on ``g`` stalls. Unrelaxable constraints are
enforced by projection onto the box or by the extreme barrier.

With no relaxable constraints this reduces to the plain sufficient-decrease
ES for unrelaxable constraints (see :mod:`esmf.unrelaxable`).
"""
from __future__ import annotations

import enum
import json
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Iterable, Optional

import numpy as np

from . import engine
from .problem import (INF, EvaluatedPoint, MeritParams, ProblemSpec, ViolationNorm,
                      eval_violation, in_unrelaxable, is_feasible, merit_value)

logger = logging.getLogger(__name__)


class SolverInputError(ValueError):
    """Bad problem/start/configuration handed to the solver."""


class Phase(str, enum.Enum):
    MAIN = "Main"
    RESTORATION = "Restoration"


class EventKind(str, enum.Enum):
    MAIN_SUCCESS = "MainSuccess"
    MAIN_UNSUCCESS = "MainUnsuccess"
    ENTER_RESTORATION = "EnterRestoration"
    RESTORATION_SUCCESS = "RestorationSuccess"
    RESTORATION_UNSUCCESS = "RestorationUnsuccess"
    LEAVE_RESTORATION = "LeaveRestoration"
    TRIAL_OUTSIDE = "TrialOutsideOmegaNr"


UNSUCCESSFUL_KINDS = frozenset({EventKind.MAIN_UNSUCCESS, EventKind.RESTORATION_UNSUCCESS,
                                EventKind.TRIAL_OUTSIDE})
SUCCESSFUL_KINDS = frozenset({EventKind.MAIN_SUCCESS, EventKind.RESTORATION_SUCCESS})


class RunClass(str, enum.Enum):
    FINITE_RESTORATION = "FiniteRestoration"
    NEVER_LEFT = "NeverLeft"
    INFINITELY_OFTEN = "InfinitelyOften"


@dataclass
class SolverConfig:
    lam: Optional[int] = None
    mu: Optional[int] = None
    beta1: float = 0.9
    beta2: float = 0.9
    d_min: float = 1e-10
    d_max: float = 1e10
    forcing_coeff: float = 1e-4
    forcing_exp: float = 2.0
    delta_bar: Optional[float] = None  # None: max(10, g(x0))
    big_c: float = 100.0
    norm: ViolationNorm = ViolationNorm.L1
    budget: int = 1000
    feasibility_tol: float = 1e-5
    mode: Optional[str] = None  # "projection" | "barrier"; None picks by problem
    generator_augmentation: bool = False
    seed: int = 0
    sigma0: Optional[float] = None
    sigma_stop: float = 1e-12
    restoration_exit: str = "trial"  # "trial" | "incumbent"
    cma: Optional[engine.CMAParams] = None

    def __post_init__(self):
        self.norm = ViolationNorm.parse(self.norm)
        if not 0 < self.beta1 <= self.beta2 < 1:
            raise SolverInputError("need 0 < beta1 <= beta2 < 1")
        if not 0 < self.d_min < self.d_max:
            raise SolverInputError("need 0 < d_min < d_max")
        if not (self.forcing_coeff > 0 and self.forcing_exp > 1):
            raise SolverInputError("forcing function needs coeff > 0 and exponent > 1")
        if not self.big_c > 1:
            raise SolverInputError("big_c must exceed 1")
        if self.mode not in (None, "projection", "barrier"):
            raise SolverInputError(f"unknown mode {self.mode!r}")
        if self.restoration_exit not in ("trial", "incumbent"):
            raise SolverInputError(f"unknown restoration_exit {self.restoration_exit!r}")

    @property
    def beta(self) -> float:
        return 0.5 * (self.beta1 + self.beta2)

    def population(self, n: int) -> tuple[int, int]:
        lam, mu = engine.default_population(n)
        lam = self.lam or lam
        mu = self.mu or (lam // 2 if self.lam else mu)
        if not 1 <= mu <= lam:
            raise SolverInputError(f"invalid population mu={mu}, lambda={lam}")
        return lam, mu

    def resolved_mode(self, p: ProblemSpec) -> str:
        if self.mode is None:
            return "projection" if p.bounds_only else "barrier"
        if self.mode == "projection" and not p.bounds_only:
            raise SolverInputError("projection mode supports bound constraints only")
        return self.mode


@dataclass
class TraceEvent:
    """One iteration. ``x`` is the incumbent after the step."""

    iteration: int
    phase: str
    kind: str
    success: bool
    sigma_before: float
    sigma_after: float
    f_k: float
    g_k: float
    merit_k: float
    trial_f: float
    trial_g: float
    trial_merit: float
    f_evals: int
    x: tuple = ()


TRACE_FIELDS = tuple(TraceEvent.__dataclass_fields__)


@dataclass
class IterationState:
    x: EvaluatedPoint
    sigma: float
    distribution: engine.DistributionState
    weights: np.ndarray
    phase: Phase = Phase.MAIN
    restoration_entry_iteration: Optional[int] = None
    f_evals: int = 0
    c_evals: int = 0
    iteration: int = 0


@dataclass
class RunRecord:
    problem: str
    best_feasible: Optional[EvaluatedPoint]
    final_iterate: EvaluatedPoint
    f_evals_at_best: Optional[int]
    f_evals: int
    c_evals: int
    restoration_entries: int
    sigma0: float
    sigma_min: float
    delta_bar: float
    iterations: int
    stop_reason: str
    seed: int
    trace: list = field(default_factory=list, repr=False)

    def summary(self) -> dict:
        bf = self.best_feasible
        return {
            "problem": self.problem,
            "seed": self.seed,
            "f_best": None if bf is None else bf.f_val,
            "g_best": None if bf is None else bf.g_val,
            "x_best": None if bf is None else [float(v) for v in bf.x],
            "f_evals_at_best": self.f_evals_at_best,
            "f_evals": self.f_evals,
            "c_evals": self.c_evals,
            "restoration_entries": self.restoration_entries,
            "sigma0": self.sigma0,
            "sigma_min": self.sigma_min,
            "delta_bar": self.delta_bar,
            "iterations": self.iterations,
            "stop_reason": self.stop_reason,
            "final_f": _finite_or_none(self.final_iterate.f_val),
            "final_g": _finite_or_none(self.final_iterate.g_val),
        }


def forcing(sigma: float, cfg: SolverConfig) -> float:
    return cfg.forcing_coeff * sigma ** cfg.forcing_exp


def initial_step(p: ProblemSpec) -> float:
    finite = np.isfinite(p.lower) & np.isfinite(p.upper)
    if not finite.any():
        return 1.0
    width = float(np.min(p.upper[finite] - p.lower[finite]))
    if width <= 0:
        raise SolverInputError(f"{p.name}: a variable is fixed by its bounds; eliminate it")
    return 0.5 * width


def default_start(p: ProblemSpec) -> np.ndarray:
    if not (np.all(np.isfinite(p.lower)) and np.all(np.isfinite(p.upper))):
        raise SolverInputError(f"{p.name}: infinite bounds, an explicit start point is required")
    return 0.5 * (p.lower + p.upper)


def is_restoration_identifier(trial: EvaluatedPoint, current: EvaluatedPoint, sigma: float,
                              cfg: SolverConfig) -> bool:
    rho = forcing(sigma, cfg)
    return (trial.g_val < current.g_val - rho
            and current.g_val > cfg.big_c * rho
            and trial.merit_val >= current.merit_val)


def is_successful_point(trial: EvaluatedPoint, current: EvaluatedPoint, sigma: float,
                        cfg: SolverConfig) -> bool:
    rho = forcing(sigma, cfg)
    violation_drop = current.g_val > cfg.big_c * rho and trial.g_val < current.g_val - rho
    return violation_drop or trial.merit_val < current.merit_val - rho


def _finite_or_none(v):
    return v if v is not None and math.isfinite(v) else None


def _rank_key(values: np.ndarray) -> np.ndarray:
    """Stable ascending order; NaN ranks with +inf, ties by generation index."""
    v = np.where(np.isnan(values), INF, values)
    return np.argsort(v, kind="stable")


class _BudgetExhausted(Exception):
    pass


class MeritES:
    """Stateful driver for one run; :func:`solve` is the usual entry point."""

    def __init__(self, p: ProblemSpec, cfg: SolverConfig, x0):
        self.p = p
        self.cfg = cfg
        try:
            x0 = p._check(x0)
        except ValueError as exc:
            raise SolverInputError(str(exc)) from exc
        if not in_unrelaxable(x0, p):
            raise SolverInputError(f"{p.name}: start point violates the unrelaxable constraints")
        self.n = p.dimension
        self.lam, self.mu = cfg.population(self.n)
        self.mode = cfg.resolved_mode(p)
        self.rng = np.random.default_rng(cfg.seed)
        self.sigma0 = float(cfg.sigma0) if cfg.sigma0 is not None else initial_step(p)
        if not self.sigma0 > 0:
            raise SolverInputError("sigma0 must be positive")
        weights = engine.default_weights(self.lam, self.mu)
        self.cma = cfg.cma or engine.CMAParams.default(self.n, weights)

        g0 = eval_violation(x0, p, cfg.norm)
        self.delta_bar = cfg.delta_bar if cfg.delta_bar is not None else max(10.0, g0)
        self.mp = MeritParams(self.delta_bar, cfg.big_c, cfg.norm)

        self.best: Optional[EvaluatedPoint] = None
        self.best_at: Optional[int] = None
        self.trace: list[TraceEvent] = []
        self.restoration_entries = 0
        self.sigma_min = self.sigma0

        dist = engine.DistributionState.initial(self.n, sigma_es=self.sigma0)
        self.state = IterationState(x=None, sigma=self.sigma0, distribution=dist,
                                    weights=weights)
        self.state.x = self._evaluate(x0)

    # -- evaluation -------------------------------------------------------
    def _evaluate(self, x) -> EvaluatedPoint:
        """Merit evaluation with budget accounting and best-feasible tracking."""
        st = self.state
        if not in_unrelaxable(x, self.p):
            return EvaluatedPoint(np.asarray(x, dtype=float), INF, INF, INF, False)
        if st.f_evals >= self.cfg.budget:
            raise _BudgetExhausted
        ep = merit_value(x, self.p, self.mp)
        st.f_evals += 1
        st.c_evals += 1 if self.p.n_constraints else 0
        if ep.error:
            logger.info("%s: evaluation error at eval %d: %s", self.p.name, st.f_evals, ep.error)
        if is_feasible(ep, self.cfg.feasibility_tol) and (self.best is None
                                                            or ep.f_val < self.best.f_val):
            self.best, self.best_at = ep, st.f_evals
        return ep

    # -- Step 1 -----------------------------------------------------------
    def _offspring(self) -> tuple[np.ndarray, np.ndarray, list]:
        st = self.state
        x, sigma = st.x.x, st.sigma
        raw = engine.sample_directions(st.distribution, self.lam, self.rng,
                                       self.cfg.d_min, self.cfg.d_max)
        provenance = [engine.SAMPLED] * self.lam
        if self.mode == "projection":
            ys = engine.project_box(x + sigma * raw, self.p.lower, self.p.upper)
            provenance = [engine.PROJECTED] * self.lam
        else:
            if self.cfg.generator_augmentation:
                eps = min(sigma, 1e-3 * float(np.min(self.p.upper - self.p.lower)))
                gens = engine.tangent_generators_box(x, self.p.lower, self.p.upper, eps)
                gens = gens[: self.lam // 2]
                # generators replace the last-drawn samples
                for j, gvec in enumerate(gens):
                    i = self.lam - len(gens) + j
                    raw[i] = gvec
                    provenance[i] = engine.GENERATOR
            ys = x + sigma * raw
        steps = (ys - x) / sigma
        return ys, steps, provenance

    # -- Steps 2 and 4 ----------------------------------------------------
    def _select(self, ys, rank_by: str):
        evals = [self._evaluate(y) for y in ys]
        values = np.array([e.merit_val if rank_by == "merit" else
                           (e.g_val if e.in_omega_nr else INF) for e in evals])
        order = _rank_key(values)[: self.mu]
        trial_x = engine.recombine(ys[order], self.state.weights)
        return order, self._evaluate(trial_x)

    def _update_distribution(self, steps, order, provenance, sigma_next: float):
        st = self.state
        keep = [i for i in order if provenance[i] != engine.GENERATOR]
        if not keep:
            st.distribution = engine.DistributionState(
                st.distribution.cov, st.distribution.eigvals, st.distribution.eigvecs,
                st.distribution.path_sigma, st.distribution.path_cov, sigma_next,
                st.distribution.generation)
            return
        w = st.weights[[list(order).index(i) for i in keep]]
        w = w / w.sum()
        st.distribution = engine.update_distribution(st.distribution, steps[keep], w, self.cma,
                                                     anchor_sigma=sigma_next)

    # -- one iteration ----------------------------------------------------
    def main_iteration(self) -> TraceEvent:
        st = self.state
        if st.phase is not Phase.MAIN:
            raise RuntimeError("main_iteration called in the Restoration phase")
        cur, sigma = st.x, st.sigma
        ys, steps, provenance = self._offspring()
        order, trial = self._select(ys, "merit")
        if not trial.in_omega_nr:
            kind, x_next, sigma_next = EventKind.TRIAL_OUTSIDE, cur, self.cfg.beta * sigma
        elif is_restoration_identifier(trial, cur, sigma, self.cfg):
            kind, x_next, sigma_next = EventKind.ENTER_RESTORATION, cur, sigma
            st.phase = Phase.RESTORATION
            st.restoration_entry_iteration = st.iteration
            self.restoration_entries += 1
        elif is_successful_point(trial, cur, sigma, self.cfg):
            kind, x_next = EventKind.MAIN_SUCCESS, trial
            sigma_next = max(sigma, st.distribution.sigma_es)
        else:
            kind, x_next, sigma_next = EventKind.MAIN_UNSUCCESS, cur, self.cfg.beta * sigma
        return self._finish(Phase.MAIN, kind, cur, trial, x_next, sigma_next,
                            steps, order, provenance)

    def restoration_iteration(self) -> TraceEvent:
        st = self.state
        if st.phase is not Phase.RESTORATION:
            raise RuntimeError("restoration_iteration called in the Main phase")
        cur, sigma = st.x, st.sigma
        rho = forcing(sigma, self.cfg)
        ys, steps, provenance = self._offspring()
        order, trial = self._select(ys, "violation")
        if not trial.in_omega_nr:
            kind, x_next, sigma_next = EventKind.TRIAL_OUTSIDE, cur, self.cfg.beta * sigma
        elif trial.g_val < cur.g_val - rho and cur.g_val > self.cfg.big_c * rho:
            kind, x_next = EventKind.RESTORATION_SUCCESS, trial
            sigma_next = max(sigma, st.distribution.sigma_es)
        elif trial.merit_val < cur.merit_val:
            kind, sigma_next = EventKind.LEAVE_RESTORATION, sigma
            x_next = trial if self.cfg.restoration_exit == "trial" else cur
            st.phase = Phase.MAIN
            st.restoration_entry_iteration = None
        else:
            kind, x_next, sigma_next = EventKind.RESTORATION_UNSUCCESS, cur, self.cfg.beta * sigma
        return self._finish(Phase.RESTORATION, kind, cur, trial, x_next, sigma_next,
                            steps, order, provenance)

    def _finish(self, phase, kind, cur, trial, x_next, sigma_next, steps, order, provenance):
        st = self.state
        self._update_distribution(steps, order, provenance, sigma_next)
        event = TraceEvent(
            iteration=st.iteration, phase=phase.value, kind=kind.value,
            success=kind in SUCCESSFUL_KINDS, sigma_before=st.sigma, sigma_after=sigma_next,
            f_k=cur.f_val, g_k=cur.g_val, merit_k=cur.merit_val,
            trial_f=trial.f_val, trial_g=trial.g_val, trial_merit=trial.merit_val,
            f_evals=st.f_evals, x=tuple(float(v) for v in x_next.x))
        st.x, st.sigma = x_next, sigma_next
        st.iteration += 1
        self.sigma_min = min(self.sigma_min, sigma_next)
        self.trace.append(event)
        return event

    def iterate(self) -> TraceEvent:
        if self.state.phase is Phase.MAIN:
            return self.main_iteration()
        return self.restoration_iteration()

    def run(self) -> RunRecord:
        st = self.state
        stop = "budget"
        while True:
            if st.f_evals >= self.cfg.budget:
                stop = "budget"
                break
            if st.sigma < self.cfg.sigma_stop:
                stop = "sigma"
                break
            try:
                self.iterate()
            except _BudgetExhausted:
                stop = "budget"
                break
        return RunRecord(
            problem=self.p.name, best_feasible=self.best, final_iterate=st.x,
            f_evals_at_best=self.best_at, f_evals=st.f_evals, c_evals=st.c_evals,
            restoration_entries=self.restoration_entries, sigma0=self.sigma0,
            sigma_min=self.sigma_min, delta_bar=self.delta_bar, iterations=st.iteration,
            stop_reason=stop, seed=self.cfg.seed, trace=self.trace)


def solve(p: ProblemSpec, cfg: Optional[SolverConfig] = None, x0=None) -> RunRecord:
    """Run the merit-function ES from ``x0`` (box midpoint when omitted)."""
    cfg = cfg or SolverConfig()
    if x0 is None:
        x0 = p.default_start if p.default_start is not None else default_start(p)
    return MeritES(p, cfg, x0).run()


def classify_run(trace: Iterable[TraceEvent], budget: int, threshold: int = 20) -> RunClass:
    """Finite-budget proxy for how often restoration was entered."""
    entries, last_entry, open_entry, end = 0, None, None, 0
    for ev in trace:
        end = ev.f_evals
        if ev.kind == EventKind.ENTER_RESTORATION.value:
            entries += 1
            last_entry = open_entry = ev.f_evals
        elif ev.kind == EventKind.LEAVE_RESTORATION.value:
            open_entry = None
    if open_entry is not None and end - open_entry >= 0.5 * budget:
        return RunClass.NEVER_LEFT
    if entries >= threshold and last_entry is not None and last_entry >= 0.9 * budget:
        return RunClass.INFINITELY_OFTEN
    return RunClass.FINITE_RESTORATION


# -- trace export ---------------------------------------------------------
# Line-delimited JSON, one object per event, keys in TRACE_FIELDS order.
# Infinite values are written as null.

def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    if isinstance(v, (tuple, list)):
        return [_jsonable(u) for u in v]
    return v


def write_trace(trace: Iterable[TraceEvent], path) -> None:
    with open(path, "w") as fh:
        for ev in trace:
            fh.write(json.dumps({k: _jsonable(v) for k, v in asdict(ev).items()}) + "\n")


def read_trace(path) -> list[TraceEvent]:
    out = []
    with open(path) as fh:
        for line in fh:
            if not line.strip():
                continue
            d = json.loads(line)
            for k in ("sigma_before", "sigma_after", "f_k", "g_k", "merit_k",
                      "trial_f", "trial_g", "trial_merit"):
                if d[k] is None:
                    d[k] = INF
            d["x"] = tuple(d["x"])
            out.append(TraceEvent(**d))
    return out
