"""Sufficient-decrease ES for problems with unrelaxable constraints only.

Offspring are ranked by the extreme-barrier objective and the trial mean is
accepted when ``f(trial) <= f(x_k) - rho(sigma_k)``. This is the reference
loop that the merit solver must reproduce exactly when there are no
relaxable constraints; it shares the sampling/update primitives but none of
the acceptance logic.
"""
from __future__ import annotations

from typing import Optional

import numpy as np

from . import engine
from .problem import INF, EvaluatedPoint, ProblemSpec, barrier_value, in_unrelaxable
from .solver import (EventKind, Phase, RunRecord, SolverConfig, SolverInputError, TraceEvent,
                     default_start, forcing, initial_step)


def solve_unrelaxable(p: ProblemSpec, cfg: Optional[SolverConfig] = None, x0=None) -> RunRecord:
    cfg = cfg or SolverConfig()
    if p.n_constraints:
        raise SolverInputError(f"{p.name} has relaxable constraints; use esmf.solve")
    if x0 is None:
        x0 = p.default_start if p.default_start is not None else default_start(p)
    x = np.asarray(x0, dtype=float)
    if not in_unrelaxable(x, p):
        raise SolverInputError(f"{p.name}: start point violates the unrelaxable constraints")

    n = p.dimension
    lam, mu = cfg.population(n)
    mode = cfg.resolved_mode(p)
    rng = np.random.default_rng(cfg.seed)
    sigma = float(cfg.sigma0) if cfg.sigma0 is not None else initial_step(p)
    sigma0 = sigma
    w = engine.default_weights(lam, mu)
    params = cfg.cma or engine.CMAParams.default(n, w)
    dist = engine.DistributionState.initial(n, sigma_es=sigma)

    evals = 0
    best_f, best_x, best_at = INF, None, None
    out_of_budget = False

    def f_bar(y):
        nonlocal evals, best_f, best_x, best_at, out_of_budget
        if not in_unrelaxable(y, p):
            return INF
        if evals >= cfg.budget:
            out_of_budget = True
            return INF
        evals += 1
        v = barrier_value(p.objective, y, p)
        if v != v:
            v = INF
        if v < best_f:
            best_f, best_x, best_at = v, y, evals
        return v

    fx = f_bar(x)
    trace = []
    k = 0
    sigma_min = sigma
    stop = "budget"
    while True:
        if evals >= cfg.budget:
            break
        if sigma < cfg.sigma_stop:
            stop = "sigma"
            break
        d = engine.sample_directions(dist, lam, rng, cfg.d_min, cfg.d_max)
        prov = [engine.SAMPLED] * lam
        if mode == "projection":
            ys = engine.project_box(x + sigma * d, p.lower, p.upper)
        else:
            if cfg.generator_augmentation:
                eps = min(sigma, 1e-3 * float(np.min(p.upper - p.lower)))
                gens = engine.tangent_generators_box(x, p.lower, p.upper, eps)[: lam // 2]
                for j, gvec in enumerate(gens):
                    d[lam - len(gens) + j] = gvec
                    prov[lam - len(gens) + j] = engine.GENERATOR
            ys = x + sigma * d
        steps = (ys - x) / sigma

        vals = np.empty(lam)
        for i in range(lam):
            vals[i] = f_bar(ys[i])
            if out_of_budget:
                break
        if out_of_budget:
            break
        vals = np.where(np.isnan(vals), INF, vals)
        order = np.argsort(vals, kind="stable")[:mu]
        trial = engine.recombine(ys[order], w)
        f_trial = f_bar(trial)
        if out_of_budget:
            break

        inside = in_unrelaxable(trial, p)
        if not inside:
            kind, x_new, f_new, s_new = EventKind.TRIAL_OUTSIDE, x, fx, cfg.beta * sigma
        elif f_trial <= fx - forcing(sigma, cfg):
            kind, x_new, f_new, s_new = EventKind.MAIN_SUCCESS, trial, f_trial, max(sigma, dist.sigma_es)
        else:
            kind, x_new, f_new, s_new = EventKind.MAIN_UNSUCCESS, x, fx, cfg.beta * sigma

        keep = [i for i in order if prov[i] != engine.GENERATOR]
        if keep:
            wk = w[[list(order).index(i) for i in keep]]
            dist = engine.update_distribution(dist, steps[keep], wk / wk.sum(), params,
                                              anchor_sigma=s_new)
        else:
            dist = engine.DistributionState(dist.cov, dist.eigvals, dist.eigvecs, dist.path_sigma,
                                            dist.path_cov, s_new, dist.generation)

        trace.append(TraceEvent(
            iteration=k, phase=Phase.MAIN.value, kind=kind.value,
            success=kind is EventKind.MAIN_SUCCESS, sigma_before=sigma, sigma_after=s_new,
            f_k=fx, g_k=0.0, merit_k=fx, trial_f=f_trial if inside else INF,
            trial_g=0.0 if inside else INF, trial_merit=f_trial if inside else INF,
            f_evals=evals, x=tuple(float(v) for v in x_new)))
        x, fx, sigma = x_new, f_new, s_new
        sigma_min = min(sigma_min, sigma)
        k += 1

    best = None if best_x is None else EvaluatedPoint(best_x, best_f, 0.0, best_f, True)
    final = EvaluatedPoint(x, fx, 0.0, fx, True)
    return RunRecord(problem=p.name, best_feasible=best, final_iterate=final,
                     f_evals_at_best=best_at, f_evals=evals, c_evals=0, restoration_entries=0,
                     sigma0=sigma0, sigma_min=sigma_min, delta_bar=0.0, iterations=k,
                     stop_reason=stop, seed=cfg.seed, trace=trace)
