"""Generate the stored feasible/infeasible start points of the benchmark registry.

Usage: python tools/make_starts.py [--seed 2024] [--out src/esmf/benchmarks/starts.json]

Feasible starts are found by rejection sampling uniformly over the bound box.
Problems whose feasible set has (near) zero volume, typically because of
equality constraints, fall back to minimizing the squared violation with
L-BFGS-B from uniformly drawn box points. Infeasible starts are the least
violated of the first 100 uniform samples whose violation is clearly
positive, so the penalty weight derived from the start's violation stays
moderate. The method, seed and sample index are recorded per entry. Needs scipy (``pip install .[tools]``).
"""
from __future__ import annotations

import argparse
import json
from pathlib import Path

import numpy as np
from scipy.optimize import minimize

from esmf.benchmarks import NAMES, build_problem
from esmf.problem import eval_violation

FEASIBLE_MARGIN = 1e-6     # stored feasible starts: g below this (test tolerance is 1e-5)
INFEASIBLE_MARGIN = 1e-2   # stored infeasible starts: g at least this
MAX_SAMPLES = 200_000
MAX_RESTARTS = 200
INFEASIBLE_POOL = 100


def _violation(p, x) -> float:
    return eval_violation(x, p)


def rejection(p, rng, accept, max_samples=MAX_SAMPLES):
    for i in range(max_samples):
        x = rng.uniform(p.lower, p.upper)
        if accept(_violation(p, x)):
            return x, i
    return None, max_samples


def least_violated(p, rng, pool=INFEASIBLE_POOL):
    best, best_g, seen = None, np.inf, 0
    for _ in range(MAX_SAMPLES):
        x = rng.uniform(p.lower, p.upper)
        g = _violation(p, x)
        if g >= INFEASIBLE_MARGIN:
            seen += 1
            if g < best_g:
                best, best_g = x, g
            if seen == pool:
                break
    return best, seen


def squared_violation_descent(p, rng):
    def obj(x):
        c = p.constraint_values(x)
        return float(np.sum(np.maximum(c, 0.0) ** 2))

    bounds = list(zip(p.lower, p.upper))
    for i in range(MAX_RESTARTS):
        x0 = rng.uniform(p.lower, p.upper)
        res = minimize(obj, x0, method="L-BFGS-B", bounds=bounds,
                       options={"ftol": 1e-30, "gtol": 1e-14, "maxiter": 5000})
        x = np.clip(res.x, p.lower, p.upper)
        if _violation(p, x) < FEASIBLE_MARGIN:
            return x, i
    return None, MAX_RESTARTS


def make(seed: int) -> dict:
    out = {}
    for k, name in enumerate(NAMES):
        p, _ = build_problem(name)
        rng = np.random.default_rng([seed, k])
        entry, prov = {}, {"seed": [seed, k]}

        x, i = rejection(p, rng, lambda g: g < FEASIBLE_MARGIN)
        if x is not None:
            prov["feasible"] = f"uniform rejection sampling, sample {i}"
        else:
            x, i = squared_violation_descent(p, rng)
            if x is not None:
                prov["feasible"] = (f"no hit in {MAX_SAMPLES} uniform samples; "
                                    f"L-BFGS-B on squared violation, restart {i}")
        if x is not None:
            entry["feasible"] = [float(v) for v in x]

        rng = np.random.default_rng([seed, k, 1])
        x, seen = least_violated(p, rng)
        if x is not None:
            entry["infeasible"] = [float(v) for v in x]
            prov["infeasible"] = f"least violated of {seen} infeasible uniform samples"
        entry["provenance"] = prov
        out[name] = entry
        g_f = _violation(p, np.array(entry["feasible"])) if "feasible" in entry else None
        print(f"{name:4s} feasible={'yes' if g_f is not None else 'NO '} g={g_f}  "
              f"infeasible={'yes' if 'infeasible' in entry else 'NO'}", flush=True)
    return out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parents[1]
                                         / "src/esmf/benchmarks/starts.json"))
    args = ap.parse_args(argv)
    data = make(args.seed)
    Path(args.out).write_text(json.dumps(data, indent=1) + "\n")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
