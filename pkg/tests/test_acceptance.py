"""The ten release criteria, each at its stated tolerance.

Every test records a one-line PASS/FAIL verdict that is printed in the
terminal summary (section "acceptance criteria").
"""
import time

import numpy as np
import pytest

from conftest import record
from esmf.benchmarks import registry, start_point, validate_registry
from esmf.harness import ExperimentPlan, rows_to_csv, run_campaign, run_experiment
from esmf.problem import EvaluatedPoint, ProblemSpec
from esmf.solver import (EventKind, SUCCESSFUL_KINDS, UNSUCCESSFUL_KINDS, SolverConfig,
                         is_restoration_identifier, solve)
from esmf.unrelaxable import solve_unrelaxable

pytestmark = pytest.mark.acceptance


def synthetic():
    return ProblemSpec("synthetic", 1, lambda x: float(x[0] ** 2), [-5.0], [5.0],
                       relaxable=(lambda x: float(1 - x[0]),))


def timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def test_criterion_01_g12_midpoint():
    (row,), secs = timed(lambda: run_experiment(
        ExperimentPlan(problems=["G12"], budget=1000, runs=10, start_kind="midpoint")))
    ok = abs(row.f_best_mean + 1) <= 1e-3 and row.g_mean < 1e-5 and secs < 10
    record(1, ok, f"G12 mean f={row.f_best_mean:.6f} mean g={row.g_mean:.2g} "
                  f"mean #f={row.evals_mean:.0f} ({secs:.1f}s)")
    assert ok


def test_criterion_02_g8_feasible():
    (_, records), secs = timed(lambda: run_campaign(
        ExperimentPlan(problems=["G8"], budget=1000, runs=10, start_kind="feasible")))
    hits = sum(r["f_best"] is not None and r["f_best"] <= -0.0957 and r["g_best"] < 1e-5
               for r in records)
    ok = hits >= 8 and secs < 10
    record(2, ok, f"G8 {hits}/10 runs reach f <= -0.0957 with g < 1e-5 ({secs:.1f}s)")
    assert ok


def test_criterion_03_g11_large_budget():
    # no start kind is named, so the default start rule (box midpoint) applies
    (row,), secs = timed(lambda: run_experiment(
        ExperimentPlan(problems=["G11"], budget=20000, runs=10, start_kind="midpoint")))
    ok = (row.f_best_mean is not None and abs(row.f_best_mean - 0.75) <= 1e-2
          and secs < 60)
    record(3, ok, f"G11 midpoint mean f={row.f_best_mean:.5f} (target 0.75 +- 0.01, "
                  f"{row.failures} failures, {secs:.1f}s)")
    assert ok


def test_criterion_04_synthetic():
    def runs():
        return [solve(synthetic(), SolverConfig(budget=2000, seed=s)) for s in range(10)]
    recs, secs = timed(runs)
    errs = [abs(r.best_feasible.f_val - 1) if r.best_feasible else np.inf for r in recs]
    ok = max(errs) <= 1e-3 and secs < 5
    record(4, ok, f"synthetic max |f - 1| = {max(errs):.2g} over 10 seeds ({secs:.1f}s)")
    assert ok


def test_criterion_05_step_size_law():
    violations, events = 0, 0
    for name, entry in registry().items():
        for kind in ("midpoint", "infeasible"):
            rec = solve(entry.problem, SolverConfig(budget=1000, seed=0), start_point(name, kind))
            for ev in rec.trace:
                events += 1
                k = EventKind(ev.kind)
                if k in UNSUCCESSFUL_KINDS and ev.sigma_after != 0.9 * ev.sigma_before:
                    violations += 1
                if k in SUCCESSFUL_KINDS and not ev.sigma_after >= ev.sigma_before:
                    violations += 1
    ok = violations == 0
    record(5, ok, f"{violations} step-size violations in {events} iterations "
                  "(16 problems x midpoint/infeasible starts)")
    assert ok


def test_criterion_06_unrelaxable_equivalence():
    p = ProblemSpec("sphere", 5, lambda x: float(x @ x), [-5.0] * 5, [5.0] * 5)
    same = 0
    for seed in range(5):
        x0 = np.random.default_rng(100 + seed).uniform(-5, 5, 5)
        cfg = SolverConfig(budget=1000, seed=seed)
        a, b = solve(p, cfg, x0), solve_unrelaxable(p, cfg, x0)
        same += a.trace == b.trace and len(a.trace) > 0
    ok = same == 5
    record(6, ok, f"{same}/5 seeds give identical traces on the 5-d sphere")
    assert ok


def test_criterion_07_sigma_min():
    worst = 0.0
    for p, x0 in ((registry()["G12"].problem, None), (synthetic(), None)):
        for seed in range(10):
            rec = solve(p, SolverConfig(budget=20000, seed=seed), x0)
            worst = max(worst, rec.sigma_min / rec.sigma0)
    ok = worst < 1e-3
    record(7, ok, f"largest sigma_min/sigma0 = {worst:.2g} (G12 and synthetic, 10 runs each)")
    assert ok


def test_criterion_08_registry_validation():
    report = validate_registry()
    bad = [r["name"] for r in report if not r["ok"]]
    ok = not bad and len(report) == 15
    record(8, ok, f"{len(report) - len(bad)}/{len(report)} published optima reproduce "
                  f"(max rel. f error {max(r['f_error'] / max(1, abs(r['f_opt'])) for r in report):.2g})")
    assert ok


def test_criterion_09_restoration_exercised():
    p = registry()["G6"].problem
    x0 = start_point("G6", "infeasible")
    with_entry, replays, entries = 0, 0, 0
    for seed in range(10):
        cfg = SolverConfig(budget=1000, seed=seed)
        rec = solve(p, cfg, x0)
        evs = [e for e in rec.trace if e.kind == EventKind.ENTER_RESTORATION.value]
        with_entry += bool(evs)
        for e in evs:
            entries += 1
            trial = EvaluatedPoint(np.array(e.x), e.trial_f, e.trial_g, e.trial_merit, True)
            cur = EvaluatedPoint(np.array(e.x), e.f_k, e.g_k, e.merit_k, True)
            replays += is_restoration_identifier(trial, cur, e.sigma_before, cfg)
    ok = with_entry >= 5 and replays == entries
    record(9, ok, f"G6 restoration entered in {with_entry}/10 runs; "
                  f"{replays}/{entries} entries replay true")
    assert ok


def test_criterion_10_determinism():
    plan = dict(problems="all", budget=1000, runs=2, base_seed=3, start_kind="infeasible")
    a = rows_to_csv(run_experiment(ExperimentPlan(**plan)))
    b = rows_to_csv(run_experiment(ExperimentPlan(**plan)))
    c = rows_to_csv(run_experiment(ExperimentPlan(**plan, workers=2)))
    ok = a.encode() == b.encode() == c.encode()
    record(10, ok, "repeated campaign (16 problems x 2 runs, serial and 2 workers) "
                   f"{'is' if ok else 'is NOT'} byte-identical")
    assert ok
