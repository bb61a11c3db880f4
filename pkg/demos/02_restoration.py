"""
Watching the restoration phase
==============================

G6 started far outside its feasible region. Restoration is entered when
a trial point reduces the violation g enough but does not reduce the
merit function. Inside restoration the offspring are ranked by g alone.
"""
from collections import Counter

from esmf import SolverConfig, solve
from esmf.benchmarks import registry, start_point
from esmf.solver import classify_run

entry = registry()["G6"]
x0 = start_point("G6", "infeasible")
rec = solve(entry.problem, SolverConfig(budget=1000, seed=3), x0)

print(f"G6 start {x0}, penalty weight delta_bar = {rec.delta_bar:.4g}")
print("iteration kinds:", dict(Counter(ev.kind for ev in rec.trace)))

# Each excursion into restoration starts with EnterRestoration and ends
# with LeaveRestoration. Print the first few with the violation at entry.
shown = 0
for ev in rec.trace:
    if ev.kind in ("EnterRestoration", "LeaveRestoration"):
        print(f"  iter {ev.iteration:3d} {ev.kind:17s} g_k = {ev.g_k:.3g}  trial g = {ev.trial_g:.3g}")
        shown += 1
        if shown == 6:
            break

best = rec.best_feasible
if best is None:
    print("\nno feasible point within the budget")
else:
    print(f"\nbest feasible f = {best.f_val:.6g} (best known {entry.f_opt}), "
          f"reached at evaluation {rec.f_evals_at_best}")
print("run class:", classify_run(rec.trace, 1000).value)
