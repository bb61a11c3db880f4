"""
A first constrained run
=======================

Minimize x^2 subject to 1 - x <= 0 on the box [-5, 5]. The constraint
is relaxable (it may be violated during the run); the box is unrelaxable
(no point outside it is ever evaluated). The solution is x* = 1, f* = 1.
"""
import numpy as np

from esmf import ProblemSpec, SolverConfig, solve

problem = ProblemSpec(
    "parabola", 1, lambda x: float(x[0] ** 2), lower=[-5.0], upper=[5.0],
    relaxable=(lambda x: float(1 - x[0]),))

# Without a start point the solver starts from the box midpoint, x0 = 0,
# which violates the constraint by 1.
rec = solve(problem, SolverConfig(budget=2000, seed=0))

best = rec.best_feasible
print(f"best feasible x = {best.x[0]:.6f}, f = {best.f_val:.6f}, g = {best.g_val:.1e}")
print(f"found after {rec.f_evals_at_best} of {rec.f_evals} evaluations, stop: {rec.stop_reason}")

# The trace holds one event per iteration. The step size grows after
# successful iterations and shrinks by 0.9 after unsuccessful ones.
print("\nfirst iterations:")
for ev in rec.trace[:8]:
    print(f"  {ev.iteration:3d} {ev.kind:20s} sigma {ev.sigma_before:.3g} -> {ev.sigma_after:.3g}"
          f"  x = {ev.x[0]: .4f}")

# Across seeds the answer is stable.
fs = [solve(problem, SolverConfig(budget=2000, seed=s)).best_feasible.f_val for s in range(5)]
print("\nf* over five seeds:", np.round(fs, 6))
