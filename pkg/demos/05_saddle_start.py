"""
A start on a saddle: G11
========================

G11 minimizes x1^2 + (x2 - 1)^2 on the curve x2 = x1^2 (relaxed to a
band of half-width 1e-4). The box midpoint (0, 0) lies on the curve and
is a saddle point of f along it. The optimum 0.75 sits at x1 = +-1/sqrt(2).

With the l1 violation some runs stall near the start: inside restoration
every offspring within the band has g = 0, the trial keeps reducing g
by tiny amounts, and the merit never drops enough to leave. The squared
l2 violation penalizes small excursions much less and lets the search
slide along the band.
"""
import numpy as np

from esmf import SolverConfig, solve
from esmf.benchmarks import registry, start_point

problem = registry()["G11"].problem
budget, seeds = 20000, range(10)

for label, x0, norm in [("midpoint, l1", None, "l1"),
                        ("midpoint, squared l2", None, "l2sq"),
                        ("stored feasible start, l1", start_point("G11", "feasible"), "l1")]:
    fs = np.array([solve(problem, SolverConfig(budget=budget, seed=s, norm=norm), x0)
                   .best_feasible.f_val for s in seeds])
    stalled = int(np.sum(fs > 0.76))
    print(f"{label:27s} mean f = {fs.mean():.4f}  runs above 0.76: {stalled}/10")
