"""
A small benchmark campaign
==========================

The harness runs every (problem, run) cell with seed base_seed + run and
reduces the results to one row per problem. The same plan always gives
the same numbers. The command line tool ``esmf`` wraps the same calls.
"""
import tempfile
from pathlib import Path

from esmf.harness import ExperimentPlan, read_structured, render_table, run_campaign, write_structured

plan = ExperimentPlan(problems=["G6", "G8", "G11", "G12", "TCS"], budget=1000, runs=5,
                      start_kind="infeasible")
rows, records = run_campaign(plan)
print(render_table(rows))

# Per-run records keep what the averages hide.
for r in records[:5]:
    print(f"  {r['problem']} run {r['run']} seed {r['seed']}: f = {r['f_best']}, "
          f"restoration entries = {r['restoration_entries']}")

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "rows.csv"
    write_structured(rows, "csv", path)
    print("\n" + path.read_text())
    print("CSV round trip exact:", read_structured(path) == rows)
