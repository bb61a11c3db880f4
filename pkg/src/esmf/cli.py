"""Command-line experiment runner.

Examples::

    esmf --problems G12 G8 --paper-small --start feasible
    esmf --problems all --budget 20000 --output csv --out-path results.csv
    esmf --manifest
    esmf --validate

Exit status: 0 when every requested problem produced a row, 1 when a row
could not be computed (bad start/problem input) or output failed, 2 on
usage errors.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import benchmarks, harness
from .problem import ViolationNorm


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="esmf", description="Merit-function ES benchmark campaigns")
    ap.add_argument("--problems", nargs="+", default=["all"], metavar="NAME",
                    help="problem names or 'all' (default)")
    ap.add_argument("--problem-file", help="JSON problem config (overrides --problems)")
    budget = ap.add_mutually_exclusive_group()
    budget.add_argument("--budget", type=int, default=1000, help="f-evaluation budget per run")
    budget.add_argument("--paper-small", action="store_const", dest="budget", const=1000,
                        help="budget 1000")
    budget.add_argument("--paper-large", action="store_const", dest="budget", const=20000,
                        help="budget 20000")
    ap.add_argument("--runs", type=int, default=10)
    ap.add_argument("--seed", type=int, default=None,
                    help="base seed; run i uses seed+i (default: $ESMF_SEED or 0)")
    ap.add_argument("--start", choices=harness.START_KINDS, default="midpoint")
    ap.add_argument("--mode", choices=("projection", "barrier"), default=None)
    ap.add_argument("--norm", choices=[v.value for v in ViolationNorm], default="l1")
    ap.add_argument("--generators", action="store_true",
                    help="add tangent-cone generators in barrier mode")
    ap.add_argument("--output", choices=harness.OUTPUT_FORMATS, default="table")
    ap.add_argument("--out-path", help="write output here instead of stdout")
    ap.add_argument("--runs-out", help="also write per-run records as CSV")
    ap.add_argument("--trace-dir", help="write one JSONL trace per run into this directory")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--manifest", action="store_true", help="print the registry manifest as JSON")
    ap.add_argument("--validate", action="store_true",
                    help="check the coded problems at their published optima")
    return ap


def _emit(text: str, path) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)

    try:
        if args.manifest:
            _emit(json.dumps(benchmarks.manifest(), indent=1) + "\n", args.out_path)
            return 0
        if args.validate:
            report = benchmarks.validate_registry()
            lines = [f"{r['name']:4s} f={r['f']:.10g} f_opt={r['f_opt']:g} "
                     f"|df|={r['f_error']:.3g} g={r['g']:.3g} {'ok' if r['ok'] else 'FAIL'}"
                     for r in report]
            _emit("\n".join(lines) + "\n", args.out_path)
            return 0 if all(r["ok"] for r in report) else 1
    except OSError as exc:
        print(f"esmf: {exc}", file=sys.stderr)
        return 1

    problems = "all" if args.problems == ["all"] else args.problems
    solver = {"norm": args.norm}
    if args.mode:
        solver["mode"] = args.mode
    if args.generators:
        solver["generator_augmentation"] = True
    try:
        seed = args.seed if args.seed is not None else harness.default_seed()
        plan = harness.ExperimentPlan(
            problems=problems, budget=args.budget, runs=args.runs, base_seed=seed,
            start_kind=args.start, solver=solver, output=args.output,
            output_path=args.out_path, trace_dir=args.trace_dir,
            problem_file=args.problem_file, workers=args.workers)
        rows, records = harness.run_campaign(plan)
    except (harness.PlanError, ValueError) as exc:
        ap.error(str(exc))
    except OSError as exc:
        print(f"esmf: {exc}", file=sys.stderr)
        return 1

    try:
        if args.output == "table":
            _emit(harness.render_table(rows), args.out_path)
        elif args.out_path:
            harness.write_structured(rows, args.output, args.out_path)
        else:
            text = harness.rows_to_csv(rows) if args.output == "csv" else harness.rows_to_json(rows)
            sys.stdout.write(text)
        if args.runs_out:
            harness.write_runs_csv(records, args.runs_out)
    except OSError as exc:
        print(f"esmf: cannot write output: {exc}", file=sys.stderr)
        return 1
    return 0 if all(r.error is None for r in rows) else 1


if __name__ == "__main__":
    sys.exit(main())
