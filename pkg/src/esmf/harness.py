"""Seeded multi-run campaigns over the benchmark registry.

Run ``i`` of every problem uses solver seed ``base_seed + i``. Cells
(problem, run) may execute in worker processes; results are reduced in
(problem, run) order so the output never depends on scheduling.

A run that never evaluates a feasible point counts as a failure. Failures
are excluded from the f/g/#f statistics and reported in ``failures``.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import benchmarks
from .problem import ProblemSpec
from .solver import SolverConfig, SolverInputError, solve, write_trace

SENTINEL = "−"  # shown instead of numbers for failed rows
BUDGET_PRESETS = {"small": 1000, "large": 20000}
OUTPUT_FORMATS = ("table", "csv", "json")
START_KINDS = ("midpoint", "feasible", "infeasible")


class PlanError(ValueError):
    pass


@dataclass
class ExperimentPlan:
    problems: Sequence[str] | str = "all"
    budget: int = 1000
    runs: int = 10
    base_seed: int = 0
    start_kind: str = "midpoint"
    solver: dict = field(default_factory=dict)  # SolverConfig overrides (mode, norm, ...)
    output: str = "table"
    output_path: Optional[str] = None
    trace_dir: Optional[str] = None
    problem_file: Optional[str] = None
    workers: int = 1

    def problem_names(self) -> list[str]:
        if self.problem_file is not None:
            return [_load_file_problem(self.problem_file).name]
        if self.problems == "all":
            return list(benchmarks.NAMES)
        names = list(self.problems)
        if not names:
            raise PlanError("empty problem list")
        unknown = [n for n in names if n not in benchmarks.NAMES]
        if unknown:
            raise PlanError(f"unknown problem(s): {', '.join(unknown)}")
        return names

    def validate(self) -> None:
        if self.runs < 1:
            raise PlanError("runs must be >= 1")
        if self.start_kind not in START_KINDS:
            raise PlanError(f"start kind must be one of {START_KINDS}")
        if self.output not in OUTPUT_FORMATS:
            raise PlanError(f"output must be one of {OUTPUT_FORMATS}")
        if self.workers < 1:
            raise PlanError("workers must be >= 1")
        cfg = self.config(0)
        for name in self.problem_names():
            n = (_load_file_problem(self.problem_file).dimension if self.problem_file
                 else benchmarks.registry()[name].dimension)
            lam, _ = cfg.population(n)
            if self.budget < lam:
                raise PlanError(f"budget {self.budget} is below the population size {lam} of {name}")

    def config(self, seed: int) -> SolverConfig:
        try:
            return SolverConfig(budget=self.budget, seed=seed, **self.solver)
        except TypeError as exc:
            raise PlanError(str(exc)) from exc


@dataclass
class AggregateRow:
    name: str
    f_opt: Optional[float]
    f_best_mean: Optional[float]
    f_best_median: Optional[float]
    f_best_min: Optional[float]
    evals_mean: Optional[float]
    g_mean: Optional[float]
    failures: int
    runs: int
    budget: int
    seed: int
    error: Optional[str] = field(default=None, compare=False)

    @property
    def failed(self) -> bool:
        return self.f_best_mean is None


ROW_FIELDS = tuple(f.name for f in fields(AggregateRow) if f.name != "error")
RUN_FIELDS = ("problem", "run", "seed", "f_best", "g_best", "f_evals_at_best", "f_evals",
              "restoration_entries", "sigma_min", "stop_reason")


# -- running ----------------------------------------------------------------

def _load_file_problem(path) -> ProblemSpec:
    spec, _ = benchmarks.load_problem_config(path)
    return spec


def _problem_and_start(plan: ExperimentPlan, name: str):
    if plan.problem_file is not None:
        spec = _load_file_problem(plan.problem_file)
        if spec.default_start is not None:
            return spec, spec.default_start
        return spec, (spec.lower + spec.upper) / 2
    spec = benchmarks.registry()[name].problem
    try:
        x0 = benchmarks.start_point(name, plan.start_kind)
    except benchmarks.StartPointError as exc:
        raise SolverInputError(str(exc)) from exc
    return spec, x0


def run_cell(plan: ExperimentPlan, name: str, run: int) -> dict:
    """One seeded run; returns its per-run record (or an error record)."""
    seed = plan.base_seed + run
    try:
        spec, x0 = _problem_and_start(plan, name)
        rec = solve(spec, plan.config(seed), x0)
    except SolverInputError as exc:
        return {"problem": name, "run": run, "seed": seed, "error": str(exc)}
    if plan.trace_dir is not None:
        Path(plan.trace_dir).mkdir(parents=True, exist_ok=True)
        write_trace(rec.trace, Path(plan.trace_dir) / f"{name}_run{run:03d}.jsonl")
    s = rec.summary()
    return {"problem": name, "run": run, "seed": seed, "f_best": s["f_best"],
            "g_best": s["g_best"], "f_evals_at_best": s["f_evals_at_best"],
            "f_evals": s["f_evals"], "restoration_entries": s["restoration_entries"],
            "sigma_min": s["sigma_min"], "stop_reason": s["stop_reason"]}


def _run_cell_args(args):
    return run_cell(*args)


def _f_opt(plan: ExperimentPlan, name: str) -> Optional[float]:
    if plan.problem_file is not None:
        return _load_file_problem(plan.problem_file).best_known
    return benchmarks.best_known(name)


def aggregate(name: str, f_opt, records: Sequence[dict], budget: int, base_seed: int) -> AggregateRow:
    """Reduce the per-run records of one problem (in run order) to a row."""
    errors = [r["error"] for r in records if r.get("error")]
    ok = [r for r in records if not r.get("error") and r.get("f_best") is not None]
    failures = len(records) - len(ok)
    if errors or not ok:
        return AggregateRow(name, f_opt, None, None, None, None, None, failures, len(records),
                            budget, base_seed, errors[0] if errors else None)
    f = np.array([r["f_best"] for r in ok], dtype=float)
    g = np.array([r["g_best"] for r in ok], dtype=float)
    ev = np.array([r["f_evals_at_best"] for r in ok], dtype=float)
    return AggregateRow(name, f_opt, float(np.mean(f)), float(np.median(f)), float(np.min(f)),
                        float(np.mean(ev)), float(np.mean(g)), failures, len(records),
                        budget, base_seed)


def run_campaign(plan: ExperimentPlan) -> tuple[list[AggregateRow], list[dict]]:
    """Rows plus the per-run records they were reduced from."""
    plan.validate()
    names = plan.problem_names()
    cells = [(plan, name, i) for name in names for i in range(plan.runs)]
    if plan.workers > 1:
        with ProcessPoolExecutor(max_workers=plan.workers) as pool:
            records = list(pool.map(_run_cell_args, cells))
    else:
        records = [run_cell(*c) for c in cells]
    rows = []
    for k, name in enumerate(names):
        chunk = records[k * plan.runs:(k + 1) * plan.runs]
        rows.append(aggregate(name, _f_opt(plan, name), chunk, plan.budget, plan.base_seed))
    return rows, records


def run_experiment(plan: ExperimentPlan) -> list[AggregateRow]:
    return run_campaign(plan)[0]


# -- rendering and serialization -------------------------------------------

def _num(v, spec: str) -> str:
    if v is None:
        return SENTINEL
    if v == 0:
        return "0"
    return format(v, spec)


def render_table(rows: Sequence[AggregateRow]) -> str:
    if not rows:
        raise PlanError("no rows to render")
    header = ("Name", "f_opt", "f(x*)", "#f", "g(x*)")
    body = []
    for r in rows:
        evals = SENTINEL if r.evals_mean is None else str(int(round(r.evals_mean)))
        body.append((r.name, _num(r.f_opt, ".6g"), _num(r.f_best_mean, ".6g"), evals,
                     _num(r.g_mean, ".2g")))
    widths = [max(len(line[j]) for line in [header, *body]) for j in range(5)]
    fmt = lambda line: "  ".join(c.rjust(w) if j else c.ljust(w)  # noqa: E731
                                 for j, (c, w) in enumerate(zip(line, widths)))
    out = [fmt(header), "  ".join("-" * w for w in widths)] + [fmt(b) for b in body]
    notes = [f"{r.name}: {r.failures}/{r.runs} runs without a feasible point"
             + (f" ({r.error})" if r.error else "") for r in rows if r.failures]
    return "\n".join(out + notes) + "\n"


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(v)
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def _json_value(v) -> str:
    if v is None or (isinstance(v, float) and not math.isfinite(v)):
        return "null"
    if isinstance(v, float):
        return format(v, ".17g")
    return json.dumps(v)


def rows_to_csv(rows: Sequence[AggregateRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(ROW_FIELDS)
    for r in rows:
        d = asdict(r)
        w.writerow([_cell(d[k]) for k in ROW_FIELDS])
    return buf.getvalue()


def rows_to_json(rows: Sequence[AggregateRow]) -> str:
    objs = []
    for r in rows:
        d = asdict(r)
        objs.append("{" + ", ".join(f"{json.dumps(k)}: {_json_value(d[k])}"
                                    for k in ROW_FIELDS) + "}")
    return "[\n  " + ",\n  ".join(objs) + "\n]\n" if objs else "[]\n"


def write_structured(rows: Sequence[AggregateRow], fmt: str, path) -> None:
    if fmt == "csv":
        text = rows_to_csv(rows)
    elif fmt == "json":
        text = rows_to_json(rows)
    else:
        raise PlanError(f"structured format must be csv or json, got {fmt!r}")
    Path(path).write_text(text)


_INT_FIELDS = {"failures", "runs", "budget", "seed"}


def _parse(key: str, v):
    if v is None or v == "":
        return None
    if key == "name":
        return v
    if key in _INT_FIELDS:
        return int(v)
    return float(v)


def read_structured(path) -> list[AggregateRow]:
    """Inverse of :func:`write_structured` (format chosen by file content)."""
    text = Path(path).read_text()
    if text.lstrip().startswith("["):
        items = json.loads(text)
    else:
        items = list(csv.DictReader(io.StringIO(text)))
    return [AggregateRow(**{k: _parse(k, d.get(k)) for k in ROW_FIELDS}) for d in items]


def write_runs_csv(records: Sequence[dict], path) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RUN_FIELDS + ("error",))
    for r in records:
        w.writerow([_cell(r.get(k)) for k in RUN_FIELDS + ("error",)])
    Path(path).write_text(buf.getvalue())


def read_runs_csv(path) -> list[dict]:
    out = []
    for d in csv.DictReader(io.StringIO(Path(path).read_text())):
        rec = {"problem": d["problem"], "run": int(d["run"]), "seed": int(d["seed"])}
        if d["error"]:
            rec["error"] = d["error"]
        else:
            for k in ("f_best", "g_best", "sigma_min"):
                rec[k] = float(d[k]) if d[k] else None
            for k in ("f_evals_at_best", "f_evals", "restoration_entries"):
                rec[k] = int(d[k]) if d[k] else None
            rec["stop_reason"] = d["stop_reason"]
        out.append(rec)
    return out


def default_seed() -> int:
    """Base seed, overridable through the ``ESMF_SEED`` environment variable."""
    raw = os.environ.get("ESMF_SEED")
    if raw is None or raw == "":
        return 0
    try:
        return int(raw)
    except ValueError:
        raise PlanError(f"ESMF_SEED must be an integer, got {raw!r}") from None
