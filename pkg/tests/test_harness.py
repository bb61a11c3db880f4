import json

import numpy as np
import pytest

from esmf import cli
from esmf.harness import (ROW_FIELDS, SENTINEL, AggregateRow, ExperimentPlan, PlanError, aggregate,
                          default_seed, read_runs_csv, read_structured, render_table, rows_to_csv,
                          rows_to_json, run_campaign, run_experiment, write_runs_csv,
                          write_structured)
from esmf.solver import read_trace


def small_plan(**kw):
    base = dict(problems=["G8", "G12"], budget=300, runs=3, base_seed=5)
    base.update(kw)
    return ExperimentPlan(**base)


# -- campaign examples ---------------------------------------------------------

def test_g8_feasible_plan():
    (row,) = run_experiment(ExperimentPlan(problems=["G8"], budget=1000, runs=10,
                                           start_kind="feasible"))
    assert abs(row.f_best_mean - (-0.095825)) <= 1e-4
    assert row.failures == 0 and row.runs == 10


@pytest.mark.xfail(strict=True, reason="from the stored feasible start of G12 the ES is captured "
                                       "by a neighbouring feasible ball in some runs; see README")
def test_g12_feasible_plan():
    (row,) = run_experiment(ExperimentPlan(problems=["G12"], budget=1000, runs=10,
                                           start_kind="feasible"))
    assert abs(row.f_best_mean - (-1.0)) <= 1e-3 and row.g_mean == 0


def test_g12_midpoint_plan():
    (row,) = run_experiment(ExperimentPlan(problems=["G12"], budget=1000, runs=10))
    assert abs(row.f_best_mean - (-1.0)) <= 1e-3 and row.g_mean == 0


def test_single_run_is_deterministic():
    a = run_experiment(small_plan(runs=1))
    b = run_experiment(small_plan(runs=1))
    assert a == b


def test_seeds_are_base_plus_run_index():
    _, records = run_campaign(small_plan(problems=["G8"]))
    assert [r["seed"] for r in records] == [5, 6, 7]
    assert [r["run"] for r in records] == [0, 1, 2]


def test_parallel_equals_serial():
    assert rows_to_csv(run_experiment(small_plan(workers=2))) == rows_to_csv(
        run_experiment(small_plan()))


def test_aggregate_recomputable_from_runs_csv(tmp_path):
    plan = small_plan(problems=["G6", "G8"], start_kind="infeasible")
    rows, records = run_campaign(plan)
    path = tmp_path / "runs.csv"
    write_runs_csv(records, path)
    back = read_runs_csv(path)
    assert back == records
    again = [aggregate(name, row.f_opt, [r for r in back if r["problem"] == name], plan.budget,
                       plan.base_seed) for name, row in zip(["G6", "G8"], rows)]
    assert again == rows


def test_failures_excluded_from_means():
    recs = [{"problem": "X", "run": 0, "seed": 0, "f_best": 1.0, "g_best": 0.0,
             "f_evals_at_best": 10},
            {"problem": "X", "run": 1, "seed": 1, "f_best": None, "g_best": None,
             "f_evals_at_best": None},
            {"problem": "X", "run": 2, "seed": 2, "f_best": 3.0, "g_best": 1e-6,
             "f_evals_at_best": 30}]
    row = aggregate("X", 0.5, recs, 100, 0)
    assert (row.f_best_mean, row.f_best_median, row.f_best_min) == (2.0, 2.0, 1.0)
    assert row.evals_mean == 20.0 and row.g_mean == 5e-7
    assert row.failures == 1 and row.runs == 3


def test_solver_input_error_gives_sentinel_row():
    rows = run_experiment(small_plan(problems=["G8", "G12"], runs=2, solver={"sigma0": -1.0}))
    assert all(r.error and r.failed for r in rows)
    text = render_table(rows)
    assert SENTINEL in text


def test_plan_validation():
    with pytest.raises(PlanError):
        small_plan(problems=[]).validate()
    with pytest.raises(PlanError):
        small_plan(problems=["G99"]).validate()
    with pytest.raises(PlanError):
        small_plan(budget=5).validate()  # below lambda
    with pytest.raises(PlanError):
        small_plan(runs=0).validate()
    with pytest.raises(PlanError):
        small_plan(solver={"colour": "red"}).config(0)


def test_trace_dir(tmp_path):
    run_experiment(small_plan(problems=["G8"], runs=2, trace_dir=str(tmp_path)))
    files = sorted(p.name for p in tmp_path.iterdir())
    assert files == ["G8_run000.jsonl", "G8_run001.jsonl"]
    assert read_trace(tmp_path / files[0])


# -- rendering and serialization -------------------------------------------------

def g12_row(**kw):
    base = dict(name="G12", f_opt=-1.0, f_best_mean=-1.0, f_best_median=-1.0, f_best_min=-1.0,
                evals_mean=161.0, g_mean=0.0, failures=0, runs=10, budget=1000, seed=0)
    base.update(kw)
    return AggregateRow(**base)


def failed_row():
    return g12_row(name="G10", f_opt=7049.33, f_best_mean=None, f_best_median=None,
                   f_best_min=None, evals_mean=None, g_mean=None, failures=10)


def test_render_single_row():
    lines = render_table([g12_row()]).splitlines()
    assert lines[0].split() == ["Name", "f_opt", "f(x*)", "#f", "g(x*)"]
    assert lines[2].split() == ["G12", "-1", "-1", "161", "0"]


def test_render_failed_row():
    line = render_table([failed_row()]).splitlines()[2].split()
    assert line == ["G10", "7049.33", SENTINEL, SENTINEL, SENTINEL]


def test_render_empty_is_an_error():
    with pytest.raises(PlanError):
        render_table([])


def test_csv_one_row_two_lines(tmp_path):
    path = tmp_path / "r.csv"
    write_structured([g12_row()], "csv", path)
    lines = path.read_text().splitlines()
    assert len(lines) == 2
    assert lines[0] == ("name,f_opt,f_best_mean,f_best_median,f_best_min,evals_mean,g_mean,"
                        "failures,runs,budget,seed")


def test_json_is_array_of_flat_objects(tmp_path):
    path = tmp_path / "r.json"
    write_structured([g12_row(), failed_row()], "json", path)
    data = json.loads(path.read_text())
    assert isinstance(data, list) and len(data) == 2
    for obj in data:
        assert tuple(obj) == ROW_FIELDS
        assert all(not isinstance(v, (dict, list)) for v in obj.values())


@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_round_trip(tmp_path, fmt):
    rows = [g12_row(f_best_mean=-0.99999999999999989, g_mean=1.2345678901234567e-7),
            failed_row()]
    path = tmp_path / f"r.{fmt}"
    write_structured(rows, fmt, path)
    assert read_structured(path) == rows


def test_seventeen_significant_digits():
    text = rows_to_csv([g12_row(f_best_mean=0.1 + 0.2)])
    assert "0.30000000000000004" in text
    assert "0.30000000000000004" in rows_to_json([g12_row(f_best_mean=0.1 + 0.2)])


def test_campaign_csv_is_byte_identical():
    a = rows_to_csv(run_experiment(small_plan()))
    b = rows_to_csv(run_experiment(small_plan()))
    assert a == b


# -- command line ------------------------------------------------------------------

def test_cli_table(capsys):
    assert cli.main(["--problems", "G12", "--runs", "2", "--budget", "200"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0].split()[0] == "Name" and "G12" in out


def test_cli_csv_file(tmp_path):
    path = tmp_path / "out.csv"
    runs = tmp_path / "runs.csv"
    rc = cli.main(["--problems", "G8", "G6", "--runs", "2", "--budget", "200", "--output", "csv",
                   "--out-path", str(path), "--runs-out", str(runs)])
    assert rc == 0
    assert len(path.read_text().splitlines()) == 3
    assert len(read_runs_csv(runs)) == 4


def test_cli_unknown_problem_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["--problems", "G99"])
    assert exc.value.code == 2


def test_cli_budget_presets_are_exclusive():
    with pytest.raises(SystemExit) as exc:
        cli.main(["--paper-small", "--paper-large"])
    assert exc.value.code == 2


def test_cli_unwritable_output(tmp_path, capsys):
    bad = tmp_path / "missing" / "out.csv"
    rc = cli.main(["--problems", "G12", "--runs", "1", "--budget", "100", "--output", "csv",
                   "--out-path", str(bad)])
    assert rc == 1
    assert "cannot write" in capsys.readouterr().err


def test_cli_env_seed(monkeypatch, capsys):
    args = ["--problems", "G8", "--runs", "2", "--budget", "200", "--output", "csv"]
    cli.main(args + ["--seed", "42"])
    explicit = capsys.readouterr().out
    monkeypatch.setenv("ESMF_SEED", "42")
    assert default_seed() == 42
    cli.main(args)
    assert capsys.readouterr().out == explicit


def test_bad_env_seed(monkeypatch):
    monkeypatch.setenv("ESMF_SEED", "abc")
    with pytest.raises(PlanError):
        default_seed()


def test_cli_manifest_and_validate(capsys):
    assert cli.main(["--manifest"]) == 0
    assert len(json.loads(capsys.readouterr().out)) == 16
    assert cli.main(["--validate"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and len(out.splitlines()) == 15


def test_cli_problem_file(tmp_path, capsys):
    cfg = tmp_path / "p.json"
    cfg.write_text(json.dumps({"base": "G8", "name": "G8-box", "lower": [1, 3], "upper": [2, 5]}))
    assert cli.main(["--problem-file", str(cfg), "--runs", "2", "--budget", "300"]) == 0
    assert "G8-box" in capsys.readouterr().out


def test_cli_generators_and_norm(capsys):
    rc = cli.main(["--problems", "G6", "--runs", "1", "--budget", "200", "--mode", "barrier",
                   "--generators", "--norm", "l2sq", "--start", "infeasible"])
    assert rc == 0
