"""CLI behavior: exit codes, emitted files, determinism, and the allocation
simulator command."""

from __future__ import annotations

import json
from pathlib import Path

from click.testing import CliRunner

from tunekit.cli import main


def write_config(path: Path, **overrides) -> Path:
    config = {
        "space": [
            {"name": "x", "type": "continuous", "bounds": [-5.0, 5.0]},
            {"name": "y", "type": "continuous", "bounds": [-5.0, 5.0]},
        ],
        "objective": {"builtin": {"name": "sphere"}},
        "budget": {"evaluations": 20, "concurrency": 2},
        "solvers": [{"type": "random"}],
        "seed": 3,
    }
    config.update(overrides)
    path.write_text(json.dumps(config), encoding="utf-8")
    return path


def run_cli(*args) -> "Result":
    return CliRunner().invoke(main, list(args))


# -- tune -------------------------------------------------------------------------


def test_tune_writes_outputs(tmp_path: Path):
    config = write_config(tmp_path / "cfg.json")
    out = tmp_path / "out"
    result = run_cli("tune", "--config", str(config), "--out", str(out))
    assert result.exit_code == 0, result.output
    history = (out / "history.csv").read_text().splitlines()
    assert history[0] == "eval_id,iteration,solver_id,x,y,objective,status,wall_time_ms"
    assert len(history) == 21  # header + one row per budgeted evaluation
    assert "np." not in (out / "history.csv").read_text()  # native scalars only
    for line in history[1:]:
        x_cell = line.split(",")[3]
        assert float(x_cell) == float(repr(float(x_cell)))  # round-trip formatting
    summary = json.loads((out / "summary.json").read_text())
    assert summary["status_counts"]["ok"] == 20
    assert "best objective" in result.output


def test_tune_unknown_solver_type_exit_1(tmp_path: Path):
    config = write_config(tmp_path / "cfg.json", solvers=[{"type": "annealing"}])
    result = run_cli("tune", "--config", str(config), "--out", str(tmp_path / "o"))
    assert result.exit_code == 1
    assert "annealing" in result.output


def test_tune_missing_config_exit_1(tmp_path: Path):
    result = run_cli("tune", "--config", str(tmp_path / "absent.json"))
    assert result.exit_code == 1


def test_tune_bad_solver_params_exit_1(tmp_path: Path):
    config = write_config(
        tmp_path / "cfg.json", solvers=[{"type": "hybrid", "params": {"population": 2, "centers": 5}}]
    )
    result = run_cli("tune", "--config", str(config), "--out", str(tmp_path / "o"))
    assert result.exit_code == 1
    config = write_config(
        tmp_path / "cfg2.json", solvers=[{"type": "random", "params": {"warp": 9}}]
    )
    result = run_cli("tune", "--config", str(config), "--out", str(tmp_path / "o2"))
    assert result.exit_code == 1
    assert "warp" in result.output


def test_tune_missing_external_command_is_data_not_crash(tmp_path: Path):
    config = write_config(
        tmp_path / "cfg.json",
        objective={"external": {"command": "/no/such/binary", "timeout_ms": 500}},
        budget={"evaluations": 5, "concurrency": 1},
    )
    out = tmp_path / "out"
    result = run_cli("tune", "--config", str(config), "--out", str(out))
    assert result.exit_code == 0, result.output
    summary = json.loads((out / "summary.json").read_text())
    assert summary["status_counts"]["fail"] == 5
    assert summary["best"] is None
    assert "no successful evaluations" in result.output
    history = (out / "history.csv").read_text()
    assert history.count("fail(nonzero_exit)") == 5


def test_tune_byte_identical_history_for_same_seed(tmp_path: Path):
    config = write_config(tmp_path / "cfg.json", solvers=[{"type": "hybrid"}])
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert run_cli("tune", "--config", str(config), "--out", str(out_a)).exit_code == 0
    assert run_cli("tune", "--config", str(config), "--out", str(out_b)).exit_code == 0
    assert (out_a / "history.csv").read_bytes() == (out_b / "history.csv").read_bytes()


def test_tune_seed_override_changes_history(tmp_path: Path):
    config = write_config(tmp_path / "cfg.json")
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    run_cli("tune", "--config", str(config), "--out", str(out_a))
    run_cli("tune", "--config", str(config), "--out", str(out_b), "--seed", "99")
    assert (out_a / "history.csv").read_bytes() != (out_b / "history.csv").read_bytes()


def test_convergence_csv_non_increasing(tmp_path: Path):
    config = write_config(tmp_path / "cfg.json", solvers=[{"type": "hybrid"}])
    out = tmp_path / "out"
    run_cli("tune", "--config", str(config), "--out", str(out))
    rows = (out / "convergence.csv").read_text().splitlines()[1:]
    bests = [float(line.split(",")[1]) for line in rows]
    assert bests, "convergence data expected"
    assert all(b2 <= b1 for b1, b2 in zip(bests, bests[1:]))


# -- bench ------------------------------------------------------------------------------


def test_bench_rows_and_summary(tmp_path: Path):
    config = write_config(
        tmp_path / "cfg.json",
        solvers=[{"type": "random"}, {"type": "hybrid"}],
        budget={"evaluations": 15, "concurrency": 1},
    )
    out = tmp_path / "bench"
    result = run_cli("bench", "--config", str(config), "--seeds", "3", "--out", str(out))
    assert result.exit_code == 0, result.output
    rows = (out / "bench.csv").read_text().splitlines()
    assert rows[0] == "solver,seed,best_objective,evals_used,wall_time_ms"
    assert len(rows) == 1 + 2 * 3
    summary_rows = (out / "bench_summary.csv").read_text().splitlines()
    assert len(summary_rows) == 3  # header + 2 solvers
    assert "median_best" in result.output


def test_bench_identical_solvers_identical_results(tmp_path: Path):
    config = write_config(
        tmp_path / "cfg.json",
        solvers=[
            {"type": "random", "label": "r-one"},
            {"type": "random", "label": "r-two"},
        ],
        budget={"evaluations": 10, "concurrency": 1},
    )
    out = tmp_path / "bench"
    result = run_cli("bench", "--config", str(config), "--seeds", "2", "--out", str(out))
    assert result.exit_code == 0, result.output
    rows = [line.split(",") for line in (out / "bench.csv").read_text().splitlines()[1:]]
    by_label = {}
    for label, seed, best, evals, _wall in rows:
        by_label.setdefault(label, []).append((seed, best, evals))
    assert by_label["r-one"] == by_label["r-two"]


def test_bench_requires_two_solvers(tmp_path: Path):
    config = write_config(tmp_path / "cfg.json")
    result = run_cli("bench", "--config", str(config), "--seeds", "2")
    assert result.exit_code == 1


# -- simulate-allocation -----------------------------------------------------------------


def test_simulate_allocation_table_and_optimum(tmp_path: Path):
    scenario = tmp_path / "scenario.json"
    scenario.write_text(
        json.dumps(
            {
                "grid": 32,
                "batch": 64,
                "iterations": 1,
                "model": {"t_serial": 64.0, "c_comm": 1.0, "t_fixed": 1.0},
            }
        ),
        encoding="utf-8",
    )
    result = run_cli("simulate-allocation", "--scenario", str(scenario))
    assert result.exit_code == 0, result.output
    assert "optimal w=1" in result.output
    assert "130.0" in result.output


def test_simulate_allocation_fits_observations(tmp_path: Path):
    scenario = tmp_path / "scenario.json"
    scenario.write_text(
        json.dumps(
            {
                "grid": 8,
                "batch": 4,
                "observations": [[1, 65.0], [2, 34.0], [4, 20.0], [8, 16.0]],
            }
        ),
        encoding="utf-8",
    )
    result = run_cli("simulate-allocation", "--scenario", str(scenario))
    assert result.exit_code == 0, result.output
    assert "residual" in result.output


def test_simulate_allocation_grid_one(tmp_path: Path):
    scenario = tmp_path / "scenario.json"
    scenario.write_text(
        json.dumps({"grid": 1, "batch": 2, "model": {"t_serial": 10, "c_comm": 0, "t_fixed": 1}}),
        encoding="utf-8",
    )
    result = run_cli("simulate-allocation", "--scenario", str(scenario))
    assert result.exit_code == 0
    table_rows = [l for l in result.output.splitlines() if l.strip().startswith("1 ")]
    assert len(table_rows) == 1
    assert "optimal w=1" in result.output


def test_simulate_allocation_invalid_scenario(tmp_path: Path):
    scenario = tmp_path / "scenario.json"
    scenario.write_text(json.dumps({"grid": 0, "batch": 1}), encoding="utf-8")
    assert run_cli("simulate-allocation", "--scenario", str(scenario)).exit_code == 1
    assert run_cli("simulate-allocation", "--scenario", str(tmp_path / "nope.json")).exit_code == 1
