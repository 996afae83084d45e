"""Record/budget validation and history serialization."""

from __future__ import annotations

import json
import math

import pytest

from tunekit.space import ContinuousVariable, Point, SearchSpace
from tunekit.trials import (
    PENALTY_OBJECTIVE,
    Budget,
    TrialRecord,
    TuningHistory,
)

SPACE = SearchSpace([ContinuousVariable("x", 0.0, 1.0)])


def ok_record(x: float, objective: float, eval_id: int, iteration: int = 1) -> TrialRecord:
    return TrialRecord(
        point=Point([x]),
        objective=objective,
        status="ok",
        solver_id="s",
        iteration=iteration,
        eval_id=eval_id,
    )


def test_fail_record_requires_penalty_sentinel():
    with pytest.raises(ValueError):
        TrialRecord(
            point=Point([0.5]), objective=1.0, status="fail", solver_id="s", iteration=1, eval_id=1
        )
    rec = TrialRecord(
        point=Point([0.5]),
        objective=PENALTY_OBJECTIVE,
        status="fail",
        solver_id="s",
        iteration=1,
        eval_id=1,
        fail_reason="timeout",
    )
    assert not rec.ok
    assert rec.status_label() == "fail(timeout)"


def test_ok_record_requires_finite_objective():
    with pytest.raises(ValueError):
        ok_record(0.5, math.inf, 1)
    with pytest.raises(ValueError):
        ok_record(0.5, math.nan, 1)


def test_unknown_status_rejected():
    with pytest.raises(ValueError):
        TrialRecord(
            point=Point([0.5]), objective=1.0, status="maybe", solver_id="s", iteration=1, eval_id=1
        )


def test_budget_validation():
    with pytest.raises(ValueError):
        Budget(0)
    with pytest.raises(ValueError):
        Budget(10, max_concurrency=0)
    assert Budget(10).max_concurrency == 1


def test_penalty_sentinel_is_largest_finite_float():
    import sys

    assert PENALTY_OBJECTIVE == sys.float_info.max
    assert math.isfinite(PENALTY_OBJECTIVE)


def test_convergence_rows_skip_until_first_ok():
    history = TuningHistory(SPACE)
    fail = TrialRecord(
        point=Point([0.1]),
        objective=PENALTY_OBJECTIVE,
        status="fail",
        solver_id="s",
        iteration=1,
        eval_id=1,
        fail_reason="x",
    )
    history.records = [fail, ok_record(0.2, 3.0, 2), ok_record(0.3, 5.0, 3), ok_record(0.4, 1.0, 4)]
    assert history.convergence_rows() == [(2, 3.0), (3, 3.0), (4, 1.0)]


def test_history_csv_and_summary_roundtrip(tmp_path):
    history = TuningHistory(SPACE, seed=5)
    history.records = [ok_record(0.25, 2.0, 1), ok_record(0.75, 1.0, 2, iteration=2)]
    history.stats.evaluations = 2
    history.stats.points_asked = 2
    csv_path = tmp_path / "history.csv"
    history.write_history_csv(csv_path)
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "eval_id,iteration,solver_id,x,objective,status,wall_time_ms"
    assert lines[1] == "1,1,s,0.25,2.0,ok,0"

    summary_path = tmp_path / "summary.json"
    history.write_summary_json(summary_path)
    summary = json.loads(summary_path.read_text())
    assert summary["best"]["objective"] == 1.0
    assert summary["seed"] == 5


def test_best_record_ties_go_to_earliest():
    history = TuningHistory(SPACE)
    history.records = [ok_record(0.1, 1.0, 1), ok_record(0.2, 1.0, 2)]
    assert history.best_record().eval_id == 1
