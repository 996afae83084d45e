"""Trial records, budgets, and tuning histories.

Objectives are minimized. Failed evaluations carry the penalty sentinel (the
largest finite float) so they sort behind every real value but still count
against the evaluation budget.
"""

from __future__ import annotations

import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .space import Point, SearchSpace, Value

PENALTY_OBJECTIVE: float = sys.float_info.max

STATUS_OK = "ok"
STATUS_FAIL = "fail"


class EvaluationFailed(Exception):
    """Raised by an objective to report a failed evaluation with a reason."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


@dataclass(frozen=True)
class TrialRecord:
    point: Point
    objective: float
    status: str
    solver_id: str
    iteration: int
    eval_id: int
    wall_time_ms: int = 0
    fail_reason: str | None = None

    def __post_init__(self) -> None:
        if self.status == STATUS_FAIL:
            if self.objective != PENALTY_OBJECTIVE:
                raise ValueError("failed records must carry the penalty sentinel objective")
        elif self.status == STATUS_OK:
            if not math.isfinite(self.objective):
                raise ValueError(f"ok records need a finite objective, got {self.objective}")
        else:
            raise ValueError(f"unknown status {self.status!r}")
        if self.wall_time_ms < 0 or self.iteration < 0:
            raise ValueError("wall_time_ms and iteration must be non-negative")

    @property
    def ok(self) -> bool:
        return self.status == STATUS_OK

    def status_label(self) -> str:
        if self.ok:
            return STATUS_OK
        return f"fail({self.fail_reason})" if self.fail_reason else STATUS_FAIL


@dataclass(frozen=True)
class Budget:
    max_evaluations: int
    max_concurrency: int = 1

    def __post_init__(self) -> None:
        if self.max_evaluations < 1:
            raise ValueError(f"max_evaluations must be >= 1, got {self.max_evaluations}")
        if self.max_concurrency < 1:
            raise ValueError(f"max_concurrency must be >= 1, got {self.max_concurrency}")


@dataclass
class RunStats:
    """Bookkeeping counters for one tuning run."""

    points_asked: int = 0
    cache_hits: int = 0
    evaluations: int = 0


def _csv_cell(value: Value) -> str:
    if isinstance(value, bool):
        raise TypeError("boolean values are not valid point values")
    if isinstance(value, float):
        return repr(value)
    return str(value)


@dataclass
class TuningHistory:
    """Ordered log of unique evaluated points plus per-iteration bests."""

    space: SearchSpace
    records: list[TrialRecord] = field(default_factory=list)
    best_by_iteration: list[tuple[int, float]] = field(default_factory=list)
    stats: RunStats = field(default_factory=RunStats)
    seed: int = 0

    def best_record(self) -> TrialRecord | None:
        """Best ok record (lowest objective, earliest eval_id on ties)."""
        best = None
        for rec in self.records:
            if rec.ok and (best is None or rec.objective < best.objective):
                best = rec
        return best

    def close_iteration(self, iteration: int) -> None:
        best = self.best_record()
        if best is not None:
            self.best_by_iteration.append((iteration, best.objective))

    def records_for_solver(self, solver_id: str) -> list[TrialRecord]:
        return [r for r in self.records if r.solver_id == solver_id]

    def status_counts(self) -> dict[str, int]:
        counts = {STATUS_OK: 0, STATUS_FAIL: 0}
        for rec in self.records:
            counts[rec.status] += 1
        return counts

    def convergence_rows(self) -> list[tuple[int, float]]:
        """(eval_id, best objective so far) in eval order, once an ok record exists."""
        rows = []
        best = math.inf
        for rec in sorted(self.records, key=lambda r: r.eval_id):
            if rec.ok and rec.objective < best:
                best = rec.objective
            if math.isfinite(best):
                rows.append((rec.eval_id, best))
        return rows

    def write_history_csv(self, path: str | Path) -> None:
        names = self.space.names
        lines = ["eval_id,iteration,solver_id," + ",".join(names) + ",objective,status,wall_time_ms"]
        for rec in sorted(self.records, key=lambda r: r.eval_id):
            cells = [str(rec.eval_id), str(rec.iteration), rec.solver_id]
            cells += [_csv_cell(v) for v in rec.point.values]
            cells += [repr(rec.objective), rec.status_label(), str(rec.wall_time_ms)]
            lines.append(",".join(cells))
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    def write_convergence_csv(self, path: str | Path) -> None:
        lines = ["eval_id,best_so_far"]
        lines += [f"{eval_id},{repr(best)}" for eval_id, best in self.convergence_rows()]
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    def summary(self) -> dict:
        per_solver: dict[str, float] = {}
        for rec in self.records:
            if rec.ok and (rec.solver_id not in per_solver or rec.objective < per_solver[rec.solver_id]):
                per_solver[rec.solver_id] = rec.objective
        best = self.best_record()
        return {
            "best": None
            if best is None
            else {"point": self.space.to_dict(best.point), "objective": best.objective},
            "status_counts": self.status_counts(),
            "per_solver_best": per_solver,
            "evaluations": self.stats.evaluations,
            "points_asked": self.stats.points_asked,
            "cache_hits": self.stats.cache_hits,
            "seed": self.seed,
        }

    def write_summary_json(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.summary(), indent=2) + "\n", encoding="utf-8")
