"""External-process black box: one process per evaluation, line-delimited JSON.

The process receives one line on stdin: {"params": {name: value, ...}} and
must print one line: {"objective": number} with an optional "status" field.
Exit code 0 plus parseable output means ok; anything else becomes a failure
status (nonzero_exit, timeout, or parse_error) rather than an exception
escaping to the manager.
"""

from __future__ import annotations

import json
import shlex
import subprocess

from ..space import Point, SearchSpace
from ..trials import EvaluationFailed


class ExternalObjective:
    def __init__(self, space: SearchSpace, command: str | list[str], timeout_ms: int):
        if timeout_ms <= 0:
            raise ValueError(f"timeout_ms must be > 0, got {timeout_ms}")
        self.space = space
        self.argv = shlex.split(command) if isinstance(command, str) else list(command)
        self.timeout_ms = timeout_ms

    def __call__(self, p: Point, eval_id: int = 0) -> float:
        payload = json.dumps({"params": self.space.to_dict(p)})
        try:
            proc = subprocess.run(
                self.argv,
                input=payload + "\n",
                capture_output=True,
                text=True,
                timeout=self.timeout_ms / 1000.0,
            )
        except subprocess.TimeoutExpired:
            raise EvaluationFailed("timeout") from None
        except OSError:  # command missing or not executable: it never exited 0
            raise EvaluationFailed("nonzero_exit") from None
        if proc.returncode != 0:
            raise EvaluationFailed("nonzero_exit")
        line = proc.stdout.splitlines()[0] if proc.stdout.splitlines() else ""
        try:
            reply = json.loads(line)
            objective = reply["objective"]
            if not isinstance(objective, (int, float)) or isinstance(objective, bool):
                raise ValueError
        except (ValueError, KeyError, TypeError):
            raise EvaluationFailed("parse_error") from None
        status = reply.get("status", "ok")
        if status != "ok":
            raise EvaluationFailed(str(status))
        return float(objective)
