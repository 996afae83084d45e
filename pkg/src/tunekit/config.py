"""Run configuration: the JSON schema behind the CLI.

A run config looks like:

    {
      "space": [
        {"name": "x", "type": "continuous", "bounds": [-5.0, 5.0]},
        {"name": "k", "type": "integer", "bounds": [1, 31]},
        {"name": "w", "type": "categorical", "levels": ["uniform", "inverse"]}
      ],
      "objective": {"builtin": {"name": "sphere"}},
      "budget": {"evaluations": 100, "concurrency": 4},
      "solvers": [{"type": "hybrid", "share": true, "params": {}}],
      "seed": 7,
      "out": "runs/example"
    }
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .solvers import SOLVER_TYPES, BayesConfig, HybridConfig, make_solver
from .space import CategoricalVariable, ContinuousVariable, IntegerVariable, SearchSpace
from .trials import Budget


class ConfigError(ValueError):
    pass


_SIMPLE_SOLVER_PARAMS = {
    "random": {"n", "batch"},
    "lhs": {"n", "batch"},
    "direct": set(),
    "direct-nm": {"theta"},
    "neldermead": {"edge", "max_iters"},
}


def _check_solver_params(solver_type: str, params: dict) -> None:
    if solver_type == "hybrid":
        HybridConfig(**params)
    elif solver_type == "bayes":
        BayesConfig(**params)
    else:
        unknown = set(params) - _SIMPLE_SOLVER_PARAMS[solver_type]
        if unknown:
            raise ConfigError(f"unknown {solver_type} params: {sorted(unknown)}")


@dataclass(frozen=True)
class SolverSetup:
    type: str
    params: dict = field(default_factory=dict)
    share: bool = True
    label: str = ""


@dataclass(frozen=True)
class RunConfig:
    space: SearchSpace
    objective_spec: dict
    budget: Budget
    solvers: tuple[SolverSetup, ...]
    seed: int
    out_dir: Path | None


def build_space(entries: list[dict]) -> SearchSpace:
    variables = []
    for entry in entries:
        try:
            name = entry["name"]
            kind = entry["type"]
            if kind == "continuous":
                lo, hi = entry["bounds"]
                variables.append(ContinuousVariable(name, float(lo), float(hi)))
            elif kind == "integer":
                lo, hi = entry["bounds"]
                variables.append(IntegerVariable(name, int(lo), int(hi)))
            elif kind == "categorical":
                variables.append(CategoricalVariable(name, tuple(entry["levels"])))
            else:
                raise ConfigError(f"unknown variable type {kind!r} for {name!r}")
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"bad variable entry {entry!r}: {exc}") from None
    try:
        return SearchSpace(variables)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def parse_run_config(raw: dict, *, out_override: str | None = None, seed_override: int | None = None) -> RunConfig:
    try:
        space = build_space(raw["space"])
        objective_spec = raw["objective"]
        budget_raw = raw.get("budget", {})
        budget = Budget(
            max_evaluations=int(budget_raw.get("evaluations", 100)),
            max_concurrency=int(budget_raw.get("concurrency", 1)),
        )
        solver_entries = raw.get("solvers", [])
        if not solver_entries:
            raise ConfigError("config needs at least one solver")
        setups = []
        for i, entry in enumerate(solver_entries):
            solver_type = entry.get("type")
            if solver_type not in SOLVER_TYPES:
                raise ConfigError(f"unknown solver type {solver_type!r}")
            params = dict(entry.get("params", {}))
            try:
                _check_solver_params(solver_type, params)
            except (TypeError, ValueError) as exc:
                if isinstance(exc, ConfigError):
                    raise
                raise ConfigError(f"bad {solver_type} params: {exc}") from None
            setups.append(
                SolverSetup(
                    type=solver_type,
                    params=params,
                    share=bool(entry.get("share", True)),
                    label=entry.get("label", f"{solver_type}-{i}"),
                )
            )
        seed = int(raw.get("seed", 0)) if seed_override is None else int(seed_override)
        out = out_override if out_override is not None else raw.get("out")
        return RunConfig(
            space=space,
            objective_spec=objective_spec,
            budget=budget,
            solvers=tuple(setups),
            seed=seed,
            out_dir=Path(out) if out is not None else None,
        )
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid config: {exc}") from None


def load_run_config(path: str | Path, **overrides) -> RunConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    return parse_run_config(raw, **overrides)


def instantiate_solvers(config: RunConfig, seed: int) -> list[tuple[SolverSetup, object]]:
    """Build one seeded solver per setup; LHS design size defaults to the
    evaluation budget (sample size equals budget in the sampling protocols)."""
    seeds = np.random.SeedSequence(seed).spawn(len(config.solvers))
    built = []
    for setup, seq in zip(config.solvers, seeds):
        params = dict(setup.params)
        if setup.type == "lhs":
            params.setdefault("n", config.budget.max_evaluations)
        solver_seed = int(seq.generate_state(1)[0])
        built.append((setup, make_solver(setup.type, config.space, solver_seed, params)))
    return built
