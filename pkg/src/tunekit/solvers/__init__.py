"""Search method implementations and the type-name registry the CLI uses."""

from __future__ import annotations

import math

from ..space import SearchSpace
from .bayes import BayesConfig, BayesSearch, GPFitError, GPModel, fit_gp, propose, trim_records
from .direct import DirectSearch, Rect, longest_axis, pareto_select, split_box
from .hybrid import (
    GrowthEvent,
    HybridConfig,
    HybridSearch,
    Member,
    growth_update,
    make_children,
    pareto_front,
    poll_points,
    select_centers,
)
from .neldermead import NelderMeadSolver, SimplexSearch, nm_minimize
from .samplers import LhsSearch, RandomSearch

SOLVER_TYPES = ("random", "lhs", "hybrid", "bayes", "direct", "neldermead", "direct-nm")


def make_solver(solver_type: str, space: SearchSpace, seed: int, params: dict | None = None):
    """Build a solver by its config type name."""
    params = dict(params or {})
    if solver_type == "random":
        return RandomSearch(space, seed, n=params.pop("n", None), batch=params.pop("batch", None))
    if solver_type == "lhs":
        return LhsSearch(space, seed, n=params.pop("n"), batch=params.pop("batch", None))
    if solver_type == "hybrid":
        return HybridSearch(space, seed, HybridConfig(**params))
    if solver_type == "bayes":
        return BayesSearch(space, seed, BayesConfig(**params))
    if solver_type == "direct":
        return DirectSearch(space, theta=0.0)
    if solver_type == "direct-nm":
        theta = params.pop("theta", 0.05 * math.sqrt(len(space.variables)))
        return DirectSearch(space, theta=theta)
    if solver_type == "neldermead":
        return NelderMeadSolver(
            space, seed, edge=params.pop("edge", 0.1), max_iters=params.pop("max_iters", None)
        )
    raise ValueError(f"unknown solver type {solver_type!r}")


__all__ = [
    "BayesConfig",
    "BayesSearch",
    "DirectSearch",
    "GPFitError",
    "GPModel",
    "GrowthEvent",
    "HybridConfig",
    "HybridSearch",
    "LhsSearch",
    "Member",
    "NelderMeadSolver",
    "RandomSearch",
    "Rect",
    "SOLVER_TYPES",
    "SimplexSearch",
    "fit_gp",
    "growth_update",
    "longest_axis",
    "make_children",
    "make_solver",
    "nm_minimize",
    "pareto_front",
    "pareto_select",
    "poll_points",
    "propose",
    "select_centers",
    "split_box",
    "trim_records",
]
