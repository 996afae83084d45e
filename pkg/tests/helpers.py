"""Shared test utilities: independent oracles and instrumentation wrappers."""

from __future__ import annotations

import math

import numpy as np

from tunekit.manager import Solver
from tunekit.solvers.bayes import GPModel
from tunekit.space import Point, SearchSpace, encoded_distance
from tunekit.trials import TrialRecord


def dense_posterior_oracle(model: GPModel, space: SearchSpace, query: np.ndarray):
    """Independent rebuild of the GP posterior with plain dense solves:
    mu = m + k*^T (K + jitter I)^-1 (y - m), var = k(x,x) - k*^T (...)^-1 k*."""
    x_train = model.train_x
    n = len(x_train)
    sf2, ell = model.signal_var, model.length_scale

    def kern(a, b):
        return sf2 * math.exp(-encoded_distance(space, a, b) ** 2 / (2 * ell**2))

    k_mat = np.array([[kern(x_train[i], x_train[j]) for j in range(n)] for i in range(n)])
    a_mat = k_mat + model.jitter * np.eye(n)
    y_minus_m = a_mat @ model._alpha  # recover centered targets from the fit
    k_star = np.array([kern(query, x_train[i]) for i in range(n)])
    mu = model.prior_mean + k_star @ np.linalg.solve(a_mat, y_minus_m)
    var = sf2 - k_star @ np.linalg.solve(a_mat, k_star)
    return float(mu), max(float(var), 0.0)


class RecordingSolver(Solver):
    """Wraps a solver and logs its cumulative tell stream."""

    def __init__(self, inner: Solver):
        self._inner = inner
        self.told: list[TrialRecord] = []

    def ask(self, max_points: int) -> list[Point]:
        return self._inner.ask(max_points)

    def tell(self, records) -> None:
        self.told.extend(records)
        self._inner.tell(records)

    def is_done(self) -> bool:
        return self._inner.is_done()


def counted(fn):
    """Wrap an objective callable with an invocation counter."""
    calls: list[int] = []

    def wrapper(point, eval_id):
        calls.append(eval_id)
        return fn(point, eval_id)

    wrapper.calls = calls
    return wrapper
