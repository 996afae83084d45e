"""Built-in trainable learner: k-nearest-neighbors misclassification on a
held-out validation partition. Tunables: neighbor count k (integer), vote
weighting (categorical: uniform/inverse), Minkowski exponent (continuous)."""

from __future__ import annotations

import numpy as np

from ..space import Point, SearchSpace
from ..trials import EvaluationFailed
from .data import Dataset, Partition, PartitionSpec, partition

INVERSE_EPS = 1e-12


def knn_error_rate(
    train: Dataset,
    validation: Dataset,
    k: int,
    weight: str = "uniform",
    power: float = 2.0,
) -> float:
    """Misclassification rate of k-NN voting; ties pick the smallest label."""
    if len(train) == 0:
        raise EvaluationFailed("empty_training_partition")
    if not 1 <= k <= len(train):
        raise EvaluationFailed(f"k={k} outside [1, {len(train)}]")
    if weight not in ("uniform", "inverse"):
        raise EvaluationFailed(f"unknown weight scheme {weight!r}")
    if power <= 0:
        raise EvaluationFailed(f"power must be > 0, got {power}")

    labels = sorted(set(train.labels))
    label_idx = {lab: i for i, lab in enumerate(labels)}
    train_y = np.array([label_idx[lab] for lab in train.labels])

    diffs = np.abs(validation.features[:, None, :] - train.features[None, :, :])
    dists = np.sum(diffs**power, axis=2) ** (1.0 / power)

    errors = 0
    for row, true_label in enumerate(validation.labels):
        neighbor_order = np.argsort(dists[row], kind="stable")[:k]
        votes = np.zeros(len(labels))
        for t in neighbor_order:
            w = 1.0 if weight == "uniform" else 1.0 / (dists[row, t] + INVERSE_EPS)
            votes[label_idx[train.labels[t]]] += w
        predicted = labels[int(np.argmax(votes))]  # argmax takes the first max: smallest label
        if predicted != true_label:
            errors += 1
    return errors / len(validation)


class KnnObjective:
    """Tuning objective over variables named k, weight, and power."""

    def __init__(self, space: SearchSpace, dataset: Dataset, spec: PartitionSpec | None = None):
        self.space = space
        self.split: Partition = partition(dataset, spec or PartitionSpec())
        self._k_idx = space.index_of("k")
        self._weight_idx = space.index_of("weight")
        self._power_idx = space.index_of("power")
        k_var = space.variables[self._k_idx]
        if k_var.hi > len(self.split.train):
            raise ValueError(
                f"k upper bound {k_var.hi} exceeds training rows {len(self.split.train)}"
            )

    def __call__(self, p: Point, eval_id: int = 0) -> float:
        return knn_error_rate(
            self.split.train,
            self.split.validation,
            k=int(p.values[self._k_idx]),
            weight=str(p.values[self._weight_idx]),
            power=float(p.values[self._power_idx]),
        )


def default_knn_space(train_rows: int) -> SearchSpace:
    from ..space import CategoricalVariable, ContinuousVariable, IntegerVariable

    return SearchSpace(
        [
            IntegerVariable("k", 1, min(31, train_rows)),
            CategoricalVariable("weight", ("uniform", "inverse")),
            ContinuousVariable("power", 0.5, 4.0),
        ]
    )
