"""The fitness function: stratified k-fold cross-validated misclassification rate.

A position in log2 space decodes to (C, gamma); the fitness is the mean
held-out error of an RBF-kernel SVM over k frozen folds. Lower is better and
values always land in [0, 1]. One call to ``evaluate`` ticks the evaluation
counter exactly once, regardless of the number of folds trained inside.

Fold squared-distance blocks are precomputed once per objective, so each
evaluation only exponentiates them at the decoded gamma and runs the solver.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .data import Dataset
from .space import decode
from .svm import Kernel, SmoConfig, smo_train, solve_dual, squared_distances


@dataclass(frozen=True)
class FoldPlan:
    """Stratified fold assignment: one fold index per training example."""

    k: int
    assignments: np.ndarray
    seed: int


def make_folds(data: Dataset, k: int, seed) -> FoldPlan:
    """Deal each class's examples (seeded shuffle) round-robin into k folds."""
    if k < 2:
        raise ValueError("need k >= 2 folds to hold out data")
    rng = np.random.default_rng(seed)
    assignments = np.empty(len(data), dtype=np.int64)
    for label in (-1.0, 1.0):
        members = np.flatnonzero(data.labels == label)
        if members.size < k:
            raise ValueError(
                f"class {label:+.0f} has {members.size} examples; need at least {k}"
            )
        shuffled = members[rng.permutation(members.size)]
        assignments[shuffled] = np.arange(shuffled.size) % k
    return FoldPlan(k=k, assignments=assignments, seed=int(seed))


@dataclass
class _FoldBlocks:
    """Precomputed pieces for one fold: labels plus squared-distance matrices."""

    y_train: np.ndarray
    y_held: np.ndarray
    d2_train: np.ndarray
    d2_cross: np.ndarray
    degenerate: bool


class CvObjective:
    """Callable fitness: position -> mean misclassification rate over the folds.

    The plan is frozen at construction, so repeated evaluations of one
    position return the identical value. ``evaluations`` counts calls; with
    ``cache=True`` repeated positions skip the SVM work but still count.
    """

    def __init__(
        self,
        dataset: Dataset,
        folds: FoldPlan,
        smo: Optional[SmoConfig] = None,
        cache: bool = False,
    ):
        if folds.assignments.shape != (len(dataset),):
            raise ValueError("fold plan does not match the dataset")
        self.dataset = dataset
        self.folds = folds
        self.smo = smo or SmoConfig()
        self.evaluations = 0
        self._cache: Optional[dict] = {} if cache else None
        self._blocks: list[_FoldBlocks] = []
        for j in range(folds.k):
            held = folds.assignments == j
            train = ~held
            x_train = dataset.features[train]
            y_train = dataset.labels[train]
            degenerate = not (np.any(y_train > 0) and np.any(y_train < 0))
            self._blocks.append(
                _FoldBlocks(
                    y_train=np.ascontiguousarray(y_train),
                    y_held=dataset.labels[held],
                    d2_train=squared_distances(x_train, x_train) if not degenerate else None,
                    d2_cross=(
                        squared_distances(dataset.features[held], x_train)
                        if not degenerate
                        else None
                    ),
                    degenerate=degenerate,
                )
            )

    def __call__(self, position: np.ndarray) -> float:
        return self.evaluate(position)

    def evaluate(self, position: np.ndarray) -> float:
        self.evaluations += 1
        key = None
        if self._cache is not None:
            key = tuple(np.asarray(position, dtype=np.float64).tolist())
            hit = self._cache.get(key)
            if hit is not None:
                return hit
        params = decode(position)
        rates = []
        for block in self._blocks:
            if block.degenerate:
                rates.append(1.0)  # single-class training split: worst score
                continue
            K = np.exp(-params.gamma * block.d2_train)
            alpha, bias, _, _, _ = solve_dual(K, block.y_train, params.c, self.smo)
            values = np.exp(-params.gamma * block.d2_cross) @ (alpha * block.y_train) + bias
            predicted = np.where(values >= 0.0, 1.0, -1.0)
            rates.append(float(np.mean(predicted != block.y_held)))
        fitness = float(np.mean(rates))
        if self._cache is not None:
            self._cache[key] = fitness
        return fitness


def test_error(
    train: Dataset,
    test: Dataset,
    position: np.ndarray,
    smo: Optional[SmoConfig] = None,
) -> float:
    """Misclassification rate on ``test`` after training on all of ``train``.

    Does not touch any evaluation counter; this is the held-out assessment
    of an already-chosen position.
    """
    params = decode(position)
    model = smo_train(train, params.c, Kernel.rbf(params.gamma), smo or SmoConfig())
    sv = model.support_indices
    if sv.size == 0:
        values = np.full(len(test), model.bias)
    else:
        d2 = squared_distances(test.features, model.vectors[sv])
        values = np.exp(-params.gamma * d2) @ (model.alphas[sv] * model.labels[sv]) + model.bias
    predicted = np.where(values >= 0.0, 1.0, -1.0)
    return float(np.mean(predicted != test.labels))


__all__ = ["FoldPlan", "make_folds", "CvObjective", "test_error"]
