"""Chooses which swarm members undergo local refinement.

Four strategies: refine everyone, refine each member with a fixed
probability, refine the top-k by fitness, or the crowding-aware
probabilistic scheme: walk the population best-first, accept each candidate
with a fitness-proportional probability, and on acceptance eliminate every
neighbor within the exploitation radius so one basin is not refined twice.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_VARIANTS = ("all", "fixed_probability", "top_k", "probabilistic")


@dataclass(frozen=True)
class SelectionStrategy:
    """One refinement-selection policy; use the classmethod constructors."""

    variant: str
    probability: float = 0.1
    k: int = 2
    radius: float = 2.0

    def __post_init__(self):
        if self.variant not in _VARIANTS:
            raise ValueError(f"unknown selection variant {self.variant!r}")
        if self.variant == "fixed_probability" and not 0.0 <= self.probability <= 1.0:
            raise ValueError("probability must be in [0, 1]")
        if self.variant == "top_k" and self.k < 1:
            raise ValueError("k must be a positive integer")
        if self.variant == "probabilistic" and not self.radius > 0:
            raise ValueError("radius must be positive")

    @classmethod
    def all_members(cls) -> "SelectionStrategy":
        return cls("all")

    @classmethod
    def fixed_probability(cls, probability: float) -> "SelectionStrategy":
        return cls("fixed_probability", probability=probability)

    @classmethod
    def top_k(cls, k: int) -> "SelectionStrategy":
        return cls("top_k", k=k)

    @classmethod
    def probabilistic(cls, radius: float = 2.0) -> "SelectionStrategy":
        return cls("probabilistic", radius=radius)


@dataclass
class SelectionOutcome:
    """Chosen particle indices plus the per-particle probability that was applied."""

    selected: list[int]
    probabilities_used: np.ndarray


def selection_probabilities(fitnesses) -> np.ndarray:
    """Fitness-proportional weights: (worst - f_i) / sum(worst - f_y).

    All-equal fitnesses degenerate to the uniform 1/n. Non-finite entries are
    treated as worst and weigh zero (unless every entry is non-finite).
    """
    fitnesses = np.asarray(fitnesses, dtype=np.float64)
    if fitnesses.size == 0:
        raise ValueError("need at least one fitness")
    finite = np.isfinite(fitnesses)
    if not finite.any():
        return np.full(fitnesses.size, 1.0 / fitnesses.size)
    worst = fitnesses[finite].max()
    weights = np.where(finite, worst - fitnesses, 0.0)
    total = weights.sum()
    if total <= 0.0:
        return np.full(fitnesses.size, 1.0 / fitnesses.size)
    return weights / total


def selection_probability(fitnesses, index: int) -> float:
    """Probability of one member under the fitness-proportional scheme."""
    return float(selection_probabilities(fitnesses)[index])


def _open_unit(rng) -> float:
    """Uniform draw in the open interval (0, 1)."""
    u = rng.uniform()
    while u == 0.0:
        u = rng.uniform()
    return u


def select_probabilistic(positions, fitnesses, radius: float, rng) -> SelectionOutcome:
    """Crowding-aware probabilistic selection.

    Walks candidates best-first (fitness ties break to the lowest index).
    Each is accepted when its probability beats a fresh uniform draw; on
    acceptance every remaining member within ``radius`` (Euclidean, in search
    space coordinates) is eliminated, and a rejected candidate simply leaves
    the pool so the walk always terminates. Probabilities are computed once
    over the full population, so the strictly worst member can never be
    accepted.
    """
    positions = np.asarray(positions, dtype=np.float64)
    fitnesses = np.asarray(fitnesses, dtype=np.float64)
    if len(positions) == 0:
        raise ValueError("population must be non-empty")
    if not radius > 0:
        raise ValueError("radius must be positive")
    probabilities = selection_probabilities(fitnesses)
    order = np.argsort(fitnesses, kind="stable")
    alive = np.ones(len(positions), dtype=bool)
    selected: list[int] = []
    for index in order:
        if not alive[index]:
            continue
        alive[index] = False
        if probabilities[index] >= _open_unit(rng):
            selected.append(int(index))
            distances = np.linalg.norm(positions - positions[index], axis=1)
            alive &= distances > radius
    return SelectionOutcome(selected=selected, probabilities_used=probabilities)


def select_for_variant(strategy: SelectionStrategy, positions, fitnesses, rng) -> SelectionOutcome:
    """Dispatch to the configured strategy over the current population."""
    fitnesses = np.asarray(fitnesses, dtype=np.float64)
    n = fitnesses.size
    if n == 0:
        raise ValueError("population must be non-empty")
    if strategy.variant == "all":
        return SelectionOutcome(selected=list(range(n)), probabilities_used=np.ones(n))
    if strategy.variant == "fixed_probability":
        p = strategy.probability
        selected = [i for i in range(n) if rng.uniform() < p]
        return SelectionOutcome(selected=selected, probabilities_used=np.full(n, p))
    if strategy.variant == "top_k":
        k = min(strategy.k, n)
        selected = [int(i) for i in np.argsort(fitnesses, kind="stable")[:k]]
        probabilities = np.zeros(n)
        probabilities[selected] = 1.0
        return SelectionOutcome(selected=selected, probabilities_used=probabilities)
    return select_probabilistic(positions, fitnesses, strategy.radius, rng)


__all__ = [
    "SelectionStrategy",
    "SelectionOutcome",
    "selection_probabilities",
    "selection_probability",
    "select_probabilistic",
    "select_for_variant",
]
