"""Local exploitation: rood-pattern direct search with step halving.

Each poll round evaluates the clamped stencil around the incumbent. Any
strict improvement moves the center to the best neighbor and resets the step
to its initial value; otherwise the step halves. The search stops when the
step falls below its minimum, the poll limit is hit, or the evaluation
budget runs out. The result never scores worse than the starting point.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .space import SearchSpace, clamp


def rood_pattern(dims: int) -> np.ndarray:
    """Unit offsets +e_1..+e_D, -e_1..-e_D, then the zero column (dims x 2D+1)."""
    eye = np.eye(dims)
    return np.hstack([eye, -eye, np.zeros((dims, 1))])


@dataclass
class PatternConfig:
    """Stencil search settings; min_step defaults to an eighth of the initial step."""

    initial_step: float = 1.0
    min_step: Optional[float] = None
    max_polls: int = 20
    pattern: Optional[np.ndarray] = None

    def __post_init__(self):
        if not self.initial_step > 0:
            raise ValueError("initial_step must be positive")
        if self.min_step is None:
            self.min_step = self.initial_step / 8.0
        if not (0 < self.min_step <= self.initial_step):
            raise ValueError("min_step must be in (0, initial_step]")
        if self.max_polls < 1:
            raise ValueError("max_polls must be positive")
        if self.pattern is not None:
            self.pattern = np.asarray(self.pattern, dtype=np.float64)
            _validate_pattern(self.pattern)

    def pattern_for(self, dims: int) -> np.ndarray:
        if self.pattern is not None:
            if self.pattern.shape[0] != dims:
                raise ValueError(
                    f"pattern has {self.pattern.shape[0]} rows, search space has {dims} dims"
                )
            return self.pattern
        return rood_pattern(dims)


def _validate_pattern(pattern: np.ndarray) -> None:
    if pattern.ndim != 2:
        raise ValueError("pattern must be a (dims x columns) matrix")
    columns = [tuple(col) for col in pattern.T]
    if len(set(columns)) != len(columns):
        raise ValueError("pattern columns must be distinct")
    dims = pattern.shape[0]
    required = {tuple(row) for row in np.vstack([np.eye(dims), -np.eye(dims), np.zeros((1, dims))])}
    if not required.issubset(set(columns)):
        raise ValueError("pattern must include +/- each unit axis direction and the zero column")


@dataclass
class RefinementResult:
    point: np.ndarray
    fitness: float
    evaluations_used: int
    polls: int


def poll_points(
    center: np.ndarray, step: float, config: PatternConfig, space: SearchSpace
) -> list[np.ndarray]:
    """Stencil around the center, clamped into the box, deduplicated in column order.

    The zero column contributes nothing (the center is already scored), and a
    point that clamps onto the center or onto an earlier poll point is
    dropped without costing an evaluation.
    """
    if not step > 0:
        raise ValueError("step must be positive")
    center = np.asarray(center, dtype=np.float64)
    pattern = config.pattern_for(space.dims)
    points: list[np.ndarray] = []
    seen = {tuple(center)}
    for column in pattern.T:
        if not column.any():
            continue
        point = clamp(center + step * column, space)
        key = tuple(point)
        if key in seen:
            continue
        seen.add(key)
        points.append(point)
    return points


def refine(
    start: np.ndarray,
    start_fitness: float,
    objective: Callable[[np.ndarray], float],
    config: PatternConfig,
    space: SearchSpace,
    eval_budget: int,
) -> RefinementResult:
    """Run the stencil search from an already-scored start point.

    ``start_fitness`` must be the objective value at ``start``; the center is
    never re-evaluated. Exactly ``evaluations_used`` objective calls are made,
    never more than ``eval_budget``.
    """
    if eval_budget < 0:
        raise ValueError("eval_budget must be non-negative")
    center = np.asarray(start, dtype=np.float64).copy()
    center_fitness = float(start_fitness)
    step = config.initial_step
    evaluations = 0
    polls = 0
    while polls < config.max_polls and step >= config.min_step and evaluations < eval_budget:
        best_point = None
        best_fitness = center_fitness
        for point in poll_points(center, step, config, space):
            if evaluations >= eval_budget:
                break
            value = objective(point)
            evaluations += 1
            if value < best_fitness:  # strict improvement; earlier column wins ties
                best_fitness = value
                best_point = point
        polls += 1
        if best_point is not None:
            center = best_point
            center_fitness = best_fitness
            step = config.initial_step
        else:
            step /= 2.0
    return RefinementResult(
        point=center, fitness=center_fitness, evaluations_used=evaluations, polls=polls
    )


__all__ = ["PatternConfig", "RefinementResult", "rood_pattern", "poll_points", "refine"]
