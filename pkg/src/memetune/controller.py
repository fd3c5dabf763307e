"""Run orchestration: the memetic loop, the plain-swarm baseline, and grid search.

A single run-level accounting wrapper owns the evaluation counter, the
best-so-far trace, the evaluation budget, and the evaluation-granular stall
clock; every objective call anywhere in a run goes through it. The memetic
loop per generation: score the swarm, refresh bests, pick members to refine,
run the stencil search on each (writing refined points back into the swarm,
personal bests included), then take the swarm step.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .pattern_search import PatternConfig, refine
from .pso import PsoConfig, init_swarm, inertia_at, step_position, step_velocity, update_bests
from .selection import SelectionStrategy, select_for_variant
from .space import SearchSpace

ALGORITHMS = ("pso", "ma1", "ma2", "ma3", "ma4", "gs")

_STRATEGY_BY_ALGORITHM = {
    "ma1": SelectionStrategy.all_members(),
    "ma2": SelectionStrategy.fixed_probability(0.1),
    "ma3": SelectionStrategy.top_k(2),
    "ma4": SelectionStrategy.probabilistic(2.0),
}


def strategy_for(algorithm: str) -> Optional[SelectionStrategy]:
    """The refinement-selection policy implied by an algorithm tag (None for pso/gs)."""
    return _STRATEGY_BY_ALGORITHM.get(algorithm)


@dataclass
class RunConfig:
    """Everything a single optimization run needs apart from the objective."""

    algorithm: str = "ma4"
    space: SearchSpace = field(default_factory=SearchSpace.svm_default)
    pso: PsoConfig = field(default_factory=PsoConfig)
    pattern: PatternConfig = field(default_factory=PatternConfig)
    strategy: Optional[SelectionStrategy] = None
    max_evaluations: int = 1500
    stall_evaluations: int = 450
    grid_step: float = 0.5
    seed: int = 0

    def __post_init__(self):
        algorithm = self.algorithm.lower()
        if algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}; expected one of {ALGORITHMS}")
        self.algorithm = algorithm
        derived = strategy_for(algorithm)
        if self.strategy is None:
            self.strategy = derived
        elif derived is not None and self.strategy.variant != derived.variant:
            raise ValueError(
                f"strategy variant {self.strategy.variant!r} is inconsistent with {algorithm}"
            )
        if self.max_evaluations < self.pso.population_size:
            raise ValueError("max_evaluations must cover at least one full swarm evaluation")
        if self.stall_evaluations < 1:
            raise ValueError("stall_evaluations must be positive")


@dataclass
class RunResult:
    """Outcome of one run; trace pairs are (evaluation_count, best_fitness_so_far)."""

    best_position: np.ndarray
    best_fitness: float
    evaluations: int
    iterations: int
    trace: list[tuple[int, float]]
    seed: int
    wall_time: float


class _RunHalted(Exception):
    """Internal control flow: budget or stall fired inside the accounting wrapper."""


class _Accounting:
    """Counts every objective call, tracks the best-so-far, enforces budget and stall.

    Checks run before an evaluation starts, so a run never begins a call it
    has no budget for and stops on the exact evaluation at which the stall
    window closes. The stall clock opens once the initial population has been
    scored (``open_stall_clock``).
    """

    def __init__(self, objective, max_evaluations: int, stall_evaluations: Optional[int]):
        self.objective = objective
        self.max_evaluations = max_evaluations
        self.stall_evaluations = stall_evaluations
        self.evaluations = 0
        self.best_fitness = math.inf
        self.best_position: Optional[np.ndarray] = None
        self.trace: list[tuple[int, float]] = []
        self.last_improvement: Optional[int] = None

    def open_stall_clock(self) -> None:
        self.last_improvement = self.evaluations

    def should_stop(self) -> bool:
        if self.evaluations >= self.max_evaluations:
            return True
        return (
            self.stall_evaluations is not None
            and self.last_improvement is not None
            and self.evaluations - self.last_improvement >= self.stall_evaluations
        )

    def __call__(self, position: np.ndarray) -> float:
        if self.should_stop():
            raise _RunHalted
        value = float(self.objective(position))
        if not math.isfinite(value):
            value = math.inf  # worst possible; the run continues
        self.evaluations += 1
        improved = value < self.best_fitness
        if improved or self.best_position is None:
            self.best_position = np.array(position, dtype=np.float64, copy=True)
        if improved:
            self.best_fitness = value
            if self.last_improvement is not None:
                self.last_improvement = self.evaluations
        self.trace.append((self.evaluations, self.best_fitness))
        return value


def check_termination(
    config: RunConfig,
    evaluations: int,
    evaluations_since_improvement: Optional[int] = None,
    iterations: int = 0,
    iterations_since_improvement: int = 0,
) -> bool:
    """Termination predicate shared by the run loops.

    Stops on the evaluation budget; additionally on the evaluation-granular
    stall window for memetic runs, and on the iteration cap or the
    iteration-granular stall window for the plain swarm.
    """
    if evaluations >= config.max_evaluations:
        return True
    if config.algorithm == "pso":
        return (
            iterations >= config.pso.max_iterations
            or iterations_since_improvement >= config.pso.stall_iterations
        )
    if evaluations_since_improvement is not None:
        return evaluations_since_improvement >= config.stall_evaluations
    return False


def run(config: RunConfig, objective: Callable[[np.ndarray], float]) -> RunResult:
    """Execute one seeded optimization run of the configured algorithm."""
    if config.algorithm == "gs":
        return grid_search(config.space, config.grid_step, objective, seed=config.seed)
    started = time.perf_counter()
    accounting = _Accounting(
        objective,
        config.max_evaluations,
        config.stall_evaluations if config.algorithm != "pso" else None,
    )
    rng = np.random.default_rng(config.seed)
    swarm = init_swarm(config.space, config.pso, rng)
    stall_iterations = 0
    try:
        while True:
            fitnesses = [accounting(p.position) for p in swarm.particles]
            previous_best = swarm.gbest_fitness
            update_bests(swarm, fitnesses)
            if swarm.iteration == 0:
                accounting.open_stall_clock()
            swarm.iteration += 1
            if config.algorithm == "pso":
                stall_iterations = 0 if swarm.gbest_fitness < previous_best else stall_iterations + 1
                if check_termination(
                    config,
                    accounting.evaluations,
                    iterations=swarm.iteration,
                    iterations_since_improvement=stall_iterations,
                ):
                    break
            else:
                _refine_selected(config, swarm, fitnesses, accounting, rng)
            w = inertia_at(swarm.iteration - 1, config.pso)
            for particle in swarm.particles:
                particle.velocity = step_velocity(
                    particle, swarm.gbest_position, w, config.pso, config.space, rng
                )
            for particle in swarm.particles:
                step_position(particle, config.space)
    except _RunHalted:
        pass
    return RunResult(
        best_position=accounting.best_position,
        best_fitness=accounting.best_fitness,
        evaluations=accounting.evaluations,
        iterations=swarm.iteration,
        trace=accounting.trace,
        seed=config.seed,
        wall_time=time.perf_counter() - started,
    )


def _refine_selected(config, swarm, fitnesses, accounting, rng) -> None:
    """Refine the selected particles in place (position, fitness, and bests)."""
    positions = np.array([p.position for p in swarm.particles])
    outcome = select_for_variant(config.strategy, positions, np.asarray(fitnesses), rng)
    for index in outcome.selected:
        particle = swarm.particles[index]
        remaining = config.max_evaluations - accounting.evaluations
        result = refine(
            particle.position,
            fitnesses[index],
            accounting,
            config.pattern,
            config.space,
            remaining,
        )
        particle.position = result.point.copy()
        fitnesses[index] = result.fitness
        if result.fitness < particle.pbest_fitness:
            particle.pbest_fitness = result.fitness
            particle.pbest_position = result.point.copy()
        if result.fitness < swarm.gbest_fitness:
            swarm.gbest_fitness = result.fitness
            swarm.gbest_position = result.point.copy()
        if accounting.should_stop():
            raise _RunHalted


def grid_search(
    space: SearchSpace,
    step: float,
    objective: Callable[[np.ndarray], float],
    seed: int = 0,
) -> RunResult:
    """Exhaustively score the lattice lower + i*step per dimension, endpoints included.

    The step must divide every dimension's range; ties go to the
    lexicographically smallest coordinate.
    """
    if not step > 0:
        raise ValueError("step must be positive")
    counts = []
    for d in range(space.dims):
        ratio = space.range[d] / step
        if abs(ratio - round(ratio)) > 1e-9:
            raise ValueError(
                f"step {step} does not divide the range of dimension {d} ({space.range[d]})"
            )
        counts.append(int(round(ratio)) + 1)
    started = time.perf_counter()
    total = int(np.prod(counts))
    accounting = _Accounting(objective, max_evaluations=total, stall_evaluations=None)
    axes = [space.lower[d] + step * np.arange(counts[d]) for d in range(space.dims)]
    for index in np.ndindex(*counts):
        accounting(np.array([axes[d][index[d]] for d in range(space.dims)]))
    return RunResult(
        best_position=accounting.best_position,
        best_fitness=accounting.best_fitness,
        evaluations=accounting.evaluations,
        iterations=0,
        trace=accounting.trace,
        seed=seed,
        wall_time=time.perf_counter() - started,
    )
