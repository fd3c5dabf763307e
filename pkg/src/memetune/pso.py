"""Swarm-based global exploration: initialization, velocity/position updates, bests.

Updates are synchronous: every velocity is computed against the previous
generation's global best, then all positions move, then bests refresh. That
keeps trajectories bit-identical regardless of particle ordering or any
evaluation parallelism.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .space import SearchSpace, clamp


@dataclass
class PsoConfig:
    """Swarm settings; defaults follow the standard tuning setup."""

    population_size: int = 15
    c1: float = 2.0
    c2: float = 2.0
    w_start: float = 1.2
    w_end: float = 0.8
    max_iterations: int = 100
    stall_iterations: int = 30

    def __post_init__(self):
        if self.population_size < 2:
            raise ValueError("population_size must be at least 2")
        if self.w_start < self.w_end:
            raise ValueError("w_start must be >= w_end")
        if self.max_iterations < 1 or self.stall_iterations < 1:
            raise ValueError("iteration limits must be positive")


@dataclass
class Particle:
    position: np.ndarray
    velocity: np.ndarray
    pbest_position: np.ndarray
    pbest_fitness: float = math.inf


@dataclass
class Swarm:
    particles: list[Particle]
    gbest_position: np.ndarray = None
    gbest_fitness: float = math.inf
    iteration: int = 0


def init_swarm(space: SearchSpace, config: PsoConfig, rng) -> Swarm:
    """Uniform positions in the box and uniform velocities within the cap.

    Each coordinate is lower + r * (upper - lower) with a fresh uniform r in
    [0, 1]; velocities draw the same way over [-cap, +cap]. Personal bests
    start at the initial positions with fitness unset (infinity).
    """
    cap = space.velocity_cap
    particles = []
    for _ in range(config.population_size):
        position = space.lower + rng.uniform(size=space.dims) * space.range
        velocity = -cap + rng.uniform(size=space.dims) * (2.0 * cap)
        particles.append(Particle(position, velocity, position.copy()))
    return Swarm(particles=particles, gbest_position=particles[0].position.copy())


def inertia_at(iteration: int, config: PsoConfig) -> float:
    """Linearly decreasing inertia from w_start at iteration 0 to w_end at the last."""
    last = max(config.max_iterations - 1, 1)
    t = min(max(iteration, 0), last)
    return config.w_start - (config.w_start - config.w_end) * t / last


def step_velocity(
    particle: Particle,
    gbest: np.ndarray,
    w: float,
    config: PsoConfig,
    space: SearchSpace,
    rng,
) -> np.ndarray:
    """New velocity: inertia plus pbest/gbest attraction, clamped to the cap.

    r1 and r2 are scalar draws shared across dimensions, one fresh pair per
    update.
    """
    r1 = rng.uniform()
    r2 = rng.uniform()
    velocity = (
        w * particle.velocity
        + config.c1 * r1 * (particle.pbest_position - particle.position)
        + config.c2 * r2 * (gbest - particle.position)
    )
    cap = space.velocity_cap
    return np.clip(velocity, -cap, cap)


def step_position(particle: Particle, space: SearchSpace) -> np.ndarray:
    """Move by the current velocity, clamp into the box, zero clipped components."""
    raw = particle.position + particle.velocity
    clipped = (raw < space.lower) | (raw > space.upper)
    particle.position = clamp(raw, space)
    particle.velocity = np.where(clipped, 0.0, particle.velocity)
    return particle.position


def update_bests(swarm: Swarm, fitnesses) -> Swarm:
    """Refresh personal and global bests; only strict improvements replace, ties keep the incumbent.

    Non-finite fitnesses are treated as the worst possible value and never
    become a best.
    """
    fitnesses = np.asarray(fitnesses, dtype=np.float64)
    if fitnesses.shape != (len(swarm.particles),):
        raise ValueError("need exactly one fitness per particle")
    for particle, fitness in zip(swarm.particles, fitnesses):
        value = float(fitness) if math.isfinite(fitness) else math.inf
        if value < particle.pbest_fitness:
            particle.pbest_fitness = value
            particle.pbest_position = particle.position.copy()
    for particle in swarm.particles:
        if particle.pbest_fitness < swarm.gbest_fitness:
            swarm.gbest_fitness = particle.pbest_fitness
            swarm.gbest_position = particle.pbest_position.copy()
    return swarm


__all__ = [
    "PsoConfig",
    "Particle",
    "Swarm",
    "init_swarm",
    "inertia_at",
    "step_velocity",
    "step_position",
    "update_bests",
]
