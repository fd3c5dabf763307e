"""Bounded log2-scaled search space for (C, gamma) and the generic box used by all searchers.

Positions and velocities are plain float64 numpy vectors living in log2
parameter space; ``decode`` maps a position back to raw SVM parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SvmParams:
    """Raw SVM hyperparameters: penalty ``c`` and RBF width ``gamma`` (both > 0)."""

    c: float
    gamma: float

    def __post_init__(self):
        if not (self.c > 0 and math.isfinite(self.c)):
            raise ValueError(f"penalty c must be a positive finite number, got {self.c}")
        if not (self.gamma > 0 and math.isfinite(self.gamma)):
            raise ValueError(f"gamma must be a positive finite number, got {self.gamma}")


@dataclass(frozen=True)
class SearchSpace:
    """A D-dimensional box with a per-dimension velocity cap.

    ``velocity_cap_fraction`` is the fraction of each dimension's range used
    as the absolute velocity limit (0.1 -> |v_d| <= 0.1 * (upper_d - lower_d)).
    """

    lower: np.ndarray
    upper: np.ndarray
    velocity_cap_fraction: float = 0.1

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=np.float64)
        upper = np.asarray(self.upper, dtype=np.float64)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        if lower.ndim != 1 or lower.shape != upper.shape or lower.size == 0:
            raise ValueError("lower and upper must be 1-D vectors of equal, nonzero length")
        if not np.all(lower < upper):
            raise ValueError("every lower bound must be strictly below its upper bound")
        if not (0 < self.velocity_cap_fraction <= 1):
            raise ValueError("velocity_cap_fraction must be in (0, 1]")

    @property
    def dims(self) -> int:
        return self.lower.size

    @property
    def range(self) -> np.ndarray:
        return self.upper - self.lower

    @property
    def velocity_cap(self) -> np.ndarray:
        """Per-dimension absolute velocity limit."""
        return self.velocity_cap_fraction * self.range

    @classmethod
    def svm_default(cls) -> "SearchSpace":
        """The standard tuning box: log2 C and log2 gamma both in [-10, 10]."""
        return cls(lower=np.array([-10.0, -10.0]), upper=np.array([10.0, 10.0]))


def encode(params: SvmParams) -> np.ndarray:
    """Map raw (c, gamma) to a position (log2 c, log2 gamma)."""
    return np.array([math.log2(params.c), math.log2(params.gamma)], dtype=np.float64)


def decode(position: np.ndarray) -> SvmParams:
    """Map a log2-space position back to raw (c, gamma)."""
    position = np.asarray(position, dtype=np.float64)
    if position.shape != (2,) or not np.all(np.isfinite(position)):
        raise ValueError(f"expected a finite 2-vector, got {position!r}")
    return SvmParams(c=float(2.0 ** position[0]), gamma=float(2.0 ** position[1]))


def clamp(position: np.ndarray, space: SearchSpace) -> np.ndarray:
    """Project a position into the box; in-bounds input comes back unchanged."""
    return np.clip(np.asarray(position, dtype=np.float64), space.lower, space.upper)


__all__ = ["SvmParams", "SearchSpace", "encode", "decode", "clamp"]
