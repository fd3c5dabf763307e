"""Binary SVM engine: kernels, an SMO solver for the box-constrained dual, prediction.

The solver repeatedly optimizes the maximal-KKT-violating pair analytically:
the first index is the most violating one on the "can increase" side, the
second maximizes the error gap against it. Training stops when the violating
gap drops below the KKT tolerance, or after ``max_passes`` pair updates
(non-convergence is soft: the returned model is still usable for scoring).

The inner loop is compiled with numba when available; the plain-Python
function is identical and keeps everything runnable without it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap


_KINDS = ("linear", "polynomial", "rbf", "sigmoid")


@dataclass(frozen=True)
class Kernel:
    """One of the classic Mercer kernels; ``coef0``/``degree`` apply where relevant."""

    kind: str
    gamma: float = 1.0
    coef0: float = 0.0
    degree: int = 3

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown kernel kind {self.kind!r}; expected one of {_KINDS}")
        if self.kind in ("polynomial", "rbf") and not self.gamma > 0:
            raise ValueError(f"{self.kind} kernel requires gamma > 0")
        if self.kind == "polynomial" and self.degree < 1:
            raise ValueError("polynomial degree must be a positive integer")

    @classmethod
    def linear(cls) -> "Kernel":
        return cls("linear")

    @classmethod
    def rbf(cls, gamma: float) -> "Kernel":
        return cls("rbf", gamma=gamma)

    @classmethod
    def polynomial(cls, gamma: float, coef0: float = 0.0, degree: int = 3) -> "Kernel":
        return cls("polynomial", gamma=gamma, coef0=coef0, degree=degree)

    @classmethod
    def sigmoid(cls, gamma: float, coef0: float = 0.0) -> "Kernel":
        return cls("sigmoid", gamma=gamma, coef0=coef0)


@dataclass
class SmoConfig:
    """Solver knobs: KKT tolerance, pass cap, Gram size limit.

    One pass is worth one pair update per training point; ``max_passes=None``
    defaults to 10 * n passes for an n-point training set.
    """

    kkt_tolerance: float = 1e-3
    max_passes: Optional[int] = None
    cache_size: int = 8192

    def __post_init__(self):
        if not self.kkt_tolerance > 0:
            raise ValueError("kkt_tolerance must be positive")
        if self.max_passes is not None and self.max_passes < 1:
            raise ValueError("max_passes must be a positive integer")


@dataclass
class SvmModel:
    """A trained dual solution: multipliers, bias, and references to the training data."""

    alphas: np.ndarray
    bias: float
    support_indices: np.ndarray
    labels: np.ndarray
    vectors: np.ndarray
    kernel: Kernel
    c: float
    converged: bool = True
    iterations: int = 0
    train_margins: np.ndarray = field(repr=False, default=None)


def kernel_eval(kernel: Kernel, a: np.ndarray, b: np.ndarray) -> float:
    """Kernel value for a single pair of feature vectors."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(kernel_matrix(kernel, a[None, :], b[None, :])[0, 0])


def kernel_matrix(kernel: Kernel, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    """Dense kernel matrix K[i, j] = k(rows[i], cols[j])."""
    rows = np.asarray(rows, dtype=np.float64)
    cols = np.asarray(cols, dtype=np.float64)
    if rows.shape[1] != cols.shape[1]:
        raise ValueError(f"dimension mismatch: {rows.shape[1]} vs {cols.shape[1]}")
    if kernel.kind == "linear":
        return rows @ cols.T
    if kernel.kind == "rbf":
        return np.exp(-kernel.gamma * squared_distances(rows, cols))
    if kernel.kind == "polynomial":
        return (kernel.gamma * (rows @ cols.T) + kernel.coef0) ** kernel.degree
    return np.tanh(kernel.gamma * (rows @ cols.T) + kernel.coef0)


def squared_distances(rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    """Pairwise squared Euclidean distances, clipped at zero against roundoff."""
    rr = (rows * rows).sum(axis=1)[:, None]
    cc = (cols * cols).sum(axis=1)[None, :]
    d2 = rr + cc - 2.0 * (rows @ cols.T)
    return np.maximum(d2, 0.0)


def _solve_pairs(K, y, c, tol, max_iter):
    """Pair-update loop on a precomputed kernel matrix.

    Maintains u_i = sum_j alpha_j y_j K_ij (bias-free margins) with
    E_i = u_i - y_i. The first index is the most violating one on the
    "can increase" side (minimal E); the second maximizes the second-order
    gain (E_i - E_t)^2 / (2 eta) among admissible partners, which is what
    makes the ill-conditioned large-C corners converge in practice. The
    violating gap max E over "can decrease" minus min E over "can increase"
    drives the stop rule. Ties break toward the lowest index.
    """
    n = K.shape[0]
    alpha = np.zeros(n)
    u = np.zeros(n)
    snap = 1e-12 * c  # roundoff guard: multipliers this close to a bound sit on it
    iterations = 0
    converged = False
    while True:
        i = -1
        e_min = np.inf
        e_max = -np.inf
        for t in range(n):
            e = u[t] - y[t]
            if ((y[t] > 0.0 and alpha[t] < c - snap) or (y[t] < 0.0 and alpha[t] > snap)) and e < e_min:
                e_min = e
                i = t
            if ((y[t] > 0.0 and alpha[t] > snap) or (y[t] < 0.0 and alpha[t] < c - snap)) and e > e_max:
                e_max = e
        if i < 0 or e_max - e_min <= tol:
            converged = True
            break
        if iterations >= max_iter:
            break
        j = -1
        best_gain = 0.0
        for t in range(n):
            if not ((y[t] > 0.0 and alpha[t] > snap) or (y[t] < 0.0 and alpha[t] < c - snap)):
                continue
            diff = (u[t] - y[t]) - e_min
            if diff <= 0.0:
                continue
            eta_t = K[i, i] + K[t, t] - 2.0 * K[i, t]
            if eta_t < 1e-12:
                eta_t = 1e-12
            gain = diff * diff / eta_t
            if gain > best_gain:
                best_gain = gain
                j = t
        if j < 0:
            break
        same_sign = y[i] * y[j] > 0.0
        if same_sign:
            lo = max(0.0, alpha[i] + alpha[j] - c)
            hi = min(c, alpha[i] + alpha[j])
        else:
            lo = max(0.0, alpha[j] - alpha[i])
            hi = min(c, c + alpha[j] - alpha[i])
        eta = K[i, i] + K[j, j] - 2.0 * K[i, j]
        if eta < 1e-12:
            eta = 1e-12
        aj = alpha[j] + y[j] * ((u[i] - y[i]) - (u[j] - y[j])) / eta
        if aj < lo:
            aj = lo
        elif aj > hi:
            aj = hi
        ai = alpha[i] + y[i] * y[j] * (alpha[j] - aj)
        if aj < snap:
            aj = 0.0
        elif aj > c - snap:
            aj = c
        if ai < snap:
            ai = 0.0
        elif ai > c - snap:
            ai = c
        dai = ai - alpha[i]
        daj = aj - alpha[j]
        if dai == 0.0 and daj == 0.0:
            break  # numerically stuck pair; bail out as non-converged
        for t in range(n):
            u[t] += dai * y[i] * K[t, i] + daj * y[j] * K[t, j]
        alpha[i] = ai
        alpha[j] = aj
        iterations += 1
    return alpha, u, converged, iterations


if _HAVE_NUMBA:
    _solve_pairs_jit = njit("Tuple((f8[:], f8[:], b1, i8))(f8[:, ::1], f8[::1], f8, f8, i8)",
                            cache=True)(_solve_pairs)
else:  # pragma: no cover
    _solve_pairs_jit = _solve_pairs


def solve_dual(K: np.ndarray, y: np.ndarray, c: float, config: SmoConfig):
    """Solve the dual QP on a precomputed kernel matrix.

    Returns (alpha, bias, bias_free_margins u, converged, iterations).
    """
    K = np.ascontiguousarray(K, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    n = K.shape[0]
    passes = config.max_passes if config.max_passes is not None else 10 * n
    alpha, u, converged, iterations = _solve_pairs_jit(
        K, y, float(c), float(config.kkt_tolerance), int(passes) * n
    )
    bias = _bias(alpha, u, y, c)
    return alpha, bias, u, converged, iterations


def _bias(alpha: np.ndarray, u: np.ndarray, y: np.ndarray, c: float) -> float:
    """Average of y_i - u_i over free vectors; midpoint of the feasible interval otherwise."""
    neg_e = y - u
    free = (alpha > 0.0) & (alpha < c)
    if free.any():
        return float(neg_e[free].mean())
    low_side = ((y > 0) & (alpha <= 0.0)) | ((y < 0) & (alpha >= c))
    high_side = ((y > 0) & (alpha >= c)) | ((y < 0) & (alpha <= 0.0))
    lo = neg_e[low_side].max() if low_side.any() else None
    hi = neg_e[high_side].min() if high_side.any() else None
    if lo is None:
        return float(hi)
    if hi is None:
        return float(lo)
    return float(0.5 * (lo + hi))


def smo_train(data, c: float, kernel: Kernel, config: Optional[SmoConfig] = None) -> SvmModel:
    """Train a binary SVM on a Dataset-like object with labels in {-1, +1}."""
    config = config or SmoConfig()
    features = np.asarray(data.features, dtype=np.float64)
    labels = np.asarray(data.labels, dtype=np.float64)
    if not c > 0:
        raise ValueError("penalty c must be positive")
    if not (np.any(labels > 0) and np.any(labels < 0)):
        raise ValueError("training data must contain both classes")
    n = features.shape[0]
    if n > config.cache_size:
        raise ValueError(
            f"training set of {n} rows exceeds the kernel cache limit "
            f"({config.cache_size}); raise SmoConfig.cache_size"
        )
    K = kernel_matrix(kernel, features, features)
    alpha, bias, u, converged, iterations = solve_dual(K, labels, c, config)
    return SvmModel(
        alphas=alpha,
        bias=bias,
        support_indices=np.flatnonzero(alpha > 0.0),
        labels=labels,
        vectors=features,
        kernel=kernel,
        c=float(c),
        converged=converged,
        iterations=iterations,
        train_margins=u,
    )


def decision_values(model: SvmModel, points: np.ndarray) -> np.ndarray:
    """Pre-sign decision values for a batch of points."""
    points = np.asarray(points, dtype=np.float64)
    if points.ndim == 1:
        points = points[None, :]
    sv = model.support_indices
    if sv.size == 0:
        return np.full(points.shape[0], model.bias)
    K = kernel_matrix(model.kernel, points, model.vectors[sv])
    return K @ (model.alphas[sv] * model.labels[sv]) + model.bias


def decision_value(model: SvmModel, x: np.ndarray) -> float:
    """Pre-sign decision value for one point."""
    return float(decision_values(model, np.asarray(x))[0])


def predict(model: SvmModel, x: np.ndarray):
    """Label in {-1, +1}; a decision value of exactly zero maps to +1."""
    x = np.asarray(x, dtype=np.float64)
    values = decision_values(model, x)
    out = np.where(values >= 0.0, 1.0, -1.0)
    return float(out[0]) if x.ndim == 1 else out


def dual_objective(model: SvmModel) -> float:
    """Value of the dual objective sum(a) - 0.5 * (a*y)' K (a*y) at the model's multipliers."""
    sv = model.support_indices
    if sv.size == 0:
        return 0.0
    coef = model.alphas[sv] * model.labels[sv]
    K = kernel_matrix(model.kernel, model.vectors[sv], model.vectors[sv])
    return float(model.alphas[sv].sum() - 0.5 * coef @ K @ coef)


def kkt_violations(model: SvmModel) -> np.ndarray:
    """Per-point violation of the optimality conditions at the model's (alpha, bias).

    Zero everywhere (within the solver tolerance) means the model is optimal:
    margin-deficient free vectors, bound vectors on the wrong side, etc. all
    surface as positive entries.
    """
    yf = model.labels * (model.train_margins + model.bias)
    alpha = model.alphas
    viol = np.zeros_like(alpha)
    at_zero = alpha <= 0.0
    at_c = alpha >= model.c
    free = ~at_zero & ~at_c
    viol[at_zero] = np.maximum(0.0, 1.0 - yf[at_zero])
    viol[free] = np.abs(yf[free] - 1.0)
    viol[at_c] = np.maximum(0.0, yf[at_c] - 1.0)
    return viol


__all__ = [
    "Kernel",
    "SmoConfig",
    "SvmModel",
    "kernel_eval",
    "kernel_matrix",
    "squared_distances",
    "solve_dual",
    "smo_train",
    "decision_value",
    "decision_values",
    "predict",
    "dual_objective",
    "kkt_violations",
]
