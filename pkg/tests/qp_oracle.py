"""Independent projected-gradient solver for the SVM dual QP.

Used as the reference optimum when checking the trained models. Maximizes
    W(a) = sum(a) - 0.5 * a' Q a,   Q_ij = y_i y_j K_ij
subject to 0 <= a <= C and y'a = 0, by gradient ascent with exact projection
onto the feasible set (bisection on the equality multiplier). Deliberately
brute force and entirely separate from the package's solver.
"""

import numpy as np


def project_feasible(v, y, c, bisect_steps=80):
    """Euclidean projection of v onto {0 <= a <= C, y'a = 0}."""
    span = float(np.max(np.abs(v)) + c + 1.0)
    lo, hi = -span, span

    def shifted_sum(lam):
        return float(y @ np.clip(v - lam * y, 0.0, c))

    for _ in range(bisect_steps):
        mid = 0.5 * (lo + hi)
        if shifted_sum(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return np.clip(v - 0.5 * (lo + hi) * y, 0.0, c)


def solve_dual_reference(K, y, c, max_iters=200_000, tol=1e-12):
    """Projected-gradient ascent run to (near) convergence; returns (alpha, objective)."""
    K = np.asarray(K, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    Q = np.outer(y, y) * K
    n = len(y)
    step = 1.0 / (np.linalg.norm(Q, 2) + 1e-9)
    alpha = project_feasible(np.full(n, min(c, 1.0) * 0.5), y, c)
    best = -np.inf
    stagnant = 0
    for _ in range(max_iters):
        grad = 1.0 - Q @ alpha
        alpha = project_feasible(alpha + step * grad, y, c)
        value = float(alpha.sum() - 0.5 * alpha @ Q @ alpha)
        if value <= best + tol:
            stagnant += 1
            if stagnant >= 50:
                break
        else:
            stagnant = 0
        best = max(best, value)
    return alpha, best


def dual_value(K, y, alpha):
    Q = np.outer(y, y) * np.asarray(K, dtype=np.float64)
    alpha = np.asarray(alpha, dtype=np.float64)
    return float(alpha.sum() - 0.5 * alpha @ Q @ alpha)
