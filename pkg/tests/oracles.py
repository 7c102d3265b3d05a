"""Independent reference implementations and frozen reference values.

Nothing here imports the operator or dynamics code under test; the oracles
work from vertex lists and loops only.
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import quad

# Mean drift rate of d theta/dt = -a - sin(3 theta + b) for a > 1, from
# quadrature over one period of the phase (frozen; b does not matter).
TRIANGLE_DRIFT = {1.1: -0.4582575694955841, 1.5: -1.118033988749895}


def triangle_drift_quadrature(a: float, b: float) -> float:
    period = quad(lambda th: 1.0 / abs(a + np.sin(3 * th + b)), 0.0, 2 * np.pi / 3, epsabs=1e-13, epsrel=1e-13)[0]
    return -(2 * np.pi / 3) / period


def triangle_fixed_point(a1: float, a2: float) -> float:
    return (np.arcsin(-a1) - a2) / 3.0


def boundary_from_vertices(upper, upper_signs, lower, lower_signs) -> np.ndarray:
    """Signed boundary matrix from oriented vertex lists.

    The boundary of an oriented simplex [v_0, ..., v_m] is the alternating sum
    of its faces with v_i removed; a face listed with sign -1 absorbs a minus.
    """
    lookup = {tuple(f): (i, s) for i, (f, s) in enumerate(zip(lower, lower_signs))}
    out = np.zeros((len(upper), len(lower)))
    for row, (simplex, sign) in enumerate(zip(upper, upper_signs)):
        simplex = list(simplex)
        for i in range(len(simplex)):
            face = tuple(simplex[:i] + simplex[i + 1 :])
            col, fsign = lookup[face]
            out[row, col] += sign * (-1) ** i * fsign
    return out


def node_kuramoto(A: np.ndarray, omega: np.ndarray, alpha: float, theta: np.ndarray) -> np.ndarray:
    """``omega_i - sum_j A_ij sin(theta_i - theta_j + alpha)`` by explicit loops."""
    n = len(theta)
    out = np.array(omega, dtype=float)
    for i in range(n):
        for j in range(n):
            if A[i, j]:
                out[i] -= A[i, j] * np.sin(theta[i] - theta[j] + alpha)
    return out


def finite_difference_gradient(f, x: np.ndarray, h: float = 1e-6) -> np.ndarray:
    g = np.zeros_like(x)
    for i in range(len(x)):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (f(x + e) - f(x - e)) / (2 * h)
    return g


def random_graph(rng: np.random.Generator, n: int, p: float = 0.4) -> np.ndarray:
    """Symmetric 0/1 adjacency matrix with at least one edge."""
    while True:
        upper = np.triu(rng.random((n, n)) < p, 1)
        if upper.any():
            return (upper | upper.T).astype(float)
