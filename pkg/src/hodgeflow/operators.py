"""Coboundary, weight, lift and sign-projection operators on a complex.

Conventions: ``incidence(c, k)`` is ``B_k`` with shape ``(n_{k+1}, n_k)`` and
acts as the coboundary ``N_k`` on k-cochains. Its weighted adjoint is
``N_k^* = W_k B_k^T W_{k+1}^{-1}``. The face of a (k+1)-simplex obtained by
dropping the vertex at position i gets sign ``(-1)^i`` times the orientation
signs of both simplices.

All results are dense, read-only arrays cached on the complex.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .complex import SimplicialComplex
from .errors import OrderError

FloatArray = NDArray[np.float64]


def _cached(c: SimplicialComplex, key, build):
    if key not in c._cache:
        out = build()
        if isinstance(out, np.ndarray):
            out.setflags(write=False)
        c._cache[key] = out
    return c._cache[key]


def _check_coboundary_order(c: SimplicialComplex, k: int) -> None:
    if not 0 <= k <= c.max_order - 1:
        raise OrderError(f"coboundary order {k} needs 0 <= k <= {c.max_order - 1}")


def _unsigned_incidence(c: SimplicialComplex, k: int) -> FloatArray:
    faces = c.index(k)
    out = np.zeros((c.n(k + 1), c.n(k)))
    for row, simplex in enumerate(c.simplices[k + 1].tolist()):
        # combinations drops vertices from the end first
        for drop, face in zip(range(k + 1, -1, -1), combinations(simplex, k + 1)):
            out[row, faces[face]] = (-1) ** drop
    return out


def incidence(c: SimplicialComplex, k: int) -> FloatArray:
    """Signed incidence matrix ``B_k`` between k- and (k+1)-simplices."""
    _check_coboundary_order(c, k)

    def build():
        B = _unsigned_incidence(c, k)
        return c.orientations[k + 1][:, None] * B * c.orientations[k][None, :] + 0.0

    return _cached(c, ("B", k), build)


def coboundary(c: SimplicialComplex, k: int) -> FloatArray:
    """``N_k = B_k``."""
    return incidence(c, k)


def dual_coboundary(c: SimplicialComplex, k: int) -> FloatArray:
    """``N_k^* = W_k B_k^T W_{k+1}^{-1}``, shape ``(n_k, n_{k+1})``."""
    _check_coboundary_order(c, k)
    return _cached(
        c,
        ("Nstar", k),
        lambda: c.weights[k][:, None] * incidence(c, k).T / c.weights[k + 1][None, :],
    )


def _down_coboundary(c: SimplicialComplex, k: int) -> tuple[FloatArray, FloatArray]:
    """``(N_{k-1}, N_{k-1}^*)`` or empty stand-ins when k == 0."""
    if k == 0:
        return np.zeros((c.n(0), 0)), np.zeros((0, c.n(0)))
    return coboundary(c, k - 1), dual_coboundary(c, k - 1)


def _up_coboundary(c: SimplicialComplex, k: int) -> tuple[FloatArray, FloatArray]:
    """``(N_k, N_k^*)`` or empty stand-ins when k == max_order."""
    if k == c.max_order:
        return np.zeros((0, c.n(k))), np.zeros((c.n(k), 0))
    return coboundary(c, k), dual_coboundary(c, k)


def hodge_laplacian(c: SimplicialComplex, k: int) -> FloatArray:
    """``L_k = N_{k-1} N_{k-1}^* + N_k^* N_k``; missing terms are zero."""
    c._check_order(k)

    def build():
        Nd, Nds = _down_coboundary(c, k)
        Nu, Nus = _up_coboundary(c, k)
        return Nd @ Nds + Nus @ Nu

    return _cached(c, ("L", k), build)


def lift(n: int) -> FloatArray:
    """Lift matrix ``V = [I; -I]`` of shape ``(2n, n)``."""
    if n < 1:
        raise ValueError("lift needs n >= 1")
    eye = np.eye(n)
    return np.vstack([eye, -eye])


def pm_projection(X: ArrayLike, sign: str) -> FloatArray:
    """Element-wise positive (``"+"``) or negative (``"-"``) part of ``X``."""
    X = np.asarray(X, dtype=float)
    if sign == "+":
        return 0.5 * (X + np.abs(X))
    if sign == "-":
        return 0.5 * (X - np.abs(X))
    raise ValueError(f"sign must be '+' or '-', got {sign!r}")


def lifted_coboundary(c: SimplicialComplex, k: int) -> FloatArray:
    """``V_{k+1} N_k``, the coboundary onto doubled (k+1)-simplices."""
    _check_coboundary_order(c, k)
    return _cached(c, ("VN", k), lambda: lift(c.n(k + 1)) @ coboundary(c, k))


def lifted_dual_coboundary(c: SimplicialComplex, k: int, sign: str = "-") -> FloatArray:
    """``(N_k^* V_{k+1}^T)^{sign}``, shape ``(n_k, 2 n_{k+1})``."""
    _check_coboundary_order(c, k)
    return _cached(
        c,
        ("NstarV", k, sign),
        lambda: pm_projection(dual_coboundary(c, k) @ lift(c.n(k + 1)).T, sign),
    )


def lifted_laplacian_hat(c: SimplicialComplex, k: int) -> FloatArray:
    """Laplacian rebuilt from the lifted, sign-projected operators.

    The up term is ``(N_k^* V_{k+1}^T)^- V_{k+1} N_k``. The down term lifts the
    k-simplices, ``V_k^T (V_k N_{k-1})^- N_{k-1}^*``. Both reduce to the plain
    Hodge Laplacian terms, which is what makes the lifted form usable for
    frustration without changing the linear dynamics.
    """
    c._check_order(k)
    out = np.zeros((c.n(k), c.n(k)))
    if k > 0:
        V = lift(c.n(k))
        out += V.T @ pm_projection(V @ coboundary(c, k - 1), "-") @ dual_coboundary(c, k - 1)
    if k < c.max_order:
        out += lifted_dual_coboundary(c, k, "-") @ lifted_coboundary(c, k)
    return out


def lifted_laplacian_full(c: SimplicialComplex, k: int) -> FloatArray:
    """Laplacian on doubled k-simplices with both adjacent orders lifted.

    Shape ``(2 n_k, 2 n_k)``; ``0.5 * V_k^T L V_k`` recovers ``L_k``.
    """
    c._check_order(k)
    Vk = lift(c.n(k))
    out = np.zeros((2 * c.n(k), 2 * c.n(k)))
    if k > 0:
        Vd = lift(c.n(k - 1))
        N, Ns = coboundary(c, k - 1), dual_coboundary(c, k - 1)
        out += 0.5 * pm_projection(Vk @ N @ Vd.T, "-") @ (Vd @ Ns @ Vk.T)
    if k < c.max_order:
        Vu = lift(c.n(k + 1))
        N, Ns = coboundary(c, k), dual_coboundary(c, k)
        out += 0.5 * pm_projection(Vk @ Ns @ Vu.T, "-") @ (Vu @ N @ Vk.T)
    return out


def generalized_degree(c: SimplicialComplex, k: int) -> FloatArray:
    """``(N_k^* V_{k+1}^T)^- 1``.

    Entry i is minus the weighted number of (k+1)-simplices incident to
    k-simplex i, each counted with ``w_k[i] / w_{k+1}[j]``.
    """
    _check_coboundary_order(c, k)
    return lifted_dual_coboundary(c, k, "-").sum(axis=1)


def weighted_inner(c: SimplicialComplex, k: int, x: ArrayLike, y: ArrayLike) -> float:
    """Inner product ``<x, y> = x^T W_k^{-1} y`` on k-cochains."""
    return float(np.asarray(x) @ (np.asarray(y) / c.weights[k]))
