"""Hodge decomposition of k-cochains into gradient, curl and harmonic parts.

The decomposition is orthogonal in the inner product ``x^T W_k^{-1} y``, the one
for which ``N_k^*`` is the adjoint of ``N_k``. Computations run in whitened
coordinates ``y = W_k^{-1/2} x`` where ``L_k`` becomes the symmetric matrix
``W_k^{-1/2} L_k W_k^{1/2}`` and everything is plain Euclidean.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .complex import CochainVector, SimplicialComplex, cochain
from .errors import DecompositionError, DimensionError
from .operators import _down_coboundary, _up_coboundary, hodge_laplacian

FloatArray = NDArray[np.float64]

SUBSPACES = ("grad", "curl", "harm")


def _orthonormal_range(A: FloatArray, tol: float) -> FloatArray:
    """Orthonormal basis of the column space of A, as rows."""
    if A.size == 0:
        return np.zeros((0, A.shape[0]))
    U, s, _ = np.linalg.svd(A, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return np.zeros((0, A.shape[0]))
    return U[:, s > tol * s[0]].T


def _null_space(S: FloatArray, tol: float) -> FloatArray:
    """Orthonormal basis of the kernel of the symmetric matrix S, as rows."""
    n = S.shape[0]
    if n == 0:
        return np.zeros((0, 0))
    _, s, Vt = np.linalg.svd(S)
    scale = s[0] if s[0] > 0 else 1.0
    return Vt[s <= tol * scale]


def _fix_signs(rows: FloatArray) -> FloatArray:
    # deterministic sign: largest-magnitude entry of every row is positive
    if rows.size == 0:
        return rows
    pivot = np.argmax(np.abs(rows) > np.abs(rows).max(axis=1, keepdims=True) - 1e-12, axis=1)
    signs = np.sign(rows[np.arange(len(rows)), pivot])
    signs[signs == 0] = 1
    return rows * signs[:, None]


@dataclass(frozen=True, eq=False)
class HodgeBasis:
    """Bases of the three Hodge subspaces at order k.

    ``p_grad``, ``p_curl`` and ``p_harm`` hold basis vectors as rows, in the
    original cochain coordinates, orthonormal for ``x^T W_k^{-1} y``. With unit
    weights they are Euclidean-orthonormal and ``P = p^T p``.
    """

    order: int
    p_grad: FloatArray
    p_curl: FloatArray
    p_harm: FloatArray
    weights: FloatArray
    tolerance: float
    complex_id: str

    def basis(self, subspace: str) -> FloatArray:
        if subspace not in SUBSPACES:
            raise ValueError(f"unknown subspace {subspace!r}")
        return getattr(self, f"p_{subspace}")

    def coordinates(self, subspace: str, theta: ArrayLike) -> FloatArray:
        """Coefficients of ``theta`` along the basis vectors.

        ``theta`` may be a single cochain or a ``(..., n_k)`` stack of them.
        """
        return (np.asarray(theta) / self.weights) @ self.basis(subspace).T

    def projector(self, subspace: str) -> FloatArray:
        """Matrix ``P`` with ``P theta`` the projection onto ``subspace``."""
        p = self.basis(subspace)
        return p.T @ (p / self.weights[None, :])

    @property
    def n(self) -> int:
        return len(self.weights)

    @property
    def dims(self) -> dict[str, int]:
        return {s: len(self.basis(s)) for s in SUBSPACES}


def hodge_bases(c: SimplicialComplex, k: int, tol: float = 1e-10) -> HodgeBasis:
    """Orthonormal bases of ``Im N_{k-1}``, ``Im N_k^*`` and ``ker L_k``.

    Ranks are cut at ``tol`` times the largest singular value of each operator.

    Raises:
        DecompositionError: the three dimensions do not add up to ``n_k``.
    """
    c._check_order(k)
    key = ("hodge", k, tol)
    if key in c._cache:
        return c._cache[key]
    w = c.weights[k]
    sqrt_w = np.sqrt(w)
    Nd, _ = _down_coboundary(c, k)
    _, Nus = _up_coboundary(c, k)
    L = hodge_laplacian(c, k)

    q_grad = _orthonormal_range(Nd / sqrt_w[:, None], tol)
    q_curl = _orthonormal_range(Nus / sqrt_w[:, None], tol)
    S = L * sqrt_w[None, :] / sqrt_w[:, None]
    q_harm = _null_space(0.5 * (S + S.T), tol)

    dims = len(q_grad) + len(q_curl) + len(q_harm)
    if dims != c.n(k):
        raise DecompositionError(
            f"order {k}: grad {len(q_grad)} + curl {len(q_curl)} + harm {len(q_harm)} != n_k={c.n(k)}; "
            "check the rank tolerance"
        )
    bases = [_fix_signs(q * sqrt_w[None, :]) for q in (q_grad, q_curl, q_harm)]
    for b in bases:
        b.setflags(write=False)
    out = HodgeBasis(k, *bases, weights=w, tolerance=tol, complex_id=c.fingerprint)
    c._cache[key] = out
    return out


def project(
    basis: HodgeBasis, theta: CochainVector | ArrayLike
) -> tuple[CochainVector, CochainVector, CochainVector]:
    """Split ``theta`` into its gradient, curl and harmonic components."""
    values = np.asarray(theta, dtype=float)
    if values.shape != (basis.n,):
        raise DimensionError(f"expected a cochain of length {basis.n}, got {values.shape}")
    if isinstance(theta, CochainVector) and theta.complex_id != basis.complex_id:
        raise DimensionError("cochain and basis belong to different complexes")
    parts = []
    for s in SUBSPACES:
        v = basis.projector(s) @ values
        v.setflags(write=False)
        parts.append(CochainVector(basis.order, v, basis.complex_id))
    return tuple(parts)


def betti(c: SimplicialComplex, k: int, tol: float = 1e-10) -> int:
    """Dimension of ``ker L_k``: the number of k-dimensional holes."""
    return len(hodge_bases(c, k, tol).p_harm)


def betti_numbers(c: SimplicialComplex, tol: float = 1e-10) -> list[int]:
    return [betti(c, k, tol) for k in range(c.max_order + 1)]


def harmonic_cochain(c: SimplicialComplex, k: int, coefficients: ArrayLike) -> CochainVector:
    """Linear combination of the harmonic basis vectors."""
    p = hodge_bases(c, k).p_harm
    return cochain(c, k, np.asarray(coefficients, dtype=float) @ p)
