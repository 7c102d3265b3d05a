"""Frustrated simplicial Kuramoto dynamics and their integration.

Both right-hand sides used here have the shape

    d theta / dt = -alpha_k - M sin(G theta + b)

with ``G`` stacking the operators applied inside the sines, ``b`` the nonlinear
frustration offsets and ``M`` the operators applied outside. ``SineCoupling``
holds that triple; the integrator runs a compiled fixed-step RK4 on it.

Sign convention for the nonlinear frustration: at ``k = 0`` the consensus form
reproduces ``d theta_i/dt = -alpha_i - sum_j A_ij sin(theta_i - theta_j + alpha_ij)``,
and on a coherently oriented triangle the edge dynamics reduce to
``-alpha_1 - sin(3 theta + alpha_2)``. This is the lifted coupling
``-(N_k^* V^T)^+ sin(V N_k theta + [alpha; alpha])``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numba
import numpy as np
import scipy.sparse as sp
from numpy.typing import ArrayLike, NDArray

from .complex import CochainVector, SimplicialComplex, cochain
from .errors import DimensionError, HarmonicError, IntegrationError
from .hodge import HodgeBasis
from .operators import (
    _down_coboundary,
    _up_coboundary,
    hodge_laplacian,
    lifted_coboundary,
    lifted_dual_coboundary,
)

FloatArray = NDArray[np.float64]

RHS_KINDS = ("consensus", "diffusion")


@dataclass(frozen=True)
class FrustrationConfig:
    """Linear frustration on k-simplices and nonlinear frustration on (k+1)-simplices."""

    alpha_k: CochainVector
    alpha_k1: CochainVector

    @property
    def order(self) -> int:
        return self.alpha_k.order


def frustration(c: SimplicialComplex, k: int, alpha_k: ArrayLike = 0.0, alpha_k1: ArrayLike = 0.0) -> FrustrationConfig:
    """Build a ``FrustrationConfig``; scalars broadcast to constant cochains.

    At ``k = max_order`` there are no (k+1)-simplices and ``alpha_k1`` must be
    a scalar (it is ignored).
    """
    a = cochain(c, k, alpha_k)
    if k < c.max_order:
        b = cochain(c, k + 1, alpha_k1)
    else:
        if np.ndim(alpha_k1) != 0:
            raise DimensionError(f"order {k} is the top order: no nonlinear frustration")
        b = CochainVector(k + 1, np.zeros(0), c.fingerprint)
    return FrustrationConfig(a, b)


def _values(x, n: int, name: str) -> FloatArray:
    v = np.asarray(x, dtype=float)
    if v.shape[0] != n:
        raise DimensionError(f"{name}: expected leading dimension {n}, got {v.shape}")
    return v


@dataclass(frozen=True, eq=False)
class SineCoupling:
    """Right-hand side ``-alpha_k - M sin(G theta + b)``."""

    alpha_k: FloatArray
    M: FloatArray
    G: FloatArray
    b: FloatArray
    _csr: tuple = field(default=(), repr=False)

    def __call__(self, theta: ArrayLike) -> FloatArray:
        theta = np.asarray(theta, dtype=float)
        if theta.ndim == 1:
            return -self.alpha_k - self.M @ np.sin(self.G @ theta + self.b)
        return -self.alpha_k[:, None] - self.M @ np.sin(self.G @ theta + self.b[:, None])

    @property
    def n(self) -> int:
        return len(self.alpha_k)

    def csr(self) -> tuple:
        if not self._csr:
            G, M = sp.csr_matrix(self.G), sp.csr_matrix(self.M)
            arrays = (
                G.indptr.astype(np.int64), G.indices.astype(np.int64), G.data.astype(float),
                M.indptr.astype(np.int64), M.indices.astype(np.int64), M.data.astype(float),
            )
            object.__setattr__(self, "_csr", arrays)
        return self._csr


def consensus_coupling(c: SimplicialComplex, k: int, fr: FrustrationConfig) -> SineCoupling:
    """Assemble the consensus (left-acting) frustrated Kuramoto RHS."""
    _check_frustration(c, k, fr)
    Nd, Nds = _down_coboundary(c, k)
    M = [Nd]
    G = [Nds]
    b = [np.zeros(Nds.shape[0])]
    if k < c.max_order:
        alpha = np.asarray(fr.alpha_k1)
        M.append(lifted_dual_coboundary(c, k, "+"))
        G.append(lifted_coboundary(c, k))
        b.append(np.concatenate([alpha, alpha]))
    return SineCoupling(np.asarray(fr.alpha_k, dtype=float), np.hstack(M), np.vstack(G), np.concatenate(b))


def diffusion_coupling(c: SimplicialComplex, k: int, fr: FrustrationConfig) -> SineCoupling:
    """Assemble the diffusion (right-acting) frustrated Kuramoto RHS.

    In column form: ``-alpha_k - N_{k-1}^{*T} sin(N_{k-1}^T theta)
    - N_k^T sin(N_k^{*T} theta + alpha_{k+1})``.
    """
    _check_frustration(c, k, fr)
    Nd, Nds = _down_coboundary(c, k)
    Nu, Nus = _up_coboundary(c, k)
    M = np.hstack([Nds.T, Nu.T])
    G = np.vstack([Nd.T, Nus.T])
    b = np.concatenate([np.zeros(Nd.shape[1]), np.asarray(fr.alpha_k1, dtype=float)])
    return SineCoupling(np.asarray(fr.alpha_k, dtype=float), M, G, b)


def coupling_for(c: SimplicialComplex, k: int, fr: FrustrationConfig, rhs: str = "consensus") -> SineCoupling:
    if rhs == "consensus":
        return consensus_coupling(c, k, fr)
    if rhs == "diffusion":
        return diffusion_coupling(c, k, fr)
    raise ValueError(f"rhs must be one of {RHS_KINDS}, got {rhs!r}")


def _check_frustration(c: SimplicialComplex, k: int, fr: FrustrationConfig) -> None:
    c._check_order(k)
    if fr.alpha_k.order != k or len(fr.alpha_k) != c.n(k):
        raise DimensionError(f"alpha_k must be an order-{k} cochain of length {c.n(k)}")
    if len(fr.alpha_k1) != c.n(k + 1):
        raise DimensionError(f"alpha_k1 must be an order-{k + 1} cochain of length {c.n(k + 1)}")


def rhs_consensus(c: SimplicialComplex, k: int, fr: FrustrationConfig, theta: ArrayLike) -> FloatArray:
    """``-alpha_k - N_{k-1} sin(N_{k-1}^* theta) - (N_k^* V^T)^+ sin(V N_k theta + alpha_{k+1})``."""
    return consensus_coupling(c, k, fr)(_values(theta, c.n(k), "theta"))


def rhs_diffusion(c: SimplicialComplex, k: int, fr: FrustrationConfig, theta: ArrayLike) -> FloatArray:
    return diffusion_coupling(c, k, fr)(_values(theta, c.n(k), "theta"))


def rhs_node_adjacency(A: ArrayLike, omega: ArrayLike, alpha1: float, theta: ArrayLike) -> FloatArray:
    """Sakaguchi-Kuramoto with unit coupling: ``omega_i - sum_j A_ij sin(theta_i - theta_j + alpha1)``."""
    A = np.asarray(A, dtype=float)
    theta = np.asarray(theta, dtype=float)
    diff = theta[:, None] - theta[None, :] + alpha1
    return np.asarray(omega, dtype=float) - (A * np.sin(diff)).sum(axis=1)


def up_term(c: SimplicialComplex, k: int, alpha_k1: ArrayLike, theta: ArrayLike) -> FloatArray:
    """``(N_k^* V^T)^+ sin(V N_k theta + alpha_{k+1})``, the frustrated up coupling."""
    alpha = np.asarray(alpha_k1, dtype=float) * np.ones(c.n(k + 1))
    lifted = np.concatenate([alpha, alpha])
    return lifted_dual_coboundary(c, k, "+") @ np.sin(lifted_coboundary(c, k) @ np.asarray(theta) + lifted)


def grad_curl_coupling(
    c: SimplicialComplex, basis: HodgeBasis, alpha_k1: ArrayLike, theta: ArrayLike
) -> FloatArray:
    """Gradient projection of the up coupling; vanishes when ``alpha_{k+1} = 0``."""
    return basis.projector("grad") @ up_term(c, basis.order, alpha_k1, theta)


def rhs_decomposed(
    c: SimplicialComplex, basis: HodgeBasis, fr: FrustrationConfig, theta: ArrayLike
) -> tuple[FloatArray, FloatArray, FloatArray]:
    """Gradient, curl and harmonic parts of the consensus RHS at order 1.

    The sine arguments only see the matching component of ``theta``:
    ``N_0^* theta = N_0^* theta_g`` and ``N_1 theta = N_1 theta_c``.
    """
    k = basis.order
    if k != 1:
        raise DimensionError("rhs_decomposed is defined for edge dynamics (k = 1)")
    theta = _values(theta, c.n(k), "theta")
    Pg, Pc, Ph = (basis.projector(s) for s in ("grad", "curl", "harm"))
    theta_g, theta_c = Pg @ theta, Pc @ theta
    alpha = np.asarray(fr.alpha_k, dtype=float)
    Nd, Nds = _down_coboundary(c, k)
    down = Nd @ np.sin(Nds @ theta_g)
    up = up_term(c, k, fr.alpha_k1, theta_c) if k < c.max_order else np.zeros(c.n(k))
    d_grad = -Pg @ alpha - down - Pg @ up
    d_curl = -Pc @ alpha - Pc @ up
    d_harm = -Ph @ alpha - Ph @ up
    return d_grad, d_curl, d_harm


# integration


@numba.njit(cache=True)
def _rk4_kernel(theta0, alpha, offset, g_ptr, g_idx, g_val, m_ptr, m_idx, m_val, dt, n_steps, sample_every, out):
    n = theta0.shape[0]
    m = offset.shape[0]
    y = theta0.copy()
    k1 = np.empty(n)
    k2 = np.empty(n)
    k3 = np.empty(n)
    k4 = np.empty(n)
    tmp = np.empty(n)
    s = np.empty(m)

    out[0, :] = y
    row = 1
    for step in range(1, n_steps + 1):
        for stage in range(4):
            if stage == 0:
                for i in range(n):
                    tmp[i] = y[i]
            elif stage == 1:
                for i in range(n):
                    tmp[i] = y[i] + 0.5 * dt * k1[i]
            elif stage == 2:
                for i in range(n):
                    tmp[i] = y[i] + 0.5 * dt * k2[i]
            else:
                for i in range(n):
                    tmp[i] = y[i] + dt * k3[i]
            for r in range(m):
                acc = offset[r]
                for p in range(g_ptr[r], g_ptr[r + 1]):
                    acc += g_val[p] * tmp[g_idx[p]]
                s[r] = np.sin(acc)
            if stage == 0:
                kk = k1
            elif stage == 1:
                kk = k2
            elif stage == 2:
                kk = k3
            else:
                kk = k4
            for i in range(n):
                acc = -alpha[i]
                for p in range(m_ptr[i], m_ptr[i + 1]):
                    acc -= m_val[p] * s[m_idx[p]]
                kk[i] = acc
        for i in range(n):
            y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
        if step % sample_every == 0:
            for i in range(n):
                if not np.isfinite(y[i]):
                    return step
                out[row, i] = y[i]
            row += 1
    return -1


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Sampled solution of one integration run.

    ``phases`` has shape ``(num_samples, n_k)`` and is not wrapped mod 2 pi.
    ``config`` is a JSON-serializable snapshot of everything needed to rerun.
    """

    times: FloatArray
    phases: FloatArray
    config: dict

    @property
    def sample_step(self) -> float:
        return float(self.config["dt"] * self.config["sample_every"])

    def window(self, fraction: float) -> Trajectory:
        """Keep the last ``fraction`` of the samples."""
        start = int(np.floor(len(self.times) * (1.0 - fraction)))
        return Trajectory(self.times[start:], self.phases[start:], self.config)

    def to_csv(self, path: str | Path) -> None:
        n = self.phases.shape[1]
        header = ",".join(["t"] + [f"theta_{i}" for i in range(n)])
        rows = [header]
        for t, row in zip(self.times, self.phases):
            rows.append(",".join(repr(float(x)) for x in (t, *row)))
        Path(path).write_text("\n".join(rows) + "\n")
        Path(path).with_suffix(".json").write_text(json.dumps(self.config, indent=1, sort_keys=True) + "\n")

    @classmethod
    def from_csv(cls, path: str | Path) -> Trajectory:
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        sidecar = Path(path).with_suffix(".json")
        config = json.loads(sidecar.read_text()) if sidecar.exists() else {}
        return cls(data[:, 0].copy(), data[:, 1:].copy(), config)


def random_initial_condition(c: SimplicialComplex, k: int, rng: np.random.Generator | int) -> FloatArray:
    """I.i.d. uniform phases on ``[0, 2 pi)``."""
    rng = np.random.default_rng(rng)
    return rng.uniform(0.0, 2.0 * np.pi, size=c.n(k))


def integrate_coupling(
    f: SineCoupling, theta0: ArrayLike, t_max: float, dt: float = 0.01, sample_every: int = 10
) -> tuple[FloatArray, FloatArray]:
    """Classic RK4 with a fixed step; returns ``(times, phases)``."""
    if dt <= 0 or t_max <= dt:
        raise ValueError("need dt > 0 and t_max > dt")
    if sample_every < 1:
        raise ValueError("sample_every must be >= 1")
    theta0 = _values(theta0, f.n, "theta0")
    n_steps = int(round(t_max / dt))
    n_samples = n_steps // sample_every + 1
    out = np.empty((n_samples, f.n))
    if not np.all(np.isfinite(theta0)):
        raise IntegrationError("non-finite initial condition", 0.0)
    failed = _rk4_kernel(
        theta0.astype(float), f.alpha_k.astype(float), f.b.astype(float), *f.csr(),
        float(dt), n_steps, int(sample_every), out,
    )
    if failed >= 0:
        raise IntegrationError("state became non-finite", failed * dt)
    times = np.arange(n_samples) * (dt * sample_every)
    return times, out


def integrate(
    c: SimplicialComplex,
    k: int,
    fr: FrustrationConfig,
    theta0: ArrayLike,
    t_max: float = 1000.0,
    dt: float = 0.01,
    sample_every: int = 10,
    rhs: str = "consensus",
    seed: int | None = None,
) -> Trajectory:
    """Integrate the frustrated Kuramoto dynamics from ``theta0``.

    Raises:
        IntegrationError: the state became non-finite; carries the time.
    """
    f = coupling_for(c, k, fr, rhs)
    times, phases = integrate_coupling(f, theta0, t_max, dt, sample_every)
    config = {
        "complex_id": c.fingerprint,
        "k": k,
        "alpha_k": [float(x) for x in np.asarray(fr.alpha_k)],
        "alpha_k1": [float(x) for x in np.asarray(fr.alpha_k1)],
        "t_max": float(t_max),
        "dt": float(dt),
        "sample_every": int(sample_every),
        "rhs": rhs,
        "seed": seed,
    }
    return Trajectory(times, phases, config)


def apply_rotating_frame(
    traj: Trajectory, c: SimplicialComplex, h: ArrayLike, omega_rate: float, tol: float = 1e-8
) -> Trajectory:
    """Shift phases by ``-omega_rate * t * h`` for a harmonic cochain ``h``.

    Raises:
        HarmonicError: ``||L_k h|| >= tol``.
    """
    k = traj.config.get("k", 1)
    h = _values(h, c.n(k), "h")
    if np.linalg.norm(hodge_laplacian(c, k) @ h) >= tol:
        raise HarmonicError("h is not in the kernel of the Hodge Laplacian")
    phases = traj.phases - omega_rate * traj.times[:, None] * h[None, :]
    config = dict(traj.config, rotating_frame={"h": h.tolist(), "omega": float(omega_rate)})
    return Trajectory(traj.times, phases, config)
