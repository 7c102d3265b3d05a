"""Synchronization diagnostics computed from trajectories."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .complex import SimplicialComplex
from .dynamics import Trajectory
from .errors import AnalysisError
from .hodge import SUBSPACES, HodgeBasis
from .operators import _down_coboundary, _up_coboundary, hodge_laplacian, lifted_dual_coboundary

FloatArray = NDArray[np.float64]

CLASSES = ("constant", "oscillating", "drifting")


def order_parameter_normalization(c: SimplicialComplex, k: int) -> float:
    """``C_k``: weighted count of the (k-1)- and (k+1)-simplices."""
    total = 0.0
    if k > 0:
        total += float(np.sum(1.0 / c.weights[k - 1]))
    if k < c.max_order:
        total += float(np.sum(1.0 / c.weights[k + 1]))
    return total


def simplicial_order_parameter(c: SimplicialComplex, k: int, theta: ArrayLike) -> FloatArray | float:
    """Squared simplicial order parameter ``R_k^2``.

    ``theta`` may be one cochain or a ``(num_samples, n_k)`` array, in which
    case one value per sample is returned.
    """
    c._check_order(k)
    theta = np.asarray(theta, dtype=float)
    single = theta.ndim == 1
    th = np.atleast_2d(theta)
    total = np.zeros(len(th))
    if k > 0:
        _, Nds = _down_coboundary(c, k)
        total += np.cos(th @ Nds.T) @ (1.0 / c.weights[k - 1])
    if k < c.max_order:
        Nu, _ = _up_coboundary(c, k)
        total += np.cos(th @ Nu.T) @ (1.0 / c.weights[k + 1])
    norm = order_parameter_normalization(c, k)
    if norm == 0:
        raise AnalysisError(f"order {k} has no neighbouring orders; R_k is undefined")
    out = total / norm
    return float(out[0]) if single else out


def order_parameter_stats(
    traj: Trajectory, c: SimplicialComplex, k: int | None = None, discard_fraction: float = 0.5
) -> tuple[float, float]:
    """Time mean and (population) standard deviation of ``R_k^2`` after a transient."""
    if not 0 <= discard_fraction < 1:
        raise AnalysisError("discard_fraction must lie in [0, 1)")
    k = traj.config.get("k", 1) if k is None else k
    start = int(np.floor(len(traj.times) * discard_fraction))
    samples = traj.phases[start:]
    if len(samples) < 2:
        raise AnalysisError("too few samples after discarding the transient")
    r2 = simplicial_order_parameter(c, k, samples)
    return float(np.mean(r2)), float(np.std(r2))


@dataclass(frozen=True)
class Thresholds:
    """Cut-offs separating constant, oscillating and drifting signals.

    A signal is constant when both its residual std around a linear fit and
    its slope are below ``constant``; oscillating when the residual std is at
    least ``constant`` but the slope is below ``slope``; drifting otherwise.
    """

    constant: float = 1e-6
    slope: float = 1e-3
    window_fraction: float = 0.5
    min_samples: int = 100


@dataclass(frozen=True)
class RegimeClass:
    subspace: str
    cls: str
    slope: float
    residual_std: float
    max_abs_slope: float = 0.0
    slopes: tuple[float, ...] = field(default=())

    def to_dict(self) -> dict:
        d = asdict(self)
        d["class"] = d.pop("cls")
        d["slopes"] = list(self.slopes)
        return d


def linear_fit(times: ArrayLike, signals: ArrayLike) -> tuple[FloatArray, FloatArray, FloatArray]:
    """Least-squares line through each column; returns slopes, intercepts, residual stds."""
    t = np.asarray(times, dtype=float)
    y = np.asarray(signals, dtype=float)
    if y.ndim == 1:
        y = y[:, None]
    tc = t - t.mean()
    denom = float(tc @ tc)
    if denom == 0:
        raise AnalysisError("cannot fit a line through a single time point")
    y_mean = y.mean(axis=0)
    slopes = tc @ (y - y_mean) / denom
    intercepts = y_mean - slopes * t.mean()
    residual = y - y_mean - tc[:, None] * slopes[None, :]
    return slopes, intercepts, residual.std(axis=0)


def classify_signal(
    times: ArrayLike, signals: ArrayLike, subspace: str = "signal", thresholds: Thresholds = Thresholds()
) -> RegimeClass:
    """Classify one or several scalar signals sharing a time grid.

    Several columns are combined into a drift vector: the reported slope is its
    norm, signed by the component of largest magnitude, and the residual std is
    the largest over columns.
    """
    y = np.asarray(signals, dtype=float)
    if y.ndim == 1:
        y = y[:, None]
    if len(y) < thresholds.min_samples:
        raise AnalysisError(f"need at least {thresholds.min_samples} samples to classify, got {len(y)}")
    if y.shape[1] == 0:
        return RegimeClass(subspace, "constant", 0.0, 0.0)
    slopes, _, res = linear_fit(times, y)
    dominant = int(np.argmax(np.abs(slopes)))
    max_abs = float(abs(slopes[dominant]))
    slope = float(np.linalg.norm(slopes)) * (1.0 if slopes[dominant] >= 0 else -1.0)
    residual = float(res.max())
    if residual < thresholds.constant and max_abs < thresholds.constant:
        cls = "constant"
    elif residual >= thresholds.constant and max_abs < thresholds.slope:
        cls = "oscillating"
    else:
        cls = "drifting"
    return RegimeClass(subspace, cls, slope, residual, max_abs, tuple(float(s) for s in slopes))


def classify_subspace(
    traj: Trajectory,
    basis: HodgeBasis,
    subspace: str,
    window_fraction: float | None = None,
    thresholds: Thresholds = Thresholds(),
) -> RegimeClass:
    """Classify the projection of a trajectory onto one Hodge subspace.

    Each basis direction gives a scalar signal ``<u_i, theta(t)>``; the lines
    are fitted on the final ``window_fraction`` of the samples.
    """
    frac = thresholds.window_fraction if window_fraction is None else window_fraction
    w = traj.window(frac)
    coords = basis.coordinates(subspace, w.phases)
    return classify_signal(w.times, coords, subspace, thresholds)


def classify_all(traj: Trajectory, basis: HodgeBasis, thresholds: Thresholds = Thresholds()) -> dict[str, RegimeClass]:
    return {s: classify_subspace(traj, basis, s, thresholds=thresholds) for s in SUBSPACES}


def measured_drift(traj: Trajectory, window_fraction: float = 0.5) -> FloatArray:
    """Per-simplex slope of a linear fit to the final window of the phases."""
    w = traj.window(window_fraction)
    slopes, _, _ = linear_fit(w.times, w.phases)
    return slopes


def predict_linear_response(
    c: SimplicialComplex, basis: HodgeBasis, alpha2: float
) -> tuple[FloatArray, FloatArray]:
    """Small-frustration prediction ``theta(t) ~ Omega h t + epsilon``.

    Linearizing the consensus dynamics (zero linear frustration) around a
    harmonic state leaves the constant forcing ``-(N_1^* V^T)^+ 1 alpha_2``,
    i.e. the generalized degree times ``alpha_2``. Its harmonic part is the
    drift ``Omega h``; the rest is balanced by ``L_1 epsilon`` with
    ``epsilon`` orthogonal to the harmonic space.
    """
    k = basis.order
    forcing = -lifted_dual_coboundary(c, k, "+").sum(axis=1) * alpha2
    Ph = basis.projector("harm")
    omega_h = Ph @ forcing
    rest = forcing - omega_h
    sqrt_w = np.sqrt(c.weights[k])
    L = hodge_laplacian(c, k)
    S = L * sqrt_w[None, :] / sqrt_w[:, None]
    y = np.linalg.pinv(0.5 * (S + S.T), rcond=basis.tolerance) @ (rest / sqrt_w)
    return omega_h, sqrt_w * y


def analysis_report(
    traj: Trajectory,
    c: SimplicialComplex,
    basis: HodgeBasis,
    thresholds: Thresholds = Thresholds(),
    lyapunov: dict | None = None,
) -> dict:
    """JSON-ready summary of one trajectory.

    ``lyapunov`` holds keyword arguments for :func:`lyapunov_largest`; ``None``
    skips the estimate and reports NaN.
    """
    from .lyapunov import lyapunov_largest

    k = basis.order
    r2_mean, r2_std = order_parameter_stats(traj, c, k, discard_fraction=1.0 - thresholds.window_fraction)
    regime = {s: r.to_dict() for s, r in classify_all(traj, basis, thresholds).items()}
    if lyapunov is None:
        lyap = {"mean": float("nan"), "q25": float("nan"), "q75": float("nan")}
    else:
        summary = lyapunov_largest(traj.window(thresholds.window_fraction), **lyapunov)
        lyap = {"mean": summary.mean, "q25": summary.lower_quartile, "q75": summary.upper_quartile}
    return {"R2_mean": r2_mean, "R2_std": r2_std, "regime": regime, "lyapunov": lyap}
