"""Largest Lyapunov exponent from scalar time series (Rosenstein's method)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .dynamics import Trajectory
from .errors import AnalysisError

FloatArray = NDArray[np.float64]


def autocorrelation_lag(x: FloatArray, max_lag: int | None = None) -> int:
    """First lag where the autocorrelation of ``x`` drops to zero (at least 1)."""
    x = x - x.mean()
    n = len(x)
    max_lag = n // 4 if max_lag is None else max_lag
    spectrum = np.fft.rfft(x, 2 * n)
    acf = np.fft.irfft(spectrum * np.conj(spectrum))[:n]
    if acf[0] <= 0:
        return 1
    acf = acf / acf[0]
    crossing = np.flatnonzero(acf[1 : max_lag + 1] <= 0)
    if crossing.size:
        return int(crossing[0]) + 1
    # no zero within range: fall back to the 1/e decay time
    below = np.flatnonzero(acf[1 : max_lag + 1] <= 1 / math.e)
    return int(below[0]) + 1 if below.size else 1


def mean_period(x: FloatArray) -> float:
    """Mean period in samples, from the power-weighted mean frequency."""
    x = x - x.mean()
    power = np.abs(np.fft.rfft(x)) ** 2
    freqs = np.fft.rfftfreq(len(x))
    total = power[1:].sum()
    if total == 0:
        return float(len(x))
    return float(1.0 / (np.sum(freqs[1:] * power[1:]) / total))


def delay_embedding(x: FloatArray, dim: int, lag: int) -> FloatArray:
    m = len(x) - (dim - 1) * lag
    if m <= 0:
        raise AnalysisError(f"series of length {len(x)} too short for dim={dim}, lag={lag}")
    return np.stack([x[i * lag : i * lag + m] for i in range(dim)], axis=1)


def _nearest_neighbours(emb: FloatArray, usable: int, min_tsep: int, chunk: int = 512) -> FloatArray:
    """Index of the nearest neighbour of each of the first ``usable`` points.

    Neighbours closer than ``min_tsep`` samples in time are excluded. Returns
    -1 where no admissible neighbour exists.
    """
    pts = emb[:usable]
    sq = np.einsum("ij,ij->i", pts, pts)
    out = np.full(usable, -1, dtype=np.int64)
    idx = np.arange(usable)
    for start in range(0, usable, chunk):
        stop = min(start + chunk, usable)
        d2 = sq[start:stop, None] + sq[None, :] - 2.0 * pts[start:stop] @ pts.T
        rows = idx[start:stop]
        d2[np.abs(rows[:, None] - idx[None, :]) <= min_tsep] = np.inf
        best = np.argmin(d2, axis=1)
        ok = np.isfinite(d2[np.arange(stop - start), best])
        out[start:stop] = np.where(ok, best, -1)
    return out


@dataclass(frozen=True)
class RosensteinResult:
    exponent: float
    divergence: FloatArray
    lag: int
    min_tsep: int
    flag: str = "ok"


def rosenstein(
    series: ArrayLike,
    dt: float = 1.0,
    emb_dim: int = 5,
    lag: int | None = None,
    min_tsep: int | None = None,
    trajectory_len: int | None = None,
    fit_fraction: float = 0.25,
    max_points: int = 2000,
    flat_tol: float = 1e-10,
) -> RosensteinResult:
    """Largest Lyapunov exponent of a scalar series, per unit of time.

    The series is delay-embedded (lag from the first autocorrelation zero by
    default), each point is paired with its nearest neighbour at least one mean
    period away, and the mean log distance of the pairs is followed forward
    for ``trajectory_len`` samples. The exponent is the slope of a line fitted
    to the first ``fit_fraction`` of that curve, divided by ``dt``.

    A series flatter than ``flat_tol`` returns 0 with flag ``"constant"``.
    Longer series are truncated to their last ``max_points`` samples.
    """
    x = np.asarray(series, dtype=float)
    if x.ndim != 1:
        raise AnalysisError("rosenstein expects a one-dimensional series")
    if len(x) > max_points:
        x = x[-max_points:]
    if len(x) < 10 or np.ptp(x) < flat_tol:
        return RosensteinResult(0.0, np.zeros(0), 0, 0, "constant")
    lag = autocorrelation_lag(x) if lag is None else lag
    emb = delay_embedding(x, emb_dim, lag)
    m = len(emb)
    if min_tsep is None:
        min_tsep = int(math.ceil(mean_period(x)))
    min_tsep = min(min_tsep, m // 4)
    if trajectory_len is None:
        trajectory_len = max(20, m // 10)
    trajectory_len = min(trajectory_len, m // 2)
    usable = m - trajectory_len
    if usable < 2 or trajectory_len < 4:
        return RosensteinResult(float("nan"), np.zeros(0), lag, min_tsep, "short")

    nn = _nearest_neighbours(emb, usable, min_tsep)
    valid = np.flatnonzero(nn >= 0)
    if valid.size == 0:
        return RosensteinResult(float("nan"), np.zeros(0), lag, min_tsep, "short")
    i0, j0 = valid, nn[valid]
    divergence = np.empty(trajectory_len)
    for step in range(trajectory_len):
        d = np.linalg.norm(emb[i0 + step] - emb[j0 + step], axis=1)
        d = d[d > 0]
        divergence[step] = np.mean(np.log(d)) if d.size else -np.inf
    finite = np.isfinite(divergence)
    n_fit = max(2, int(round(trajectory_len * fit_fraction)))
    steps = np.arange(trajectory_len)[:n_fit]
    keep = finite[:n_fit]
    if keep.sum() < 2:
        return RosensteinResult(0.0, divergence, lag, min_tsep, "constant")
    slope = np.polyfit(steps[keep], divergence[:n_fit][keep], 1)[0]
    return RosensteinResult(float(slope / dt), divergence, lag, min_tsep)


@dataclass(frozen=True)
class LyapunovSummary:
    """Per-simplex exponents with their mean and quartiles (NaNs ignored)."""

    per_simplex: FloatArray
    flags: tuple[str, ...]
    mean: float
    lower_quartile: float
    upper_quartile: float


def lyapunov_largest(
    traj: Trajectory, observable: str = "sin", **kwargs
) -> LyapunovSummary:
    """Estimate the largest Lyapunov exponent on every simplex of a trajectory.

    Phases are unwrapped and may drift without bound, so the series analysed is
    ``sin(theta)`` by default (``observable="raw"`` uses the phases as they are).
    Extra keyword arguments go to :func:`rosenstein`.
    """
    if observable == "sin":
        data = np.sin(traj.phases)
    elif observable == "raw":
        data = np.asarray(traj.phases)
    else:
        raise ValueError(f"unknown observable {observable!r}")
    dt = traj.sample_step
    results = [rosenstein(data[:, i], dt=dt, **kwargs) for i in range(data.shape[1])]
    values = np.array([r.exponent for r in results])
    flags = tuple(r.flag for r in results)
    finite = values[np.isfinite(values)]
    if finite.size == 0:
        nan = float("nan")
        return LyapunovSummary(values, flags, nan, nan, nan)
    q25, q75 = np.percentile(finite, [25, 75])
    return LyapunovSummary(values, flags, float(finite.mean()), float(q25), float(q75))
