"""SVG figures with byte-stable output."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

CLASS_CODES = {"constant": 0.0, "oscillating": 1.0, "drifting": 2.0}

_RC = {"svg.hashsalt": "hodgeflow", "svg.fonttype": "none", "path.simplify": False}


def _numeric(rows: list[dict], metric: str) -> np.ndarray:
    if metric not in rows[0]:
        raise KeyError(metric)
    if metric.endswith("_class"):
        return np.array([CLASS_CODES.get(r[metric], np.nan) for r in rows])
    return np.array([float(r[metric]) for r in rows])


def _save(fig, path: str | Path) -> None:
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def heatmap(rows: list[dict], metric: str, path: str | Path, x: str = "alpha1", y: str = "alpha2") -> None:
    """Seed-averaged ``metric`` over the (x, y) grid."""
    vals = _numeric(rows, metric)
    xs = sorted({float(r[x]) for r in rows})
    ys = sorted({float(r[y]) for r in rows})
    grid = np.full((len(ys), len(xs)), np.nan)
    xi = {v: i for i, v in enumerate(xs)}
    yi = {v: i for i, v in enumerate(ys)}
    sums = np.zeros_like(grid)
    counts = np.zeros_like(grid)
    for r, v in zip(rows, vals):
        if np.isfinite(v):
            sums[yi[float(r[y])], xi[float(r[x])]] += v
            counts[yi[float(r[y])], xi[float(r[x])]] += 1
    np.divide(sums, counts, out=grid, where=counts > 0)
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(5, 4))
        mesh = ax.pcolormesh(_edges(xs), _edges(ys), grid, shading="flat", cmap="viridis")
        fig.colorbar(mesh, ax=ax, label=metric)
        ax.set_xlabel(x)
        ax.set_ylabel(y)
        _save(fig, path)


def _edges(centres: list[float]) -> np.ndarray:
    c = np.asarray(centres, dtype=float)
    if len(c) == 1:
        return np.array([c[0] - 0.5, c[0] + 0.5])
    mid = 0.5 * (c[1:] + c[:-1])
    return np.concatenate([[c[0] - (mid[0] - c[0])], mid, [c[-1] + (c[-1] - mid[-1])]])


def line(rows: list[dict], metric: str, path: str | Path, x: str = "alpha2", group: str | None = "alpha1") -> None:
    """Mean of ``metric`` against ``x`` with a +-1 std band, one curve per ``group`` value."""
    vals = _numeric(rows, metric)
    groups = sorted({float(r[group]) for r in rows}) if group else [None]
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(5, 3.5))
        for g in groups:
            sel = [i for i, r in enumerate(rows) if g is None or float(r[group]) == g]
            xs = sorted({float(rows[i][x]) for i in sel})
            mean, std = [], []
            for xv in xs:
                v = np.array([vals[i] for i in sel if float(rows[i][x]) == xv])
                v = v[np.isfinite(v)]
                mean.append(v.mean() if v.size else np.nan)
                std.append(v.std() if v.size else np.nan)
            mean, std = np.array(mean), np.array(std)
            label = None if g is None else f"{group}={g:g}"
            ax.plot(xs, mean, marker=".", label=label)
            ax.fill_between(xs, mean - std, mean + std, alpha=0.25)
        ax.set_xlabel(x)
        ax.set_ylabel(metric)
        if group and len(groups) > 1:
            ax.legend(fontsize="small")
        _save(fig, path)


def trajectory_projection(times: np.ndarray, phases: np.ndarray, path: str | Path, i: int = 0, j: int = 1,
                          discard_fraction: float = 0.5) -> None:
    """``sin(theta_i)`` against ``sin(theta_j)`` after a transient."""
    n = phases.shape[1]
    if not (0 <= i < n and 0 <= j < n):
        raise KeyError(f"simplex index out of range for {n} columns")
    start = int(len(times) * discard_fraction)
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(4, 4))
        ax.plot(np.sin(phases[start:, i]), np.sin(phases[start:, j]), lw=0.6)
        ax.set_xlabel(f"sin(theta_{i})")
        ax.set_ylabel(f"sin(theta_{j})")
        ax.set_xlim(-1.05, 1.05)
        ax.set_ylim(-1.05, 1.05)
        ax.set_aspect("equal")
        _save(fig, path)
