"""Parameter scans over (alpha_1, alpha_2, seed) grids.

Every grid point ``(i, j)`` and seed index ``s`` draws its initial condition
from ``numpy.random.SeedSequence(root_seed, spawn_key=(i, j, s))``, so a
point's trajectory depends only on its own indices and the root seed, never
on scheduling or on other grid values.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .analysis import Thresholds, analysis_report
from .complex import SimplicialComplex
from .dynamics import frustration, integrate
from .errors import AnalysisError, IntegrationError
from .generators import (
    generate_delaunay_with_holes,
    preset_holed,
    preset_triangle,
    preset_two_triangles,
)
from .hodge import hodge_bases

CSV_COLUMNS = (
    "alpha1", "alpha2", "seed", "R2_mean", "R2_std",
    "grad_class", "grad_slope", "curl_class", "curl_slope", "harm_class", "harm_slope",
    "lyap_mean", "lyap_q25", "lyap_q75", "status",
)
METRICS = ("R2_mean", "R2_std", "grad_slope", "curl_slope", "harm_slope", "lyap_mean", "lyap_q25", "lyap_q75")

PRESETS = ("triangle", "holed", "two-triangles", "delaunay")


def default_alpha1_grid() -> list[float]:
    return [round(0.1 * i, 10) for i in range(26)]


def default_alpha2_grid() -> list[float]:
    return [i * math.pi / 34 for i in range(18)]


def make_complex(source: dict) -> SimplicialComplex:
    """Build a complex from ``{"preset": name, **args}`` or ``{"path": file}``."""
    source = dict(source)
    if "path" in source:
        return SimplicialComplex.from_json(source["path"])
    name = source.pop("preset", None)
    if name == "triangle":
        return preset_triangle(bool(source.get("flipped", False)))
    if name == "holed":
        return preset_holed(source.get("flip_set", ()))
    if name == "two-triangles":
        return preset_two_triangles(float(source.get("w", 1.0)))
    if name == "delaunay":
        holes = source.get("holes")
        if holes is None:
            holes = default_holes(int(source.get("n_holes", 2)))
        return generate_delaunay_with_holes(
            int(source.get("points", 40)), [(tuple(c), r) for c, r in holes], int(source.get("seed", 1))
        )
    raise ValueError(f"unknown preset {name!r}; expected one of {', '.join(PRESETS)}")


def default_holes(n: int) -> list[tuple[tuple[float, float], float]]:
    """``n`` holes on the horizontal midline between x = 0.3 and x = 0.7.

    Radius 0.15, shrunk when needed to keep neighbours apart.
    """
    if n < 0:
        raise ValueError("number of holes must be >= 0")
    if n == 0:
        return []
    if n == 1:
        return [((0.5, 0.5), 0.15)]
    radius = min(0.15, 0.18 / (n - 1))
    return [((round(0.3 + 0.4 * i / (n - 1), 12), 0.5), radius) for i in range(n)]


@dataclass(frozen=True)
class ScanConfig:
    """Everything needed to reproduce a scan.

    ``lyapunov`` is ``None`` to skip the exponent or a dict of keyword
    arguments for :func:`hodgeflow.lyapunov.lyapunov_largest`.
    """

    complex: dict
    alpha1: tuple[float, ...] = field(default_factory=lambda: tuple(default_alpha1_grid()))
    alpha2: tuple[float, ...] = field(default_factory=lambda: tuple(default_alpha2_grid()))
    seeds: int = 1
    k: int = 1
    root_seed: int = 0
    t_max: float = 600.0
    dt: float = 0.01
    sample_every: int = 10
    rhs: str = "consensus"
    thresholds: dict = field(default_factory=dict)
    lyapunov: dict | None = None

    def __post_init__(self):
        object.__setattr__(self, "alpha1", tuple(float(a) for a in self.alpha1))
        object.__setattr__(self, "alpha2", tuple(float(a) for a in self.alpha2))
        if not self.alpha1 or not self.alpha2:
            raise ValueError("alpha grids must be non-empty")
        if self.seeds < 1:
            raise ValueError("seeds must be >= 1")
        Thresholds(**self.thresholds)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["alpha1"], d["alpha2"] = list(self.alpha1), list(self.alpha2)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> ScanConfig:
        return cls(**data)


@dataclass(frozen=True)
class ScanRecord:
    i: int
    j: int
    seed: int
    alpha1: float
    alpha2: float
    report: dict | None
    status: str = "ok"
    wall_time: float = 0.0

    def row(self) -> dict:
        """CSV row; failed runs get NaN metrics."""
        nan = float("nan")
        rep = self.report or {}
        regime = rep.get("regime", {})
        lyap = rep.get("lyapunov", {})
        row = {"alpha1": self.alpha1, "alpha2": self.alpha2, "seed": self.seed,
               "R2_mean": rep.get("R2_mean", nan), "R2_std": rep.get("R2_std", nan)}
        for s in ("grad", "curl", "harm"):
            row[f"{s}_class"] = regime.get(s, {}).get("class", "")
            row[f"{s}_slope"] = regime.get(s, {}).get("slope", nan)
        row["lyap_mean"] = lyap.get("mean", nan)
        row["lyap_q25"] = lyap.get("q25", nan)
        row["lyap_q75"] = lyap.get("q75", nan)
        row["status"] = self.status
        return row


def point_rng(root_seed: int, i: int, j: int, s: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(root_seed, spawn_key=(i, j, s)))


def run_point(cfg: ScanConfig, c: SimplicialComplex, i: int, j: int, s: int) -> ScanRecord:
    """Simulate and analyse one grid point with one seed."""
    a1, a2 = cfg.alpha1[i], cfg.alpha2[j]
    start = time.perf_counter()
    rng = point_rng(cfg.root_seed, i, j, s)
    theta0 = rng.uniform(0.0, 2.0 * np.pi, size=c.n(cfg.k))
    alpha_k1 = a2 if cfg.k < c.max_order else 0.0
    try:
        fr = frustration(c, cfg.k, a1, alpha_k1)
        traj = integrate(c, cfg.k, fr, theta0, cfg.t_max, cfg.dt, cfg.sample_every, cfg.rhs, seed=s)
        report = analysis_report(traj, c, hodge_bases(c, cfg.k), Thresholds(**cfg.thresholds), cfg.lyapunov)
        status = "ok"
    except IntegrationError as err:
        report, status = None, f"integration_error: {err}"
    except AnalysisError as err:
        report, status = None, f"analysis_error: {err}"
    return ScanRecord(i, j, s, a1, a2, report, status, time.perf_counter() - start)


def _run_tasks(args: tuple[ScanConfig, list[tuple[int, int, int]]]) -> list[ScanRecord]:
    cfg, tasks = args
    c = make_complex(cfg.complex)
    return [run_point(cfg, c, i, j, s) for i, j, s in tasks]


def worker_count(requested: int | None = None) -> int:
    """Requested worker count, capped by ``HODGEFLOW_THREADS`` when set."""
    n = requested if requested is not None else (os.cpu_count() or 1)
    cap = os.environ.get("HODGEFLOW_THREADS")
    if cap:
        n = min(n, int(cap))
    return max(1, n)


def run_scan(cfg: ScanConfig, workers: int | None = None) -> list[ScanRecord]:
    """Run every grid point and seed; records come back in ``(i, j, seed)`` order."""
    tasks = [
        (i, j, s)
        for i in range(len(cfg.alpha1))
        for j in range(len(cfg.alpha2))
        for s in range(cfg.seeds)
    ]
    n_workers = min(worker_count(workers), len(tasks))
    if n_workers == 1:
        records = _run_tasks((cfg, tasks))
    else:
        chunks = [tasks[w::n_workers] for w in range(n_workers)]
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            records = [r for part in pool.map(_run_tasks, [(cfg, ch) for ch in chunks]) for r in part]
    return sorted(records, key=lambda r: (r.i, r.j, r.seed))


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def records_to_csv(records: list[ScanRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in sorted(records, key=lambda r: (r.i, r.j, r.seed)):
        row = r.row()
        writer.writerow([_fmt(row[col]) for col in CSV_COLUMNS])
    return buf.getvalue()


def write_scan(records: list[ScanRecord], cfg: ScanConfig, path: str | Path) -> None:
    """Write the scan CSV and its config as JSON alongside (same stem)."""
    path = Path(path)
    path.write_text(records_to_csv(records))
    path.with_suffix(".json").write_text(cfg.to_json())


def read_scan_csv(path: str | Path) -> list[dict]:
    """Rows of a scan CSV with numeric columns converted to float."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    for row in rows:
        for key, value in row.items():
            if key.endswith("_class") or key == "status":
                continue
            try:
                row[key] = float(value)
            except ValueError:
                pass
    return rows


def aggregate(records, group_by: tuple[str, ...] = ("alpha1", "alpha2")) -> list[dict]:
    """Mean and population standard deviation (ddof = 0) of every metric per group.

    ``records`` may be :class:`ScanRecord` objects or row dicts. NaN values
    (failed runs, skipped Lyapunov estimates) are left out of the statistics.
    """
    rows = [r.row() if isinstance(r, ScanRecord) else r for r in records]
    groups: dict[tuple, list[dict]] = {}
    for row in rows:
        groups.setdefault(tuple(row[g] for g in group_by), []).append(row)
    table = []
    for key in sorted(groups):
        members = groups[key]
        entry = dict(zip(group_by, key))
        entry["n"] = len(members)
        for m in METRICS:
            values = np.array([float(r.get(m, float("nan"))) for r in members])
            values = values[np.isfinite(values)]
            entry[f"{m}_mean"] = float(values.mean()) if values.size else float("nan")
            entry[f"{m}_std"] = float(values.std()) if values.size else float("nan")
        table.append(entry)
    return table
