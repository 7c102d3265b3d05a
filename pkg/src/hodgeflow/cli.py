"""Command-line interface: ``hodgeflow <command> ...``.

Every command that writes files also writes ``<output>.cli.json`` holding its
argument list; ``hodgeflow --config <file>`` replays that exact invocation.
Exit codes: 0 success, 2 usage or input error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
from pathlib import Path

import numpy as np

from .analysis import Thresholds, analysis_report
from .complex import SimplicialComplex
from .dynamics import Trajectory, frustration, integrate, random_initial_condition
from .errors import HodgeflowError, IntegrationError
from .hodge import betti_numbers, hodge_bases
from .operators import coboundary, dual_coboundary, hodge_laplacian
from .sweep import PRESETS, ScanConfig, make_complex, read_scan_csv, run_scan, write_scan


class UsageError(Exception):
    pass


_PI_TERM = re.compile(r"^(?:([0-9.eE+-]+)\*?)?pi(?:/([0-9.eE+-]+))?$")


def _number(text: str) -> float:
    """A float, or a multiple of pi such as ``pi/2`` or ``0.5*pi``."""
    text = text.strip()
    m = _PI_TERM.match(text)
    if m:
        return float(m.group(1) or 1.0) * math.pi / float(m.group(2) or 1.0)
    return float(text)


def _parse_grid(text: str) -> list[float]:
    """``"a,b,c"`` or ``"start:stop:count"`` (inclusive linspace)."""
    try:
        if ":" in text:
            start, stop, count = text.split(":")
            return [float(x) for x in np.linspace(_number(start), _number(stop), int(count))]
        return [_number(x) for x in text.split(",") if x.strip()]
    except ValueError as err:
        raise UsageError(f"cannot parse grid {text!r}: {err}") from err


def _source_from_args(args) -> dict:
    if getattr(args, "input", None):
        return {"path": str(args.input)}
    if args.preset is None:
        raise UsageError("give --preset or --input")
    if args.preset == "triangle":
        return {"preset": "triangle", "flipped": bool(args.flipped)}
    if args.preset == "holed":
        return {"preset": "holed", "flip_set": sorted(set(args.flip or []))}
    if args.preset == "two-triangles":
        return {"preset": "two-triangles", "w": args.w}
    return {"preset": "delaunay", "points": args.points, "n_holes": args.holes, "seed": args.seed}


def _add_complex_source(p: argparse.ArgumentParser, seed_flag: bool = True) -> None:
    p.add_argument("--preset", choices=PRESETS)
    p.add_argument("--input", type=Path, help="complex JSON file instead of a preset")
    p.add_argument("--flipped", action="store_true", help="triangle: reverse edge (0, 2)")
    p.add_argument("--flip", action="append", choices=("blue", "red"), help="holed: reverse a marked edge")
    p.add_argument("--w", type=float, default=1.0, help="two-triangles: face weight")
    p.add_argument("--points", type=int, default=40, help="delaunay: number of points")
    p.add_argument("--holes", type=int, default=2, help="delaunay: number of holes")
    if seed_flag:
        p.add_argument("--seed", type=int, default=1, help="delaunay: generator seed")


def _write_cli_record(output: Path, argv: list[str]) -> None:
    Path(f"{output}.cli.json").write_text(json.dumps({"argv": argv}, indent=1) + "\n")


def _load_alpha(value: float, file: Path | None):
    if file is None:
        return value
    try:
        data = json.loads(Path(file).read_text())
    except (OSError, json.JSONDecodeError) as err:
        raise UsageError(f"cannot read {file}: {err}") from err
    return np.asarray(data.get("values", data) if isinstance(data, dict) else data, dtype=float)


def cmd_complex(args, argv) -> int:
    c = make_complex(_source_from_args(args))
    c.to_json(args.output)
    _write_cli_record(args.output, argv)
    print(f"n_k: {list(c.counts)}")
    print(f"betti: {betti_numbers(c)}")
    return 0


def cmd_hodge(args, argv) -> int:
    c = SimplicialComplex.from_json(args.complex)
    b = hodge_bases(c, args.k)
    summary = {"k": args.k, "dims": b.dims, "betti": betti_numbers(c),
               "grad": b.p_grad.tolist(), "curl": b.p_curl.tolist(), "harm": b.p_harm.tolist()}
    if args.output:
        Path(args.output).write_text(json.dumps(summary, indent=1) + "\n")
        _write_cli_record(args.output, argv)
    if args.dump_operators:
        out = Path(args.dump_operators)
        out.mkdir(parents=True, exist_ok=True)
        np.savetxt(out / f"L{args.k}.csv", hodge_laplacian(c, args.k), delimiter=",", fmt="%.17g")
        for k in range(c.max_order):
            np.savetxt(out / f"N{k}.csv", coboundary(c, k), delimiter=",", fmt="%.17g")
            np.savetxt(out / f"N{k}_star.csv", dual_coboundary(c, k), delimiter=",", fmt="%.17g")
    print(f"dims: {b.dims}")
    print(f"betti: {summary['betti']}")
    return 0


def _initial(c: SimplicialComplex, k: int, mode: str, seed: int) -> np.ndarray:
    if mode == "random":
        return random_initial_condition(c, k, seed)
    if mode == "harmonic":
        p = hodge_bases(c, k).p_harm
        if len(p) == 0:
            raise UsageError("no harmonic cochains at this order")
        rng = np.random.default_rng(seed)
        return rng.uniform(-np.pi, np.pi, len(p)) @ p
    if mode == "zero":
        return np.zeros(c.n(k))
    path = Path(mode)
    if not path.exists():
        raise UsageError(f"--initial must be random, harmonic, zero or a JSON file, got {mode!r}")
    return np.asarray(json.loads(path.read_text()), dtype=float)


def cmd_simulate(args, argv) -> int:
    c = SimplicialComplex.from_json(args.complex)
    alpha1 = _load_alpha(args.alpha1, args.alpha1_file)
    alpha2 = _load_alpha(args.alpha2, args.alpha2_file)
    if args.k == c.max_order:
        alpha2 = 0.0
    fr = frustration(c, args.k, alpha1, alpha2)
    theta0 = _initial(c, args.k, args.initial, args.seed)
    traj = integrate(c, args.k, fr, theta0, args.t_max, args.dt, args.sample_every, args.rhs, seed=args.seed)
    out = Path(args.output)
    traj.to_csv(out)
    lyap = {} if args.lyapunov else None
    report = analysis_report(traj, c, hodge_bases(c, args.k), Thresholds(), lyap)
    Path(f"{out.with_suffix('')}.analysis.json").write_text(json.dumps(report, indent=1, sort_keys=True) + "\n")
    _write_cli_record(out, argv)
    print(f"R2_mean={report['R2_mean']:.6g} R2_std={report['R2_std']:.3g} "
          + " ".join(f"{s}={report['regime'][s]['class']}" for s in ("grad", "curl", "harm")))
    return 0


def cmd_analyze(args, argv) -> int:
    c = SimplicialComplex.from_json(args.complex)
    traj = Trajectory.from_csv(args.trajectory)
    k = int(traj.config.get("k", args.k))
    report = analysis_report(traj, c, hodge_bases(c, k), Thresholds(window_fraction=args.window),
                             {} if args.lyapunov else None)
    text = json.dumps(report, indent=1, sort_keys=True) + "\n"
    if args.output:
        Path(args.output).write_text(text)
        _write_cli_record(args.output, argv)
    else:
        sys.stdout.write(text)
    return 0


def cmd_scan(args, argv) -> int:
    if args.scan_config:
        cfg = ScanConfig.from_dict(json.loads(Path(args.scan_config).read_text()))
    else:
        cfg = ScanConfig(
            complex=_source_from_args(args),
            alpha1=_parse_grid(args.alpha1),
            alpha2=_parse_grid(args.alpha2),
            seeds=args.seeds,
            k=args.k,
            root_seed=args.root_seed,
            t_max=args.t_max,
            dt=args.dt,
            sample_every=args.sample_every,
            rhs=args.rhs,
            lyapunov={} if args.lyapunov else None,
        )
    records = run_scan(cfg, workers=args.workers)
    write_scan(records, cfg, args.output)
    _write_cli_record(args.output, argv)
    failed = sum(r.status != "ok" for r in records)
    print(f"{len(records)} records written to {args.output} ({failed} failed)")
    return 0


def cmd_plot(args, argv) -> int:
    from . import plotting

    try:
        if args.kind == "trajectory":
            traj = Trajectory.from_csv(args.input)
            plotting.trajectory_projection(traj.times, traj.phases, args.output, args.i, args.j)
        else:
            rows = read_scan_csv(args.input)
            if not rows:
                raise UsageError(f"{args.input} has no rows")
            if args.kind == "heatmap":
                plotting.heatmap(rows, args.metric, args.output, x=args.x or "alpha1", y=args.y or "alpha2")
            else:
                plotting.line(rows, args.metric, args.output, x=args.x or "alpha2", group=args.group)
    except KeyError as err:
        raise UsageError(f"column or index not found: {err}") from err
    _write_cli_record(args.output, argv)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hodgeflow", description=__doc__.splitlines()[0])
    parser.add_argument("--config", type=Path, help="replay a recorded .cli.json invocation")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("complex", help="build a preset complex and write it as JSON")
    _add_complex_source(p)
    p.add_argument("-o", "--output", type=Path, default=Path("complex.json"))
    p.set_defaults(func=cmd_complex)

    p = sub.add_parser("hodge", help="Hodge decomposition bases and Betti numbers")
    p.add_argument("complex", type=Path)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("-o", "--output", type=Path)
    p.add_argument("--dump-operators", type=Path, metavar="DIR", help="write N_k, N_k^* and L_k as CSV")
    p.set_defaults(func=cmd_hodge)

    p = sub.add_parser("simulate", help="integrate one trajectory and analyse it")
    p.add_argument("complex", type=Path)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--alpha1", type=float, default=0.0)
    p.add_argument("--alpha2", type=float, default=0.0)
    p.add_argument("--alpha1-file", type=Path)
    p.add_argument("--alpha2-file", type=Path)
    p.add_argument("--t-max", type=float, default=600.0)
    p.add_argument("--dt", type=float, default=0.01)
    p.add_argument("--sample-every", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--initial", default="random", help="random, harmonic, zero or a JSON list")
    p.add_argument("--rhs", choices=("consensus", "diffusion"), default="consensus")
    p.add_argument("--lyapunov", action="store_true")
    p.add_argument("-o", "--output", type=Path, default=Path("trajectory.csv"))
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analyze", help="analyse a stored trajectory")
    p.add_argument("trajectory", type=Path)
    p.add_argument("complex", type=Path)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--window", type=float, default=0.5, help="fraction of samples kept after the transient")
    p.add_argument("--lyapunov", action="store_true")
    p.add_argument("-o", "--output", type=Path)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("scan", help="sweep (alpha1, alpha2, seed) and write a CSV")
    _add_complex_source(p)
    p.add_argument("--scan-config", type=Path, help="ScanConfig JSON (overrides the other options)")
    p.add_argument("--alpha1", default="0:2.5:26")
    p.add_argument("--alpha2", default="0:pi/2:18")
    p.add_argument("--seeds", type=int, default=1)
    p.add_argument("--root-seed", type=int, default=0)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--t-max", type=float, default=600.0)
    p.add_argument("--dt", type=float, default=0.01)
    p.add_argument("--sample-every", type=int, default=10)
    p.add_argument("--rhs", choices=("consensus", "diffusion"), default="consensus")
    p.add_argument("--lyapunov", action="store_true")
    p.add_argument("--workers", type=int, help="process count (capped by HODGEFLOW_THREADS)")
    p.add_argument("-o", "--output", type=Path, default=Path("scan.csv"))
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("plot", help="render an SVG from a scan or trajectory CSV")
    p.add_argument("--kind", choices=("heatmap", "line", "trajectory"), required=True)
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--metric", default="R2_mean")
    p.add_argument("--x")
    p.add_argument("--y")
    p.add_argument("--group", default="alpha1", help="line plots: one curve per value of this column")
    p.add_argument("--i", type=int, default=0)
    p.add_argument("--j", type=int, default=1)
    p.add_argument("-o", "--output", type=Path, default=Path("plot.svg"))
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.config is not None:
        try:
            recorded = json.loads(args.config.read_text())["argv"]
        except (OSError, KeyError, json.JSONDecodeError) as err:
            print(f"hodgeflow: cannot read config {args.config}: {err}", file=sys.stderr)
            return 2
        return main(recorded)
    if args.command is None:
        parser.print_help(sys.stderr)
        return 2
    try:
        return args.func(args, argv)
    except IntegrationError as err:
        print(f"hodgeflow: integration failed: {err}", file=sys.stderr)
        return 3
    except (UsageError, HodgeflowError, ValueError, OSError) as err:
        print(f"hodgeflow: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
