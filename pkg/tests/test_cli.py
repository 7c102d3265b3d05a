import json

import numpy as np
import pytest

from hodgeflow.cli import _number, _parse_grid, main
from hodgeflow.complex import SimplicialComplex
from hodgeflow.operators import incidence


def run(*argv):
    return main([str(a) for a in argv])


@pytest.fixture
def holed(tmp_path):
    path = tmp_path / "holed.json"
    assert run("complex", "--preset", "holed", "-o", path) == 0
    return path


def test_number_parsing():
    assert _number("pi/2") == pytest.approx(np.pi / 2)
    assert _number("0.5*pi") == pytest.approx(np.pi / 2)
    assert _number("1.25") == 1.25
    assert _parse_grid("0:pi/2:3") == pytest.approx([0, np.pi / 4, np.pi / 2])
    assert _parse_grid("0.1,0.2") == [0.1, 0.2]


def test_complex_presets(tmp_path, capsys):
    path = tmp_path / "tri.json"
    assert run("complex", "--preset", "triangle", "--flipped", "-o", path) == 0
    # the cyclic edge 2->0 is stored as (0, 2) with sign -1; flipping it removes the sign
    assert np.all(SimplicialComplex.from_json(path).orientations[1] == 1)
    assert run("complex", "--preset", "triangle", "-o", tmp_path / "cyc.json") == 0
    assert int((SimplicialComplex.from_json(tmp_path / "cyc.json").orientations[1] == -1).sum()) == 1
    assert "betti: [1, 0, 0]" in capsys.readouterr().out
    assert json.loads((tmp_path / "tri.json.cli.json").read_text())["argv"][0] == "complex"


def test_complex_two_triangles_and_delaunay(tmp_path, capsys):
    assert run("complex", "--preset", "two-triangles", "--w", "0.5", "-o", tmp_path / "t.json") == 0
    c = SimplicialComplex.from_json(tmp_path / "t.json")
    assert c.weights[2].tolist() == [0.5]
    assert run("complex", "--preset", "delaunay", "--seed", "1", "-o", tmp_path / "d.json") == 0
    assert "betti: [1, 2, 0]" in capsys.readouterr().out


def test_holed_flips(tmp_path):
    assert run("complex", "--preset", "holed", "--flip", "blue", "--flip", "red", "-o", tmp_path / "h.json") == 0
    a = SimplicialComplex.from_json(tmp_path / "h.json")
    assert run("complex", "--preset", "holed", "-o", tmp_path / "base.json") == 0
    b = SimplicialComplex.from_json(tmp_path / "base.json")
    differing = np.flatnonzero(np.any(incidence(a, 0) != incidence(b, 0), axis=1))
    assert differing.tolist() == [3, 4]


def test_hodge_dump(tmp_path, holed, capsys):
    out = tmp_path / "ops"
    assert run("hodge", holed, "-o", tmp_path / "h.json", "--dump-operators", out) == 0
    data = json.loads((tmp_path / "h.json").read_text())
    assert data["dims"] == {"grad": 8, "curl": 6, "harm": 1}
    L = np.loadtxt(out / "L1.csv", delimiter=",")
    assert L.shape == (15, 15)
    assert (out / "N0_star.csv").exists()


def test_simulate_and_analyze(tmp_path, holed):
    traj = tmp_path / "run.csv"
    assert run("simulate", holed, "--alpha2", "0.05", "--t-max", "100", "--seed", "3", "-o", traj) == 0
    report = json.loads((tmp_path / "run.analysis.json").read_text())
    assert report["regime"]["grad"]["class"] == "constant"
    out = tmp_path / "again.json"
    assert run("analyze", traj, holed, "-o", out) == 0
    assert json.loads(out.read_text()) == report


def test_simulate_initial_modes(tmp_path, holed):
    init = tmp_path / "theta0.json"
    init.write_text(json.dumps([0.0] * 15))
    assert run("simulate", holed, "--t-max", "20", "--initial", init, "-o", tmp_path / "a.csv") == 0
    assert json.loads((tmp_path / "a.analysis.json").read_text())["R2_mean"] == 1.0
    assert run("simulate", holed, "--t-max", "20", "--initial", "harmonic", "-o", tmp_path / "b.csv") == 0
    assert run("simulate", holed, "--initial", "nonsense", "-o", tmp_path / "c.csv") == 2


def test_scan_and_plots(tmp_path):
    scan = tmp_path / "scan.csv"
    assert run("scan", "--preset", "triangle", "--alpha1", "0,1.5", "--alpha2", "0:pi/2:2",
               "--t-max", "30", "--workers", "1", "-o", scan) == 0
    assert len(scan.read_text().splitlines()) == 5
    assert run("plot", "--kind", "heatmap", "--input", scan, "-o", tmp_path / "h.svg") == 0
    assert run("plot", "--kind", "line", "--input", scan, "--metric", "harm_slope", "-o", tmp_path / "l.svg") == 0
    assert (tmp_path / "h.svg").read_text().lstrip().startswith("<?xml")
    assert run("plot", "--kind", "heatmap", "--input", scan, "--metric", "missing", "-o", tmp_path / "x.svg") == 2


def test_trajectory_plot(tmp_path, holed):
    traj = tmp_path / "run.csv"
    assert run("simulate", holed, "--t-max", "20", "-o", traj) == 0
    assert run("plot", "--kind", "trajectory", "--input", traj, "--i", "0", "--j", "3", "-o", tmp_path / "p.svg") == 0


def test_config_replay_is_byte_identical(tmp_path):
    scan = tmp_path / "scan.csv"
    assert run("scan", "--preset", "holed", "--alpha1", "0.2", "--alpha2", "0.1,0.4", "--t-max", "20",
               "--workers", "1", "-o", scan) == 0
    svg = tmp_path / "s.svg"
    assert run("plot", "--kind", "line", "--input", scan, "-o", svg) == 0
    first_csv, first_svg = scan.read_bytes(), svg.read_bytes()
    scan.unlink()
    svg.unlink()
    assert run("--config", f"{scan}.cli.json") == 0
    assert run("--config", f"{svg}.cli.json") == 0
    assert scan.read_bytes() == first_csv
    assert svg.read_bytes() == first_svg


def test_error_exit_codes(tmp_path, holed):
    assert run("complex", "--preset", "square") == 2
    assert run("complex", "-o", tmp_path / "x.json") == 2
    assert run("hodge", tmp_path / "missing.json") == 2
    assert run("--config", tmp_path / "missing.cli.json") == 2
    assert run() == 2
    assert run("simulate", holed, "--alpha1", "inf", "--t-max", "1", "-o", tmp_path / "bad.csv") == 3
