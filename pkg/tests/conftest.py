import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from hodgeflow.generators import (  # noqa: E402
    generate_delaunay_with_holes,
    preset_holed,
    preset_triangle,
    preset_two_triangles,
)

TWO_HOLES = [((0.3, 0.5), 0.15), ((0.7, 0.5), 0.15)]


def all_presets():
    return {
        "triangle": preset_triangle(False),
        "triangle_flipped": preset_triangle(True),
        "holed": preset_holed(),
        "holed_blue": preset_holed({"blue"}),
        "holed_blue_red": preset_holed({"blue", "red"}),
        "two_triangles_0": preset_two_triangles(0.0),
        "two_triangles_half": preset_two_triangles(0.5),
        "delaunay": generate_delaunay_with_holes(40, TWO_HOLES, seed=1),
    }


@pytest.fixture(scope="session")
def presets():
    return all_presets()


def pytest_terminal_summary(terminalreporter):
    import verdicts

    if verdicts.LINES:
        terminalreporter.section("acceptance")
        for line in sorted(verdicts.LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
