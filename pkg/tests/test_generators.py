import numpy as np
import pytest

from hodgeflow.generators import (
    HOLED_MARKED,
    generate_delaunay_with_holes,
    preset_holed,
    preset_triangle,
    preset_two_triangles,
)
from hodgeflow.hodge import betti, betti_numbers

from conftest import TWO_HOLES


def test_triangle_shapes():
    c = preset_triangle()
    assert c.counts == (3, 3, 1)
    assert betti(c, 1) == 0
    assert betti(c.skeleton(1), 1) == 1


def test_triangle_flipped_changes_one_sign():
    a, b = preset_triangle(False), preset_triangle(True)
    for k in range(3):
        assert np.array_equal(a.simplices[k], b.simplices[k])
    diff = np.flatnonzero(a.orientations[1] != b.orientations[1])
    assert diff.tolist() == [a.index(1)[(0, 2)]]


@pytest.mark.parametrize("flips,n_changes", [((), 0), (("blue",), 1), (("blue", "red"), 2)])
def test_holed_variants(flips, n_changes):
    base, c = preset_holed(), preset_holed(flips)
    assert c.counts == base.counts == (9, 15, 6)
    assert betti(c, 1) == 1
    assert int(np.sum(base.orientations[1] != c.orientations[1])) == n_changes
    for name in flips:
        i = c.index(1)[HOLED_MARKED[name]]
        assert c.orientations[1][i] == -base.orientations[1][i]


def test_holed_rejects_unknown_name():
    with pytest.raises(ValueError):
        preset_holed({"green"})


def test_two_triangles():
    assert betti_numbers(preset_two_triangles(0.0)) == [1, 2]
    one = preset_two_triangles(1.0)
    half = preset_two_triangles(0.5)
    assert one.counts == half.counts == (4, 5, 1)
    assert betti(one, 1) == betti(half, 1) == 1
    assert half.weights[2].tolist() == [0.5]
    assert np.all(half.weights[1] == 1.0)
    with pytest.raises(ValueError):
        preset_two_triangles(-1.0)


def test_delaunay_two_holes():
    c = generate_delaunay_with_holes(40, TWO_HOLES, seed=1)
    assert betti_numbers(c) == [1, 2, 0]


def test_delaunay_no_holes():
    c = generate_delaunay_with_holes(30, [], seed=4)
    assert betti_numbers(c) == [1, 0, 0]


def test_delaunay_deterministic():
    a = generate_delaunay_with_holes(40, TWO_HOLES, seed=7)
    b = generate_delaunay_with_holes(40, TWO_HOLES, seed=7)
    assert a == b and a.to_json() == b.to_json()
    assert a != generate_delaunay_with_holes(40, TWO_HOLES, seed=8)


def test_delaunay_bad_holes():
    with pytest.raises(ValueError):
        generate_delaunay_with_holes(40, [((0.5, 0.5), 0.3), ((0.6, 0.5), 0.3)], seed=0)
    with pytest.raises(ValueError):
        generate_delaunay_with_holes(40, [((0.05, 0.5), 0.1)], seed=0)
    with pytest.raises(ValueError):
        generate_delaunay_with_holes(2, [], seed=0)
