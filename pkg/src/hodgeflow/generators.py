"""Example complexes: triangle, holed grid, two triangles, and Delaunay with holes."""

from __future__ import annotations

from collections.abc import Iterable, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import Delaunay, QhullError

from .complex import SimplicialComplex, build_complex, flip_orientation

# Holed grid: vertex v sits at (v % 3, v // 3). The four unit squares are split
# into triangles along a diagonal except the upper-right one, which stays empty.
HOLED_TRIANGLES = ((0, 1, 4), (0, 3, 4), (1, 2, 5), (1, 4, 5), (3, 4, 7), (3, 6, 7))
HOLED_HOLE = ((4, 5), (5, 8), (7, 8), (4, 7))
HOLED_POSITIONS = {v: (float(v % 3), float(v // 3)) for v in range(9)}
# Edges reversed relative to the sorted vertex order in the base variant.
HOLED_REVERSED = ((1, 2), (2, 5), (3, 4), (4, 7))
HOLED_MARKED = {"blue": (1, 2), "red": (1, 4)}


def preset_triangle(flipped: bool = False) -> SimplicialComplex:
    """Single filled triangle with edges oriented around the face.

    The edges are 0->1, 1->2 and 2->0, so edge (0, 2) is stored with sign -1.
    ``flipped=True`` reverses that edge to 0->2.
    """
    c = build_complex([(0, 1), (1, 2), (2, 0), (0, 1, 2)])
    if flipped:
        c = flip_orientation(c, 1, c.index(1)[(0, 2)])
    return c


def preset_holed(flip_set: Iterable[str] = ()) -> SimplicialComplex:
    """Grid of six triangles around one empty square (``beta_1 = 1``).

    Edges ``HOLED_REVERSED`` point from the larger to the smaller vertex; all
    others point from the smaller to the larger vertex. ``flip_set`` may contain
    ``"blue"`` (edge (1, 2), index 3) and ``"red"`` (edge (1, 4), index 4) to
    reverse those edges as well.
    """
    flips = set(flip_set)
    unknown = flips - set(HOLED_MARKED)
    if unknown:
        raise ValueError(f"unknown edge names {sorted(unknown)}; use 'blue' and/or 'red'")
    c = build_complex([*HOLED_TRIANGLES, *HOLED_HOLE])
    reversed_edges = set(HOLED_REVERSED) ^ {HOLED_MARKED[name] for name in flips}
    for edge in sorted(reversed_edges):
        c = flip_orientation(c, 1, c.index(1)[edge])
    return c


def preset_two_triangles(w: float = 1.0) -> SimplicialComplex:
    """Triangles (0, 1, 2) and (1, 2, 3) sharing edge (1, 2).

    The first triangle is filled with a face of weight ``w``; ``w = 0`` leaves
    both triangles empty.
    """
    if w < 0:
        raise ValueError("face weight must be >= 0")
    edges = [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)]
    if w == 0:
        return build_complex(edges)
    return build_complex({1: edges, 2: [(0, 1, 2)]}, weights={2: [w]})


def _inside(points: np.ndarray, holes: Sequence[tuple[tuple[float, float], float]]) -> np.ndarray:
    mask = np.zeros(len(points), dtype=bool)
    for centre, radius in holes:
        mask |= np.hypot(points[:, 0] - centre[0], points[:, 1] - centre[1]) < radius
    return mask


def _sample_points(rng: np.random.Generator, n_points: int, holes) -> np.ndarray:
    pts = np.zeros((0, 2))
    while len(pts) < n_points:
        batch = rng.random((2 * n_points, 2))
        pts = np.vstack([pts, batch[~_inside(batch, holes)]])
    return pts[:n_points]


def _betti_graph(n_vertices: int, edges: np.ndarray, n_faces: int) -> tuple[int, int]:
    """``(beta_0, beta_1)`` of a planar 2-complex without enclosed voids."""
    graph = coo_matrix((np.ones(len(edges)), (edges[:, 0], edges[:, 1])), shape=(n_vertices, n_vertices))
    b0 = connected_components(graph, directed=False)[0]
    return b0, len(edges) - n_vertices + b0 - n_faces


def generate_delaunay_with_holes(
    n_points: int,
    holes: Sequence[tuple[tuple[float, float], float]] = (),
    seed: int = 0,
    max_attempts: int = 100,
) -> SimplicialComplex:
    """Delaunay triangulation of random points in the unit square, with holes.

    Points falling inside a hole are redrawn. Triangles whose centroid lies
    inside a hole lose their face, and edges no longer bounding any remaining
    triangle are dropped too, so every hole is a single cycle of edges.
    Isolated vertices are discarded and the rest relabelled in order.

    A draw whose result is disconnected, has the wrong number of holes, or is
    degenerate is replaced by the next seed substream, so the output depends
    only on the arguments.
    """
    if n_points < 3:
        raise ValueError("need at least 3 points")
    holes = [((float(c[0]), float(c[1])), float(r)) for c, r in holes]
    for (c, r) in holes:
        if r <= 0 or c[0] - r < 0 or c[0] + r > 1 or c[1] - r < 0 or c[1] + r > 1:
            raise ValueError(f"hole at {c} with radius {r} must lie inside the unit square")
    for i, (c1, r1) in enumerate(holes):
        for c2, r2 in holes[i + 1 :]:
            if np.hypot(c1[0] - c2[0], c1[1] - c2[1]) < r1 + r2:
                raise ValueError("holes overlap")

    for attempt in range(max_attempts):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(attempt,)))
        pts = _sample_points(rng, n_points, holes)
        try:
            tri = Delaunay(pts)
        except QhullError:
            continue
        simplices = np.sort(tri.simplices, axis=1)
        keep = ~_inside(pts[simplices].mean(axis=1), holes)
        faces = simplices[keep]
        if len(faces) == 0:
            continue
        edges = np.unique(np.vstack([faces[:, [0, 1]], faces[:, [0, 2]], faces[:, [1, 2]]]), axis=0)
        used = np.unique(faces)
        relabel = np.full(n_points, -1)
        relabel[used] = np.arange(len(used))
        edges, faces = relabel[edges], relabel[faces]
        b0, b1 = _betti_graph(len(used), edges, len(faces))
        if b0 != 1 or b1 != len(holes):
            continue
        return build_complex({1: [tuple(e) for e in edges], 2: [tuple(f) for f in faces]})
    raise RuntimeError(f"no valid triangulation after {max_attempts} attempts")
