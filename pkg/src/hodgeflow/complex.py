"""Weighted oriented simplicial complexes.

Simplices of order k are stored as strictly increasing vertex tuples, sorted
lexicographically within each order. Orientation is kept as a sign relative to
the sorted vertex order, so flipping a simplex never permutes vertices.
"""

from __future__ import annotations

import hashlib
import json
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import DimensionError, DuplicateError, OrderError, WeightError

FloatArray = NDArray[np.float64]


def permutation_parity(seq: Sequence[int]) -> int:
    """Return +1 for an even permutation of sorted(seq), -1 for an odd one."""
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


@dataclass(frozen=True, eq=False)
class SimplicialComplex:
    """Immutable weighted simplicial complex.

    Attributes:
        simplices: per order k, an ``(n_k, k + 1)`` integer array of sorted
            vertex tuples in lexicographic order.
        orientations: per order, a length ``n_k`` array of +1/-1 signs relative
            to the sorted vertex order.
        weights: per order, the strictly positive diagonal of ``W_k``.
    """

    simplices: tuple[NDArray[np.int64], ...]
    orientations: tuple[NDArray[np.int8], ...]
    weights: tuple[FloatArray, ...]
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if not (len(self.simplices) == len(self.orientations) == len(self.weights)):
            raise DimensionError("simplices, orientations and weights must cover the same orders")
        if len(self.simplices) == 0 or len(self.simplices[0]) == 0:
            raise DimensionError("a complex needs at least one vertex")
        for k, (s, o, w) in enumerate(zip(self.simplices, self.orientations, self.weights)):
            for arr in (s, o, w):
                arr.setflags(write=False)
            if s.ndim != 2 or s.shape[1] != k + 1:
                raise DimensionError(f"order {k} simplices must have {k + 1} vertices")
            if len(o) != len(s) or len(w) != len(s):
                raise DimensionError(f"order {k}: orientation/weight length mismatch")
            if len(s) == 0:
                raise DimensionError(f"order {k} is empty but higher orders exist")
            if np.any(np.diff(s, axis=1) <= 0):
                raise DimensionError(f"order {k}: vertex tuples must be strictly increasing")
            keys = [tuple(r) for r in s.tolist()]
            if len(set(keys)) != len(keys):
                raise DuplicateError(f"order {k} contains duplicate simplices")
            if keys != sorted(keys):
                raise DimensionError(f"order {k} is not in canonical order")
            if not np.all(np.isin(o, (-1, 1))):
                raise DimensionError(f"order {k}: orientations must be +1 or -1")
            if not np.all(w > 0) or not np.all(np.isfinite(w)):
                raise WeightError(f"order {k}: weights must be finite and > 0")
        for k in range(1, len(self.simplices)):
            lower = self.index(k - 1)
            for simplex in self.simplices[k].tolist():
                for face in combinations(simplex, k):
                    if face not in lower:
                        raise DimensionError(f"face {face} of {tuple(simplex)} is missing")

    @property
    def max_order(self) -> int:
        return len(self.simplices) - 1

    def n(self, k: int) -> int:
        """Number of k-simplices; 0 outside ``[0, max_order]``."""
        if 0 <= k <= self.max_order:
            return len(self.simplices[k])
        return 0

    @property
    def counts(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.simplices)

    def index(self, k: int) -> dict[tuple[int, ...], int]:
        """Map from sorted vertex tuple to row index at order k."""
        key = ("index", k)
        if key not in self._cache:
            self._check_order(k)
            self._cache[key] = {tuple(s): i for i, s in enumerate(self.simplices[k].tolist())}
        return self._cache[key]

    def weight_matrix(self, k: int) -> FloatArray:
        return np.diag(self.weight_vector(k))

    def weight_vector(self, k: int) -> FloatArray:
        if 0 <= k <= self.max_order:
            return self.weights[k]
        return np.zeros(0)

    def _check_order(self, k: int) -> None:
        if not 0 <= k <= self.max_order:
            raise OrderError(f"order {k} outside [0, {self.max_order}]")

    @property
    def fingerprint(self) -> str:
        """Short content hash, used as the complex id in cochains and configs."""
        if "fingerprint" not in self._cache:
            blob = json.dumps(self.to_dict(), sort_keys=True).encode()
            self._cache["fingerprint"] = hashlib.sha256(blob).hexdigest()[:16]
        return self._cache["fingerprint"]

    def __eq__(self, other):
        if not isinstance(other, SimplicialComplex):
            return NotImplemented
        if self.counts != other.counts:
            return False
        return all(
            np.array_equal(a, b)
            for attr in ("simplices", "orientations", "weights")
            for a, b in zip(getattr(self, attr), getattr(other, attr))
        )

    __hash__ = object.__hash__

    def __repr__(self):
        return f"SimplicialComplex(counts={self.counts}, id={self.fingerprint})"

    def skeleton(self, k: int) -> SimplicialComplex:
        """Return the sub-complex made of orders ``0..k``."""
        k = min(k, self.max_order)
        return SimplicialComplex(
            tuple(s.copy() for s in self.simplices[: k + 1]),
            tuple(o.copy() for o in self.orientations[: k + 1]),
            tuple(w.copy() for w in self.weights[: k + 1]),
        )

    # serialization

    def to_dict(self) -> dict:
        return {
            "simplices": {str(k): s.tolist() for k, s in enumerate(self.simplices)},
            "orientations": {str(k): o.astype(int).tolist() for k, o in enumerate(self.orientations)},
            "weights": {str(k): [float(x) for x in w] for k, w in enumerate(self.weights)},
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> SimplicialComplex:
        simplices = {int(k): v for k, v in data["simplices"].items()}
        orientations = {int(k): v for k, v in data.get("orientations", {}).items()}
        weights = {int(k): v for k, v in data.get("weights", {}).items()}
        return build_complex(simplices, weights=weights, orientations=orientations)

    def to_json(self, path: str | Path | None = None) -> str:
        text = json.dumps(self.to_dict(), indent=1)
        if path is not None:
            Path(path).write_text(text + "\n")
        return text

    @classmethod
    def from_json(cls, path: str | Path) -> SimplicialComplex:
        return cls.from_dict(json.loads(Path(path).read_text()))


def build_complex(
    simplices: Iterable[Sequence[int]] | Mapping[int, Iterable[Sequence[int]]],
    weights: Mapping[int, ArrayLike] | Sequence[ArrayLike] | None = None,
    orientations: Mapping[int, ArrayLike] | None = None,
) -> SimplicialComplex:
    """Build a complex from vertex tuples, completing it under taking faces.

    Args:
        simplices: vertex tuples of any order, either flat or as a mapping
            ``{k: [tuples]}``. A tuple given out of sorted order is stored sorted
            with orientation equal to the parity of the sorting permutation.
        weights: optional per-order weights aligned with the input tuples of
            that order. Faces added by closure, and orders without weights,
            get weight 1.
        orientations: optional extra per-order signs aligned with the input,
            multiplied into the permutation parity.

    Raises:
        WeightError: a weight is not strictly positive or lengths mismatch.
        DuplicateError: the same simplex appears twice at one order.
    """
    if isinstance(simplices, Mapping):
        by_order = {int(k): [tuple(int(v) for v in s) for s in ss] for k, ss in simplices.items()}
        for k, ss in by_order.items():
            if any(len(s) != k + 1 for s in ss):
                raise DimensionError(f"order {k} simplices must have {k + 1} vertices")
    else:
        by_order = {}
        for s in simplices:
            s = tuple(int(v) for v in s)
            by_order.setdefault(len(s) - 1, []).append(s)
    if not by_order or min(by_order) < 0:
        raise DimensionError("no valid simplices given")

    if weights is None:
        weights = {}
    elif not isinstance(weights, Mapping):
        weights = dict(enumerate(weights))
    orientations = orientations or {}

    # sorted tuple -> [orientation, weight]
    table: dict[int, dict[tuple[int, ...], list]] = {}
    for k in sorted(by_order):
        ss = by_order[k]
        w = np.ones(len(ss)) if weights.get(k) is None else np.asarray(weights[k], dtype=float)
        o = np.ones(len(ss), dtype=int) if orientations.get(k) is None else np.asarray(orientations[k], dtype=int)
        if w.shape != (len(ss),):
            raise WeightError(f"order {k}: expected {len(ss)} weights, got {w.shape}")
        if o.shape != (len(ss),):
            raise DimensionError(f"order {k}: expected {len(ss)} orientations, got {o.shape}")
        if not np.all(w > 0):
            raise WeightError(f"order {k}: weights must be strictly positive")
        entries = table.setdefault(k, {})
        for s, wi, oi in zip(ss, w, o):
            key = tuple(sorted(s))
            if len(set(key)) != len(key):
                raise DimensionError(f"simplex {s} repeats a vertex")
            if key in entries:
                raise DuplicateError(f"simplex {s} given twice")
            entries[key] = [permutation_parity(s) * int(oi), float(wi)]

    top = max(table)
    for k in range(top, 0, -1):
        lower = table.setdefault(k - 1, {})
        for key in list(table.get(k, {})):
            for face in combinations(key, k):
                lower.setdefault(face, [1, 1.0])

    orders = range(top + 1)
    keys = [sorted(table.get(k, {})) for k in orders]
    return SimplicialComplex(
        tuple(np.array(keys[k], dtype=np.int64).reshape(len(keys[k]), k + 1) for k in orders),
        tuple(np.array([table[k][s][0] for s in keys[k]], dtype=np.int8) for k in orders),
        tuple(np.array([table[k][s][1] for s in keys[k]], dtype=float) for k in orders),
    )


def flip_orientation(c: SimplicialComplex, k: int, index: int) -> SimplicialComplex:
    """Return a copy of ``c`` with the orientation of simplex ``index`` at order ``k`` negated."""
    c._check_order(k)
    if not 0 <= index < c.n(k):
        raise IndexError(f"simplex index {index} out of range for order {k} (n={c.n(k)})")
    orientations = [o.copy() for o in c.orientations]
    orientations[k][index] = -orientations[k][index]
    return SimplicialComplex(
        tuple(s.copy() for s in c.simplices),
        tuple(orientations),
        tuple(w.copy() for w in c.weights),
    )


def with_weights(c: SimplicialComplex, k: int, weights: ArrayLike) -> SimplicialComplex:
    """Return a copy of ``c`` with the order-k weights replaced."""
    c._check_order(k)
    w = np.asarray(weights, dtype=float)
    if w.shape == ():
        w = np.full(c.n(k), float(w))
    if w.shape != (c.n(k),):
        raise WeightError(f"order {k}: expected {c.n(k)} weights")
    new = [x.copy() for x in c.weights]
    new[k] = w
    return SimplicialComplex(
        tuple(s.copy() for s in c.simplices), tuple(o.copy() for o in c.orientations), tuple(new)
    )


@dataclass(frozen=True, eq=False)
class CochainVector:
    """Values attached to the k-simplices of one complex."""

    order: int
    values: FloatArray
    complex_id: str

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)

    def __len__(self):
        return len(self.values)


def cochain(c: SimplicialComplex, k: int, values: ArrayLike) -> CochainVector:
    """Wrap ``values`` as an order-k cochain of ``c``; scalars broadcast."""
    v = np.asarray(values, dtype=float)
    if v.ndim == 0:
        v = np.full(c.n(k), float(v))
    if v.shape != (c.n(k),):
        raise DimensionError(f"order-{k} cochain needs {c.n(k)} values, got {v.shape}")
    v = v.copy()
    v.setflags(write=False)
    return CochainVector(k, v, c.fingerprint)
