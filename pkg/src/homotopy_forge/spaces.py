"""Finite metric spaces and the generators used throughout the toolkit.

A space is a list of string labels plus a dense distance matrix. All
comparisons against a scale r go through `leq`, which allows a fixed
absolute tolerance EPS so that irrational chord lengths survive float
round-trips. Matrix row/column order *is* label order; every
deterministic tie-break in the toolkit refers back to that order.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    AsymmetryError,
    DomainMismatch,
    FormatError,
    NegativeDistance,
    NonzeroSelfDistance,
    TriangleViolation,
    UnknownPoint,
    ZeroDistanceDistinctPoints,
)

EPS = 1e-9

PAIR_SEP = "|"


def leq(a: float, b: float, eps: float = EPS) -> bool:
    """Tolerant a <= b used for every comparison against a scale."""
    return a <= b + eps


class FiniteMetricSpace:
    """A finite metric space with string-labelled points.

    The distance matrix is stored as a read-only float64 array whose
    order matches `labels`.
    """

    def __init__(self, labels: Sequence[str], dist: np.ndarray):
        labels = tuple(str(l) for l in labels)
        if len(set(labels)) != len(labels):
            raise FormatError("duplicate labels")
        dist = np.asarray(dist, dtype=float).copy()
        if dist.shape != (len(labels), len(labels)):
            raise FormatError(
                f"distance matrix shape {dist.shape} does not match "
                f"{len(labels)} labels"
            )
        dist.setflags(write=False)
        self.labels = labels
        self.dist = dist
        self._index = {l: i for i, l in enumerate(labels)}

    @property
    def n(self) -> int:
        return len(self.labels)

    def __len__(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise UnknownPoint(label) from None

    def d(self, i: int, j: int) -> float:
        return float(self.dist[i, j])

    def d_label(self, a: str, b: str) -> float:
        return float(self.dist[self.index(a), self.index(b)])

    def diameter(self) -> float:
        return float(self.dist.max()) if self.n else 0.0

    def distinct_distances(self) -> list[float]:
        """Sorted positive distance values occurring in the space."""
        vals = sorted(set(float(v) for v in self.dist.ravel()))
        return [v for v in vals if v > 0.0]

    def restriction(self, indices: Sequence[int]) -> "FiniteMetricSpace":
        """Subspace on the given point indices (order preserved)."""
        idx = list(indices)
        labels = [self.labels[i] for i in idx]
        return FiniteMetricSpace(labels, self.dist[np.ix_(idx, idx)])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FiniteMetricSpace):
            return NotImplemented
        return self.labels == other.labels and np.array_equal(self.dist, other.dist)

    def __hash__(self):
        return hash(self.labels)

    def __repr__(self) -> str:
        return f"<FiniteMetricSpace n={self.n} labels={self.labels[:4]}...>"


class IntervalSpace(FiniteMetricSpace):
    """The discrete time interval {0, 1, ..., m} with d(i, j) = |i - j|."""

    def __init__(self, m: int):
        if m < 0:
            raise FormatError("interval length must be >= 0")
        pts = np.arange(m + 1, dtype=float)
        super().__init__([str(i) for i in range(m + 1)], np.abs(pts[:, None] - pts[None, :]))
        self.m = m


class ProductSpace(FiniteMetricSpace):
    """Cartesian product with the l1 (sum) metric.

    Point (x, y) gets the label "x|y"; pairs are ordered left-index
    major so the matrix order is again label order.
    """

    def __init__(self, left: FiniteMetricSpace, right: FiniteMetricSpace):
        for comp in (left, right):
            for l in comp.labels:
                if PAIR_SEP in l:
                    raise FormatError(
                        f"label {l!r} contains {PAIR_SEP!r}; cannot form product labels"
                    )
        labels = [
            f"{a}{PAIR_SEP}{b}" for a in left.labels for b in right.labels
        ]
        d = (
            left.dist[:, None, :, None] + right.dist[None, :, None, :]
        ).reshape(left.n * right.n, left.n * right.n)
        super().__init__(labels, d)
        self.left = left
        self.right = right

    def split_index(self, k: int) -> tuple[int, int]:
        return divmod(k, self.right.n)

    def pair_index(self, i: int, j: int) -> int:
        return i * self.right.n + j


class PathSpace:
    """Paths of a fixed length in a base space, under the uniform metric.

    Never materialized: it only knows how to measure the distance
    between two equal-length point sequences, max over matching steps.
    """

    def __init__(self, base: FiniteMetricSpace, m: int, r: float):
        self.base = base
        self.m = m
        self.r = r

    def uniform_distance(self, pts_a: Sequence[int], pts_b: Sequence[int]) -> float:
        if len(pts_a) != len(pts_b):
            raise DomainMismatch("paths of different lengths")
        return max(float(self.base.dist[a, b]) for a, b in zip(pts_a, pts_b))


def validate_metric(
    matrix: Sequence[Sequence[float]] | np.ndarray,
    labels: Sequence[str] | None = None,
    eps: float = EPS,
) -> FiniteMetricSpace:
    """Check the metric axioms and wrap the matrix in a space.

    Raises NegativeDistance, NonzeroSelfDistance, AsymmetryError,
    ZeroDistanceDistinctPoints or TriangleViolation carrying the first
    witness in row-major scan order.
    """
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise FormatError(f"distance matrix must be square, got shape {m.shape}")
    n = m.shape[0]
    if labels is None:
        labels = [f"p{i}" for i in range(n)]
    for i in range(n):
        if m[i, i] > eps or m[i, i] < -eps:
            raise NonzeroSelfDistance(i, float(m[i, i]))
    for i in range(n):
        for j in range(n):
            if m[i, j] < -eps:
                raise NegativeDistance(i, j, float(m[i, j]))
            if i < j:
                if abs(m[i, j] - m[j, i]) > eps:
                    raise AsymmetryError(i, j, float(m[i, j]), float(m[j, i]))
                if m[i, j] <= eps:
                    raise ZeroDistanceDistinctPoints(i, j)
    for k in range(n):
        via = m[:, k, None] + m[None, k, :]
        bad = m > via + eps
        if bad.any():
            i, j = map(int, np.argwhere(bad)[0])
            raise TriangleViolation(i, j, k, float(m[i, j] - via[i, j]))
    return FiniteMetricSpace(labels, m)


def space_from_points(
    coords: Sequence[Sequence[float]], labels: Sequence[str] | None = None
) -> FiniteMetricSpace:
    """Euclidean space on explicit coordinates."""
    pts = np.asarray(coords, dtype=float)
    if pts.ndim != 2:
        raise FormatError("coords must be a list of equal-length vectors")
    diff = pts[:, None, :] - pts[None, :, :]
    d = np.sqrt((diff * diff).sum(axis=2))
    if labels is None:
        labels = [f"p{i}" for i in range(len(pts))]
    return validate_metric(d, labels)


def l1_product(left: FiniteMetricSpace, right: FiniteMetricSpace) -> ProductSpace:
    """Product space with d((x,y),(x',y')) = d(x,x') + d(y,y')."""
    return ProductSpace(left, right)


# --- Generators -------------------------------------------------------------


def gen_circle(n: int, radius: float = 1.0) -> FiniteMetricSpace:
    """n points evenly spaced on a circle, chordal (straight-line) metric.

    d(i, j) = 2 * radius * sin(pi * gap / n) where gap is the cyclic
    index difference. For even n the diameter is exactly 2 * radius.
    """
    if n < 3:
        raise FormatError("a circle sample needs n >= 3 points")
    if radius <= 0:
        raise FormatError("radius must be positive")
    idx = np.arange(n)
    gap = np.minimum(np.abs(idx[:, None] - idx[None, :]), n - np.abs(idx[:, None] - idx[None, :]))
    d = 2.0 * radius * np.sin(np.pi * gap / n)
    np.fill_diagonal(d, 0.0)
    return FiniteMetricSpace([f"p{i}" for i in range(n)], d)


def gen_interval_grid(m: int, length: float = 1.0) -> FiniteMetricSpace:
    """m+1 evenly spaced points on a segment of the given length."""
    if m < 1:
        raise FormatError("interval grid needs m >= 1")
    if length <= 0:
        raise FormatError("length must be positive")
    pts = np.linspace(0.0, length, m + 1)
    d = np.abs(pts[:, None] - pts[None, :])
    return FiniteMetricSpace([f"t{i}" for i in range(m + 1)], d)


def gen_wedge_circles(k: int, n: int, radius: float = 1.0) -> FiniteMetricSpace:
    """k circles of n points each, glued at a single shared basepoint.

    Distances are shortest paths in the union graph whose intra-circle
    edges carry chord lengths; the basepoint "w" is point 0 of every
    circle, so two points on different circles are d(x,w) + d(w,y)
    apart while same-circle distances stay chordal.
    """
    if k < 1:
        raise FormatError("wedge needs k >= 1 circles")
    if n < 3:
        raise FormatError("each circle needs n >= 3 points")
    if radius <= 0:
        raise FormatError("radius must be positive")
    labels = ["w"]
    # circle c contributes points 1..n-1; index 0 is the shared basepoint
    owners: list[tuple[int, int]] = [(-1, 0)]
    for c in range(k):
        for j in range(1, n):
            labels.append(f"c{c}p{j}")
            owners.append((c, j))
    size = len(labels)
    big = np.full((size, size), np.inf)
    np.fill_diagonal(big, 0.0)

    def chord(gap: int) -> float:
        g = min(gap % n, n - gap % n)
        return 2.0 * radius * math.sin(math.pi * g / n)

    for a in range(size):
        ca, ja = owners[a]
        for b in range(size):
            cb, jb = owners[b]
            if a == b:
                continue
            same = ca == cb or ca == -1 or cb == -1
            if same:
                big[a, b] = min(big[a, b], chord(ja - jb))
    # Floyd-Warshall over the union graph (routes through "w" between circles)
    for via in range(size):
        big = np.minimum(big, big[:, via, None] + big[None, via, :])
    return FiniteMetricSpace(labels, big)


def gen_hawaiian(k: int, n: int) -> FiniteMetricSpace:
    """First k circles of the shrinking-circle chain, n samples each.

    Circle j (j = 1..k) satisfies (x - 1/j)^2 + y^2 = (1/j)^2, so all
    circles pass through the origin; that shared sample is labelled
    "o". Distances are ambient planar Euclidean, not path lengths.
    """
    if k < 1:
        raise FormatError("need k >= 1 circles")
    if n < 3:
        raise FormatError("each circle needs n >= 3 samples")
    labels = ["o"]
    coords: list[tuple[float, float]] = [(0.0, 0.0)]
    for j in range(1, k + 1):
        cx = 1.0 / j
        rad = 1.0 / j
        for t in range(1, n):
            # t = 0 would be the origin (angle pi); skip the duplicate
            theta = math.pi + 2.0 * math.pi * t / n
            coords.append((cx + rad * math.cos(theta), rad * math.sin(theta)))
            labels.append(f"c{j}p{t}")
    return space_from_points(coords, labels)


# --- JSON form --------------------------------------------------------------


def space_to_json(space: FiniteMetricSpace) -> dict:
    return {
        "labels": list(space.labels),
        "metric": {
            "type": "explicit",
            "matrix": [[float(v) for v in row] for row in space.dist],
        },
    }


def space_from_json(obj: dict) -> FiniteMetricSpace:
    if not isinstance(obj, dict) or "metric" not in obj:
        raise FormatError("space JSON needs a 'metric' object")
    metric = obj["metric"]
    labels = obj.get("labels")
    mtype = metric.get("type")
    if mtype == "explicit":
        return validate_metric(metric["matrix"], labels)
    if mtype == "euclidean":
        return space_from_points(metric["coords"], labels)
    raise FormatError(f"unknown metric type {mtype!r}")


def pair_label(space: FiniteMetricSpace, i: int, j: int) -> str:
    return f"{space.labels[i]}{PAIR_SEP}{space.labels[j]}"
