"""Discrete paths at a scale r and the connectivity they induce.

An r-path is a finite point sequence whose consecutive distances stay
within r (tolerantly). Connectivity, shortest hop paths and geodesic
multiplicity all live on the graph with an edge wherever d <= r.
"""

from __future__ import annotations

import weakref
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainMismatch, EndpointMismatch, FormatError, NoPath, ValidationFailure
from .spaces import EPS, FiniteMetricSpace, leq


def is_r_path(space: FiniteMetricSpace, points: Sequence[int], r: float) -> tuple[bool, int | None]:
    """Check consecutive steps; returns (ok, first violating step index)."""
    for i in range(len(points) - 1):
        if not leq(space.d(points[i], points[i + 1]), r):
            return False, i
    return True, None


@dataclass(frozen=True)
class DiscretePath:
    """An r-path. `points` are point indices into `space`.

    Construction validates the step condition, so every DiscretePath in
    circulation satisfies is_r_path.
    """

    space: FiniteMetricSpace
    r: float
    points: tuple[int, ...]

    def __post_init__(self):
        if len(self.points) == 0:
            raise FormatError("a path needs at least one point")
        object.__setattr__(self, "points", tuple(int(p) for p in self.points))
        ok, bad = is_r_path(self.space, self.points, self.r)
        if not ok:
            raise ValidationFailure(
                f"step {bad} of length {self.space.d(self.points[bad], self.points[bad + 1])} "
                f"exceeds r={self.r}",
                where=bad,
            )

    @property
    def m(self) -> int:
        """Number of steps (sequence length minus one)."""
        return len(self.points) - 1

    @property
    def start(self) -> int:
        return self.points[0]

    @property
    def end(self) -> int:
        return self.points[-1]

    def labels(self) -> list[str]:
        return [self.space.labels[p] for p in self.points]

    def at_scale(self, r: float) -> "DiscretePath":
        """The same point sequence viewed at a coarser scale r' >= r."""
        return DiscretePath(self.space, r, self.points)


def path_from_labels(space: FiniteMetricSpace, r: float, labels: Sequence[str]) -> DiscretePath:
    return DiscretePath(space, r, tuple(space.index(l) for l in labels))


def concat(a: DiscretePath, b: DiscretePath) -> DiscretePath:
    """Join two paths at a shared junction point; lengths add."""
    if a.space != b.space:
        raise DomainMismatch("paths over different spaces")
    if a.r != b.r:
        raise DomainMismatch(f"paths at different scales {a.r} and {b.r}")
    if a.end != b.start:
        raise EndpointMismatch(a.space.labels[a.end], b.space.labels[b.start])
    return DiscretePath(a.space, a.r, a.points + b.points[1:])


def reverse(p: DiscretePath) -> DiscretePath:
    return DiscretePath(p.space, p.r, tuple(reversed(p.points)))


@dataclass
class RGraph:
    """The scale-r proximity graph of a space, with hop-count structure.

    Precomputes adjacency lists (sorted by point index), all-pairs hop
    counts, geodesic multiplicities (number of minimum-hop r-paths) and
    a parent choice for deterministic shortest paths.
    """

    space: FiniteMetricSpace
    r: float
    adj: list[list[int]] = field(init=False)
    hops: np.ndarray = field(init=False)

    def __post_init__(self):
        n = self.space.n
        close = self.space.dist <= self.r + EPS
        self.adj = [
            [j for j in range(n) if j != i and close[i, j]] for i in range(n)
        ]
        hops = np.full((n, n), -1, dtype=np.int64)
        for s in range(n):
            hops[s, s] = 0
            frontier = deque([s])
            while frontier:
                u = frontier.popleft()
                for v in self.adj[u]:
                    if hops[s, v] < 0:
                        hops[s, v] = hops[s, u] + 1
                        frontier.append(v)
        self.hops = hops

    def connected(self, i: int, j: int) -> bool:
        return self.hops[i, j] >= 0

    def geodesic_count(self, s: int, t: int) -> int:
        """Number of minimum-hop r-paths from s to t (0 if unreachable)."""
        if self.hops[s, t] < 0:
            return 0
        counts = {s: 1}
        order = sorted(
            (k for k in range(self.space.n) if 0 <= self.hops[s, k] <= self.hops[s, t]),
            key=lambda k: int(self.hops[s, k]),
        )
        for u in order:
            if u == s:
                continue
            counts[u] = sum(
                counts.get(v, 0)
                for v in self.adj[u]
                if self.hops[s, v] == self.hops[s, u] - 1
            )
        return counts.get(t, 0)

    def shortest_path_points(self, s: int, t: int) -> list[int]:
        """Minimum-hop path, parents tie-broken by smallest point index."""
        if self.hops[s, t] < 0:
            raise NoPath(self.space.labels[s], self.space.labels[t], self.r)
        pts = [t]
        cur = t
        while cur != s:
            cur = min(
                v for v in self.adj[cur] if self.hops[s, v] == self.hops[s, cur] - 1
            )
            pts.append(cur)
        pts.reverse()
        return pts


_GRAPH_CACHE: "weakref.WeakKeyDictionary[FiniteMetricSpace, dict[float, RGraph]]" = (
    weakref.WeakKeyDictionary()
)


def get_graph(space: FiniteMetricSpace, r: float) -> RGraph:
    """Memoized RGraph; spaces are immutable so this is safe to share."""
    per_space = _GRAPH_CACHE.setdefault(space, {})
    if r not in per_space:
        per_space[r] = RGraph(space, r)
    return per_space[r]


def r_connected_components(space: FiniteMetricSpace, r: float) -> list[list[int]]:
    """Partition of point indices into r-connectivity classes.

    Components are ordered by their smallest member; members ascend.
    """
    g = get_graph(space, r)
    seen: set[int] = set()
    comps: list[list[int]] = []
    for s in range(space.n):
        if s in seen:
            continue
        comp = sorted(k for k in range(space.n) if g.hops[s, k] >= 0)
        seen.update(comp)
        comps.append(comp)
    return comps


def shortest_r_path(space: FiniteMetricSpace, x: int, y: int, r: float) -> DiscretePath:
    """A minimum-hop r-path from x to y (deterministic tie-break).

    Raises NoPath when x and y lie in different r-components.
    """
    g = get_graph(space, r)
    return DiscretePath(space, r, tuple(g.shortest_path_points(x, y)))
