"""Step-bounded homotopies between Lipschitz maps, and the search for them.

A homotopy of scale (s, r) from f to g is a finite sequence of
s-Lipschitz frames starting at f and ending at g in which every point's
track moves at most r per step (and at most r * |i - j| between any two
frames, which the verifier checks in full rather than trusting the
triangle inequality).

Existence of such a homotopy is reachability in an implicit graph whose
vertices are the s-Lipschitz maps and whose edges join maps at uniform
distance <= r. The search below walks that graph bidirectionally with a
visited-state budget; outcomes are three-valued because exhausting the
budget proves nothing.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import DomainMismatch, ValidationFailure
from .maps import LipMap, is_lipschitz, map_uniform_distance
from .spaces import EPS, FiniteMetricSpace

FOUND = "Found"
IMPOSSIBLE = "Impossible"
BUDGET_EXHAUSTED = "BudgetExhausted"

DEFAULT_STATE_BUDGET = 5_000_000


@dataclass(frozen=True)
class HomotopyGrid:
    """Frames of an (s, r)-homotopy, first frame f, last frame g."""

    s: float
    r: float
    frames: tuple[LipMap, ...]

    def __post_init__(self):
        if not self.frames:
            raise ValidationFailure("a homotopy grid needs at least one frame")
        dom = self.frames[0].domain
        cod = self.frames[0].codomain
        for fr in self.frames:
            if fr.domain != dom or fr.codomain != cod:
                raise DomainMismatch("grid frames over different spaces")

    @property
    def m(self) -> int:
        """Number of time steps."""
        return len(self.frames) - 1

    @property
    def domain(self) -> FiniteMetricSpace:
        return self.frames[0].domain

    @property
    def codomain(self) -> FiniteMetricSpace:
        return self.frames[0].codomain

    def start(self) -> LipMap:
        return self.frames[0]

    def end(self) -> LipMap:
        return self.frames[-1]

    def track(self, x: int) -> list[int]:
        """The r-path swept by domain point x."""
        return [fr.table[x] for fr in self.frames]

    def reversed(self) -> "HomotopyGrid":
        return HomotopyGrid(self.s, self.r, tuple(reversed(self.frames)))


def grid_from_tables(
    domain: FiniteMetricSpace,
    codomain: FiniteMetricSpace,
    s: float,
    r: float,
    tables: Sequence[Sequence[int]],
) -> HomotopyGrid:
    return HomotopyGrid(
        s, r, tuple(LipMap(domain, codomain, s, tuple(t)) for t in tables)
    )


def verify_homotopy(
    grid: HomotopyGrid,
    f: LipMap | None = None,
    g: LipMap | None = None,
) -> tuple[bool, tuple | None]:
    """Full re-validation of a homotopy grid.

    Checks endpoint agreement (when f / g are supplied), the s-Lipschitz
    condition on every frame, and d(F(x,i), F(x,j)) <= r * |i - j| for
    *all* index pairs, not only consecutive ones. Returns (ok, witness);
    witnesses are ("endpoint", which), ("frame", k, (i, j)) or
    ("track", x, (i, j)).
    """
    if f is not None and grid.frames[0].table != f.table:
        return False, ("endpoint", "start")
    if g is not None and grid.frames[-1].table != g.table:
        return False, ("endpoint", "end")
    for k, fr in enumerate(grid.frames):
        ok, pair = is_lipschitz(fr, grid.s)
        if not ok:
            return False, ("frame", k, pair)
    cod = grid.codomain.dist
    tables = np.asarray([fr.table for fr in grid.frames])
    steps = len(grid.frames)
    for x in range(grid.domain.n):
        track = tables[:, x]
        td = cod[np.ix_(track, track)]
        gaps = np.abs(np.arange(steps)[:, None] - np.arange(steps)[None, :])
        bad = td > grid.r * gaps + EPS
        if bad.any():
            i, j = map(int, np.argwhere(bad)[0])
            return False, ("track", x, (i, j))
    return True, None


# --- Neighbor enumeration ---------------------------------------------------


def _neighbor_tables(
    table: tuple[int, ...],
    dom_dist: np.ndarray,
    cod_dist: np.ndarray,
    s: float,
    r: float,
    fixed: frozenset[int] | None = None,
) -> Iterator[tuple[int, ...]]:
    """All s-Lipschitz tables within uniform distance r of `table`.

    Points are assigned in index order; candidate values per point are
    the codomain points within r of the current image, and partial
    assignments are pruned against every earlier point's pairwise
    Lipschitz constraint. Indices in `fixed` keep their current value
    (used for based-loop moves). Yields tuples in lexicographic order
    (the input map itself is among them).
    """
    n = len(table)
    cand = [cod_dist[table[i]] <= r + EPS for i in range(n)]
    if fixed:
        for i in fixed:
            pin = np.zeros(len(cod_dist), dtype=bool)
            pin[table[i]] = True
            cand[i] = pin
    bound = s * dom_dist + EPS
    choice = [0] * n

    def rec(i: int) -> Iterator[tuple[int, ...]]:
        if i == n:
            yield tuple(choice)
            return
        mask = cand[i].copy()
        for j in range(i):
            mask &= cod_dist[choice[j]] <= bound[j, i]
            if not mask.any():
                return
        for v in np.nonzero(mask)[0]:
            choice[i] = int(v)
            yield from rec(i + 1)

    return rec(0)


def enumerate_neighbors(f: LipMap, r: float, s: float | None = None) -> Iterator[LipMap]:
    """Stream of s-Lipschitz maps at uniform distance <= r from f."""
    s = f.s if s is None else s
    for t in _neighbor_tables(f.table, f.domain.dist, f.codomain.dist, s, r):
        yield LipMap(f.domain, f.codomain, s, t)


# --- Search -----------------------------------------------------------------


@dataclass
class SearchOutcome:
    verdict: str  # Found | Impossible | BudgetExhausted
    grid: HomotopyGrid | None
    states_visited: int

    @property
    def found(self) -> bool:
        return self.verdict == FOUND


def _chain(parents: dict, node: tuple) -> list[tuple]:
    out = [node]
    while parents[node] is not None:
        node = parents[node]
        out.append(node)
    return out


_MEET_TEST_CAP = 250_000


def _frontier_meet(
    cod_dist: np.ndarray,
    front_a: list[tuple],
    front_b: list[tuple],
    r: float,
) -> tuple[int, int] | None:
    """First pair (i, j) with uniform distance <= r between frontiers.

    Skipped (returns None) when the pair count is too large; meets are
    then still caught during expansion, just one level later.
    """
    if not front_a or not front_b or len(front_a) * len(front_b) > _MEET_TEST_CAP:
        return None
    a = np.asarray(front_a)
    b = np.asarray(front_b)
    dmax = cod_dist[a[:, None, :], b[None, :, :]].max(axis=2)
    hits = np.argwhere(dmax <= r + EPS)
    if len(hits):
        return int(hits[0, 0]), int(hits[0, 1])
    return None


def _search_tables(
    domain: FiniteMetricSpace,
    codomain: FiniteMetricSpace,
    start: tuple[int, ...],
    goals: Sequence[tuple[int, ...]],
    s: float,
    r: float,
    budget: int,
    fixed: frozenset[int] | None = None,
) -> tuple[str, list[tuple[int, ...]] | None, int]:
    """Bidirectional reachability between `start` and any of `goals`.

    Returns (verdict, frame tables or None, states visited). Impossible
    is only reported after one side's reachable set is fully exhausted,
    so it is exact; BudgetExhausted proves nothing. Indices in `fixed`
    never move; goals disagreeing with the start there are unreachable
    by construction and are dropped up front.
    """
    dd, cd = domain.dist, codomain.dist

    goals = list(dict.fromkeys(goals))
    if fixed:
        goals = [g for g in goals if all(g[i] == start[i] for i in fixed)]
    if not goals:
        return IMPOSSIBLE, None, 0
    fwd_parents: dict[tuple, tuple | None] = {start: None}
    bwd_parents: dict[tuple, tuple | None] = {g: None for g in goals}
    visited = 1 + len(goals)
    if start in bwd_parents:
        return FOUND, [start], visited
    fwd_frontier: list[tuple] = [start]
    bwd_frontier: list[tuple] = list(goals)

    def assemble(meet_fwd: tuple, meet_bwd: tuple) -> list[tuple]:
        left = _chain(fwd_parents, meet_fwd)[::-1]
        right = _chain(bwd_parents, meet_bwd)
        if meet_fwd == meet_bwd:
            right = right[1:]
        return left + right

    while fwd_frontier and bwd_frontier:
        # cheap meet test: any edge directly joining the two frontiers
        hit = _frontier_meet(cd, fwd_frontier, bwd_frontier, r)
        if hit is not None:
            return FOUND, assemble(fwd_frontier[hit[0]], bwd_frontier[hit[1]]), visited
        expand_fwd = len(fwd_frontier) <= len(bwd_frontier)
        frontier = fwd_frontier if expand_fwd else bwd_frontier
        own = fwd_parents if expand_fwd else bwd_parents
        other = bwd_parents if expand_fwd else fwd_parents
        next_frontier: list[tuple] = []
        for node in frontier:
            for nb in _neighbor_tables(node, dd, cd, s, r, fixed):
                if nb in own:
                    continue
                own[nb] = node
                visited += 1
                if nb in other:
                    return FOUND, assemble(nb, nb), visited
                next_frontier.append(nb)
                if visited > budget:
                    return BUDGET_EXHAUSTED, None, visited
        if expand_fwd:
            fwd_frontier = next_frontier
        else:
            bwd_frontier = next_frontier
    return IMPOSSIBLE, None, visited


def homotopy_search(
    f: LipMap,
    g: LipMap,
    s: float,
    r: float,
    budget: int = DEFAULT_STATE_BUDGET,
) -> SearchOutcome:
    """Decide whether f and g are (s, r)-homotopic, within a state budget.

    Found comes with a verified grid; Impossible is exact (one side's
    component was exhausted); BudgetExhausted is an honest "don't know".
    """
    if f.domain != g.domain or f.codomain != g.codomain:
        raise DomainMismatch("endpoints live over different spaces")
    for name, m in (("f", f), ("g", g)):
        ok, pair = is_lipschitz(m, s)
        if not ok:
            raise ValidationFailure(f"endpoint {name} is not {s}-Lipschitz", where=pair)
    verdict, tables, visited = _search_tables(
        f.domain, f.codomain, f.table, [g.table], s, r, budget
    )
    return _outcome(f.domain, f.codomain, s, r, verdict, tables, visited)


def search_to_constants(
    f: LipMap,
    s: float,
    r: float,
    budget: int = DEFAULT_STATE_BUDGET,
    targets: Sequence[int] | None = None,
) -> SearchOutcome:
    """Search from f to *any* constant map (targets in label order)."""
    cod = f.codomain
    targets = range(cod.n) if targets is None else targets
    goals = [(t,) * f.domain.n for t in targets]
    verdict, tables, visited = _search_tables(
        f.domain, cod, f.table, goals, s, r, budget
    )
    return _outcome(f.domain, cod, s, r, verdict, tables, visited)


def _outcome(domain, codomain, s, r, verdict, tables, visited) -> SearchOutcome:
    grid = None
    if verdict == FOUND:
        grid = grid_from_tables(domain, codomain, s, r, tables)
        ok, witness = verify_homotopy(grid)
        if not ok:
            raise ValidationFailure(
                "search produced a grid that fails verification", where=witness
            )
    return SearchOutcome(verdict, grid, visited)
