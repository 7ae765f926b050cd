"""Discrete motion planners: sections of the path-endpoints map.

A planner over a patch U of ordered pairs assigns every (x, y) in U an
r-path from x to y, all of one length m, such that the assignment is
1-Lipschitz from the l1 metric on pairs to the uniform metric on paths.
Planners convert to contractions and back (the planner exists on all of
X x X exactly when X is r-contractible), arise from categorical patches
of the product via a bridge path, and on general patches are found by a
backtracking search over per-pair path choices.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .budgets import DEFAULT_PATCH_NODES
from .contract import CategoricalCertificate, ContractibilityCertificate
from .errors import (
    DomainMismatch,
    MissingBridge,
    NoPath,
    PartialMap,
    ValidationFailure,
)
from .homotopy import grid_from_tables
from .paths import DiscretePath, get_graph, shortest_r_path
from .spaces import EPS, FiniteMetricSpace, ProductSpace

FOUND = "Found"
NOT_FOUND = "NotFoundWithinHorizon"


@dataclass
class MotionPlanner:
    """Paths indexed by ordered pairs; `domain` lists the patch."""

    space: FiniteMetricSpace
    r: float
    m: int
    domain: tuple[tuple[int, int], ...]
    paths: dict[tuple[int, int], DiscretePath]

    def __post_init__(self):
        self.domain = tuple((int(a), int(b)) for a, b in self.domain)
        for pair in self.domain:
            if pair not in self.paths:
                raise PartialMap(f"{self.space.labels[pair[0]]},{self.space.labels[pair[1]]}")

    def path(self, x: int, y: int) -> DiscretePath:
        return self.paths[(x, y)]


def verify_planner(p: MotionPlanner) -> tuple[bool, tuple | None]:
    """Re-check all three planner invariants.

    (1) section: the path for (x, y) starts at x and ends at y;
    (2) every path is an r-path of the stated common length;
    (3) 1-Lipschitz: uniform distance between any two assigned paths is
        at most the l1 distance between their pairs.
    Returns (ok, witness): ("section", pair), ("length", pair),
    ("step", pair, i) or ("lipschitz", pair, pair2, i).
    """
    space = p.space
    d = space.dist
    for pair in p.domain:
        path = p.paths[pair]
        if path.m != p.m:
            return False, ("length", pair)
        if path.start != pair[0] or path.end != pair[1]:
            return False, ("section", pair)
        for i in range(path.m):
            if d[path.points[i], path.points[i + 1]] > p.r + EPS:
                return False, ("step", pair, i)
    pairs = list(p.domain)
    if not pairs:
        return True, None
    mat = np.asarray([p.paths[q].points for q in pairs])  # K x (m+1)
    xs = np.asarray([q[0] for q in pairs])
    ys = np.asarray([q[1] for q in pairs])
    bound = d[np.ix_(xs, xs)] + d[np.ix_(ys, ys)]
    uni = d[mat[:, None, :], mat[None, :, :]].max(axis=2)
    bad = uni > bound + EPS
    if bad.any():
        a, b = map(int, np.argwhere(bad)[0])
        i = int(np.argmax(d[mat[a], mat[b]]))
        return False, ("lipschitz", pairs[a], pairs[b], i)
    return True, None


def synthesize_from_contraction(cert: ContractibilityCertificate) -> MotionPlanner:
    """Planner on all of X x X from a contraction.

    The path for (x, y) follows x's track to the basepoint and then y's
    track backwards; length is twice the contraction's step count.
    """
    space = cert.space
    frames = cert.grid.frames
    m = cert.grid.m
    tracks = [[fr.table[x] for fr in frames] for x in range(space.n)]
    paths: dict[tuple[int, int], DiscretePath] = {}
    domain = []
    for x in range(space.n):
        for y in range(space.n):
            pts = tracks[x] + tracks[y][::-1][1:]
            paths[(x, y)] = DiscretePath(space, cert.r, tuple(pts))
            domain.append((x, y))
    planner = MotionPlanner(space, cert.r, 2 * m, tuple(domain), paths)
    ok, witness = verify_planner(planner)
    if not ok:
        raise ValidationFailure("synthesized planner failed verification", where=witness)
    return planner


def contraction_from_planner(
    planner: MotionPlanner, basepoint: int
) -> ContractibilityCertificate:
    """Contraction read off a full-domain planner: frame i sends x to the
    i-th point of the path from the basepoint to x, orientation flipped
    so the identity comes first."""
    space = planner.space
    full = {(a, x) for a in range(space.n) for x in range(space.n)}
    if set(planner.domain) != full:
        raise DomainMismatch(
            "extracting a contraction needs a planner on the full pair square"
        )
    tables = []
    for i in range(planner.m + 1):
        tables.append(
            tuple(planner.paths[(basepoint, x)].points[i] for x in range(space.n))
        )
    tables.reverse()  # identity first, constant last
    grid = grid_from_tables(space, space, 1.0, planner.r, tables)
    cert = ContractibilityCertificate(space, planner.r, grid, basepoint)
    ok, witness = cert.verify()
    if not ok:
        raise ValidationFailure("extracted contraction failed verification", where=witness)
    return cert


def planner_from_categorical_patch(
    cert: CategoricalCertificate,
) -> MotionPlanner:
    """Planner on a categorical patch of a product space X x X.

    The patch contracts to one pair (x0, x0'); each (x1, x2) follows its
    first coordinate's contraction track, crosses a shortest r-path
    bridge from x0 to x0', then runs the second coordinate's track in
    reverse. Raises MissingBridge when the bridge does not exist.
    """
    prod = cert.space
    if not isinstance(prod, ProductSpace) or prod.left != prod.right:
        raise DomainMismatch("categorical patches for planners live on X x X")
    space = prod.left
    x0, x0p = prod.split_index(cert.target)
    try:
        bridge = shortest_r_path(space, x0, x0p, cert.r)
    except NoPath:
        raise MissingBridge(space.labels[x0], space.labels[x0p], cert.r) from None
    frames = cert.grid.frames
    m = cert.grid.m
    k = bridge.m
    paths: dict[tuple[int, int], DiscretePath] = {}
    domain = []
    for pos, pair_idx in enumerate(cert.subset):
        x1, x2 = prod.split_index(pair_idx)
        fwd = [prod.split_index(fr.table[pos])[0] for fr in frames]
        back = [prod.split_index(fr.table[pos])[1] for fr in reversed(frames)]
        pts = fwd + list(bridge.points[1:]) + back[1:] if k else fwd + back[1:]
        paths[(x1, x2)] = DiscretePath(space, cert.r, tuple(pts))
        domain.append((x1, x2))
    planner = MotionPlanner(space, cert.r, 2 * m + k, tuple(domain), paths)
    ok, witness = verify_planner(planner)
    if not ok:
        raise ValidationFailure("patch planner failed verification", where=witness)
    return planner


def normalize_lengths(planners: Sequence[MotionPlanner]) -> list[MotionPlanner]:
    """Pad every planner to the longest length by repeating endpoints.

    Padding at the end preserves uniform distances between same-patch
    paths, so verified planners stay verified; idempotent on equal
    lengths.
    """
    if not planners:
        return []
    target = max(p.m for p in planners)
    out = []
    for p in planners:
        if p.m == target:
            out.append(p)
            continue
        pad = target - p.m
        paths = {
            pair: DiscretePath(
                p.space, p.r, path.points + (path.points[-1],) * pad
            )
            for pair, path in p.paths.items()
        }
        out.append(MotionPlanner(p.space, p.r, target, p.domain, paths))
    return out


# --- Patch search -----------------------------------------------------------


@dataclass
class PatchSearchOutcome:
    verdict: str  # Found | NotFoundWithinHorizon
    planner: MotionPlanner | None
    nodes: int

    @property
    def found(self) -> bool:
        return self.verdict == FOUND


class _HorizonExhausted(Exception):
    pass


def _candidate_paths(
    space: FiniteMetricSpace,
    hops: np.ndarray,
    x: int,
    y: int,
    m: int,
    r: float,
    assigned: list[tuple[tuple[int, int], tuple[int, ...]]],
    counter: list[int],
    budget: int,
):
    """Stream length-m r-paths x -> y compatible with assigned neighbors.

    Layer i admits points reachable from x in <= i hops, able to reach y
    in <= m - i hops, and within every assigned pair's Lipschitz bound.
    Paths come out shortest-progress-first: at each step candidates are
    ordered by remaining hop distance to y, then point index.
    """
    d = space.dist
    n = space.n
    allowed = np.ones((m + 1, n), dtype=bool)
    from_x = hops[x]
    to_y = hops[:, y]
    for i in range(m + 1):
        allowed[i] &= (from_x >= 0) & (from_x <= i)
        allowed[i] &= (to_y >= 0) & (to_y <= m - i)
    for (x2, y2), q in assigned:
        b = d[x, x2] + d[y, y2] + EPS
        for i in range(m + 1):
            allowed[i] &= d[q[i]] <= b
    if not allowed[0][x] or not allowed.any(axis=1).all():
        return
    edge = d <= r + EPS
    order_key = hops[:, y]

    # iterative DFS over layers; stack holds iterators of next points
    partial = [x]

    def options(i: int, cur: int):
        mask = allowed[i] & edge[cur]
        cands = np.nonzero(mask)[0]
        return iter(cands[np.lexsort((cands, order_key[cands]))])

    stack = [options(1, x)] if m > 0 else []
    if m == 0:
        if x == y:
            counter[0] += 1
            if counter[0] > budget:
                raise _HorizonExhausted
            yield (x,)
        return
    while stack:
        it = stack[-1]
        nxt = next(it, None)
        if nxt is None:
            stack.pop()
            partial.pop()
            continue
        counter[0] += 1
        if counter[0] > budget:
            raise _HorizonExhausted
        partial.append(int(nxt))
        if len(partial) == m + 1:
            if partial[-1] == y:
                yield tuple(partial)
            partial.pop()
            continue
        stack.append(options(len(partial), partial[-1]))


def _attempt_patch(
    space: FiniteMetricSpace,
    order: list[tuple[int, int]],
    hops: np.ndarray,
    r: float,
    m: int,
    cap: int,
) -> tuple[list | None, int]:
    """One backtracking run at a fixed length m, capped at `cap` nodes.

    Returns (assignment or None, nodes spent). Variables come in the
    given order; each variable streams its candidate paths lazily under
    the masks induced by everything already assigned.
    """
    counter = [0]
    assigned: list[tuple[tuple[int, int], tuple[int, ...]]] = []

    def stream(k: int):
        return _candidate_paths(
            space, hops, order[k][0], order[k][1], m, r, assigned, counter, cap
        )

    streams = [stream(0)]
    try:
        while streams:
            path = next(streams[-1], None)
            if path is None:
                streams.pop()
                if assigned:
                    assigned.pop()
                continue
            assigned.append((order[len(streams) - 1], path))
            if len(streams) == len(order):
                return assigned, counter[0]
            streams.append(stream(len(streams)))
    except _HorizonExhausted:
        pass
    return None, counter[0]


def search_patch_planner(
    space: FiniteMetricSpace,
    pairs: Iterable[tuple[int, int]],
    r: float,
    m_max: int | None = None,
    budget_nodes: int = DEFAULT_PATCH_NODES,
) -> PatchSearchOutcome:
    """Backtracking search for a planner over an explicit patch.

    Pairs with the largest hop distance are assigned first: they have
    the least slack, so they pin down the shared schedule and the
    Lipschitz masks steer everything assigned after them. Candidate
    lengths m grow from the largest hop distance up to the horizon,
    visited under escalating node caps (iterative deepening), so an
    infeasible small m cannot starve a feasible larger one. A negative
    answer is only a horizon statement, not a nonexistence proof.
    """
    pair_list = sorted({(int(a), int(b)) for a, b in pairs})
    if not pair_list:
        raise ValidationFailure("a patch needs at least one pair")
    g = get_graph(space, r)
    horizon = 2 * space.n if m_max is None else m_max
    worst = 0
    for x, y in pair_list:
        if g.hops[x, y] < 0:
            return PatchSearchOutcome(NOT_FOUND, None, 0)
        worst = max(worst, int(g.hops[x, y]))
    order = sorted(pair_list, key=lambda p: (-g.hops[p[0], p[1]], p))

    caps = []
    cap = max(1000, budget_nodes // 64)
    while cap < budget_nodes:
        caps.append(cap)
        cap *= 8
    caps.append(budget_nodes)

    total = 0
    for cap in caps:
        for m in range(worst, horizon + 1):
            assignment, spent = _attempt_patch(
                space, order, g.hops, r, m, min(cap, budget_nodes - total)
            )
            total += spent
            if assignment is not None:
                paths = {
                    pair: DiscretePath(space, r, pts) for pair, pts in assignment
                }
                planner = MotionPlanner(space, r, m, tuple(pair_list), paths)
                ok, witness = verify_planner(planner)
                if not ok:
                    raise ValidationFailure(
                        "patch search produced an invalid planner", where=witness
                    )
                return PatchSearchOutcome(FOUND, planner, total)
            if total >= budget_nodes:
                return PatchSearchOutcome(NOT_FOUND, None, total)
    return PatchSearchOutcome(NOT_FOUND, None, total)
