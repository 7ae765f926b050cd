"""Deterministic set-cover machinery used by the category and complexity
bound reports.

Candidate subsets arrive as tuples of point indices. The greedy pass
scores by newly covered points, breaking ties toward smaller subsets and
then index order; the exact pass is a small branch-and-bound over the
same family, only attempted when the caller knows the family is
exhaustive enough to make the optimum meaningful.
"""

from __future__ import annotations

from typing import Sequence


def greedy_cover(
    universe: Sequence[int], subsets: Sequence[tuple[int, ...]]
) -> list[int] | None:
    """Indices (into `subsets`) of a greedy cover, or None if impossible."""
    remaining = set(universe)
    pool = [(i, frozenset(s)) for i, s in enumerate(subsets)]
    chosen: list[int] = []
    while remaining:
        best = None
        best_key = None
        for i, s in pool:
            gain = len(s & remaining)
            if gain == 0:
                continue
            key = (-gain, len(s), tuple(sorted(subsets[i])))
            if best_key is None or key < best_key:
                best, best_key = i, key
        if best is None:
            return None
        chosen.append(best)
        remaining -= frozenset(subsets[best])
    return chosen


def exact_min_cover(
    universe: Sequence[int], subsets: Sequence[tuple[int, ...]]
) -> list[int] | None:
    """Minimum-cardinality cover via branch-and-bound, or None.

    Deterministic: branches on the uncovered point covered by the fewest
    subsets, trying subsets in index order. Seeded with the greedy
    solution as the initial bound.
    """
    universe = set(universe)
    sets = [frozenset(s) & universe for s in subsets]
    covering: dict[int, list[int]] = {
        p: [i for i, s in enumerate(sets) if p in s] for p in universe
    }
    if any(not c for c in covering.values()):
        return None
    seed = greedy_cover(sorted(universe), subsets)
    best: list[int] | None = seed
    best_size = len(seed) if seed is not None else len(universe) + 1
    max_size = max((len(s) for s in sets), default=0)

    def dfs(remaining: frozenset[int], chosen: list[int]):
        nonlocal best, best_size
        if not remaining:
            if len(chosen) < best_size:
                best, best_size = list(chosen), len(chosen)
            return
        if max_size == 0:
            return
        bound = len(chosen) + -(-len(remaining) // max_size)
        if bound >= best_size:
            return
        pivot = min(remaining, key=lambda p: (len(covering[p]), p))
        for i in covering[pivot]:
            chosen.append(i)
            dfs(remaining - sets[i], chosen)
            chosen.pop()

    dfs(frozenset(universe), [])
    return best
