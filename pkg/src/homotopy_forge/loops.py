"""Based r-loops and null-homotopy certificates.

A loop of length m is an r-path returning to its basepoint. Loop
homotopy moves a loop pointwise by at most r per step, endpoints
pinned; length only changes through stationary padding. The search for
a null-homotopy is horizon-limited (padding and state budgets), so a
negative answer is never a nonexistence proof. On a contractible space,
a contraction certificate converts any loop into an explicit matrix
null-homotopy: rows bordered by the basepoint's contraction track, the
conjugated loop on top and the constant loop at the bottom.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import groupby
from typing import Sequence

from .budgets import DEFAULT_STATE_BUDGET
from .contract import ContractibilityCertificate
from .errors import ValidationFailure
from .homotopy import FOUND, _search_tables
from .paths import DiscretePath, path_from_labels
from .spaces import EPS, FiniteMetricSpace, IntervalSpace

NULL = "Null"
NOT_FOUND = "NotFoundWithinBudget"


@dataclass(frozen=True)
class RLoop:
    """An r-path whose two endpoints coincide (the basepoint)."""

    path: DiscretePath

    def __post_init__(self):
        if self.path.start != self.path.end:
            raise ValidationFailure(
                f"loop endpoints differ: {self.path.start} vs {self.path.end}"
            )

    @property
    def space(self) -> FiniteMetricSpace:
        return self.path.space

    @property
    def r(self) -> float:
        return self.path.r

    @property
    def m(self) -> int:
        return self.path.m

    @property
    def basepoint(self) -> int:
        return self.path.start

    @property
    def points(self) -> tuple[int, ...]:
        return self.path.points


def loop_from_labels(space: FiniteMetricSpace, r: float, labels: Sequence[str]) -> RLoop:
    return RLoop(path_from_labels(space, r, labels))


def _collapse(seq: Sequence[int]) -> list[int]:
    return [k for k, _ in groupby(seq)]


@dataclass
class NullHomotopyGrid:
    """Row-by-row deformation of a based loop to the constant loop.

    Every row is an r-loop at the basepoint, every column an r-path;
    the top row is the given loop up to stationary padding and the
    bottom row is constant.
    """

    space: FiniteMetricSpace
    r: float
    basepoint: int
    loop: RLoop
    rows: tuple[tuple[int, ...], ...]

    @property
    def steps(self) -> int:
        return len(self.rows) - 1

    def verify(self) -> tuple[bool, tuple | None]:
        if not self.rows:
            return False, ("empty",)
        width = len(self.rows[0])
        d = self.space.dist
        p = self.basepoint
        for i, row in enumerate(self.rows):
            if len(row) != width:
                return False, ("width", i)
            if row[0] != p or row[-1] != p:
                return False, ("row-base", i)
            for j in range(width - 1):
                if d[row[j], row[j + 1]] > self.r + EPS:
                    return False, ("row", i, j)
        for j in range(width):
            for i in range(len(self.rows) - 1):
                if d[self.rows[i][j], self.rows[i + 1][j]] > self.r + EPS:
                    return False, ("column", j, i)
        if _collapse(self.rows[0]) != _collapse(self.loop.points):
            return False, ("top",)
        if any(v != p for v in self.rows[-1]):
            return False, ("bottom",)
        return True, None


@dataclass
class NullSearchOutcome:
    verdict: str  # Null | NotFoundWithinBudget
    grid: NullHomotopyGrid | None
    states_visited: int
    padding_used: int | None = None

    @property
    def null(self) -> bool:
        return self.verdict == NULL


def is_null_homotopic(
    loop: RLoop,
    padding_max: int = 4,
    budget: int = DEFAULT_STATE_BUDGET,
) -> NullSearchOutcome:
    """Bounded search for a deformation of `loop` to the constant loop.

    For each padding length the loop is extended by stationary points
    at the basepoint and the move graph of same-length based loops is
    searched for the constant loop. Loops at pairwise distance <= r
    step to each other; endpoints never move. Exhausting a padding's
    component is not conclusive (more padding can unlock moves), so the
    negative verdict is always NotFoundWithinBudget.
    """
    p = loop.basepoint
    space = loop.space
    total = 0
    for pad in range(padding_max + 1):
        pts = loop.points + (p,) * pad
        length = len(pts) - 1
        interval = IntervalSpace(length)
        goal = (p,) * (length + 1)
        verdict, tables, visited = _search_tables(
            interval,
            space,
            pts,
            [goal],
            loop.r,
            loop.r,
            budget - total,
            fixed=frozenset({0, length}),
        )
        total += visited
        if verdict == FOUND:
            grid = NullHomotopyGrid(space, loop.r, p, loop, tuple(tables))
            ok, witness = grid.verify()
            if not ok:
                raise ValidationFailure("null-homotopy grid failed verification", where=witness)
            return NullSearchOutcome(NULL, grid, total, pad)
        if total >= budget:
            break
    return NullSearchOutcome(NOT_FOUND, None, total)


def lemma_certificate(
    cert: ContractibilityCertificate, loop: RLoop
) -> NullHomotopyGrid:
    """Null-homotopy of a loop read off a contraction, no search.

    Row i applies contraction frame i to the loop and conjugates by the
    basepoint's track: the prefix walks the track to its i-th point
    (then waits), the suffix walks back. Past the contraction's end the
    conjugating track itself is retracted, ending at the constant row.
    Raises ValidationFailure naming the first failing cell if the
    construction does not verify.
    """
    if cert.space != loop.space:
        raise ValidationFailure("contraction and loop live on different spaces")
    if cert.r != loop.r:
        raise ValidationFailure(f"scale mismatch: contraction {cert.r}, loop {loop.r}")
    frames = cert.grid.frames
    big_m = cert.grid.m
    p = loop.basepoint
    gamma = [fr.table[p] for fr in frames]  # basepoint track, gamma[0] = p

    def prefix(i: int) -> list[int]:
        return [gamma[min(t, i)] for t in range(big_m + 1)]

    rows = []
    for i in range(big_m + 1):
        mid = [frames[i].table[x] for x in loop.points]
        rows.append(tuple(prefix(i) + mid + prefix(i)[::-1]))
    for t in range(1, big_m + 1):
        i = big_m - t
        mid = [gamma[i]] * (loop.m + 1)
        rows.append(tuple(prefix(i) + mid + prefix(i)[::-1]))
    grid = NullHomotopyGrid(cert.space, cert.r, p, loop, tuple(rows))
    ok, witness = grid.verify()
    if not ok:
        raise ValidationFailure(
            "contraction-derived null-homotopy failed verification", where=witness
        )
    return grid
