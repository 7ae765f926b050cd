"""Lipschitz maps between finite metric spaces.

A map is stored as a dense index table (domain position -> codomain
index) together with the Lipschitz constant s it claims. The space of
maps carries the uniform metric max_x d(f(x), g(x)); that metric is
what homotopy searches walk through.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import DomainMismatch, FormatError, PartialMap, UnknownPoint
from .spaces import EPS, FiniteMetricSpace


@dataclass(frozen=True)
class LipMap:
    domain: FiniteMetricSpace
    codomain: FiniteMetricSpace
    s: float
    table: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "table", tuple(int(v) for v in self.table))
        if len(self.table) != self.domain.n:
            raise PartialMap(
                self.domain.labels[len(self.table)]
                if len(self.table) < self.domain.n
                else "<extra entries>"
            )
        for v in self.table:
            if not 0 <= v < self.codomain.n:
                raise UnknownPoint(str(v))

    def __call__(self, i: int) -> int:
        return self.table[i]

    def label_table(self) -> dict[str, str]:
        return {
            self.domain.labels[i]: self.codomain.labels[v]
            for i, v in enumerate(self.table)
        }

    def is_constant(self) -> bool:
        return len(set(self.table)) == 1


def identity_map(space: FiniteMetricSpace, s: float = 1.0) -> LipMap:
    return LipMap(space, space, s, tuple(range(space.n)))


def constant_map(
    domain: FiniteMetricSpace, codomain: FiniteMetricSpace, target: int, s: float = 1.0
) -> LipMap:
    return LipMap(domain, codomain, s, (target,) * domain.n)


def inclusion_map(ambient: FiniteMetricSpace, indices: Iterable[int], s: float = 1.0) -> LipMap:
    """Inclusion of the subspace on `indices` into the ambient space."""
    idx = tuple(indices)
    return LipMap(ambient.restriction(idx), ambient, s, idx)


def map_from_labels(
    domain: FiniteMetricSpace,
    codomain: FiniteMetricSpace,
    s: float,
    table: Mapping[str, str],
) -> LipMap:
    vals = []
    for l in domain.labels:
        if l not in table:
            raise PartialMap(l)
        vals.append(codomain.index(table[l]))
    return LipMap(domain, codomain, s, tuple(vals))


def is_lipschitz(
    m: LipMap, s: float | None = None
) -> tuple[bool, tuple[int, int] | None]:
    """Check d(f(x), f(x')) <= s * d(x, x') for all pairs.

    Returns (ok, first violating domain pair in index order).
    """
    s = m.s if s is None else s
    t = np.asarray(m.table)
    image_d = m.codomain.dist[np.ix_(t, t)]
    bad = image_d > s * m.domain.dist + EPS
    if bad.any():
        i, j = map(int, np.argwhere(bad)[0])
        return False, (i, j)
    return True, None


def map_uniform_distance(f: LipMap, g: LipMap) -> float:
    """max_x d(f(x), g(x)); the metric on map space."""
    if f.domain != g.domain or f.codomain != g.codomain:
        raise DomainMismatch("maps between different spaces")
    cd = f.codomain.dist
    return max(float(cd[a, b]) for a, b in zip(f.table, g.table))


def compose(g: LipMap, f: LipMap) -> LipMap:
    """g after f, recording the product Lipschitz constant s_g * s_f."""
    if f.codomain != g.domain:
        raise DomainMismatch("inner codomain does not match outer domain")
    return LipMap(f.domain, g.codomain, g.s * f.s, tuple(g.table[v] for v in f.table))


def map_to_json(m: LipMap) -> dict:
    return {"s": float(m.s), "table": m.label_table()}


def map_from_json(
    obj: dict, domain: FiniteMetricSpace, codomain: FiniteMetricSpace
) -> LipMap:
    if not isinstance(obj, dict) or "table" not in obj:
        raise FormatError("map JSON needs a 'table'")
    return map_from_labels(domain, codomain, float(obj.get("s", 1.0)), obj["table"])
