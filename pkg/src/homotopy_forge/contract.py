"""Contractibility and LS-category style covers at a resolution scale.

A space is r-contractible when the identity admits a (1, r)-homotopy to
a constant map; a subset is r-categorical when its inclusion does. Both
questions run through one engine: cheap certificate constructions first
(single jump, funnel flows along shortest-path forests, factored block
contractions on product spaces), then an exact bidirectional search.
Constructions are heuristic but always re-verified, so a "Yes" is a
checked certificate regardless of where it came from; "No" only ever
comes from exhausting the reachable component of the inclusion.

Covers are by arbitrary subsets: at scale r every subset is as good as
open, so the category of a space is the minimum number of r-categorical
pieces covering it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .budgets import DEFAULT_STATE_BUDGET, Budgets
from .cover import exact_min_cover, greedy_cover
from .errors import ValidationFailure
from .homotopy import (
    FOUND,
    IMPOSSIBLE,
    HomotopyGrid,
    _search_tables,
    grid_from_tables,
    verify_homotopy,
)
from .paths import RGraph, get_graph, is_r_path, r_connected_components
from .spaces import EPS, FiniteMetricSpace, ProductSpace

YES = "Yes"
NO = "No"
UNKNOWN = "Unknown"


# --- Certificates -----------------------------------------------------------


@dataclass
class ContractibilityCertificate:
    """A (1, r)-homotopy from the identity to a constant map."""

    space: FiniteMetricSpace
    r: float
    grid: HomotopyGrid
    basepoint: int

    def verify(self) -> tuple[bool, tuple | None]:
        g = self.grid
        if g.domain != self.space or g.codomain != self.space:
            return False, ("space",)
        if g.frames[0].table != tuple(range(self.space.n)):
            return False, ("endpoint", "start")
        if g.frames[-1].table != (self.basepoint,) * self.space.n:
            return False, ("endpoint", "end")
        if g.s != 1.0 or g.r != self.r:
            return False, ("scale",)
        return verify_homotopy(g)


@dataclass
class CategoricalCertificate:
    """A (1, r)-homotopy from a subset's inclusion to a constant map."""

    space: FiniteMetricSpace
    r: float
    subset: tuple[int, ...]
    grid: HomotopyGrid
    target: int

    def verify(self) -> tuple[bool, tuple | None]:
        g = self.grid
        if g.codomain != self.space:
            return False, ("space",)
        if g.domain != self.space.restriction(self.subset):
            return False, ("domain",)
        if g.frames[0].table != tuple(self.subset):
            return False, ("endpoint", "start")
        if g.frames[-1].table != (self.target,) * len(self.subset):
            return False, ("endpoint", "end")
        if g.s != 1.0 or g.r != self.r:
            return False, ("scale",)
        return verify_homotopy(g)


@dataclass
class ContractibilityResult:
    verdict: str  # Yes | No | Unknown
    certificate: ContractibilityCertificate | None
    states_visited: int

    @property
    def yes(self) -> bool:
        return self.verdict == YES


@dataclass
class CategoricalResult:
    verdict: str
    certificate: CategoricalCertificate | None
    states_visited: int

    @property
    def yes(self) -> bool:
        return self.verdict == YES


# --- Constructive attempts --------------------------------------------------


def _funnel_tables(
    space: FiniteMetricSpace,
    start_table: tuple[int, ...],
    target: int,
    graph: RGraph,
    layered: bool,
) -> list[tuple[int, ...]] | None:
    """Walk every image point down a shortest-path forest toward `target`.

    Synchronized mode moves all points each step; layered mode moves
    only the points currently farthest (in hops) from the target, which
    keeps the frames non-expansive on tree-like spaces. Returns frame
    tables or None when some point cannot reach the target.
    """
    hops = graph.hops[:, target]
    if any(hops[p] < 0 for p in start_table):
        return None
    parent = {}
    for p in range(space.n):
        if hops[p] <= 0:
            parent[p] = p
        else:
            opts = [q for q in graph.adj[p] if hops[q] == hops[p] - 1]
            parent[p] = min(opts) if opts else p
    tables = [tuple(start_table)]
    cur = list(start_table)
    guard = 0
    while any(p != target for p in cur):
        guard += 1
        if guard > space.n * (int(hops.max()) + 1) + 2:
            return None
        if layered:
            depth = max(hops[p] for p in cur)
            cur = [parent[p] if hops[p] == depth else p for p in cur]
        else:
            cur = [parent[p] for p in cur]
        tables.append(tuple(cur))
    return tables


def _try_constructions(
    space: FiniteMetricSpace,
    subset: tuple[int, ...],
    r: float,
) -> tuple[list[tuple[int, ...]], int] | None:
    """Cheap verified null-homotopies of the inclusion, or None.

    Tries, in order: a single jump to one point, synchronized funnels,
    layered funnels (targets in label order), and on product spaces the
    factored contraction of a block subset.
    """
    sub_space = space.restriction(subset)
    incl = tuple(subset)

    if len(set(incl)) == 1:
        # the inclusion is already constant: zero-length certificate
        return [incl], incl[0]

    # single jump: some point within r of the whole subset
    col_max = space.dist[np.ix_(list(subset), range(space.n))].max(axis=0)
    for z in range(space.n):
        if col_max[z] <= r + EPS:
            return [incl, (z,) * len(incl)], z

    graph = get_graph(space, r)

    def verified(tables: list[tuple[int, ...]] | None, z: int):
        if tables is None:
            return None
        grid = grid_from_tables(sub_space, space, 1.0, r, tables)
        ok, _ = verify_homotopy(grid)
        return (tables, z) if ok else None

    for layered in (False, True):
        for z in range(space.n):
            got = verified(_funnel_tables(space, incl, z, graph, layered), z)
            if got:
                return got

    if isinstance(space, ProductSpace):
        got = _block_construction(space, subset, r)
        if got:
            return verified(*got)
    return None


def _block_construction(
    space: ProductSpace, subset: tuple[int, ...], r: float
) -> tuple[list[tuple[int, ...]], int] | None:
    """Contract a block subset A x B one coordinate at a time.

    Only applies when `subset` really is a full block of the product;
    each factor's part is contracted recursively inside its factor.
    """
    pairs = [space.split_index(k) for k in subset]
    left_part = sorted({i for i, _ in pairs})
    right_part = sorted({j for _, j in pairs})
    if len(left_part) * len(right_part) != len(subset):
        return None
    if {(i, j) for i in left_part for j in right_part} != set(pairs):
        return None
    res_l = is_r_categorical(space.left, left_part, r)
    if not res_l.yes:
        return None
    res_r = is_r_categorical(space.right, right_part, r)
    if not res_r.yes:
        return None
    pos_l = {p: k for k, p in enumerate(left_part)}
    pos_r = {p: k for k, p in enumerate(right_part)}
    tables: list[tuple[int, ...]] = []
    for fr in res_l.certificate.grid.frames:
        tables.append(
            tuple(space.pair_index(fr.table[pos_l[i]], j) for i, j in pairs)
        )
    a_star = res_l.certificate.target
    for fr in res_r.certificate.grid.frames[1:]:
        tables.append(
            tuple(space.pair_index(a_star, fr.table[pos_r[j]]) for i, j in pairs)
        )
    b_star = res_r.certificate.target
    return tables, space.pair_index(a_star, b_star)


# --- Decision procedures ----------------------------------------------------


def is_r_categorical(
    space: FiniteMetricSpace,
    subset: Sequence[int],
    r: float,
    budget: int = DEFAULT_STATE_BUDGET,
) -> CategoricalResult:
    """Decide whether the inclusion of `subset` is r-null-homotopic.

    Yes always carries a verified certificate. No is exact (component
    exhausted, or the subset provably spans several r-components: each
    point's track stays inside its own component, so no shared constant
    endpoint can exist). Unknown means the state budget ran out first.
    """
    subset = tuple(int(i) for i in subset)
    if not subset:
        raise ValidationFailure("empty subsets carry no information")
    graph = get_graph(space, r)
    if any(not graph.connected(subset[0], p) for p in subset):
        return CategoricalResult(NO, None, 0)
    sub_space = space.restriction(subset)

    built = _try_constructions(space, subset, r)
    if built is not None:
        tables, target = built
        grid = grid_from_tables(sub_space, space, 1.0, r, tables)
        return CategoricalResult(
            YES, CategoricalCertificate(space, r, subset, grid, target), 0
        )

    goals = [
        (z,) * len(subset)
        for z in range(space.n)
        if graph.connected(subset[0], z)
    ]
    verdict, tables, visited = _search_tables(
        sub_space, space, subset, goals, 1.0, r, budget
    )
    if verdict == FOUND:
        grid = grid_from_tables(sub_space, space, 1.0, r, tables)
        ok, witness = verify_homotopy(grid)
        if not ok:
            raise ValidationFailure("search grid failed verification", where=witness)
        return CategoricalResult(
            YES,
            CategoricalCertificate(space, r, subset, grid, tables[-1][0]),
            visited,
        )
    if verdict == IMPOSSIBLE:
        return CategoricalResult(NO, None, visited)
    return CategoricalResult(UNKNOWN, None, visited)


def is_r_contractible(
    space: FiniteMetricSpace, r: float, budget: int = DEFAULT_STATE_BUDGET
) -> ContractibilityResult:
    """Decide whether the identity is (1, r)-homotopic to a constant."""
    res = is_r_categorical(space, tuple(range(space.n)), r, budget)
    cert = None
    if res.certificate is not None:
        cert = ContractibilityCertificate(
            space, r, res.certificate.grid, res.certificate.target
        )
    return ContractibilityResult(res.verdict, cert, res.states_visited)


def lift_block_certificate(
    product: ProductSpace,
    cert_a: CategoricalCertificate,
    cert_b: CategoricalCertificate,
) -> CategoricalCertificate:
    """Null-homotopy of a block A x B from factor certificates.

    Phase one contracts the first coordinate to cert_a's target with the
    second frozen; phase two contracts the second. Each phase's frames
    stay 1-Lipschitz because the untouched coordinate contributes a
    constant to the l1 distance. The result is re-verified.
    """
    if cert_a.space != product.left or cert_b.space != product.right:
        raise ValidationFailure("factor certificates do not match the product")
    if cert_a.r != cert_b.r:
        raise ValidationFailure("factor certificates at different scales")
    pairs = [(i, j) for i in cert_a.subset for j in cert_b.subset]
    subset = tuple(product.pair_index(i, j) for i, j in pairs)
    pos_a = {p: k for k, p in enumerate(cert_a.subset)}
    pos_b = {p: k for k, p in enumerate(cert_b.subset)}
    tables: list[tuple[int, ...]] = []
    for fr in cert_a.grid.frames:
        tables.append(
            tuple(product.pair_index(fr.table[pos_a[i]], j) for i, j in pairs)
        )
    for fr in cert_b.grid.frames[1:]:
        tables.append(
            tuple(
                product.pair_index(cert_a.target, fr.table[pos_b[j]])
                for i, j in pairs
            )
        )
    target = product.pair_index(cert_a.target, cert_b.target)
    sub_space = product.restriction(subset)
    grid = grid_from_tables(sub_space, product, 1.0, cert_a.r, tables)
    cert = CategoricalCertificate(product, cert_a.r, subset, grid, target)
    ok, witness = cert.verify()
    if not ok:
        raise ValidationFailure("lifted block certificate failed", where=witness)
    return cert


def restrict_certificate(
    cert: CategoricalCertificate, subset: Sequence[int]
) -> CategoricalCertificate:
    """A null-homotopy of a subset restricts to any smaller subset."""
    subset = tuple(int(i) for i in subset)
    pos = {p: k for k, p in enumerate(cert.subset)}
    missing = [p for p in subset if p not in pos]
    if missing:
        raise ValidationFailure(f"points {missing} not in the certified subset")
    sub_space = cert.space.restriction(subset)
    tables = [
        tuple(fr.table[pos[p]] for p in subset) for fr in cert.grid.frames
    ]
    grid = grid_from_tables(sub_space, cert.space, 1.0, cert.r, tables)
    return CategoricalCertificate(cert.space, cert.r, subset, grid, cert.target)


def check_contractible_implies_connected(
    cert: ContractibilityCertificate,
) -> tuple[bool, tuple | None]:
    """Glue the two tracks of a contraction into an r-path for every pair.

    For points x, y the path runs x's track forward to the basepoint,
    then y's track backward. Returns (ok, (x, y, step)) on failure.
    """
    frames = cert.grid.frames
    for x in range(cert.space.n):
        fwd = [fr.table[x] for fr in frames]
        for y in range(cert.space.n):
            back = [fr.table[y] for fr in reversed(frames)]
            pts = fwd + back[1:]
            if pts[0] != x or pts[-1] != y:
                return False, (x, y, "endpoints")
            ok, step = is_r_path(cert.space, pts, cert.r)
            if not ok:
                return False, (x, y, step)
    return True, None


# --- Category bounds --------------------------------------------------------


@dataclass
class CatReport:
    space: FiniteMetricSpace
    r: float
    lower: int
    upper: int
    cover: list[CategoricalCertificate]
    exact: bool
    lower_evidence: str
    contractibility: ContractibilityResult | None = field(repr=False, default=None)


def _auto_candidates(space: FiniteMetricSpace, r: float, budgets: Budgets):
    """Candidate subsets for the cover search.

    Small spaces: every nonempty subset (descending size, so restriction
    shortcuts apply). Larger spaces: metric balls at every occurring
    radius plus greedily grown supersets of them.
    """
    n = space.n
    if n <= budgets.exact_threshold:
        from itertools import combinations

        out = []
        for size in range(n, 0, -1):
            out.extend(combinations(range(n), size))
        return out, True
    cands: list[tuple[int, ...]] = [tuple(range(n))]
    radii = space.distinct_distances()
    for c in range(n):
        for t in radii:
            ball = tuple(
                j for j in range(n) if space.dist[c, j] <= t + EPS
            )
            cands.append(ball)
    seen = set()
    uniq = []
    for s in sorted(cands, key=lambda s: (-len(s), s)):
        if s not in seen:
            seen.add(s)
            uniq.append(s)
    return uniq, False


def _grow_candidates(
    space: FiniteMetricSpace,
    r: float,
    yes_sets: dict[tuple[int, ...], CategoricalCertificate],
    budget: int,
) -> None:
    """Greedily extend certified subsets by label order, in place."""
    bases = sorted(yes_sets, key=lambda s: (-len(s), s))[:8]
    for base in bases:
        cur = set(base)
        cert = yes_sets[base]
        for p in range(space.n):
            if p in cur:
                continue
            cand = tuple(sorted(cur | {p}))
            if cand in yes_sets:
                continue
            res = is_r_categorical(space, cand, r, budget)
            if res.yes:
                cur.add(p)
                cert = res.certificate
                yes_sets[cand] = cert
        final = tuple(sorted(cur))
        yes_sets.setdefault(final, cert)


def cat_bounds(
    space: FiniteMetricSpace,
    r: float,
    subset_family: str | Sequence[Sequence[int]] = "auto",
    budgets: Budgets = Budgets(),
    contractibility: ContractibilityResult | None = None,
) -> CatReport:
    """Certified bounds for the minimum r-categorical cover size.

    The upper bound is the size of an actual cover of verified
    certificates. The lower bound aggregates connectivity (every
    categorical subset lies in one r-component), non-contractibility
    (cover size 1 would force contractibility) and, when every subset
    of a small space was classified exactly, the branch-and-bound
    optimum itself, making the report exact.
    """
    comps = r_connected_components(space, r)
    contr = contractibility
    if contr is None:
        contr = is_r_contractible(space, r, budgets.states)
    if contr.yes:
        cert = CategoricalCertificate(
            space,
            r,
            tuple(range(space.n)),
            contr.certificate.grid,
            contr.certificate.basepoint,
        )
        return CatReport(space, r, 1, 1, [cert], True, "contractible", contr)

    if subset_family == "auto":
        candidates, exhaustive = _auto_candidates(space, r, budgets)
    else:
        candidates = [tuple(int(i) for i in s) for s in subset_family]
        exhaustive = False

    yes: dict[tuple[int, ...], CategoricalCertificate] = {}
    resolved_all = True
    full = tuple(range(space.n))
    for sub in candidates:
        if sub == full:
            # already classified by the contractibility call above
            if contr.verdict == UNKNOWN:
                resolved_all = False
            continue
        hit = next((b for b in yes if set(sub) <= set(b)), None)
        if hit is not None:
            yes[sub] = restrict_certificate(yes[hit], sub)
            continue
        res = is_r_categorical(space, sub, r, budgets.states)
        if res.yes:
            yes[sub] = res.certificate
        elif res.verdict == UNKNOWN:
            resolved_all = False

    if subset_family == "auto" and not exhaustive:
        _grow_candidates(space, r, yes, budgets.states)

    # singletons keep the cover total even when nothing else certifies
    for p in range(space.n):
        single = (p,)
        if single not in yes:
            res = is_r_categorical(space, single, r, budgets.states)
            if res.yes:
                yes[single] = res.certificate

    subsets = sorted(yes, key=lambda s: (-len(s), s))
    universe = list(range(space.n))
    exact = exhaustive and resolved_all
    if exact:
        picked = exact_min_cover(universe, subsets)
    else:
        picked = greedy_cover(universe, subsets)
    if picked is None:
        raise ValidationFailure("no categorical cover found (singletons failed)")
    cover = [yes[subsets[i]] for i in picked]
    upper = len(cover)

    lower = max(1, len(comps))
    evidence = "components" if len(comps) > 1 else "trivial"
    if contr.verdict == NO and lower < 2:
        lower, evidence = 2, "not-contractible"
    if exact:
        lower, evidence = upper, "exhaustive-minimum"
    return CatReport(space, r, lower, upper, cover, exact, evidence, contr)
