"""Certified bounds for discrete topological complexity.

TC at scale r is the minimum number of patches covering X x X, each
carrying an r-motion planner. Upper bounds come from actual verified
covers, assembled by three routes: the full-space planner when X is
r-contractible, planners extracted from categorical patches of the
product, and direct patch searches on heuristic splits (geodesic-tie
and distance-band). Lower bounds come from exact non-contractibility
(a single patch would make X contractible) and from category, which
never exceeds TC on a connected space. Scale monotonicity and homotopy
invariance are checked by re-verifying certificates, not by trusting
the theorems that motivated them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .budgets import Budgets
from .contract import (
    NO,
    CatReport,
    ContractibilityResult,
    cat_bounds,
    is_r_contractible,
    lift_block_certificate,
)
from .errors import MissingBridge, ValidationFailure
from .homotopy import HomotopyGrid, verify_homotopy
from .maps import LipMap, compose, identity_map, is_lipschitz
from .paths import DiscretePath, get_graph, r_connected_components, shortest_r_path
from .planner import (
    MotionPlanner,
    normalize_lengths,
    planner_from_categorical_patch,
    search_patch_planner,
    synthesize_from_contraction,
    verify_planner,
)
from .spaces import EPS, FiniteMetricSpace, l1_product


@dataclass
class TCReport:
    space: FiniteMetricSpace
    r: float
    lower: float  # math.inf when no finite planner cover can exist
    upper: float
    cover: list[MotionPlanner]
    exact: bool
    lower_evidence: str  # disconnected|contractible|not-contractible|cat-lower|unknown
    route: str  # disconnected | contraction | split:<name> | blocks | singletons
    contractibility: ContractibilityResult | None = field(repr=False, default=None)
    cat_report: CatReport | None = field(repr=False, default=None)
    blocks_consumed: int | None = None  # categorical product patches used by the blocks route


def _all_pairs(n: int) -> list[tuple[int, int]]:
    return [(x, y) for x in range(n) for y in range(n)]


def _two_patch_splits(space: FiniteMetricSpace, r: float):
    """Candidate 2-part splits of the pair square, best guesses first.

    The geodesic-tie split separates pairs with a unique shortest
    r-path from pairs with several (the discrete version of the classic
    two-patch circle planner). Distance bands split at thresholds drawn
    from the occurring distances.
    """
    g = get_graph(space, r)
    pairs = _all_pairs(space.n)
    unique = [p for p in pairs if g.geodesic_count(*p) == 1]
    tied = [p for p in pairs if g.geodesic_count(*p) != 1]
    if unique and tied:
        yield "geodesic-ties", (unique, tied)
    thresholds = space.distinct_distances()[:-1]  # full-diameter band is no split
    if len(thresholds) > 5:
        idx = np.linspace(0, len(thresholds) - 1, 5).round().astype(int)
        thresholds = [thresholds[i] for i in dict.fromkeys(idx)]
    for t in thresholds:
        near = [(x, y) for x, y in pairs if space.dist[x, y] <= t + EPS]
        far = [(x, y) for x, y in pairs if space.dist[x, y] > t + EPS]
        if near and far:
            yield f"band:{t:.6g}", (near, far)


def blocks_cover_planners(
    space: FiniteMetricSpace, r: float, cat_report: CatReport
) -> tuple[list[MotionPlanner], int]:
    """Planners from the block categorical cover of X x X.

    Every pair of patches from a categorical cover of X lifts to a
    categorical block of the product; each block yields one planner
    through its contraction plus a bridge between the two targets.
    Returns (planners, number of product patches consumed).
    """
    prod = l1_product(space, space)
    lifted = [
        lift_block_certificate(prod, ca, cb)
        for ca in cat_report.cover
        for cb in cat_report.cover
    ]
    planners = [planner_from_categorical_patch(c) for c in lifted]
    return planners, len(lifted)


def _singleton_planners(space: FiniteMetricSpace, r: float) -> list[MotionPlanner]:
    """One planner per ordered pair: the last-resort cover."""
    out = []
    for x in range(space.n):
        for y in range(space.n):
            p = shortest_r_path(space, x, y, r)
            out.append(MotionPlanner(space, r, p.m, ((x, y),), {(x, y): p}))
    return out


def tc_bounds(
    space: FiniteMetricSpace, r: float, budgets: Budgets = Budgets()
) -> TCReport:
    """Certified interval for the minimum planner-patch cover of X x X.

    Disconnected spaces get (inf, inf): a planner patch containing a
    cross-component pair would need an r-path between components. On a
    contractible space one planner covers everything. Otherwise covers
    are tried from cheapest shape up (2-part splits, product blocks,
    singleton pairs) and the smallest verified one is reported. The
    lower bound uses exact non-contractibility and the category bound;
    when contractibility is unresolved the lower bound honestly stays 1.
    """
    comps = r_connected_components(space, r)
    if len(comps) > 1:
        return TCReport(
            space, r, math.inf, math.inf, [], True, "disconnected", "disconnected"
        )
    contr = is_r_contractible(space, r, budgets.states)
    if contr.yes:
        planner = synthesize_from_contraction(contr.certificate)
        return TCReport(
            space, r, 1, 1, [planner], True, "contractible", "contraction", contr
        )

    cat_rep = cat_bounds(space, r, "auto", budgets, contractibility=contr)
    if contr.verdict == NO:
        lower = max(2, cat_rep.lower)
        evidence = "cat-lower" if cat_rep.lower > 2 else "not-contractible"
    else:
        lower, evidence = 1, "unknown"

    route = None
    cover: list[MotionPlanner] | None = None
    consumed = None

    for name, (part_a, part_b) in _two_patch_splits(space, r):
        planners = []
        for part in (part_a, part_b):
            got = search_patch_planner(
                space, part, r,
                m_max=budgets.planner_horizon(space.n),
                budget_nodes=budgets.patch_nodes,
            )
            if not got.found:
                break
            planners.append(got.planner)
        if len(planners) == 2:
            route, cover = f"split:{name}", planners
            break

    if cover is None:
        try:
            planners, consumed = blocks_cover_planners(space, r, cat_rep)
            route, cover = "blocks", planners
        except MissingBridge:
            consumed = None

    if cover is None:
        route, cover = "singletons", _singleton_planners(space, r)

    cover = normalize_lengths(cover)
    for p in cover:
        ok, witness = verify_planner(p)
        if not ok:
            raise ValidationFailure("cover planner failed after padding", where=witness)
    upper = len(cover)
    if upper < lower:
        raise ValidationFailure(
            f"certified bounds crossed: lower {lower} > upper {upper}"
        )
    return TCReport(
        space, r, lower, upper, cover, lower == upper, evidence, route,
        contr, cat_rep, consumed,
    )


# --- Scale monotonicity -----------------------------------------------------


@dataclass
class MonotonicityCheck:
    r_small: float
    r_big: float
    lower_at_big: float
    upper_at_small: float
    bound_ok: bool  # TC can only shrink as r grows
    replay_ok: bool  # small-scale planners re-verify at the big scale


@dataclass
class MonotonicityReport:
    space: FiniteMetricSpace
    scales: tuple[float, ...]
    reports: list[TCReport]
    checks: list[MonotonicityCheck]
    ok: bool


def _replay_at_scale(planner: MotionPlanner, r_big: float) -> bool:
    paths = {
        pair: path.at_scale(r_big) for pair, path in planner.paths.items()
    }
    bigger = MotionPlanner(planner.space, r_big, planner.m, planner.domain, paths)
    ok, _ = verify_planner(bigger)
    return ok


def monotonicity_report(
    space: FiniteMetricSpace,
    scales: list[float],
    budgets: Budgets = Budgets(),
) -> MonotonicityReport:
    """tc_bounds across ascending scales with cross-scale consistency.

    For r < r' the certified intervals must satisfy lower(r') <=
    upper(r), and every planner in the cover found at r must re-verify
    verbatim at r'. A violation is a bug, not a finding.
    """
    if list(scales) != sorted(scales) or len(set(scales)) != len(scales):
        raise ValidationFailure("scales must be strictly ascending")
    reports = [tc_bounds(space, r, budgets) for r in scales]
    checks = []
    all_ok = True
    for i in range(len(scales)):
        for j in range(i + 1, len(scales)):
            bound_ok = reports[j].lower <= reports[i].upper
            replay_ok = all(
                _replay_at_scale(p, scales[j]) for p in reports[i].cover
            )
            checks.append(
                MonotonicityCheck(
                    scales[i], scales[j], reports[j].lower, reports[i].upper,
                    bound_ok, replay_ok,
                )
            )
            all_ok = all_ok and bound_ok and replay_ok
    return MonotonicityReport(space, tuple(scales), reports, checks, all_ok)


# --- Homotopy invariance ----------------------------------------------------


@dataclass
class EquivalenceData:
    """An r-homotopy equivalence: f and g with r1 * r2 <= 1, plus grids
    witnessing g∘f ≃ id and f∘g ≃ id at (1, r)."""

    f: LipMap  # X -> Y, r1-Lipschitz (r1 = f.s)
    g: LipMap  # Y -> X, r2-Lipschitz (r2 = g.s)
    r: float
    grid_x: HomotopyGrid  # connects g∘f and id_X
    grid_y: HomotopyGrid  # connects f∘g and id_Y

    @property
    def x_space(self) -> FiniteMetricSpace:
        return self.f.domain

    @property
    def y_space(self) -> FiniteMetricSpace:
        return self.g.domain


def verify_equivalence(eq: EquivalenceData) -> tuple[bool, list[str]]:
    """Re-check every part of an equivalence; returns (ok, issues)."""
    issues = []
    X, Y = eq.x_space, eq.y_space
    if eq.f.codomain != Y or eq.g.codomain != X:
        return False, ["maps do not pair up X <-> Y"]
    if eq.f.s * eq.g.s > 1.0 + EPS:
        issues.append(f"scale product {eq.f.s * eq.g.s} exceeds 1")
    for name, mp in (("f", eq.f), ("g", eq.g)):
        ok, witness = is_lipschitz(mp)
        if not ok:
            issues.append(f"{name} is not {mp.s}-Lipschitz at {witness}")
    for name, grid, space_, comp in (
        ("grid_x", eq.grid_x, X, compose(eq.g, eq.f)),
        ("grid_y", eq.grid_y, Y, compose(eq.f, eq.g)),
    ):
        if grid.domain != space_ or grid.codomain != space_:
            issues.append(f"{name} is not a self-homotopy of the right space")
            continue
        if grid.s != 1.0 or grid.r != eq.r:
            issues.append(f"{name} not at scale (1, {eq.r})")
        ends = {grid.frames[0].table, grid.frames[-1].table}
        wanted = {comp.table, identity_map(space_).table}
        if ends != wanted:
            issues.append(f"{name} does not connect the composite with the identity")
        ok, witness = verify_homotopy(grid)
        if not ok:
            issues.append(f"{name} fails verification at {witness}")
    return not issues, issues


def _identity_first(grid: HomotopyGrid) -> HomotopyGrid:
    n = grid.domain.n
    if grid.frames[0].table == tuple(range(n)):
        return grid
    return grid.reversed()


def transport_planner(eq: EquivalenceData, planner: MotionPlanner) -> MotionPlanner:
    """Carry a planner across an equivalence: X patches become Y patches.

    A pair (y, z) whose g-image pair lies in the patch follows y's
    homotopy track to f(g(y)), then f applied pointwise to the planned
    path between the g-images, then z's track backwards. Needs
    f.s * planner.r <= eq.r so the middle stays within scale.
    """
    X, Y = eq.x_space, eq.y_space
    if planner.space != X:
        raise ValidationFailure("planner does not live on the equivalence source")
    if eq.f.s * planner.r > eq.r + EPS:
        raise ValidationFailure(
            f"transport needs f.s * planner.r <= r: {eq.f.s} * {planner.r} > {eq.r}"
        )
    grid_y = _identity_first(eq.grid_y)
    tracks = [[fr.table[y] for fr in grid_y.frames] for y in range(Y.n)]
    in_patch = set(planner.domain)
    paths: dict[tuple[int, int], DiscretePath] = {}
    domain = []
    for y in range(Y.n):
        for z in range(Y.n):
            gp = (eq.g.table[y], eq.g.table[z])
            if gp not in in_patch:
                continue
            mid = [eq.f.table[p] for p in planner.paths[gp].points]
            pts = tracks[y] + mid[1:] + tracks[z][::-1][1:]
            paths[(y, z)] = DiscretePath(Y, eq.r, tuple(pts))
            domain.append((y, z))
    if not domain:
        raise ValidationFailure("patch has no preimage pairs under g x g")
    out = MotionPlanner(
        Y, eq.r, 2 * grid_y.m + planner.m, tuple(domain), paths
    )
    ok, witness = verify_planner(out)
    if not ok:
        raise ValidationFailure("transported planner failed verification", where=witness)
    return out


@dataclass
class InvarianceReport:
    r: float
    checks: list[tuple[str, float, float, bool]]  # (name, lhs, rhs, lhs<=rhs)
    transported: list[MotionPlanner]
    reports: dict[str, TCReport]
    ok: bool


def check_invariance_inequalities(
    eq: EquivalenceData, budgets: Budgets = Budgets()
) -> InvarianceReport:
    """Bound transfer across an equivalence, checked on actual covers.

    TC at r on one side never exceeds TC at the rescaled r/s on the
    other; additionally the rescaled cover of X is transported to Y
    planner by planner and re-verified, giving a concrete Y cover whose
    size must dominate every certified Y lower bound.
    """
    ok_all, issues = verify_equivalence(eq)
    if not ok_all:
        raise ValidationFailure("equivalence data failed verification", where=tuple(issues))
    X, Y = eq.x_space, eq.y_space
    r, r1, r2 = eq.r, eq.f.s, eq.g.s
    reports = {
        "Y@r": tc_bounds(Y, r, budgets),
        "X@r/r1": tc_bounds(X, r / r1, budgets),
        "X@r": tc_bounds(X, r, budgets),
        "Y@r/r2": tc_bounds(Y, r / r2, budgets),
    }
    checks = [
        (
            "tc(Y,r) <= tc(X,r/r1)",
            reports["Y@r"].lower,
            reports["X@r/r1"].upper,
            reports["Y@r"].lower <= reports["X@r/r1"].upper,
        ),
        (
            "tc(X,r) <= tc(Y,r/r2)",
            reports["X@r"].lower,
            reports["Y@r/r2"].upper,
            reports["X@r"].lower <= reports["Y@r/r2"].upper,
        ),
    ]
    transported = [
        transport_planner(eq, p) for p in reports["X@r/r1"].cover
    ]
    if transported:
        covered = set().union(*(set(p.domain) for p in transported))
        if covered != {(y, z) for y in range(Y.n) for z in range(Y.n)}:
            raise ValidationFailure("transported patches do not cover the pair square")
        checks.append(
            (
                "tc(Y,r) <= transported cover size",
                reports["Y@r"].lower,
                float(len(transported)),
                reports["Y@r"].lower <= len(transported),
            )
        )
    return InvarianceReport(
        r, checks, transported, reports, all(c[3] for c in checks)
    )
