"""Canonical JSON certificates and searchless replay.

Every positive answer the library produces is exportable as a JSON
document carrying the space, the scale and the full witness, so a
skeptical reader can re-check it without re-running any search.
Serialization is canonical (sorted keys, fixed separators, no NaN or
raw infinities), so dumps(loads(text)) reproduces text byte for byte.
"""

from __future__ import annotations

import json
import math
from typing import Any

from .complexity import MonotonicityReport, TCReport
from .contract import (
    CategoricalCertificate,
    CatReport,
    ContractibilityCertificate,
)
from .errors import FormatError
from .homotopy import HomotopyGrid, grid_from_tables, verify_homotopy
from .loops import NullHomotopyGrid, RLoop
from .maps import LipMap, is_lipschitz
from .paths import DiscretePath
from .paths import r_connected_components
from .planner import MotionPlanner, verify_planner
from .spaces import FiniteMetricSpace, space_from_json, space_to_json

SCHEMA = "homotopy-forge/1"


def canonical_dumps(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False) + "\n"


def _num(v: float):
    if math.isinf(v):
        return "inf"
    return int(v) if float(v).is_integer() else float(v)


def _num_back(v) -> float:
    return math.inf if v == "inf" else float(v)


def _lab(space: FiniteMetricSpace, i: int) -> str:
    return space.labels[i]


def _idx(space: FiniteMetricSpace, label: str) -> int:
    return space.index(label)


# --- Writers ----------------------------------------------------------------


def _grid_payload(grid: HomotopyGrid) -> list[list[str]]:
    cod = grid.codomain
    return [[_lab(cod, v) for v in fr.table] for fr in grid.frames]


def to_json(obj: Any) -> dict:
    """Canonical dict form of any certificate-bearing object."""
    if isinstance(obj, FiniteMetricSpace):
        return {"schema_version": SCHEMA, "kind": "space", **space_to_json(obj)}
    if isinstance(obj, DiscretePath):
        return {
            "schema_version": SCHEMA,
            "kind": "path",
            "space": space_to_json(obj.space),
            "r": _num(obj.r),
            "points": [_lab(obj.space, v) for v in obj.points],
        }
    if isinstance(obj, LipMap):
        return {
            "schema_version": SCHEMA,
            "kind": "map",
            "domain": space_to_json(obj.domain),
            "codomain": space_to_json(obj.codomain),
            "s": _num(obj.s),
            "table": [_lab(obj.codomain, v) for v in obj.table],
        }
    if isinstance(obj, HomotopyGrid):
        return {
            "schema_version": SCHEMA,
            "kind": "homotopy",
            "domain": space_to_json(obj.domain),
            "codomain": space_to_json(obj.codomain),
            "s": _num(obj.s),
            "r": _num(obj.r),
            "frames": _grid_payload(obj),
        }
    if isinstance(obj, ContractibilityCertificate):
        return {
            "schema_version": SCHEMA,
            "kind": "contractibility",
            "space": space_to_json(obj.space),
            "r": _num(obj.r),
            "basepoint": _lab(obj.space, obj.basepoint),
            "frames": _grid_payload(obj.grid),
        }
    if isinstance(obj, CategoricalCertificate):
        return {
            "schema_version": SCHEMA,
            "kind": "categorical",
            "space": space_to_json(obj.space),
            "r": _num(obj.r),
            "subset": [_lab(obj.space, v) for v in obj.subset],
            "target": _lab(obj.space, obj.target),
            "frames": _grid_payload(obj.grid),
        }
    if isinstance(obj, CatReport):
        return {
            "schema_version": SCHEMA,
            "kind": "cat_report",
            "space": space_to_json(obj.space),
            "r": _num(obj.r),
            "lower": _num(obj.lower),
            "upper": _num(obj.upper),
            "exact": obj.exact,
            "lower_evidence": obj.lower_evidence,
            "cover": [_strip(to_json(c)) for c in obj.cover],
        }
    if isinstance(obj, MotionPlanner):
        entries = sorted(
            (
                [_lab(obj.space, a), _lab(obj.space, b)],
                [_lab(obj.space, v) for v in obj.paths[(a, b)].points],
            )
            for a, b in obj.domain
        )
        return {
            "schema_version": SCHEMA,
            "kind": "planner",
            "space": space_to_json(obj.space),
            "r": _num(obj.r),
            "m": obj.m,
            "patch": [{"pair": pair, "points": pts} for pair, pts in entries],
        }
    if isinstance(obj, TCReport):
        return {
            "schema_version": SCHEMA,
            "kind": "tc_report",
            "space": space_to_json(obj.space),
            "r": _num(obj.r),
            "lower": _num(obj.lower),
            "upper": _num(obj.upper),
            "exact": obj.exact,
            "lower_evidence": obj.lower_evidence,
            "route": obj.route,
            "blocks_consumed": obj.blocks_consumed,
            "cover": [_strip(to_json(p)) for p in obj.cover],
        }
    if isinstance(obj, NullHomotopyGrid):
        return {
            "schema_version": SCHEMA,
            "kind": "nullhomotopy",
            "space": space_to_json(obj.space),
            "r": _num(obj.r),
            "basepoint": _lab(obj.space, obj.basepoint),
            "loop": [_lab(obj.space, v) for v in obj.loop.points],
            "rows": [[_lab(obj.space, v) for v in row] for row in obj.rows],
        }
    if isinstance(obj, MonotonicityReport):
        return {
            "schema_version": SCHEMA,
            "kind": "monotonicity",
            "space": space_to_json(obj.space),
            "scales": [_num(v) for v in obj.scales],
            "reports": [_strip(to_json(rep)) for rep in obj.reports],
            "ok": obj.ok,
        }
    raise FormatError(f"no JSON form for {type(obj).__name__}")


def _strip(payload: dict) -> dict:
    """Drop the envelope on nested payloads (kind stays for dispatch)."""
    payload = dict(payload)
    payload.pop("schema_version", None)
    return payload


def dumps(obj: Any) -> str:
    return canonical_dumps(to_json(obj))


def save(obj: Any, path: str) -> str:
    text = dumps(obj)
    with open(path, "w") as fh:
        fh.write(text)
    return text


# --- Replay -----------------------------------------------------------------


def _space_in(payload: dict, key: str = "space") -> FiniteMetricSpace:
    if key not in payload:
        raise FormatError(f"missing '{key}'")
    return space_from_json(payload[key])


def _grid_in(
    domain: FiniteMetricSpace,
    codomain: FiniteMetricSpace,
    s: float,
    r: float,
    frames: list[list[str]],
) -> HomotopyGrid:
    tables = [tuple(_idx(codomain, lbl) for lbl in fr) for fr in frames]
    return grid_from_tables(domain, codomain, s, r, tables)


def _contractibility_in(payload: dict) -> ContractibilityCertificate:
    space = _space_in(payload)
    r = _num_back(payload["r"])
    grid = _grid_in(space, space, 1.0, r, payload["frames"])
    return ContractibilityCertificate(space, r, grid, _idx(space, payload["basepoint"]))


def _categorical_in(payload: dict) -> CategoricalCertificate:
    space = _space_in(payload)
    r = _num_back(payload["r"])
    subset = tuple(_idx(space, lbl) for lbl in payload["subset"])
    grid = _grid_in(space.restriction(subset), space, 1.0, r, payload["frames"])
    return CategoricalCertificate(space, r, subset, grid, _idx(space, payload["target"]))


def _planner_in(payload: dict) -> MotionPlanner:
    space = _space_in(payload)
    r = _num_back(payload["r"])
    paths = {}
    domain = []
    for entry in payload["patch"]:
        a, b = (_idx(space, lbl) for lbl in entry["pair"])
        pts = tuple(_idx(space, lbl) for lbl in entry["points"])
        paths[(a, b)] = DiscretePath(space, r, pts)
        domain.append((a, b))
    return MotionPlanner(space, r, int(payload["m"]), tuple(domain), paths)


def _nullhomotopy_in(payload: dict) -> NullHomotopyGrid:
    space = _space_in(payload)
    r = _num_back(payload["r"])
    loop_pts = tuple(_idx(space, lbl) for lbl in payload["loop"])
    loop = RLoop(DiscretePath(space, r, loop_pts))
    rows = tuple(
        tuple(_idx(space, lbl) for lbl in row) for row in payload["rows"]
    )
    return NullHomotopyGrid(space, r, _idx(space, payload["basepoint"]), loop, rows)


def _replay_cat_report(payload: dict) -> tuple[bool, str]:
    space = _space_in(payload)
    covered: set[int] = set()
    for sub in payload["cover"]:
        cert = _categorical_in(sub)
        ok, witness = cert.verify()
        if not ok:
            return False, f"cover certificate failed at {witness}"
        covered.update(cert.subset)
    if covered != set(range(space.n)):
        return False, "cover does not reach every point"
    if len(payload["cover"]) != payload["upper"]:
        return False, "upper bound does not match cover size"
    if _num_back(payload["lower"]) > _num_back(payload["upper"]):
        return False, "lower bound exceeds upper bound"
    return True, f"cat cover of size {payload['upper']} verified"


def _replay_tc_report(payload: dict) -> tuple[bool, str]:
    space = _space_in(payload)
    upper = _num_back(payload["upper"])
    if math.isinf(upper):
        comps = r_connected_components(space, _num_back(payload["r"]))
        if len(comps) <= 1:
            return False, "infinite bound claimed on a connected space"
        return True, f"disconnected at this scale: {len(comps)} components"
    covered: set[tuple[int, int]] = set()
    for sub in payload["cover"]:
        planner = _planner_in(sub)
        ok, witness = verify_planner(planner)
        if not ok:
            return False, f"cover planner failed at {witness}"
        covered.update(planner.domain)
    if covered != {(x, y) for x in range(space.n) for y in range(space.n)}:
        return False, "planner patches do not cover the pair square"
    if len(payload["cover"]) != upper:
        return False, "upper bound does not match cover size"
    if _num_back(payload["lower"]) > upper:
        return False, "lower bound exceeds upper bound"
    return True, f"planner cover of size {len(payload['cover'])} verified"


def replay_verify(payload: dict) -> tuple[bool, str]:
    """Re-check a parsed certificate without running any search.

    Returns (ok, human-readable detail). Raises FormatError on
    malformed input; verification failures come back as ok=False.
    """
    if not isinstance(payload, dict) or "kind" not in payload:
        raise FormatError("certificate JSON needs a 'kind'")
    kind = payload["kind"]
    if payload.get("schema_version", SCHEMA) != SCHEMA:
        raise FormatError(f"unsupported schema {payload.get('schema_version')!r}")
    try:
        if kind == "space":
            space = space_from_json(payload)
            return True, f"metric on {space.n} points is valid"
        if kind == "path":
            space = _space_in(payload)
            pts = tuple(_idx(space, lbl) for lbl in payload["points"])
            DiscretePath(space, _num_back(payload["r"]), pts)
            return True, f"r-path of length {len(pts) - 1} verified"
        if kind == "map":
            dom = _space_in(payload, "domain")
            cod = _space_in(payload, "codomain")
            table = tuple(_idx(cod, lbl) for lbl in payload["table"])
            mp = LipMap(dom, cod, _num_back(payload["s"]), table)
            ok, witness = is_lipschitz(mp)
            return ok, "Lipschitz bound verified" if ok else f"violated at {witness}"
        if kind == "homotopy":
            dom = _space_in(payload, "domain")
            cod = _space_in(payload, "codomain")
            grid = _grid_in(
                dom, cod, _num_back(payload["s"]), _num_back(payload["r"]),
                payload["frames"],
            )
            ok, witness = verify_homotopy(grid)
            return ok, "homotopy grid verified" if ok else f"failed at {witness}"
        if kind == "contractibility":
            cert = _contractibility_in(payload)
            ok, witness = cert.verify()
            return ok, "contraction verified" if ok else f"failed at {witness}"
        if kind == "categorical":
            cert = _categorical_in(payload)
            ok, witness = cert.verify()
            return ok, "categorical certificate verified" if ok else f"failed at {witness}"
        if kind == "cat_report":
            return _replay_cat_report(payload)
        if kind == "planner":
            planner = _planner_in(payload)
            ok, witness = verify_planner(planner)
            return ok, "planner verified" if ok else f"failed at {witness}"
        if kind == "tc_report":
            return _replay_tc_report(payload)
        if kind == "nullhomotopy":
            grid = _nullhomotopy_in(payload)
            ok, witness = grid.verify()
            return ok, "null-homotopy verified" if ok else f"failed at {witness}"
        if kind == "monotonicity":
            details = []
            reports = payload["reports"]
            for rep in reports:
                ok, detail = _replay_tc_report(rep)
                if not ok:
                    return False, detail
                details.append(detail)
            for i in range(len(reports)):
                for j in range(i + 1, len(reports)):
                    if _num_back(reports[j]["lower"]) > _num_back(reports[i]["upper"]):
                        return False, (
                            f"monotonicity violated between scales "
                            f"{payload['scales'][i]} and {payload['scales'][j]}"
                        )
            return True, "; ".join(details)
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed {kind} certificate: {exc}") from exc
    raise FormatError(f"unknown certificate kind {kind!r}")
