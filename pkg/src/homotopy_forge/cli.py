"""Command-line surface: generate spaces, analyze, emit and replay certificates.

Reports go to stdout as canonical JSON; a one-line human summary goes
to stderr. Exit codes: 0 success or certified Yes, 1 certified No or
failed verification, 2 horizon-limited (Unknown / not found within
budgets), 3 malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor

from .budgets import Budgets, worker_count
from .complexity import monotonicity_report, tc_bounds
from .contract import NO, UNKNOWN, YES, cat_bounds, is_r_contractible
from .errors import ForgeError, FormatError
from .loops import RLoop, is_null_homotopic, lemma_certificate
from .paths import DiscretePath, r_connected_components
from .planner import search_patch_planner, synthesize_from_contraction
from .serialize import SCHEMA, canonical_dumps, replay_verify, to_json
from .spaces import (
    FiniteMetricSpace,
    gen_circle,
    gen_hawaiian,
    gen_interval_grid,
    gen_wedge_circles,
    space_from_json,
)

EXIT_OK = 0
EXIT_NO = 1
EXIT_UNKNOWN = 2
EXIT_INPUT = 3


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _load_space(path: str) -> FiniteMetricSpace:
    try:
        payload = json.loads(_read_text(path))
    except (OSError, json.JSONDecodeError) as exc:
        raise FormatError(f"cannot read space from {path!r}: {exc}") from exc
    return space_from_json(payload)


def _emit(doc: dict, summary: str, out: str | None) -> None:
    text = canonical_dumps(doc)
    sys.stdout.write(text)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    print(summary, file=sys.stderr)


def _budgets(args) -> Budgets:
    kw = {}
    if args.budget_states is not None:
        kw["states"] = args.budget_states
    if getattr(args, "m_max", None) is not None:
        kw["m_max"] = args.m_max
    if getattr(args, "padding_max", None) is not None:
        kw["padding_max"] = args.padding_max
    if getattr(args, "exact_threshold", None) is not None:
        kw["exact_threshold"] = args.exact_threshold
    if getattr(args, "patch_nodes", None) is not None:
        kw["patch_nodes"] = args.patch_nodes
    b = Budgets(**kw)
    if b.states <= 0 or b.padding_max < 0 or b.patch_nodes <= 0:
        raise FormatError("budgets must be positive")
    return b


def _parse_pairs(spec: str) -> list[tuple[str, str]]:
    """Pairs as 'a,b;c,d' inline or a JSON file of [["a","b"], ...]."""
    text = spec
    try:
        with open(spec) as fh:
            text = fh.read()
    except OSError:
        pass
    try:
        data = json.loads(text)
        return [(str(a), str(b)) for a, b in data]
    except (json.JSONDecodeError, TypeError, ValueError):
        pass
    pairs = []
    for chunk in text.split(";"):
        parts = chunk.split(",")
        if len(parts) != 2:
            raise FormatError(f"bad pair {chunk!r}; want 'a,b;c,d' or a JSON file")
        pairs.append((parts[0].strip(), parts[1].strip()))
    return pairs


# --- Subcommands ------------------------------------------------------------


def _cmd_gen(args) -> int:
    if args.shape == "circle":
        space = gen_circle(args.n, args.radius)
    elif args.shape == "interval":
        space = gen_interval_grid(args.m, args.length)
    elif args.shape == "wedge":
        space = gen_wedge_circles(args.k, args.n, args.radius)
    else:
        space = gen_hawaiian(args.k, args.n)
    _emit(to_json(space), f"{args.shape} space with {space.n} points", args.out)
    return EXIT_OK


def _cmd_connectivity(args) -> int:
    space = _load_space(args.space)
    comps = r_connected_components(space, args.r)
    doc = {
        "schema_version": SCHEMA,
        "kind": "connectivity_report",
        "space": {k: v for k, v in to_json(space).items() if k in ("labels", "metric")},
        "r": args.r,
        "components": [[space.labels[i] for i in comp] for comp in comps],
    }
    _emit(doc, f"{len(comps)} component(s) at r={args.r}", args.out)
    return EXIT_OK


def _cmd_contractible(args) -> int:
    space = _load_space(args.space)
    budgets = _budgets(args)
    res = is_r_contractible(space, args.r, budgets.states)
    if res.yes:
        doc = to_json(res.certificate)
        doc["verdict"] = YES
        doc["states_visited"] = res.states_visited
        _emit(doc, f"Yes: contraction of length {res.certificate.grid.m}", args.out)
        return EXIT_OK
    doc = {
        "schema_version": SCHEMA,
        "kind": "contractibility_report",
        "space": {k: v for k, v in to_json(space).items() if k in ("labels", "metric")},
        "r": args.r,
        "verdict": res.verdict,
        "states_visited": res.states_visited,
    }
    _emit(doc, f"{res.verdict} after {res.states_visited} states", args.out)
    return EXIT_NO if res.verdict == NO else EXIT_UNKNOWN


def _cmd_cat(args) -> int:
    space = _load_space(args.space)
    rep = cat_bounds(space, args.r, "auto", _budgets(args))
    doc = to_json(rep)
    _emit(
        doc,
        f"cat in [{rep.lower}, {rep.upper}] ({'exact' if rep.exact else rep.lower_evidence})",
        args.out,
    )
    return EXIT_OK if rep.exact else EXIT_UNKNOWN


def _cmd_tc(args) -> int:
    space = _load_space(args.space)
    rep = tc_bounds(space, args.r, _budgets(args))
    doc = to_json(rep)
    if args.replay:
        ok, detail = replay_verify(json.loads(canonical_dumps(doc)))
        if not ok:
            print(f"self-replay failed: {detail}", file=sys.stderr)
            return EXIT_NO
    _emit(
        doc,
        f"tc in [{rep.lower}, {rep.upper}] via {rep.route} "
        f"({'exact' if rep.exact else rep.lower_evidence})",
        args.out,
    )
    return EXIT_OK if rep.exact else EXIT_UNKNOWN


def _cmd_monotonicity(args) -> int:
    space = _load_space(args.space)
    scales = [float(v) for v in args.scales.split(",")]
    budgets = _budgets(args)
    workers = worker_count(len(scales))
    if workers > 1:
        # per-scale analyses are independent; order of results is fixed
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(lambda r: tc_bounds(space, r, budgets), scales))
    rep = monotonicity_report(space, scales, budgets)
    _emit(to_json(rep), f"monotonicity {'ok' if rep.ok else 'VIOLATED'}", args.out)
    return EXIT_OK if rep.ok else EXIT_NO


def _cmd_planner(args) -> int:
    if args.action == "verify":
        return _cmd_verify(args)
    if args.r is None:
        raise FormatError("planner synth/patch need --r")
    space = _load_space(args.space)
    budgets = _budgets(args)
    if args.action == "synth":
        res = is_r_contractible(space, args.r, budgets.states)
        if res.verdict == NO:
            _emit(
                {
                    "schema_version": SCHEMA,
                    "kind": "planner_report",
                    "verdict": NO,
                    "reason": "space is not contractible at this scale",
                },
                "No: full-square planner cannot exist",
                args.out,
            )
            return EXIT_NO
        if res.verdict == UNKNOWN:
            _emit(
                {
                    "schema_version": SCHEMA,
                    "kind": "planner_report",
                    "verdict": UNKNOWN,
                    "states_visited": res.states_visited,
                },
                "Unknown: contraction search exhausted its budget",
                args.out,
            )
            return EXIT_UNKNOWN
        planner = synthesize_from_contraction(res.certificate)
        _emit(to_json(planner), f"planner of length {planner.m} on all pairs", args.out)
        return EXIT_OK
    # patch search
    if args.patch is None:
        raise FormatError("planner patch needs --patch")
    pairs_lbl = _parse_pairs(args.patch)
    pairs = [(space.index(a), space.index(b)) for a, b in pairs_lbl]
    got = search_patch_planner(
        space, pairs, args.r,
        m_max=budgets.m_max, budget_nodes=budgets.patch_nodes,
    )
    if got.found:
        _emit(to_json(got.planner), f"planner found, m={got.planner.m}", args.out)
        return EXIT_OK
    _emit(
        {
            "schema_version": SCHEMA,
            "kind": "patch_search_report",
            "verdict": got.verdict,
            "nodes": got.nodes,
        },
        f"no planner within horizon ({got.nodes} nodes)",
        args.out,
    )
    return EXIT_UNKNOWN


def _cmd_pi1(args) -> int:
    space = _load_space(args.space)
    budgets = _budgets(args)
    labels = [v.strip() for v in args.loop.split(",")]
    loop = RLoop(DiscretePath(space, args.r, tuple(space.index(v) for v in labels)))
    if args.action == "null":
        out = is_null_homotopic(loop, budgets.padding_max, budgets.states)
        if out.null:
            _emit(
                to_json(out.grid),
                f"Null at padding {out.padding_used} ({out.states_visited} states)",
                args.out,
            )
            return EXIT_OK
        _emit(
            {
                "schema_version": SCHEMA,
                "kind": "pi1_report",
                "verdict": out.verdict,
                "states_visited": out.states_visited,
            },
            f"{out.verdict} after {out.states_visited} states",
            args.out,
        )
        return EXIT_UNKNOWN
    # lemma: derive the certificate from a contraction
    res = is_r_contractible(space, args.r, budgets.states)
    if res.verdict == NO:
        _emit(
            {
                "schema_version": SCHEMA,
                "kind": "pi1_report",
                "verdict": NO,
                "reason": "space is not contractible at this scale",
            },
            "No: no contraction to read the certificate from",
            args.out,
        )
        return EXIT_NO
    if res.verdict == UNKNOWN:
        _emit(
            {
                "schema_version": SCHEMA,
                "kind": "pi1_report",
                "verdict": UNKNOWN,
                "states_visited": res.states_visited,
            },
            "Unknown: contraction search exhausted its budget",
            args.out,
        )
        return EXIT_UNKNOWN
    grid = lemma_certificate(res.certificate, loop)
    _emit(to_json(grid), f"null-homotopy with {grid.steps} steps", args.out)
    return EXIT_OK


def _cmd_verify(args) -> int:
    source = getattr(args, "certificate", None) or args.space
    raw = _read_text(source)
    try:
        payload = json.loads(raw)
    except json.JSONDecodeError as exc:
        print(f"malformed JSON: {exc}", file=sys.stderr)
        return EXIT_INPUT
    ok, detail = replay_verify(payload)
    canonical = canonical_dumps(payload) == raw
    note = "" if canonical else " (input is not in canonical form)"
    print(f"{'OK' if ok else 'FAILED'}: {detail}{note}", file=sys.stderr)
    doc = {
        "schema_version": SCHEMA,
        "kind": "verify_report",
        "ok": ok,
        "detail": detail,
        "canonical": canonical,
    }
    sys.stdout.write(canonical_dumps(doc))
    return EXIT_OK if ok else EXIT_NO


# --- Argument wiring --------------------------------------------------------


def _add_common(p: argparse.ArgumentParser, need_r: bool = True) -> None:
    p.add_argument("--space", default="-", help="space JSON file, or - for stdin")
    if need_r:
        p.add_argument("--r", type=float, required=True, help="resolution scale")
    p.add_argument("--budget-states", type=int, default=None)
    p.add_argument("--m-max", type=int, default=None)
    p.add_argument("--padding-max", type=int, default=None)
    p.add_argument("--exact-threshold", type=int, default=None)
    p.add_argument("--patch-nodes", type=int, default=None)
    p.add_argument("--out", default=None, help="also write the JSON report here")


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="homotopy-forge",
        description="Decide contractibility, synthesize motion planners and "
        "bound topological complexity on finite metric spaces at a scale r.",
    )
    sub = top.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a sample space as JSON")
    gen.add_argument("shape", choices=["circle", "interval", "wedge", "hawaiian"])
    gen.add_argument("--n", type=int, default=6, help="points per circle")
    gen.add_argument("--m", type=int, default=4, help="interval subdivisions")
    gen.add_argument("--k", type=int, default=2, help="number of circles")
    gen.add_argument("--radius", type=float, default=1.0)
    gen.add_argument("--length", type=float, default=1.0)
    gen.add_argument("--out", default=None)
    gen.set_defaults(func=_cmd_gen)

    conn = sub.add_parser("connectivity", help="r-connected components")
    _add_common(conn)
    conn.set_defaults(func=_cmd_connectivity)

    contr = sub.add_parser("contractible", help="decide r-contractibility")
    _add_common(contr)
    contr.set_defaults(func=_cmd_contractible)

    cat = sub.add_parser("cat", help="categorical cover bounds")
    _add_common(cat)
    cat.set_defaults(func=_cmd_cat)

    tc = sub.add_parser("tc", help="topological-complexity bounds")
    _add_common(tc)
    tc.add_argument("--replay", action="store_true", help="self-check the emitted report")
    tc.set_defaults(func=_cmd_tc)

    mono = sub.add_parser("monotonicity", help="tc across ascending scales")
    _add_common(mono, need_r=False)
    mono.add_argument("--scales", required=True, help="comma-separated ascending scales")
    mono.set_defaults(func=_cmd_monotonicity)

    plan = sub.add_parser("planner", help="synthesize, verify or search planners")
    plan.add_argument("action", choices=["synth", "verify", "patch"])
    _add_common(plan, need_r=False)
    plan.add_argument("--r", type=float, default=None, help="resolution scale")
    plan.add_argument("--patch", default=None, help="pairs 'a,b;c,d' or JSON file")
    plan.add_argument("--certificate", default=None, help="planner JSON for verify")
    plan.set_defaults(func=_cmd_planner)

    pi1 = sub.add_parser("pi1", help="loop null-homotopy tools")
    pi1.add_argument("action", choices=["null", "lemma"])
    _add_common(pi1)
    pi1.add_argument("--loop", required=True, help="comma-separated point labels")
    pi1.set_defaults(func=_cmd_pi1)

    ver = sub.add_parser("verify", help="replay a certificate with no searches")
    ver.add_argument("certificate", help="certificate JSON file, or - for stdin")
    ver.set_defaults(func=_cmd_verify, space="-")

    return top


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FormatError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ForgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except FileNotFoundError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
