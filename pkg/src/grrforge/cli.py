"""Command-line front end.

Exit status: 0 on success, 1 on a domain error (bad input, unknown family,
malformed literal), 2 when a budget or the enumeration cap stops the run.
JSON reports carry ``"schema": "grrforge/1"``; integers beyond 2^53 are
written as decimal strings.  ``--canonical`` drops timing fields so that
identical configurations give byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import acceptance, bounds, census, grr, matgrp, smallgrp
from .automorphism import BudgetExceeded
from .finfield import FieldError
from .ppd import FactorizationTimeout, PpdSearchExhausted, find_ppd_element, ppd_set

SCHEMA = "grrforge/1"
SAFE_INT = 2**53

EXIT_OK, EXIT_DOMAIN, EXIT_BUDGET = 0, 1, 2
BUDGET_ERRORS = (smallgrp.EnumerationRefused, BudgetExceeded, PpdSearchExhausted, FactorizationTimeout)
DOMAIN_ERRORS = (matgrp.GroupError, FieldError, grr.ConnectionSetError, KeyError, ValueError)


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    family: str | None
    n: int | None
    f: int | None
    p: int | None
    cap: int
    node_budget: int | None
    time_budget: float | None
    seed: int
    format: str
    cache_dir: str | None
    workers: int


def _jsonable(obj):
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, (int, np.integer)):
        v = int(obj)
        return str(v) if abs(v) >= SAFE_INT else v
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def _emit(out, payload: dict, canonical: bool) -> None:
    body = {"schema": SCHEMA, **payload}
    if canonical:
        body.pop("elapsedMs", None)
    out.write(json.dumps(_jsonable(body), sort_keys=True) + "\n")


def _spec(args) -> matgrp.GroupSpec:
    if args.family is None or args.n is None:
        raise ValueError("--family and --n are required")
    if matgrp.normalize_family(args.family) == "PermGroup":
        if not args.generators:
            raise ValueError("a permutation group needs --generators")
        gens = [[int(v) for v in g.split(",")] for g in args.generators.split(";")]
        return matgrp.make_spec("PermGroup", args.n, generators=gens)
    given = [v is not None for v in (args.f, args.p, args.q)]
    if sum(given) != 1:
        raise ValueError("give exactly one of --f, --p, --q")
    return matgrp.make_spec(args.family, args.n, q=args.q, f=args.f, p=args.p)


def _table(args, spec=None) -> smallgrp.ElementTable:
    spec = spec or _spec(args)
    return smallgrp.enumerate_group(spec, cap=args.cap, cache_dir=args.cache_dir)


def _element_arg(table, text: str | None, label: str) -> int:
    if text is None:
        raise ValueError(f"--{label} is required")
    if text.startswith("#"):
        i = int(text[1:])
        if not 0 <= i < len(table):
            raise ValueError(f"--{label}: index {i} outside the table")
        return i
    return table.index_of(matgrp.parse_matrix(text, table.spec))


def _pick_x(table, args) -> int:
    if args.x is not None:
        return _element_arg(table, args.x, "x")
    if args.x_order is None:
        raise ValueError("give --x or --x-order")
    hits = np.flatnonzero(table.orders == args.x_order)
    if len(hits) == 0:
        raise ValueError(f"no element of order {args.x_order}")
    return int(hits[0])


# ---------------------------------------------------------------------------
# subcommands


def cmd_ppd(args, out):
    res = ppd_set(args.a, args.m)
    _emit(out, res.as_dict(), args.canonical)


def cmd_census(args, out):
    if args.family.lower() != "gl":
        raise ValueError("census is available for --family gl only")
    q = args.q if args.q is not None else 2 ** (args.f if args.f is not None else 1)
    classes = census.involution_classes(args.n, q)
    _emit(out, {
        "family": "GL", "n": args.n, "q": q,
        "order": str(census.gl_order(args.n, q)),
        "classes": [c.as_dict() for c in classes],
        "total": str(census.i2_gl_exact(args.n, q)),
    }, args.canonical)


def cmd_ledger(args, out):
    rows = [census.ledger(args.family, args.n)] if args.family else census.ledger_rows()
    _emit(out, {"rows": [r.as_dict() for r in rows]}, args.canonical)


def cmd_bounds(args, out):
    if args.family is None or args.n is None:
        raise ValueError("--family and --n are required")
    q = args.q if args.q is not None else 2 ** (args.f if args.f is not None else 1)
    b = bounds.probability_bound(args.family, args.n, q)
    a_term, u_term = bounds.master_terms(args.family, args.n, q)
    _emit(out, {**b.as_dict(), "masterTerms": [str(a_term), str(u_term)],
                "displayedTerms": [str(t) for t in bounds.displayed_terms(args.family, args.n, q)]},
          args.canonical)


def cmd_thresholds(args, out):
    if args.format == "json":
        rows = [{"family": t.family, "n": t.n, "paper_minQ": t.stated_min_q,
                 "computed_minQ": t.computed_min_q, "match": t.match} for t in bounds.thresholds_table()]
        _emit(out, {"rows": rows}, args.canonical)
    else:
        out.write(bounds.thresholds_csv())


def cmd_enumerate(args, out):
    t0 = time.perf_counter()
    table = _table(args)
    _emit(out, {
        "spec": table.spec.label, "descriptor": table.spec.descriptor(),
        "elements": len(table), "groupOrder": str(matgrp.group_order(table.spec)) if table.spec.is_matrix else str(len(table)),
        "involutions": table.i2, "elapsedMs": round(1000 * (time.perf_counter() - t0), 3),
    }, args.canonical)


def cmd_find_x(args, out):
    spec = _spec(args)
    res = find_ppd_element(spec, budget=args.budget, rng=np.random.default_rng(args.seed))
    payload = {"spec": spec.label, "e": spec.e, "ef": spec.e * spec.f, "ppd": res.ppd.as_dict(),
               "absent": res.absent, "r": res.r, "samples": res.samples}
    if not res.absent:
        payload["x"] = matgrp.format_matrix(res.element)
    _emit(out, payload, args.canonical)


def cmd_grr_check(args, out):
    table = _table(args)
    x = _element_arg(table, args.x, "x")
    y = _element_arg(table, args.y, "y")
    v = grr.is_grr(table, x, y, args.node_budget, args.time_budget)
    payload = {"spec": table.spec.label, "x": matgrp.format_matrix(table.element(x)),
               "y": matgrp.format_matrix(table.element(y)), **v.as_dict(canonical=args.canonical)}
    if v.generates and v.aut_order is not None:
        payload["autGS"] = grr.aut_gs_order(table, v.connection_set)
    _emit(out, payload, args.canonical)
    if v.budget_exceeded:
        return EXIT_BUDGET
    return EXIT_OK


def cmd_grr_search(args, out):
    table = _table(args)
    shapes = ["mixed", "three-involutions"] if args.shape == "both" else [args.shape]
    reports = [
        grr.exhaustive_grr_search(table, s, x_order=args.x_order, stop_after=args.stop_after,
                                  node_budget=args.node_budget, time_budget=args.time_budget,
                                  workers=args.workers)
        for s in shapes
    ]
    found = sum(len(r.witnesses) for r in reports)
    complete = all(r.complete for r in reports)
    if found:
        message = f"{found} GRR connection set(s) found" + ("" if complete else "; search stopped early")
    elif complete:
        message = "no GRR found; search complete"
    else:
        message = "no GRR found; search incomplete"
    if args.format == "json":
        _emit(out, {"spec": table.spec.label, "message": message,
                    "reports": [r.as_dict(table) for r in reports]}, args.canonical)
    else:
        out.write(message + "\n")
        for r in reports:
            out.write(f"{r.shape}: {r.examined}/{r.candidates} examined, "
                      f"{r.non_generating} non-generating, {len(r.witnesses)} GRR, {len(r.unknown)} unknown\n")
            for w in r.witnesses[:10]:
                out.write("  " + " | ".join(matgrp.format_matrix(table.element(i)) for i in w) + "\n")
    if any(r.unknown for r in reports):
        return EXIT_BUDGET
    return EXIT_OK


def cmd_estimate(args, out):
    table = _table(args)
    x = _pick_x(table, args)
    est = grr.estimate_p(table, x, mode=args.mode, samples=args.samples,
                         rng=np.random.default_rng(args.seed),
                         node_budget=args.node_budget, time_budget=args.time_budget)
    _emit(out, {"spec": table.spec.label, "x": matgrp.format_matrix(table.element(x)),
                "xOrder": table.element_order(x), **est.as_dict()}, args.canonical)


def cmd_selftest(args, out):
    results = acceptance.run_all(slow=args.slow)
    for r in results:
        out.write(r.line() + "\n")
    if not args.slow:
        out.write("(slow criteria skipped; pass --slow to include them)\n")
    return EXIT_OK if all(r.passed for r in results) else EXIT_DOMAIN


COMMANDS = {
    "ppd": cmd_ppd,
    "census": cmd_census,
    "ledger": cmd_ledger,
    "bounds": cmd_bounds,
    "thresholds": cmd_thresholds,
    "enumerate": cmd_enumerate,
    "find-x": cmd_find_x,
    "grr-check": cmd_grr_check,
    "grr-search": cmd_grr_search,
    "estimate": cmd_estimate,
    "selftest": cmd_selftest,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "text"), default=None)
    common.add_argument("--canonical", action="store_true", help="omit timing fields")
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--cap", type=int, default=smallgrp.DEFAULT_CAP, help="enumeration cap")
    common.add_argument("--cache-dir", default=os.environ.get("GRRFORGE_CACHE"))
    common.add_argument("--node-budget", type=int, default=None)
    common.add_argument("--time-budget", type=float, default=None, help="seconds per certification")
    common.add_argument("--workers", type=int, default=1)

    group = argparse.ArgumentParser(add_help=False)
    group.add_argument("--family")
    group.add_argument("--n", type=int)
    group.add_argument("--f", type=int, help="field GF(2^f)")
    group.add_argument("--p", type=int, help="prime field GF(p)")
    group.add_argument("--q", type=int, help="field order")
    group.add_argument("--generators", help="permutation generators, e.g. '1,0,2;0,2,1'")

    parser = argparse.ArgumentParser(prog="grrforge", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ppd", parents=[common], help="primitive prime divisors of a^m - 1")
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--m", type=int, required=True)

    sub.add_parser("census", parents=[common, group], help="involution classes of GL_n(q)")
    sub.add_parser("ledger", parents=[common, group], help="bound ledger rows")
    sub.add_parser("bounds", parents=[common, group], help="exact lower bounds at one q")
    sub.add_parser("thresholds", parents=[common], help="minimal-q table as CSV")
    sub.add_parser("enumerate", parents=[common, group], help="enumerate a desk-scale group")

    p = sub.add_parser("find-x", parents=[common, group], help="random element of ppd order")
    p.add_argument("--budget", type=int, default=2000, help="random samples")

    p = sub.add_parser("grr-check", parents=[common, group], help="certify {x, x^-1, y}")
    p.add_argument("--x", help="matrix literal or #index")
    p.add_argument("--y", help="matrix literal or #index")

    p = sub.add_parser("grr-search", parents=[common, group], help="exhaustive cubic GRR search")
    p.add_argument("--shape", choices=("mixed", "three-involutions", "both"), default="both")
    p.add_argument("--x-order", type=int, default=None)
    p.add_argument("--stop-after", type=int, default=None)

    p = sub.add_parser("estimate", parents=[common, group], help="estimate P(x)")
    p.add_argument("--x", help="matrix literal or #index")
    p.add_argument("--x-order", type=int, default=None)
    p.add_argument("--mode", choices=("exhaustive", "sample"), default="exhaustive")
    p.add_argument("--samples", type=int, default=None)

    p = sub.add_parser("selftest", parents=[common], help="run the acceptance checks")
    p.add_argument("--slow", action="store_true")
    return parser


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = {"thresholds": "csv", "grr-search": "text", "selftest": "text"}.get(args.command, "json")
    try:
        code = COMMANDS[args.command](args, out)
    except BUDGET_ERRORS as exc:
        print(f"grrforge: refused: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except DOMAIN_ERRORS as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"grrforge: error: {msg}", file=sys.stderr)
        return EXIT_DOMAIN
    return EXIT_OK if code is None else code


def config_from(argv) -> RunConfig:
    """The RunConfig a command line resolves to (used for replay records)."""
    args = build_parser().parse_args(argv)
    return RunConfig(
        subcommand=args.command,
        family=getattr(args, "family", None), n=getattr(args, "n", None),
        f=getattr(args, "f", None), p=getattr(args, "p", None),
        cap=args.cap, node_budget=args.node_budget, time_budget=args.time_budget,
        seed=args.seed, format=args.format or "json", cache_dir=args.cache_dir, workers=args.workers,
    )


def main() -> None:
    sys.exit(run())

