"""Command-line front end.

Every subcommand writes one JSON report to stdout::

    {"command": [...], "parameters": {...}, "results": {...},
     "checks": [{"name", "status", "details"}], "elapsed_ms": 12}

Exit status is 0 when no check FAILs, 1 when one does, 2 on usage or I/O
errors.  Big integers are decimal strings and rationals are
``{"num", "den"}`` pairs.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import random
import sys
import time
import warnings

from .extremal import (
    SearchConfig,
    SearchTooLarge,
    check_uniqueness,
    default_budget,
    search_max_family,
)
from .familyio import (
    FamilyFormatError,
    family_to_dict,
    flats_from_dict,
    load_family,
    load_flats,
    rational_to_json,
    write_json_atomic,
)
from .meshalkin import (
    BoundMode,
    LymMode,
    ProblemParams,
    SequenceMode,
    bound,
    check_chain_condition,
    chain_stats,
    enumerate_sequences,
    lym_limit,
    lym_sum,
    rank_vectors,
    rota_harper_lift,
    rota_harper_sum,
)
from .projgeom import Lattice, LatticeBudgetError, flat_from_json
from .qnum import gaussian_binomial, gaussian_multinomial, partial_count, s2, weighted_count
from .verify import FAIL, PASS, REPORT, SUITES, Check, run_suite


class UsageError(Exception):
    pass


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _alpha(text: str) -> tuple[int, ...]:
    parts = tuple(_int_list(text))
    if not parts:
        raise argparse.ArgumentTypeError("empty rank vector")
    return parts


def _rows(flat) -> list[list[int]]:
    return [list(r) for r in flat.rows]


class Outcome:
    def __init__(self):
        self.results: dict = {}
        self.checks: list[Check] = []
        self.table: tuple[list[str], list[list]] | None = None


def cmd_gauss(args, out: Outcome):
    q = args.q
    if "," in args.k:
        alpha = _alpha(args.k)
        out.results = {
            "alpha": list(alpha),
            "value": str(gaussian_multinomial(args.n, alpha, q)),
            "s2": s2(alpha),
            "weighted_count": str(weighted_count(args.n, alpha, q)),
        }
    else:
        out.results = {"value": str(gaussian_binomial(args.n, int(args.k), q))}


def cmd_flats(args, out: Outcome):
    lattice = Lattice(args.n, args.q)
    ranks = [args.rank] if args.rank is not None else list(range(args.n + 1))
    rows = []
    levels = {}
    for k in ranks:
        flats = lattice.level(k)
        expected = gaussian_binomial(args.n, k, args.q)
        levels[str(k)] = {"count": len(flats), "expected": str(expected)}
        if not args.count:
            levels[str(k)]["flats"] = [_rows(f) for f in flats]
        for i, f in enumerate(flats):
            rows.append([k, i, json.dumps(_rows(f))])
        out.checks.append(
            Check(f"level count rank={k}", PASS if len(flats) == expected else FAIL, {"count": len(flats), "expected": str(expected)})
        )
    out.results = {"levels": levels}
    out.table = (["rank", "index", "rows"], rows)


def cmd_complements(args, out: Outcome):
    with open(args.flat_file) as fh:
        doc = json.load(fh)
    if "flats" in doc:
        flats, lattice = flats_from_dict(doc)
    else:
        lattice = Lattice(doc["n"], doc["q"])
        flats = [flat_from_json(doc, lattice)]
    if args.n is not None and args.n != lattice.n or args.q is not None and args.q != lattice.q:
        raise UsageError(f"--n/--q disagree with the file (n={lattice.n}, q={lattice.q})")
    n, q = lattice.n, lattice.q
    results, rows = [], []
    for a in flats:
        comps = lattice.complements(a)
        want = q ** (a.rank * (n - a.rank))
        results.append({"flat": _rows(a), "rank": a.rank, "count": len(comps), "expected": str(want), "complements": [_rows(c) for c in comps]})
        rows.extend([json.dumps(_rows(a)), json.dumps(_rows(c))] for c in comps)
        out.checks.append(
            Check(f"complement count {_rows(a)}", PASS if len(comps) == want else FAIL, {"count": len(comps), "expected": str(want), "flat": a.to_json()})
        )
    out.results = {"n": n, "q": q, "flats": results}
    out.table = (["flat", "complement"], rows)


def cmd_mesh(args, out: Outcome):
    mode = SequenceMode(args.mode)
    lattice = Lattice(args.n, args.q)
    if args.alpha is not None:
        alphas = [args.alpha]
        if args.p is not None and args.p != len(args.alpha):
            raise UsageError(f"--p {args.p} but --alpha has {len(args.alpha)} parts")
    elif args.p is not None:
        alphas = rank_vectors(args.n, args.p, mode)
    else:
        raise UsageError("need --alpha or --p")
    formula = weighted_count if mode is SequenceMode.FULL else partial_count
    entries, rows = [], []
    for alpha in alphas:
        want = formula(args.n, alpha, args.q)
        entry = {"alpha": list(alpha), "formula": str(want)}
        if args.action == "count" and args.no_enumerate:
            entries.append(entry)
            rows.append([json.dumps(list(alpha)), str(want), ""])
            continue
        try:
            seqs = enumerate_sequences(lattice, alpha, mode)
        except ValueError as err:
            raise UsageError(str(err)) from None
        entry["enumerated"] = len(seqs)
        out.checks.append(Check(f"count {list(alpha)}", PASS if len(seqs) == want else FAIL, entry.copy()))
        if args.action == "enum":
            entry["sequences"] = [[_rows(f) for f in s.flats] for s in seqs]
            rows.extend([json.dumps(list(alpha)), json.dumps([_rows(f) for f in s.flats])] for s in seqs)
        else:
            rows.append([json.dumps(list(alpha)), str(want), len(seqs)])
        entries.append(entry)
    out.results = {"mode": mode.value, "rank_vectors": entries}
    out.table = (["alpha", "formula", "enumerated"] if args.action == "count" else ["alpha", "sequence"], rows)


def cmd_lym(args, out: Outcome):
    fam = load_family(args.family_file)
    mode = LymMode(args.mode)
    scope = SequenceMode.PARTIAL if mode is LymMode.PARTIAL else SequenceMode.FULL
    chains = {str(k): chain_stats(fam.projection(k)) for k in range(fam.p)}
    constrained = list(fam.constrained_coordinates(scope))
    observed_l = max([chains[str(k)] for k in constrained] + [1])
    l = args.l if args.l is not None else observed_l
    params = ProblemParams(fam.n, fam.p, l, fam.q)
    try:
        total = lym_sum(fam, mode)
    except ValueError as err:
        raise UsageError(str(err)) from None
    out.results = {
        "n": fam.n, "q": fam.q, "p": fam.p, "size": len(fam),
        "sum": rational_to_json(total), "longest_chains": chains, "l": l,
    }
    chain = check_chain_condition(fam, params, scope)
    if not chain:
        out.checks.append(
            Check("chain condition", REPORT, {"coordinate": chain.coordinate, "chain": [_rows(f) for f in chain.chain],
                                              "note": f"family is not admissible for l={l}; no bound applies"})
        )
        return
    limit = lym_limit(params, mode)
    out.results["limit"] = str(limit)
    out.checks.append(Check(f"lym {mode.value} <= {limit}", PASS if total <= limit else FAIL,
                            {"sum": rational_to_json(total), "limit": str(limit), "equality": total == limit}))
    size_mode = {LymMode.MAIN: BoundMode.MAIN, LymMode.PARTIAL: BoundMode.PARTIAL}.get(mode)
    if size_mode is not None:
        b = bound(params, size_mode).value
        out.results["size_bound"] = str(b)
        out.checks.append(Check(f"size <= {size_mode.value} bound", PASS if len(fam) <= b else FAIL,
                                {"size": len(fam), "bound": str(b)}))


def cmd_bound(args, out: Outcome):
    params = ProblemParams(args.n, args.p, args.l, args.q)
    res = bound(params, BoundMode(args.mode))
    out.results = {"value": str(res.value), "alphas": [list(a) for a in res.alphas],
                   "summands": res.summands, "candidates": res.candidates}
    out.table = (["alpha"], [[json.dumps(list(a))] for a in res.alphas])


def cmd_verify(args, out: Outcome):
    keys = SUITES[args.suite]
    axes = {"n": args.n, "q": args.q, "p": args.p, "l": args.l}
    for k in keys:
        if axes[k] is None:
            raise UsageError(f"suite {args.suite} needs --{k}")
    rng = random.Random(args.seed)
    grid = [dict(zip(keys, combo)) for combo in itertools.product(*(axes[k] for k in keys))]
    for point in grid:
        out.checks.extend(run_suite(args.suite, point, args.samples, rng))
    out.results = {"suite": args.suite, "grid_points": len(grid)}


def cmd_search(args, out: Outcome):
    params = ProblemParams(args.n, args.p, args.l, args.q)
    lattice = Lattice(args.n, args.q)
    config = SearchConfig(params, SequenceMode(args.mode), args.budget)
    if args.action == "max":
        res = search_max_family(config, lattice)
        out.results = {
            "max_size": str(res.max_size), "bound": str(res.bound), "gap": str(res.gap),
            "exhausted": res.exhausted, "nodes": res.nodes,
            "witnesses": [family_to_dict(f) for f in res.witnesses],
        }
        out.checks.append(Check("max_size <= bound", PASS if res.max_size <= res.bound else FAIL,
                                {"max_size": str(res.max_size), "bound": str(res.bound),
                                 "witness": family_to_dict(res.witnesses[0]) if res.witnesses else None}))
        if not res.exhausted:
            out.checks.append(Check("search exhausted", REPORT, {"note": "node budget ran out; max_size is a lower bound"}))
    else:
        rep = check_uniqueness(config, lattice)
        out.results = {
            "verdict": rep.verdict, "max_size": str(rep.max_size), "exhausted": rep.exhausted,
            "maxima": [family_to_dict(f) for f in rep.maxima],
            "constructed": [family_to_dict(f) for f in rep.constructed],
        }
        out.checks.append(Check("uniqueness of maximum families", PASS if rep.verdict == "CONFIRMED" else REPORT,
                                {"verdict": rep.verdict, "maxima": len(rep.maxima), "constructed": len(rep.constructed)}))


def cmd_lift(args, out: Outcome):
    flats, lattice = load_flats(args.antichain_file)
    n, q = lattice.n, lattice.q
    fam = rota_harper_lift(flats, lattice)
    total = lym_sum(fam, LymMode.MAIN)
    expected = rota_harper_sum(flats, n, q)
    expected_size = sum(q ** (a.rank * (n - a.rank)) for a in set(flats))
    out.results = {
        "n": n, "q": q, "flats": len(set(flats)), "longest_chain": chain_stats(flats),
        "size": len(fam), "expected_size": str(expected_size),
        "lym_main": rational_to_json(total), "level_sum": rational_to_json(expected),
        "family": family_to_dict(fam),
    }
    if args.out:
        write_json_atomic(family_to_dict(fam), args.out)
    ok = total == expected and len(fam) == expected_size
    out.checks.append(Check("lift LYM identity", PASS if ok else FAIL,
                            {"lym_main": rational_to_json(total), "level_sum": rational_to_json(expected),
                             "size": len(fam), "expected_size": str(expected_size)}))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qmeshalkin", description=__doc__.split("\n\n")[0])
    parser.add_argument("--format", choices=["json", "csv"], default="json")
    parser.add_argument("--seed", type=int, default=0, help="seed for random families")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gauss", help="Gaussian binomial/multinomial coefficients")
    p.add_argument("n", type=int)
    p.add_argument("k", help="rank k, or a comma-separated rank vector")
    p.add_argument("--q", type=int, required=True)
    p.set_defaults(func=cmd_gauss)

    p = sub.add_parser("flats", help="enumerate flats by rank")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--rank", type=int)
    p.add_argument("--count", action="store_true", help="counts only")
    p.set_defaults(func=cmd_flats)

    p = sub.add_parser("complements", help="list complements of flats from a file")
    p.add_argument("--flat-file", required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--q", type=int)
    p.set_defaults(func=cmd_complements)

    p = sub.add_parser("mesh", help="count or enumerate Meshalkin sequences")
    p.add_argument("action", choices=["count", "enum"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--p", type=int)
    p.add_argument("--alpha", type=_alpha)
    p.add_argument("--mode", choices=["full", "partial"], default="full")
    p.add_argument("--no-enumerate", action="store_true", help="count: formula only")
    p.set_defaults(func=cmd_mesh)

    p = sub.add_parser("lym", help="exact LYM sum of a family file")
    p.add_argument("--family-file", required=True)
    p.add_argument("--mode", choices=[m.value for m in LymMode], default="main")
    p.add_argument("--l", type=int, help="chain parameter (default: smallest admissible)")
    p.set_defaults(func=cmd_lym)

    p = sub.add_parser("bound", help="extremal bound and the selected rank vectors")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--l", type=int, default=1)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--mode", choices=[m.value for m in BoundMode], default="main")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("verify", help="run a verification suite over a parameter grid")
    p.add_argument("suite", choices=sorted(SUITES))
    for axis in ("n", "q", "p", "l"):
        p.add_argument(f"--{axis}", type=_int_list, help="comma-separated values")
    p.add_argument("--samples", type=int, default=100)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("search", help="exhaustive search for maximum admissible families")
    p.add_argument("action", choices=["max", "unique"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--l", type=int, default=1)
    p.add_argument("--mode", choices=["full", "partial"], default="full")
    p.add_argument("--budget", type=int, default=None, help="node budget (env MESHALKIN_BUDGET)")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("lift", help="lift a set of flats to the family of (flat, complement) pairs")
    p.add_argument("--antichain-file", required=True)
    p.add_argument("--out", help="also write the lifted family document here")
    p.set_defaults(func=cmd_lift)
    return parser


def _parameters(args) -> dict:
    skip = {"func", "command"}
    return {k: (list(v) if isinstance(v, tuple) else v) for k, v in sorted(vars(args).items()) if k not in skip}


def _render_csv(table) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table[0])
    writer.writerows(table[1])
    return buf.getvalue()


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "budget", "absent") is None:
        args.budget = default_budget()
    start = time.perf_counter()
    out = Outcome()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            args.func(args, out)
        except (UsageError, FamilyFormatError, OSError, json.JSONDecodeError, LatticeBudgetError, SearchTooLarge, ValueError) as err:
            sys.stderr.write(f"qmeshalkin: error: {err}\n")
            return 2
    for w in caught:
        sys.stderr.write(f"qmeshalkin: warning: {w.message}\n")
    if args.format == "csv":
        if out.table is None:
            sys.stderr.write(f"qmeshalkin: error: {args.command} has no tabular output\n")
            return 2
        text = _render_csv(out.table)
    else:
        report = {
            "command": argv,
            "parameters": _parameters(args),
            "results": out.results,
            "checks": [c.to_json() for c in out.checks],
            "elapsed_ms": round((time.perf_counter() - start) * 1000),
        }
        text = json.dumps(report, indent=1) + "\n"
    sys.stdout.write(text)
    sys.stdout.flush()
    return 1 if any(c.status == FAIL for c in out.checks) else 0


if __name__ == "__main__":
    sys.exit(main())
