"""Command-line entry point.

Exit codes: 0 ok, 1 counterexample found, 2 usage or internal error.
JSON (or CSV) goes to stdout or ``--out``; a short summary goes to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from typing import Optional, Sequence

from . import __version__
from .constructions import BUILDERS, ConstructionError, build_decomp, build_mod3, build_two_coset, build_x22
from .groups import BudgetExceededError, GroupSpec, diam_plus, diam_plus_bruteforce, parse_group
from .harness import (
    TrialConfig,
    check_kneser_suite,
    check_lemma_0_25,
    check_propositions,
    falsify_stability_stochastic,
    verify_stability_exhaustive,
)
from .lp import LpInstance, certify
from .parallel import ENV_THREADS, default_workers
from .schemas import validate
from .search import (
    DEFAULT_BUDGET,
    bt_rho_search,
    known_value,
    known_values,
    mk_bruteforce,
    mk_formula,
    nk_search,
    translation_lemma_prediction,
)
from .sets import parse_set
from .spectral import spectral_report

OK, COUNTEREXAMPLE, ERROR = 0, 1, 2
_VERDICTS = {OK: "ok", COUNTEREXAMPLE: "counterexample", ERROR: "error"}

DEFAULT_TABLE_GROUPS = "5;7;3,3;2,2,2,2;5,5"


class UsageError(ValueError):
    pass


def _group(args) -> GroupSpec:
    if args.group is None:
        raise UsageError("--group is required")
    return parse_group(args.group)


def _factors(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"bad factor list {text!r}") from None


def _workers(args) -> int:
    return args.threads if args.threads else default_workers()


# ---------------------------------------------------------------------------
# subcommands: each returns (exit code, payload, summary line)
# ---------------------------------------------------------------------------

def cmd_mk(args):
    G = _group(args)
    value, d = mk_formula(G, args.k)
    payload = {"group": G.literal(), "k": args.k, "formula": value, "divisor": d,
               "bruteforce": None, "agree": None}
    if args.method in ("brute", "both"):
        rep = mk_bruteforce(G, args.k, descending=G.order > 16, budget=args.budget)
        payload["bruteforce"] = rep.value
        payload["witness"] = rep.to_json()["witnesses"][0]
        payload["agree"] = rep.value == value
    code = COUNTEREXAMPLE if payload["agree"] is False else OK
    return code, payload, f"M_{args.k}({G}) = {value} (divisor {d})"


def cmd_nk(args):
    G = _group(args)
    rep = nk_search(G, args.k, budget=args.budget, workers=_workers(args))
    payload = rep.to_json()
    known = known_values(G, args.k)
    payload["known"] = [{"value": v, "source": s} for v, s in known]
    payload["agree"] = all(v == rep.value for v, _ in known) if known else None
    code = COUNTEREXAMPLE if payload["agree"] is False else OK
    return code, payload, f"N_{args.k}({G}) = {rep.value} ({rep.hits} extremal sets, {rep.nodes_visited} visited)"


def cmd_bt(args):
    G = _group(args)
    rep = bt_rho_search(G, args.rho, require_generating=not args.relaxed, budget=max(args.budget, 1 << 20))
    payload = rep.to_json()
    payload.setdefault("rho", args.rho)
    code = OK
    if args.rho >= 2:
        try:
            nk = nk_search(G, args.rho - 1, budget=args.budget).value
        except BudgetExceededError:
            nk = None
        if nk is not None:
            pred = translation_lemma_prediction(G, args.rho - 1, nk)
            payload["predicted"] = pred
            payload["agree"] = pred == rep.value
            if pred != rep.value:
                code = COUNTEREXAMPLE
    return code, payload, f"b+_{args.rho}({G}) = {rep.value}"


def cmd_diam(args):
    G = _group(args)
    payload = {"group": G.literal(), "diam_plus": diam_plus(G), "bruteforce": None, "agree": None}
    if G.order <= 12:
        b = diam_plus_bruteforce(G)
        payload["bruteforce"] = b
        payload["agree"] = b == payload["diam_plus"]
    code = COUNTEREXAMPLE if payload["agree"] is False else OK
    return code, payload, f"diam+({G}) = {payload['diam_plus']}"


def cmd_construct(args):
    kind = args.kind
    if kind not in BUILDERS:
        raise UsageError(f"--kind must be one of {sorted(BUILDERS)}")
    if kind in ("two_coset", "x22"):
        if args.n is None:
            raise UsageError(f"--n is required for {kind}")
        recipe = build_two_coset(args.n) if kind == "two_coset" else build_x22(args.n)
    else:
        if args.group is None:
            raise UsageError(f"--group is required for {kind}")
        fs = _factors(args.group)
        recipe = build_decomp(fs) if kind == "decomp" else build_mod3(fs)
    payload = recipe.to_json()
    code = OK if recipe.verified else COUNTEREXAMPLE
    return code, payload, f"{kind} in {recipe.group}: |A| = {recipe.output.cardinality}, verified = {recipe.verified}"


def cmd_spectral(args):
    if args.set is None:
        raise UsageError("--set is required")
    G = parse_group(args.group) if args.group else None
    A = parse_set(args.set, G)
    payload = spectral_report(A)
    w = payload["witness"]
    code = OK
    if w is not None and w["re_z"] < w["bound"] - 1e-12:
        code = COUNTEREXAMPLE
    msg = "no witness (3A = G)" if w is None else f"Re z = {w['re_z']:.6f} vs bound {w['bound']:.6f}"
    return code, payload, msg


def cmd_lp(args):
    if args.case is not None or args.k is not None:
        cases = [args.case] if args.case else ["I", "II"]
        ks = [args.k] if args.k is not None else list(range(5))
    else:
        cases, ks = ["I", "II"], list(range(5))
    certs = [certify(LpInstance.standard(c, k)) for c in cases for k in ks]
    payload = [c.to_json() for c in certs]
    ok = all(c.certified for c in certs)
    worst = min(c.margin for c in certs)
    return (OK if ok else COUNTEREXAMPLE), payload, f"{len(certs)} certificates, smallest margin {worst:.6f}"


def cmd_harness(args):
    suite = args.suite
    workers = _workers(args)
    seed = args.seed
    stats: dict = {}
    if suite == "stability":
        n = args.n or 2
        rep = verify_stability_exhaustive(n, workers=workers, seed=seed)
        payload = {"suite": suite, **rep.to_json()}
        violations = rep.violations
        ok = rep.ok
        msg = f"survivors per size {rep.survivors}, {len(violations)} violations"
    elif suite == "falsify":
        n = args.n or 3
        rep = falsify_stability_stochastic(n, restarts=args.trials or 1000, seed=seed, workers=workers)
        payload = {"suite": suite, **rep.to_json()}
        violations = rep.violations
        ok = not violations
        msg = f"{rep.restarts} restarts, {rep.nonfull_states} non-full states reached, {len(violations)} violations"
    else:
        if suite == "kneser":
            G = parse_group(args.group) if args.group else None
        else:
            G = parse_group(args.group) if args.group else GroupSpec((5,) * (args.n or 2))
        cfg = TrialConfig(G, trials=args.trials or 1000, seed=seed)
        fn = {"kneser": check_kneser_suite, "quarter": check_lemma_0_25, "props": check_propositions}[suite]
        violations = fn(cfg, workers=workers, stats=stats)
        payload = {"suite": suite, "group": G.literal() if G else "random, order <= 100",
                   "trials": cfg.trials, "seed": seed, "stats": stats,
                   "violations": [v.to_json() for v in violations]}
        ok = not violations
        msg = f"{cfg.trials} trials, {len(violations)} violations, hypothesis hits {stats}"
    payload["violations"] = [v.to_json() for v in violations]
    return (OK if ok else COUNTEREXAMPLE), payload, msg


def table_rows(groups: Sequence[GroupSpec], kmax: int, budget: int = DEFAULT_BUDGET, workers: int = 1) -> list[dict]:
    rows = []
    for G in groups:
        for k in range(1, kmax + 1):
            kv = known_value(G, k)
            try:
                found: Optional[int] = nk_search(G, k, budget=budget, workers=workers).value
            except BudgetExceededError:
                found = None
            known = kv[0] if kv else None
            agree = None if known is None or found is None else known == found
            rows.append({"group": G.literal(), "k": k, "known": known,
                         "source": kv[1] if kv else "", "search": found, "agree": agree})
    return rows


def cmd_table(args):
    spec = args.groups or DEFAULT_TABLE_GROUPS
    groups = [parse_group(t) for t in spec.split(";")]
    rows = table_rows(groups, args.kmax, args.budget, _workers(args))
    bad = [r for r in rows if r["agree"] is False]
    checked = sum(1 for r in rows if r["agree"] is not None)
    return (COUNTEREXAMPLE if bad else OK), rows, f"{len(rows)} rows, {checked} cross-checked, {len(bad)} disagreements"


COMMANDS = {
    "mk": cmd_mk,
    "nk": cmd_nk,
    "bt": cmd_bt,
    "diam": cmd_diam,
    "construct": cmd_construct,
    "spectral": cmd_spectral,
    "lp-cert": cmd_lp,
    "harness": cmd_harness,
    "table": cmd_table,
}


# ---------------------------------------------------------------------------
# argument parsing and output
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="format", action="store_const", const="json", help="JSON output (default)")
    fmt.add_argument("--csv", dest="format", action="store_const", const="csv", help="CSV output (table, lp-cert)")
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--threads", type=int, default=None,
                        help=f"worker processes (default: ${ENV_THREADS} or all cores)")
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="max subsets to enumerate")
    common.set_defaults(format="json")

    p = argparse.ArgumentParser(prog="sumsetlab", description="Extremal sumset computations in finite abelian groups.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("mk", parents=[common], help="M_k(G): closed form and exhaustive check")
    s.add_argument("--group", required=True)
    s.add_argument("--k", type=int, default=3)
    s.add_argument("--method", choices=["formula", "brute", "both"], default="both")

    s = sub.add_parser("nk", parents=[common], help="N_k(G) by size-descending search")
    s.add_argument("--group", required=True)
    s.add_argument("--k", type=int, default=3)

    s = sub.add_parser("bt", parents=[common], help="b+_rho(G) by exhaustive search")
    s.add_argument("--group", required=True)
    s.add_argument("--rho", type=int, required=True)
    s.add_argument("--relaxed", action="store_true", help="drop the generating requirement")

    s = sub.add_parser("diam", parents=[common], help="diam+(G), with brute force for |G| <= 12")
    s.add_argument("--group", required=True)

    s = sub.add_parser("construct", parents=[common], help="build and verify an extremal construction")
    s.add_argument("--kind", required=True, choices=sorted(BUILDERS))
    s.add_argument("--group", help="comma-separated cyclic orders (decomp, mod3)")
    s.add_argument("--n", type=int, help="rank of Z_5^n (two_coset, x22)")

    s = sub.add_parser("spectral", parents=[common], help="Fourier report for a subset of Z_5^n")
    s.add_argument("--set", required=True, help="set literal, e.g. '{(0,0),(1,0)}' or hex:5,5:<hex>")
    s.add_argument("--group", help="ambient group when the literal does not carry one")

    s = sub.add_parser("lp-cert", parents=[common], help="certify the coset-density linear programs")
    s.add_argument("--all", action="store_true", help="all ten instances (default)")
    s.add_argument("--case", choices=["I", "II"])
    s.add_argument("--k", type=int, choices=range(5))

    s = sub.add_parser("harness", parents=[common], help="property suites and stability checks")
    s.add_argument("--suite", required=True, choices=["kneser", "quarter", "props", "stability", "falsify"])
    s.add_argument("--group")
    s.add_argument("--n", type=int)
    s.add_argument("--trials", type=int)
    s.add_argument("--seed", type=int, default=0)

    s = sub.add_parser("table", parents=[common], help="closed-form values against search")
    s.add_argument("--groups", help=f"';'-separated groups (default {DEFAULT_TABLE_GROUPS!r})")
    s.add_argument("--kmax", type=int, default=4)
    return p


def _csv(payload) -> str:
    if not isinstance(payload, list) or not payload:
        raise UsageError("CSV output needs a row-shaped result (table, lp-cert)")
    buf = io.StringIO()
    keys = list(payload[0])
    w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
    w.writeheader()
    for row in payload:
        w.writerow({k: (";".join(map(str, v)) if isinstance(v, list) else v) for k, v in row.items()})
    return buf.getvalue()


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads is not None and args.threads < 1:
        parser.error("--threads must be positive")
    if args.threads:
        os.environ[ENV_THREADS] = str(args.threads)
    t0 = time.perf_counter()
    try:
        code, payload, summary = COMMANDS[args.command](args)
        err = None
    except (UsageError, BudgetExceededError, ConstructionError, ValueError) as exc:
        code, payload, summary, err = ERROR, None, f"error: {exc}", str(exc)
    doc = {"command": args.command, "verdict": _VERDICTS[code], "payload": payload,
           "elapsed_ms": round((time.perf_counter() - t0) * 1000, 3)}
    if err is not None:
        doc["error"] = err
    validate(doc)
    print(f"[{doc['verdict']}] {summary}", file=sys.stderr)
    if args.format == "csv" and code != ERROR:
        try:
            text = _csv(payload)
        except UsageError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return ERROR
    else:
        text = json.dumps(doc, indent=2) + "\n"
    _emit(text, args.out)
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
