"""Command-line front end.

Runs everything in process by default; --server switches every subcommand to
a thin client that posts the same request to a running service instance and
prints the response. Results go to stdout, diagnostics to stderr, and the
exit code carries the verdict for solvability queries: 0 Yes, 1 No,
2 Unknown. Error exits: 64 usage or malformed spec, 65 domain or preflight
failure, 66 exceeded size bound, 69 server unreachable, 70 precision
exhausted.
"""

from __future__ import annotations

import argparse
import json
import sys
import urllib.error
import urllib.request

from .classpoly import hilbert_class_poly
from .errors import (
    BoundExceededError,
    DomainError,
    PrecisionError,
    PreflightError,
    SpecError,
)
from .localpoints import Status, TwistSpec, everywhere_local, verdict_at_prime
from .picard import (
    CuspidalModel,
    cusp_order_composite,
    cusp_order_prime,
    mw_sieve_check,
    parse_sieve_data,
    pic1_verdict_composite,
    pic1_verdict_prime,
    solve_cuspidal_relations,
)
from .twistsearch import SearchConfig, SearchDiagnostics, count_admissible_twists, search_twists

EXIT_YES = 0
EXIT_NO = 1
EXIT_UNKNOWN = 2
EXIT_USAGE = 64
EXIT_DOMAIN = 65
EXIT_BOUND = 66
EXIT_UNAVAILABLE = 69
EXIT_PRECISION = 70

_STATUS_EXIT = {"Yes": EXIT_YES, "No": EXIT_NO, "Unknown": EXIT_UNKNOWN}

EPILOG = """\
exit codes:
  0/1/2   verdict Yes / No / Unknown
  64      usage error or malformed twist specification
  65      input outside an operation's domain, or failed preflight
  66      exact computation would exceed a documented bound
  69      --server given but the service is unreachable
  70      floating point precision exhausted

comma-separated integer lists may contain negative entries; use the
--flag=value form when the first entry is negative (e.g. --d=-263,313).
"""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _relation_list(text: str) -> tuple[tuple[int, int], ...]:
    try:
        out = []
        for part in text.split(","):
            u, t = part.split(":")
            out.append((int(u), int(t)))
        return tuple(out)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected u:t pairs, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="twistlocal",
        description="Local solvability of polyquadratic twists of X_0(N), and friends.",
        epilog=EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--server", metavar="URL", help="post requests to a running service")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("verdict", help="solvability verdict for one twist")
    p.add_argument("--m", type=_int_list, required=True, metavar="M1,M2,...")
    p.add_argument("--d", type=_int_list, required=True, metavar="D1,D2,...")
    p.add_argument("--prime", type=int, help="verdict at this prime only")
    p.add_argument("--trace", action="store_true", help="include per-prime verdicts")
    p.add_argument("--format", choices=("json",), default="json")

    p = sub.add_parser("search", help="enumerate twist values that verify everywhere")
    p.add_argument("--m", type=_int_list, required=True, metavar="M1,M2,...")
    p.add_argument("--bound", type=int, required=True)
    p.add_argument("--limit", type=int)
    p.add_argument("--sorted", action="store_true", help="canonical output order")
    p.add_argument("--format", choices=("json",), default="json")

    p = sub.add_parser("density", help="admissible-twist counting experiment")
    p.add_argument("--m", type=_int_list, required=True, metavar="M1,M2")
    p.add_argument("--d", type=_int_list, required=True, metavar="D1")
    p.add_argument("--X", type=int, required=True, dest="X")
    p.add_argument("--B", type=int, dest="B", help="prime sample bound (default max(X, 10^5))")
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("classpoly", help="Hilbert class polynomial")
    p.add_argument("--disc", type=int, required=True)
    p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("picard", help="cusp orders, degree-one class verdicts, relation solver")
    p.add_argument("--cusp-order", type=_int_list, metavar="N | P,Q1,...")
    p.add_argument("--pic1", type=_int_list, metavar="N | P,Q1,...")
    p.add_argument("--inert", action="store_true", help="the relevant prime is inert")
    p.add_argument("--n", type=int, help="cuspidal group order for --relations")
    p.add_argument("--relations", type=_relation_list, metavar="U:T,U:T,...")
    p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("sieve", help="Mordell-Weil sieve intersection check")
    p.add_argument("--sieve-file", required=True, metavar="PATH")
    p.add_argument("--format", choices=("text", "json"), default="text")

    return parser


# ---------------------------------------------------------------------------
# in-process execution


def _run_verdict(args) -> int:
    spec = TwistSpec(args.m, args.d)
    if args.prime is not None:
        verdict = verdict_at_prime(spec, args.prime)
        print(json.dumps(verdict.to_json()))
        return _STATUS_EXIT[verdict.status.value]
    agg = everywhere_local(spec)
    print(json.dumps(agg.to_json(include_verdicts=args.trace)))
    return _STATUS_EXIT[agg.status.value]


def _run_search(args) -> int:
    config = SearchConfig(args.m, args.bound, args.limit)
    diag = SearchDiagnostics()
    hits = search_twists(config, diag)
    if args.sorted:
        hits = sorted(hits, key=lambda h: h.d)
    for hit in hits:
        print(json.dumps(hit.to_json()))
    print(
        f"candidates {diag.candidates}, emitted {diag.emitted}, "
        f"suppressed {diag.suppressed_unknown} unknown / {diag.suppressed_no} no",
        file=sys.stderr,
    )
    return 0


def _run_density(args) -> int:
    if len(args.m) != 2:
        raise SpecError("density needs exactly two level factors, e.g. --m 5,13")
    if len(args.d) != 1:
        raise SpecError("density needs exactly one twist value, e.g. --d 23616331489")
    count, report = count_admissible_twists(args.m[0], args.m[1], args.d[0], args.X, args.B)
    if args.format == "csv":
        sys.stdout.write(report.to_csv())
    else:
        print(json.dumps(report.to_json()))
    print(f"count {count} at X = {args.X}, alpha_hat {report.alpha_hat:.5f}", file=sys.stderr)
    return 0


def _run_classpoly(args) -> int:
    poly = hilbert_class_poly(args.disc)
    if args.format == "json":
        print(json.dumps({"disc": poly.disc, "degree": poly.degree, "coeffs": list(poly.coeffs)}))
    else:
        print(poly.pretty())
    return 0


def _run_picard(args) -> int:
    chosen = [x for x in (args.cusp_order, args.pic1, args.relations) if x is not None]
    if len(chosen) != 1:
        raise SpecError("picard needs exactly one of --cusp-order, --pic1, --relations")
    if args.cusp_order is not None:
        level = args.cusp_order
        order = cusp_order_prime(level[0]) if len(level) == 1 else cusp_order_composite(
            level[0], level[1:]
        )
        print(json.dumps({"order": order}) if args.format == "json" else order)
        return 0
    if args.pic1 is not None:
        level = args.pic1
        if len(level) == 1:
            verdict = pic1_verdict_prime(level[0], args.inert)
        else:
            verdict = pic1_verdict_composite(level[0], level[1:], args.inert)
        if args.format == "json":
            print(json.dumps(verdict.to_json()))
        else:
            print(f"{verdict.status.value}: {verdict.note}")
        return 0
    if args.n is None:
        raise SpecError("--relations needs --n for the cuspidal group order")
    model = CuspidalModel.from_pairs(args.n, args.relations)
    solutions = sorted(solve_cuspidal_relations(model))
    print(json.dumps({"n": args.n, "solutions": solutions}))
    return 0


def _run_sieve(args) -> int:
    try:
        with open(args.sieve_file, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"cannot read {args.sieve_file}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        data = parse_sieve_data(text)
    except json.JSONDecodeError as exc:
        print(f"{args.sieve_file} is not valid JSON: {exc}", file=sys.stderr)
        return EXIT_USAGE
    outcome = mw_sieve_check(data)
    print(json.dumps({"outcome": outcome.value}) if args.format == "json" else outcome.value)
    return 0


# ---------------------------------------------------------------------------
# thin client


def _post(server: str, path: str, payload: dict) -> dict:
    url = server.rstrip("/") + path
    req = urllib.request.Request(
        url, data=json.dumps(payload).encode(), headers={"Content-Type": "application/json"}
    )
    with urllib.request.urlopen(req) as resp:
        return json.loads(resp.read())


def _remote(args) -> int:
    if args.subcommand == "verdict":
        payload = {"m": list(args.m), "d": list(args.d), "prime": args.prime,
                   "include_verdicts": args.trace}
        body = _post(args.server, "/verdict", payload)
        print(json.dumps(body))
        return _STATUS_EXIT[body["status"]]
    if args.subcommand == "search":
        payload = {"m": list(args.m), "bound": args.bound, "limit": args.limit}
        body = _post(args.server, "/search", payload)
        hits = body["hits"]
        if args.sorted:
            hits = sorted(hits, key=lambda h: tuple(h["d"]))
        for hit in hits:
            print(json.dumps(hit))
        d = body["diagnostics"]
        print(
            f"candidates {d['candidates']}, emitted {d['emitted']}, "
            f"suppressed {d['suppressed_unknown']} unknown / {d['suppressed_no']} no",
            file=sys.stderr,
        )
        return 0
    if args.subcommand == "density":
        if len(args.m) != 2 or len(args.d) != 1:
            raise SpecError("density needs --m M1,M2 and a single --d")
        payload = {"m1": args.m[0], "m2": args.m[1], "d1": args.d[0], "X": args.X, "B": args.B}
        body = _post(args.server, "/density", payload)
        if args.format == "csv":
            sys.stdout.write(body["csv"])
        else:
            print(json.dumps(body["report"]))
        return 0
    if args.subcommand == "classpoly":
        body = _post(args.server, "/classpoly", {"disc": args.disc})
        print(json.dumps(body) if args.format == "json" else body["pretty"])
        return 0
    if args.subcommand == "picard":
        if args.cusp_order is not None:
            body = _post(args.server, "/picard/cusp-order", {"level": list(args.cusp_order)})
            print(json.dumps(body) if args.format == "json" else body["order"])
            return 0
        if args.pic1 is not None:
            body = _post(args.server, "/picard/pic1", {"level": list(args.pic1), "inert": args.inert})
            if args.format == "json":
                print(json.dumps(body))
            else:
                print(f"{body['status']}: {body['note']}")
            return 0
        if args.relations is None or args.n is None:
            raise SpecError("picard needs --cusp-order, --pic1, or --n with --relations")
        body = _post(
            args.server,
            "/picard/cuspidal",
            {"n": args.n, "relations": [list(r) for r in args.relations]},
        )
        print(json.dumps(body))
        return 0
    if args.subcommand == "sieve":
        try:
            with open(args.sieve_file, encoding="utf-8") as fh:
                payload = json.load(fh)
        except OSError as exc:
            print(f"cannot read {args.sieve_file}: {exc}", file=sys.stderr)
            return EXIT_USAGE
        body = _post(args.server, "/sieve", payload)
        print(json.dumps(body) if args.format == "json" else body["outcome"])
        return 0
    raise AssertionError(f"unhandled subcommand {args.subcommand}")


_RUNNERS = {
    "verdict": _run_verdict,
    "search": _run_search,
    "density": _run_density,
    "classpoly": _run_classpoly,
    "picard": _run_picard,
    "sieve": _run_sieve,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.server:
            return _remote(args)
        return _RUNNERS[args.subcommand](args)
    except SpecError as exc:
        print(f"invalid spec: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PreflightError as exc:
        print(f"preflight failed: {exc}", file=sys.stderr)
        for check in exc.report:
            mark = "ok" if check.ok else "FAIL"
            print(f"  [{mark}] {check.name}: {check.detail}", file=sys.stderr)
        return EXIT_DOMAIN
    except BoundExceededError as exc:
        print(f"bound exceeded: {exc}", file=sys.stderr)
        return EXIT_BOUND
    except PrecisionError as exc:
        print(f"precision exhausted: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except urllib.error.HTTPError as exc:
        detail = exc.read().decode(errors="replace")
        print(f"server error {exc.code}: {detail}", file=sys.stderr)
        # the service tags errors by kind so both modes exit identically
        try:
            kind = json.loads(detail).get("kind")
        except ValueError:
            kind = None
        by_kind = {
            "spec": EXIT_USAGE,
            "domain": EXIT_DOMAIN,
            "preflight": EXIT_DOMAIN,
            "bound": EXIT_BOUND,
            "precision": EXIT_PRECISION,
        }
        if kind in by_kind:
            return by_kind[kind]
        return EXIT_PRECISION if exc.code >= 500 else EXIT_DOMAIN
    except urllib.error.URLError as exc:
        print(f"cannot reach server: {exc.reason}", file=sys.stderr)
        return EXIT_UNAVAILABLE


if __name__ == "__main__":
    sys.exit(main())
