"""Command-line front end.

Exit codes: 0 the property holds, 1 it fails, 2 input error, 3 inconclusive
(budget exhausted), 4 internal error.
"""
import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence

import config
from bounds import BoundTable, bound_table
from code_loader import CodeFileError, format_code_file, load_code, save_code
from codes import (
    CodeAnalysis,
    DirectVerdict,
    StructuralVerdict,
    ViolationReason,
    Word,
    analyze,
    is_2wfp_structural,
    is_twfp_direct,
)
from oracles import (
    CertificateStatus,
    OracleCertificate,
    exhaustive_max_code,
    max_non2cov_sperner,
    random_code,
)
from search import SearchResult, SearchStatus, search_max_code
from setfam import format_mask, symmetric_chain_decomposition

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILS = 1
EXIT_INPUT = 2
EXIT_INCONCLUSIVE = 3
EXIT_INTERNAL = 4

SCHEMAS = {
    "analyze": CodeAnalysis,
    "bounds": BoundTable,
    "certificate": OracleCertificate,
    "search": SearchResult,
}


def _members(indices: Sequence[int]) -> str:
    return "{" + ",".join(str(i) for i in indices) + "}"


def _describe_direct(verdict: DirectVerdict) -> str:
    return (f"coalition X={_members(verdict.coalition)} frames word {verdict.framed} "
            f"({verdict.sense}-sense, t={verdict.t})")


def _describe_structural(verdict: StructuralVerdict) -> str:
    first = next(v for v in verdict.violations if (v.index, v.reason) == (verdict.index, verdict.reason))
    if first.reason == ViolationReason.NOT_SPERNER:
        return (f"X_{first.index} is not Sperner: I({first.index},{first.j}) and "
                f"I({first.index},{first.k}) are comparable")
    return (f"X_{first.index} is 2-covering: I({first.index},{first.j}) ∪ "
            f"I({first.index},{first.k}) = [n]")


def _render_word(word: Word, q: int) -> str:
    separator = "" if q <= 10 else ","
    return separator.join(str(s) for s in word)


def _print_certificate(certificate: OracleCertificate, as_json: bool, timing: bool) -> None:
    if as_json:
        exclude = None if timing else {"elapsed"}
        print(certificate.model_dump_json(indent=2, exclude=exclude))
        return
    print(f"optimum {certificate.optimum} ({certificate.status.value})")
    if certificate.witness_code is not None:
        print("witness " + " ".join(_render_word(w, certificate.q) for w in certificate.witness_code.words))
    if certificate.witness_family is not None:
        print("witness " + " ".join(format_mask(m) for m in certificate.witness_family.masks))
    print(f"nodes {certificate.nodes_explored} of budget {certificate.budget}, "
          f"search space {certificate.search_space_size}")
    if timing:
        print(f"elapsed {certificate.elapsed:.3f}s")


def _store(certificate: OracleCertificate) -> None:
    import certificate_store

    certificate_id = certificate_store.save_certificate(certificate)
    print(f"stored as certificate {certificate_id}", file=sys.stderr)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_verify(args) -> int:
    code = load_code(args.path)
    method = args.method
    if method == "structural" and args.t != 2:
        raise ValueError("--method structural requires --t 2")
    if method == "both" and args.t != 2:
        logger.warning("structural verifier only covers t = 2; running the direct verifier")
        method = "direct"

    direct = is_twfp_direct(code, args.t) if method in ("direct", "both") else None
    structural = is_2wfp_structural(code) if method in ("structural", "both") else None
    if direct is not None and structural is not None and direct.ok != structural.ok:
        logger.error(f"Verifiers disagree on {args.path}: direct={direct}, structural={structural}")
        raise RuntimeError(f"verifiers disagree on {args.path}")

    ok = direct.ok if direct is not None else structural.ok
    if ok:
        print("OK")
        return EXIT_OK
    if direct is not None:
        print("NOT FRAMEPROOF: " + _describe_direct(direct))
    if structural is not None:
        print("NOT FRAMEPROOF: " + _describe_structural(structural))
    return EXIT_FAILS


def cmd_analyze(args) -> int:
    report = analyze(load_code(args.path))
    if args.json:
        print(report.model_dump_json(indent=2))
        return EXIT_OK
    print(f"{'i':>4} {'l':>3} {'u':>3} {'d':>3}  sperner  non2cov  case")
    for p in report.profiles:
        print(f"{p.index:>4} {p.l:>3} {p.u:>3} {p.d:>3}  {str(p.is_sperner).lower():<7}  "
              f"{str(p.is_non_2_covering).lower():<7}  {p.case.value}")
    print(f"d = {report.d} (pivot word {report.pivot}), frameproof = {str(report.frameproof).lower()}")
    return EXIT_OK


def _parse_range(text: str) -> List[int]:
    start, sep, end = text.partition("..")
    if not sep:
        raise ValueError(f"bad range {text!r}: expected a..b")
    try:
        return [int(start), int(end)]
    except ValueError:
        raise ValueError(f"bad range {text!r}: expected a..b")


def cmd_bounds(args) -> int:
    start, end = _parse_range(args.n_range)
    table = bound_table(start, end)
    if args.format == "json":
        print(table.model_dump_json(indent=2))
    elif args.format == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["n", "stinson_wei", "panoui", "panoui_applicable",
                         "improved", "improved_applicable", "best", "method"])
        for row in table.rows:
            writer.writerow([row.n, row.stinson_wei,
                             row.panoui if row.panoui is not None else "",
                             str(row.panoui_applicable).lower(),
                             row.improved if row.improved is not None else "",
                             str(row.improved_applicable).lower(),
                             row.best, row.method.value])
        sys.stdout.write(buffer.getvalue())
    else:
        print(f"{'n':>3} {'stinson-wei':>22} {'panoui':>22} {'improved':>22} {'best':>22}  method")
        for row in table.rows:
            panoui = str(row.panoui) if row.panoui_applicable else f"caveat({row.panoui_formula})"
            improved = str(row.improved) if row.improved_applicable else "n/a"
            print(f"{row.n:>3} {row.stinson_wei:>22} {panoui:>22} {improved:>22} {row.best:>22}  "
                  f"{row.method.value}")
    return EXIT_OK


def cmd_search(args) -> int:
    result = search_max_code(args.n, args.q, t=args.t, budget=args.budget, seed=args.seed,
                             workers=args.workers)
    summary = (f"search n={result.n} q={result.q} t={result.t} budget={result.budget} "
               f"seed={result.seed}: size={result.size} status={result.status.value} "
               f"nodes={result.nodes_explored}")
    text = format_code_file(result.best_code, comments=[summary])
    if args.out:
        Path(args.out).write_text(text, encoding="ascii", newline="\n")
    if args.json:
        exclude = None if args.timing else {"wall_time"}
        print(result.model_dump_json(indent=2, exclude=exclude))
    elif args.out:
        print(summary)
    else:
        sys.stdout.write(text)
    if args.timing:
        print(f"wall time {result.wall_time:.3f}s", file=sys.stderr)
    return EXIT_OK if result.status == SearchStatus.OPTIMAL else EXIT_INCONCLUSIVE


def cmd_scd(args) -> int:
    for line in symmetric_chain_decomposition(args.n).render():
        print(line)
    return EXIT_OK


def cmd_maxfam(args) -> int:
    certificate = max_non2cov_sperner(args.n, budget=args.budget)
    _print_certificate(certificate, args.json, args.timing)
    if args.store:
        _store(certificate)
    return EXIT_OK if certificate.status == CertificateStatus.EXACT else EXIT_INCONCLUSIVE


def cmd_oracle(args) -> int:
    certificate = exhaustive_max_code(args.n, args.q, t=args.t, budget=args.budget, workers=args.workers)
    _print_certificate(certificate, args.json, args.timing)
    if args.store:
        _store(certificate)
    return EXIT_OK if certificate.status == CertificateStatus.EXACT else EXIT_INCONCLUSIVE


def cmd_gen(args) -> int:
    code = random_code(args.n, args.q, args.m, args.seed)
    comment = f"random code n={args.n} q={args.q} m={args.m} seed={args.seed}"
    if args.out:
        save_code(code, args.out, comments=[comment])
    else:
        sys.stdout.write(format_code_file(code, comments=[comment]))
    return EXIT_OK


def cmd_certificates(args) -> int:
    import certificate_store

    stored = certificate_store.list_certificates(kind=args.kind, n=args.n)
    if args.json:
        print(json.dumps([c.model_dump(mode="json") for c in stored], indent=2))
        return EXIT_OK
    for c in stored:
        params = f"n={c.n}" + (f" q={c.q} t={c.t}" if c.q is not None else "")
        print(f"{c.id:>5}  {c.kind.value:<22} {params:<16} optimum={c.optimum:<6} "
              f"{c.status.value:<12} {c.created_at.isoformat(timespec='seconds')}")
    return EXIT_OK


def cmd_schema(args) -> int:
    schema = SCHEMAS[args.name].model_json_schema()
    schema["$id"] = f"wfp/{args.name}/{config.SCHEMA_VERSION}"
    print(json.dumps(schema, indent=2, ensure_ascii=False))
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("main:app", host=args.host, port=args.port)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wfp", description="Wide-sense frameproof code toolkit")
    parser.add_argument("--log-level", default=None, help="logging level (default: WFP_LOG_LEVEL or WARNING)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="check whether a code file is t-frameproof")
    p.add_argument("path")
    p.add_argument("--t", type=int, default=2)
    p.add_argument("--method", choices=["direct", "structural", "both"], default="both")
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("analyze", help="coincidence-family profile of every word")
    p.add_argument("path")
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=cmd_analyze)

    p = sub.add_parser("bounds", help="upper-bound table")
    p.add_argument("--n-range", default="1..16", help="a..b with 1 ≤ a ≤ b ≤ 64")
    p.add_argument("--format", choices=["table", "json", "csv"], default="table")
    p.set_defaults(handler=cmd_bounds)

    p = sub.add_parser("search", help="branch-and-bound search for a large code")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--t", type=int, default=2)
    p.add_argument("--budget", type=int, default=None, help="node budget (default: WFP_SEARCH_BUDGET)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=None, help="worker processes (default: WFP_THREADS)")
    p.add_argument("--out", default=None, help="write the code file here instead of stdout")
    p.add_argument("--json", action="store_true")
    p.add_argument("--timing", action="store_true", help="also report wall time")
    p.set_defaults(handler=cmd_search)

    p = sub.add_parser("scd", help="symmetric chain decomposition of 2^[n]")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(handler=cmd_scd)

    p = sub.add_parser("maxfam", help="largest non 2-covering Sperner family on [n]")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--budget", type=int, default=None, help="node budget (default: WFP_ORACLE_BUDGET)")
    p.add_argument("--store", action="store_true", help="save the certificate")
    p.add_argument("--json", action="store_true")
    p.add_argument("--timing", action="store_true")
    p.set_defaults(handler=cmd_maxfam)

    p = sub.add_parser("oracle", help="exact maximum t-wFP code by exhaustive search")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--t", type=int, default=2)
    p.add_argument("--budget", type=int, default=None, help="node budget (default: WFP_ORACLE_BUDGET)")
    p.add_argument("--workers", type=int, default=None, help="worker processes (default: WFP_THREADS)")
    p.add_argument("--store", action="store_true", help="save the certificate")
    p.add_argument("--json", action="store_true")
    p.add_argument("--timing", action="store_true")
    p.set_defaults(handler=cmd_oracle)

    p = sub.add_parser("gen", help="seeded random code file")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(handler=cmd_gen)

    p = sub.add_parser("certificates", help="list stored oracle certificates")
    p.add_argument("--kind", default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=cmd_certificates)

    p = sub.add_parser("schema", help="print the JSON schema of a payload")
    p.add_argument("name", choices=sorted(SCHEMAS))
    p.set_defaults(handler=cmd_schema)

    p = sub.add_parser("serve", help="run the HTTP API")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(handler=cmd_serve)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = config.get_log_level("WARNING")
    if args.log_level:
        level = logging.getLevelName(args.log_level.upper())
        if not isinstance(level, int):
            print(f"error: unknown log level {args.log_level!r}", file=sys.stderr)
            return EXIT_INPUT
    logging.basicConfig(level=level, stream=sys.stderr)

    try:
        return args.handler(args)
    except CodeFileError as e:
        print(f"error: {getattr(args, 'path', '')}: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except RuntimeError as e:
        print(f"internal error: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    raise SystemExit(main())
