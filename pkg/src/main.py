"""Entrypoint for the polyimage command line.

Exit codes: 0 ok, 1 verify-fail, 2 parse, 3 hypothesis, 4 trace, 5 unsupported.
"""
import argparse
import asyncio
import json
import logging
import os
import sys
from dataclasses import dataclass

from .cache import ReportCache, report_key
from .explorer import (
    check_conjecture,
    enumerate_image,
    image_report_json,
    run_demo,
    span_of_image,
)
from .freealg import classify, coeff_sum, coeff_sum_alternating, render
from .matrix import MatrixFormatError, dump_matrix, read_matrix
from .metrics import start_metrics_server
from .parser import parse_poly
from .ring import PolyImageError, parse_ring
from .witness import load_certificate, witness_for

LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")
DEFAULT_BUDGET = int(float(os.getenv("POLYIMAGE_BUDGET", "1e8")))
SEARCH_BUDGET = int(float(os.getenv("POLYIMAGE_SEARCH_BUDGET", "1e7")))
WORKERS = int(os.getenv("POLYIMAGE_WORKERS", "1"))
CACHE_PATH = os.getenv("POLYIMAGE_CACHE")
METRICS_PORT = int(os.getenv("METRICS_PORT", "0"))

logger = logging.getLogger("polyimage")

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1


@dataclass
class Outcome:
    payload: dict
    text: str
    exit_code: int = EXIT_OK


def _read_source(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise MatrixFormatError(f"cannot read {path}: {exc.strerror}") from exc


# -----------------------------------------------------------------------------
# commands
# -----------------------------------------------------------------------------
def cmd_parse(args) -> Outcome:
    ring = parse_ring(args.ring)
    f = parse_poly(args.poly, ring)
    payload = {
        "poly": render(f),
        "ring": ring.flag,
        "degree": f.m,
        "terms": len(f),
        "coeff_sum": str(coeff_sum(f)),
        "coeff_sum_alternating": str(coeff_sum_alternating(f)),
    }
    text = "\n".join(f"{k}: {v}" for k, v in payload.items())
    return Outcome(payload, text)


def cmd_classify(args) -> Outcome:
    ring = parse_ring(args.ring)
    f = parse_poly(args.poly, ring)
    verdict = classify(f, args.n, ring)
    payload = {"poly": render(f), "n": args.n, "ring": ring.flag, **verdict.to_json()}
    return Outcome(payload, f"{verdict.verdict.value}\n  {verdict.justification}")


def cmd_witness(args) -> Outcome:
    ring = parse_ring(args.ring)
    f = parse_poly(args.poly, ring)
    target = read_matrix(_read_source(args.target), ring)
    budget = args.budget if args.budget is not None else SEARCH_BUDGET
    cert = witness_for(f, target, budget)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(cert.dumps() + "\n")
        logger.info("certificate written to %s", args.out)
    lines = [f"provenance: {cert.provenance}", f"poly: {render(f)}"]
    for k, A in enumerate(cert.inputs, start=1):
        lines.append(f"input x{k}:")
        lines.append(dump_matrix(A).rstrip())
    return Outcome(cert.to_json(), "\n".join(lines))


def cmd_verify(args) -> Outcome:
    text = _read_source(args.certificate)
    claim = load_certificate(text)
    ok = claim.verify()
    payload = {"ok": ok, "poly": render(claim.poly), "provenance": claim.provenance}
    return Outcome(payload, "ok" if ok else "fail", EXIT_OK if ok else EXIT_VERIFY_FAIL)


def _explore_payload(args, f, ring, budget) -> dict:
    if args.check == "conjecture":
        verdict = check_conjecture(f, args.n, ring, budget, args.seed, workers=args.workers)
        payload = verdict.to_json()
        if args.dump_image and verdict.report is not None:
            payload["report"] = image_report_json(verdict.report, dump_image=True)
        return payload
    if args.check == "span":
        return span_of_image(f, args.n, ring, budget, args.seed).to_json()
    report = enumerate_image(f, args.n, ring, budget, args.seed, workers=args.workers)
    return {"report": image_report_json(report, dump_image=args.dump_image)}


async def _load_cached(path, key):
    cache = ReportCache(path)
    await cache.init()
    return await cache.load_report(key)


async def _store_cached(path, key, payload):
    cache = ReportCache(path)
    await cache.init()
    await cache.save_report(key, payload)


def _explore_text(payload: dict) -> str:
    lines = []
    report = payload.get("report")
    if report is not None:
        lines.append(
            f"mode: {report['mode']} (tuples={report['tuples']}, budget={report['budget']}, seed={report['seed']})"
        )
    elif "mode" in payload:
        lines.append(f"mode: {payload['mode']}")
    if "status" in payload:
        lines.append(f"status: {payload['status']}")
        lines.append(f"  {payload['detail']}")
    if "dimension" in payload:
        lines.append(f"span dimension: {payload['dimension']}")
        lines.append(f"contains trace-zero: {payload['contains_trace_zero']}")
        lines.append(f"equals center: {payload['equals_center']}")
    if report is not None:
        lines.append(f"image size: {report['image_size']}")
        for name, rel in report["comparisons"].items():
            lines.append(f"  vs {name}: {rel}")
    if "missing" in payload:
        lines.append("missing trace-zero matrix:")
        lines.extend(" ".join(str(v) for v in row) for row in payload["missing"]["rows"])
    return "\n".join(lines)


def cmd_explore(args) -> Outcome:
    ring = parse_ring(args.ring)
    f = parse_poly(args.poly, ring)
    budget = args.budget if args.budget is not None else DEFAULT_BUDGET
    path = args.cache or CACHE_PATH
    payload = None
    if path:
        key = report_key(render(f), args.n, ring.flag, budget, args.seed, args.check, args.dump_image)
        payload = asyncio.run(_load_cached(path, key))
    if payload is None:
        # must run outside any event loop: workers > 1 calls asyncio.run itself
        payload = _explore_payload(args, f, ring, budget)
        if path:
            asyncio.run(_store_cached(path, key, payload))
    payload = {"poly": render(f), "n": args.n, "ring": ring.flag, "budget": budget, "seed": args.seed, **payload}
    return Outcome(payload, _explore_text(payload))


def cmd_demo(args) -> Outcome:
    reports = run_demo(args.budget, args.seed)
    payload = {"ok": all(r.ok for r in reports), "checks": [r.to_json() for r in reports]}
    lines = [f"{r.name} [{r.details.get('ring', 'all')}]: {'ok' if r.ok else 'FAILED'}" for r in reports]
    return Outcome(payload, "\n".join(lines), EXIT_OK if payload["ok"] else EXIT_VERIFY_FAIL)


# -----------------------------------------------------------------------------
# argument parsing
# -----------------------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text", help="Output format")
    common.add_argument("-v", "--verbose", action="store_true", help="Enable verbose console logging")

    poly = argparse.ArgumentParser(add_help=False)
    poly.add_argument("--poly", required=True, help='Polynomial text, e.g. "[x,[z,y]]"')
    poly.add_argument("--ring", required=True, help="gf:<p>, zmod:<m> or q")

    parser = argparse.ArgumentParser(
        prog="polyimage", description="Images of multilinear polynomials on matrix rings"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", parents=[common, poly], help="Print the canonical form")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("classify", parents=[common, poly], help="Classify the image for degree <= 3")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("witness", parents=[common, poly], help="Build a certificate for a target matrix")
    p.add_argument("--target", required=True, help="Matrix file (text or JSON), - for stdin")
    p.add_argument("--budget", type=int, help="Exhaustive fallback budget")
    p.add_argument("--out", help="Also write the certificate JSON here")
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("verify", parents=[common], help="Re-evaluate a certificate")
    p.add_argument("certificate", help="Certificate JSON file, - for stdin")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("explore", parents=[common, poly], help="Enumerate or sample the image")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--budget", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--check", choices=("conjecture", "span", "image"), default="conjecture")
    p.add_argument("--dump-image", action="store_true", help="Include every image matrix in the report")
    p.add_argument("--cache", help="SQLite report cache path")
    p.add_argument("--workers", type=int, default=WORKERS)
    p.set_defaults(func=cmd_explore)

    p = sub.add_parser("demo", parents=[common], help="Run the built-in verifications")
    p.add_argument("--budget", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_demo)
    return parser


def configure_logging(verbose: bool):
    handler = logging.StreamHandler(sys.stderr)
    handler.setLevel(logging.DEBUG if verbose else LOG_LEVEL)
    handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(name)s %(message)s", datefmt="%H:%M:%S"))
    logging.basicConfig(level=logging.DEBUG if verbose else LOG_LEVEL, handlers=[handler], force=True)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    if METRICS_PORT:
        start_metrics_server(METRICS_PORT)
    logger.debug("invocation: %r", vars(args))
    try:
        outcome = args.func(args)
    except PolyImageError as exc:
        logger.debug("command failed", exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    if args.format == "json":
        print(json.dumps(outcome.payload, indent=2))
    else:
        print(outcome.text)
    return outcome.exit_code


if __name__ == "__main__":
    sys.exit(main())
