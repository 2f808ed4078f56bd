"""``qfgenus`` command line.

Commands run in-process unless ``--server URL`` is given, in which case the
request is posted to a running ``qfgenus serve`` instance.

Exit codes: 0 success, 1 definitive negative answer, 2 retry budget
exhausted, 3 internal invariant violated.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Any

from .commands import EXIT_BUG, EXIT_NEGATIVE, dispatch


def _load(path: str) -> Any:
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise _InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise _InputError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None


class _InputError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qfgenus", description="Genus symbols of integral quadratic forms.")
    ap.add_argument("--server", help="post the request to a running service at this base URL")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("symbol", help="genus symbol of a form")
    p.add_argument("--form", required=True)
    p.add_argument("--factor", help="comma-separated primes known to divide det")

    p = sub.add_parser("validate", help="check the existence conditions of a symbol")
    p.add_argument("--symbol", required=True)

    p = sub.add_parser("localform", help="block-diagonal local form of a symbol")
    p.add_argument("--symbol", required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--p", type=int)
    g.add_argument("--q", type=int)
    p.add_argument("--seed", type=int)

    p = sub.add_parser("findt", help="target value and local cases for one recursion level")
    p.add_argument("--symbol", required=True)
    p.add_argument("--seed", type=int)

    p = sub.add_parser("generate", help="a form in the genus of a symbol")
    p.add_argument("--symbol", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--retries", type=int, default=16)
    p.add_argument("--trace", action="store_true", help="include the per-level determinant and scale trace")

    p = sub.add_parser("verify", help="check that a form lies in the genus of a symbol")
    p.add_argument("--form", required=True)
    p.add_argument("--symbol", required=True)
    p.add_argument("--seed", type=int)

    p = sub.add_parser("oracle", help="exhaustive checkers")
    osub = p.add_subparsers(dest="kind", required=True)
    o = osub.add_parser("appendix-c", help="binary case-analysis grids")
    o.add_argument("--which", choices=["typeII", "typeI_even", "typeI_odd"])
    o.add_argument("--literal", action="store_true", help="odd-scale grid without the determinant parity term")
    osub.add_parser("rep-dim4", help="four-variable representation table mod 16")
    o = osub.add_parser("equiv", help="local equivalence witness")
    o.add_argument("--a", required=True)
    o.add_argument("--b", required=True)
    o.add_argument("--p", type=int, required=True)
    o.add_argument("--k", type=int, required=True)
    o.add_argument("--brute", action="store_true", help="exhaustive search instead of the splitter")
    o.add_argument("--seed", type=int)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    return ap


def request_from_args(args: argparse.Namespace) -> tuple[str, dict]:
    """Translate parsed flags into ``(command, handler kwargs)``."""
    c = args.command
    if c == "symbol":
        factor = [int(x) for x in args.factor.split(",") if x.strip()] if args.factor else None
        return c, {"form": _load(args.form), "factor": factor}
    if c == "validate":
        return c, {"symbol": _load(args.symbol)}
    if c == "localform":
        return c, {"symbol": _load(args.symbol), "p": args.p, "q": args.q, "seed": args.seed}
    if c == "findt":
        return c, {"symbol": _load(args.symbol), "seed": args.seed}
    if c == "generate":
        return c, {"symbol": _load(args.symbol), "seed": args.seed, "retries": args.retries, "trace": args.trace}
    if c == "verify":
        return c, {"form": _load(args.form), "symbol": _load(args.symbol), "seed": args.seed}
    if c == "oracle":
        kw: dict = {"kind": args.kind}
        if args.kind == "appendix-c":
            kw.update(which=args.which, literal=args.literal)
        elif args.kind == "equiv":
            kw.update(a=_load(args.a), b=_load(args.b), p=args.p, k=args.k, brute=args.brute, seed=args.seed)
        return c, kw
    raise _InputError(f"unknown command {c}")


def _remote(base: str, command: str, kwargs: dict) -> tuple[int, dict]:
    import httpx

    from .commands import resolve_seed

    if "seed" in kwargs:
        kwargs["seed"] = resolve_seed(kwargs["seed"])
    resp = httpx.post(f"{base.rstrip('/')}/{command}", json=kwargs, timeout=None)
    body = resp.json()
    if "exit_code" not in body:
        return EXIT_NEGATIVE, {"error": "SchemaError", "message": json.dumps(body.get("detail", body))}
    return int(body["exit_code"]), body["payload"]


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr)
    if args.command == "serve":
        import uvicorn

        from .service import app

        uvicorn.run(app, host=args.host, port=args.port)
        return 0
    try:
        command, kwargs = request_from_args(args)
    except _InputError as exc:
        print(json.dumps({"error": "ParseError", "message": str(exc)}, indent=2))
        return EXIT_NEGATIVE
    try:
        if args.server:
            code, payload = _remote(args.server, command, kwargs)
        else:
            code, payload = dispatch(command, **kwargs)
    except Exception as exc:  # keep the exit-code contract for unexpected failures
        code, payload = EXIT_BUG, {"error": type(exc).__name__, "message": str(exc)}
    print(json.dumps(payload, indent=2, sort_keys=True))
    return code


if __name__ == "__main__":
    sys.exit(main())
