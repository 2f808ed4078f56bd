"""Command handlers shared by the CLI and the HTTP service.

Each handler takes plain JSON-like values and returns ``(exit_code, payload)``.
Library errors are mapped to exit codes by :func:`dispatch`.
"""

from __future__ import annotations

import os
import random
from collections.abc import Callable
from typing import Any

from .errors import (
    InvariantViolation,
    NegativeResult,
    QFGenusError,
    RetryableFailure,
    SchemaError,
)
from .findt import find_t
from .forms import form_from_json, form_to_json
from .generate import (
    find_equivalence_mod_pk,
    qfgen_poly,
    trace_blowup,
    verify_membership,
)
from .localform import local_form_p, local_form_q
from .oracle import appendix_c_suite, brute_force_equivalence, exhaustive_rep_check_dim4
from .symbol import (
    GenusSymbol,
    factor_abs,
    genus_symbol,
    reduce_symbol,
    validate_symbol,
)
from .zmod import LocalContext

EXIT_OK, EXIT_NEGATIVE, EXIT_RETRYABLE, EXIT_BUG = 0, 1, 2, 3

Result = tuple[int, dict]


def resolve_seed(seed: int | None) -> int:
    if seed is not None:
        return int(seed)
    env = os.environ.get("QFGENUS_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise SchemaError(f"QFGENUS_SEED must be an integer, got {env!r}") from None


def _symbol(obj) -> GenusSymbol:
    return GenusSymbol.from_json(obj)


def cmd_symbol(form: dict, factor: list | None = None) -> Result:
    Q = form_from_json(form)
    hints = {int(p): 1 for p in factor} if factor else None
    return EXIT_OK, genus_symbol(Q, hints).to_json()


def cmd_validate(symbol: dict) -> Result:
    rep = validate_symbol(_symbol(symbol))
    return (EXIT_OK if rep.valid else EXIT_NEGATIVE), rep.to_json()


def cmd_localform(symbol: dict, p: int | None = None, q: int | None = None, seed: int | None = None) -> Result:
    S = _symbol(symbol)
    rng = random.Random(resolve_seed(seed))
    if (p is None) == (q is None):
        raise SchemaError("give exactly one of p or q")
    if p is not None:
        return EXIT_OK, form_to_json(local_form_p(S, int(p), rng))
    q = int(q)
    return EXIT_OK, form_to_json(local_form_q(S, q, factor_abs(q), rng))


def cmd_findt(symbol: dict, seed: int | None = None) -> Result:
    S = _symbol(symbol)
    rep = validate_symbol(S)
    if not rep.valid:
        return EXIT_NEGATIVE, rep.to_json()
    Sr, g = reduce_symbol(S)
    plan = find_t(Sr, random.Random(resolve_seed(seed)))
    return EXIT_OK, {"gcd": str(g), "reduced": Sr.to_json(), "plan": plan.to_json()}


def cmd_generate(symbol: dict, seed: int | None = None, retries: int = 16, trace: bool = False) -> Result:
    S = _symbol(symbol)
    rep = validate_symbol(S)
    if not rep.valid:
        return EXIT_NEGATIVE, rep.to_json()
    levels: list | None = [] if trace else None
    Q = qfgen_poly(S, random.Random(resolve_seed(seed)), retries=retries, trace=levels)
    out = form_to_json(Q)
    if trace:
        return EXIT_OK, {"form": out, "trace": trace_blowup(levels)}
    return EXIT_OK, out


def cmd_verify(form: dict, symbol: dict, seed: int | None = None) -> Result:
    rep = verify_membership(form_from_json(form), _symbol(symbol), random.Random(resolve_seed(seed)))
    return (EXIT_OK if rep.member else EXIT_NEGATIVE), rep.to_json()


def cmd_oracle(
    kind: str,
    which: str | None = None,
    literal: bool = False,
    a: dict | None = None,
    b: dict | None = None,
    p: int | None = None,
    k: int | None = None,
    brute: bool = False,
    seed: int | None = None,
) -> Result:
    if kind == "appendix-c":
        suites = [which] if which else ["typeII", "typeI_even", "typeI_odd"]
        res = {}
        for name in suites:
            fails, total = appendix_c_suite(name, literal=literal)
            res[name] = {"failures": fails, "checked": total}
        bad = any(r["failures"] for r in res.values())
        return (EXIT_NEGATIVE if bad else EXIT_OK), {"suites": res}
    if kind == "rep-dim4":
        fails = exhaustive_rep_check_dim4()
        return (EXIT_NEGATIVE if fails else EXIT_OK), {"unsolvable_cells": fails}
    if kind == "equiv":
        if a is None or b is None or p is None or k is None:
            raise SchemaError("equiv needs a, b, p and k")
        A, B = form_from_json(a), form_from_json(b)
        ctx = LocalContext(int(p), int(k))
        if brute:
            U = brute_force_equivalence(A, B, ctx)
        else:
            U = find_equivalence_mod_pk(A, B, ctx, random.Random(resolve_seed(seed)))
        return EXIT_OK, {"modulus": str(ctx.modulus), "transform": form_to_json(U.matrix())}
    raise SchemaError(f"unknown oracle {kind!r}")


COMMANDS: dict[str, Callable[..., Result]] = {
    "symbol": cmd_symbol,
    "validate": cmd_validate,
    "localform": cmd_localform,
    "findt": cmd_findt,
    "generate": cmd_generate,
    "verify": cmd_verify,
    "oracle": cmd_oracle,
}


def error_payload(exc: QFGenusError) -> dict:
    return {"error": type(exc).__name__, "message": str(exc)}


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, NegativeResult):
        return EXIT_NEGATIVE
    if isinstance(exc, RetryableFailure):
        return EXIT_RETRYABLE
    return EXIT_BUG


def dispatch(command: str, **kwargs: Any) -> Result:
    """Run a handler and turn library errors into ``(code, payload)``."""
    if command not in COMMANDS:
        return EXIT_NEGATIVE, {"error": "SchemaError", "message": f"unknown command {command!r}"}
    try:
        return COMMANDS[command](**kwargs)
    except (NegativeResult, RetryableFailure, InvariantViolation) as exc:
        return exit_code_for(exc), error_payload(exc)
    except QFGenusError as exc:
        return EXIT_BUG, error_payload(exc)
    except AssertionError as exc:
        return EXIT_BUG, {"error": "InvariantViolation", "message": f"assertion failed: {exc}"}
