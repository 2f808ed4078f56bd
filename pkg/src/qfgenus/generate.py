"""Generating an integral form in a given genus.

One level of the recursion takes a reduced symbol of dimension n, picks a
target t, and at every prime p dividing q = 2 t det builds a basis
``[x | A]`` with ``x' S_p x = t``. The forms ``H_p = t A'S_pA - d'd`` with
``d = x'S_pA`` define a symbol of dimension n - 1. A form ``H~`` in that
genus is generated recursively and matched to each ``H_p`` by a local
isometry ``U_p``. The output glues ``t``, ``d U_p`` and ``H~`` back into an
n-dimensional form.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from itertools import product

from .errors import (
    ChildInvalid,
    EquivalenceNotFound,
    GenerationFailed,
    InvalidSymbol,
    InvariantViolation,
    NonIntegralAssembly,
    NotEquivalent,
    RetryableFailure,
    ScaleOverflow,
    SearchSpaceTooLarge,
)
from .findt import TargetPlan, find_t
from .forms import (
    QuadForm,
    Transform,
    congruence,
    det,
    det_mod,
    inverse_mod,
    matmul,
    signature,
    transpose,
)
from .jordan import BlockDiagForm, TypeI, block_diagonalize, constituents
from .localform import local_form_p
from .oracle import brute_force_equivalence
from .symbol import (
    GenusSymbol,
    canonical_two,
    det_of_symbol,
    genus_symbol,
    normalize_symbol,
    reduce_symbol,
    validate_symbol,
)
from .zmod import LocalContext, _unit_root, crt, inverse, legendre, ord_cop, ord_p

log = logging.getLogger(__name__)

SPLIT_ATTEMPTS = 200
SPLIT_RESTARTS = 6


# ---------------------------------------------------------------- local isometries


def _block_matrix(b, p: int, m: int) -> list[list[int]]:
    if isinstance(b, TypeI):
        return [[p ** b.scale * b.unit % m]]
    s = 1 << b.scale
    return [[2 * s * b.a % m, s * b.b % m], [s * b.b % m, 2 * s * b.c % m]]


def _canon_label(blocks, p: int, k: int):
    cs = constituents(BlockDiagForm(p, k, tuple(blocks)))
    return canonical_two(cs) if p == 2 else tuple(cs)


def _even_binary_isometry(E, T, m: int):
    """``R`` with ``R'ER = T (mod 2^m)`` for even unimodular binary ``E``, ``T``."""
    mod = 1 << m

    def err(R):
        return [[v % mod for v in row] for row in _sub(congruence(E, R), T)]

    def good(R, prec):
        D = _sub(congruence(E, R), T)
        return (D[0][1] % (1 << prec) == 0 and D[0][0] % (1 << (prec + 1)) == 0
                and D[1][1] % (1 << (prec + 1)) == 0)

    if m <= 2:
        for R in product(range(1 << m), repeat=4):
            R = [[R[0], R[1]], [R[2], R[3]]]
            if (R[0][0] * R[1][1] - R[0][1] * R[1][0]) % 2 and not any(v for row in err(R) for v in row):
                return R
        return None
    start = None
    for a in range(4):
        for b in range(4):
            for c in range(4):
                for d in range(4):
                    if (a * d - b * c) % 2 == 0:
                        continue
                    R = [[a, b], [c, d]]
                    if good(R, 2):
                        start = R
                        break
                if start:
                    break
            if start:
                break
        if start:
            break
    if start is None:
        return None
    R, prec = start, 2
    big = 1 << (2 * m + 4)
    Tinv = inverse_mod(T, big)
    while prec < m:
        D = _sub(congruence(E, R), T)
        scale = 1 << prec
        Dl = [[v // scale for v in row] for row in D]
        L = [[Dl[0][0] // 2, 0], [Dl[1][0], Dl[1][1] // 2]]
        Z = matmul(Tinv, transpose(L), big)
        Z = [[-v for v in row] for row in Z]
        R = [[R[i][j] + scale * sum(R[i][l] * Z[l][j] for l in range(2)) for j in range(2)] for i in range(2)]
        R = [[v % big for v in row] for row in R]
        prec = 2 * prec
    R = [[v % mod for v in row] for row in R]
    if any(err(R)[i][j] for i in range(2) for j in range(2)):
        return None
    return R


def _sub(A, B):
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def _match_block(G, target, p: int, k: int, s: int):
    """Small ``R`` with ``R'GR = target (mod p^k)``, or None if the classes differ."""
    m = p ** k
    if len(G) == 1:
        g = G[0][0] % m
        e, u = ord_cop(g, p)
        if e != s:
            return None
        tu = ord_cop(target[0][0] % m, p).cop
        prec = k - s
        w = tu * inverse(u, p ** prec) % p ** prec
        if p == 2:
            if w % (1 << min(3, prec)) != 1:
                return None
        elif legendre(w, p) != 1:
            return None
        return [[_unit_root(w, p, prec)]]
    g11, g12, g22 = G[0][0] % m, G[0][1] % m, G[1][1] % m
    if ord_cop(g12, 2).ord != s or (g11 and ord_cop(g11, 2).ord <= s) or (g22 and ord_cop(g22, 2).ord <= s):
        return None
    prec = k - s
    E = [[g11 >> s, g12 >> s], [g12 >> s, g22 >> s]]
    T = [[(v % m) >> s for v in row] for row in target]
    if (E[0][0] * E[1][1] - E[0][1] ** 2 - T[0][0] * T[1][1] + T[0][1] ** 2) % (1 << min(3, prec)):
        return None
    return _even_binary_isometry(E, T, prec)


def _pivots(C, p: int) -> list[int]:
    """Rows where the columns of ``C`` have an invertible minor mod p."""
    n, size = len(C), len(C[0])
    if size == 1:
        return [next(i for i in range(n) if C[i][0] % p)]
    for i in range(n):
        for j in range(i + 1, n):
            if (C[i][0] * C[j][1] - C[j][0] * C[i][1]) % p:
                return [i, j]
    raise ValueError("columns are dependent mod p")


def _split_off(M, C, G, p: int, k: int, s: int):
    """Complement of the span of ``C`` in ``M``: returns (basis change, Gram)."""
    mod = p ** k
    cur, size = len(M), len(C[0])
    piv = _pivots(C, p)
    rest = [i for i in range(cur) if i not in piv]
    N = matmul(M, C, mod)  # cur x size
    if size == 1:
        u = ord_cop(G[0][0] % mod, p).cop
        uinv = inverse(u, mod)
        kap = [[(N[i][0] // p ** s) * uinv % mod for i in rest]]
    else:
        g11, g12, g22 = (G[0][0] % mod, G[0][1] % mod, G[1][1] % mod)
        detg = g11 * g22 - g12 * g12
        d0 = detg // p ** (2 * s)
        dinv = inverse(d0, mod)
        kap = [[], []]
        for i in rest:
            n1, n2 = N[i][0], N[i][1]
            a1 = g22 * n1 - g12 * n2
            a2 = -g12 * n1 + g11 * n2
            kap[0].append((a1 // p ** (2 * s)) * dinv % mod)
            kap[1].append((a2 // p ** (2 * s)) * dinv % mod)
    # basis change P (cur x len(rest)): e_i - C kappa_i
    P = [[0] * len(rest) for _ in range(cur)]
    for col, i in enumerate(rest):
        P[i][col] = 1
        for r in range(cur):
            P[r][col] = (P[r][col] - sum(C[r][a] * kap[a][col] for a in range(size))) % mod
    Mc = congruence(M, P, mod)
    return P, Mc


def _min_order(M, p: int, k: int) -> int:
    best = k
    for row in M:
        for v in row:
            if v:
                best = min(best, ord_cop(v, p).ord)
    return best


def _is_zero_block(b, p: int, k: int) -> bool:
    return isinstance(b, TypeI) and (b.scale >= k or b.unit % p == 0)


def _label_or_none(blocks, p: int, k: int):
    try:
        return _canon_label(blocks, p, k)
    except ScaleOverflow:
        return None


def _split_once(A, blocks, ctx: LocalContext, rng: random.Random):
    p, k, mod = ctx.p, ctx.k, ctx.modulus
    n = len(A)
    M = [[v % mod for v in row] for row in A]
    basis = [[int(i == j) for j in range(n)] for i in range(n)]  # n x cur
    found = []
    for bi, blk in enumerate(blocks):
        if _is_zero_block(blk, p, k):
            # everything left must vanish mod p^k; keep the remaining basis as is
            if any(v % mod for row in M for v in row) or not all(_is_zero_block(b, p, k) for b in blocks[bi:]):
                raise EquivalenceNotFound(f"nonzero remainder at p={p} where the target is zero")
            found.extend([[basis[r][c] for r in range(n)] for c in range(len(M))])
            break
        target = _block_matrix(blk, p, mod)
        size = len(target)
        s = blk.scale
        cur = len(M)
        rest_label = _label_or_none(blocks[bi + 1:], p, k) if p == 2 and bi + 1 < len(blocks) else None
        if _min_order(M, p, k) != s:
            raise EquivalenceNotFound(f"scale mismatch at p={p}: block {bi} wants {s}")
        for _ in range(SPLIT_ATTEMPTS):
            if cur == size:
                C = [[int(i == j) for j in range(size)] for i in range(size)]
            else:
                C = [[rng.randrange(mod) for _ in range(size)] for _ in range(cur)]
            G = congruence(M, C, mod)
            R = _match_block(G, target, p, k, s)
            if R is None:
                continue
            C2 = matmul(C, R, mod)
            G2 = congruence(M, C2, mod)
            if any((G2[i][j] - target[i][j]) % mod for i in range(size) for j in range(size)):
                continue
            try:
                P, Mc = _split_off(M, C2, G2, p, k, s)
            except (ValueError, StopIteration):
                continue
            if rest_label is not None:
                try:
                    Bc, _ = block_diagonalize(Mc, ctx)
                    if _canon_label(Bc.blocks, p, k) != rest_label:
                        continue
                except ScaleOverflow:
                    continue
            vecs = matmul(basis, C2, mod)
            found.extend([[vecs[r][c] for r in range(n)] for c in range(size)])
            basis = matmul(basis, P, mod) if P and P[0] else [[] for _ in range(n)]
            M = Mc
            break
        else:
            raise EquivalenceNotFound(f"no splitting vector for block {bi} at p={p}, k={k}")
    return [[found[c][r] for c in range(n)] for r in range(n)]


def split_to_blocks(A, blocks, ctx: LocalContext, rng: random.Random, restarts: int = SPLIT_RESTARTS):
    """``V`` with ``V'AV = blocks`` (block diagonal, same order) mod p^k.

    A dead end part way through (a complement whose class cannot be checked at
    this precision) restarts the whole split with fresh random vectors.
    """
    last = None
    for _ in range(restarts):
        try:
            return _split_once(A, blocks, ctx, rng)
        except EquivalenceNotFound as exc:
            last = exc
    raise last


def find_equivalence_mod_pk(A, B, ctx: LocalContext, rng: random.Random | None = None) -> Transform:
    """``U`` with ``U'AU = B (mod p^k)`` and unit determinant."""
    rng = rng or random.Random(0)
    Am = A.matrix() if isinstance(A, QuadForm) else [list(r) for r in A]
    Bm = B.matrix() if isinstance(B, QuadForm) else [list(r) for r in B]
    mod = ctx.modulus
    if len(Am) != len(Bm):
        raise NotEquivalent("dimensions differ")
    BB, UB = block_diagonalize(Bm, ctx)
    la = _label_or_none(block_diagonalize(Am, ctx)[0].blocks, ctx.p, ctx.k)
    lb = _label_or_none(BB.blocks, ctx.p, ctx.k)
    if la is not None and lb is not None and la != lb:
        raise NotEquivalent(f"local symbols differ at p={ctx.p}")
    try:
        V = split_to_blocks(Am, list(BB.blocks), ctx, rng)
    except EquivalenceNotFound:
        n = len(Am)
        if n <= 3 and mod <= 3 ** 5:
            log.info("falling back to exhaustive equivalence search mod %d", mod)
            try:
                return brute_force_equivalence(Am, Bm, ctx)
            except (NotEquivalent, SearchSpaceTooLarge):
                pass
        raise
    U = matmul(V, inverse_mod(UB.matrix(), mod), mod)
    chk = congruence(Am, U, mod)
    if any((chk[i][j] - Bm[i][j]) % mod for i in range(len(U)) for j in range(len(U))):
        raise InvariantViolation("equivalence witness fails the conjugation check")
    if det_mod(U, ctx.p) % ctx.p == 0:
        raise InvariantViolation("equivalence witness is singular")
    return Transform.of(U, mod)


# ---------------------------------------------------------------- one recursion level


@dataclass
class LevelTrace:
    n: int
    det: int
    gcd: int
    t: int
    branch: str
    two_case: str
    child_det: int
    child_gcd: int
    max_scales: dict
    child_max_scales: dict

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "det": str(self.det),
            "gcd": str(self.gcd),
            "t": str(self.t),
            "branch": self.branch,
            "two_case": self.two_case,
            "child_det": str(self.child_det),
            "child_gcd": str(self.child_gcd),
            "max_scales": {str(p): v for p, v in sorted(self.max_scales.items())},
            "child_max_scales": {str(p): v for p, v in sorted(self.child_max_scales.items())},
        }


@dataclass
class Frame:
    symbol: GenusSymbol
    plan: TargetPlan
    local: dict = field(default_factory=dict)  # p -> (ctx, d_p, H_p)
    child: GenusSymbol | None = None


def _drop_trivial(comps: dict) -> dict:
    return {p: cs for p, cs in comps.items() if p == 2 or any(c.scale for c in cs)}


def build_frame(S: GenusSymbol, rng: random.Random) -> Frame:
    plan = find_t(S, rng)
    t = plan.t
    frame = Frame(S, plan)
    for p, rep in sorted(plan.reps.items()):
        ctx, mod = rep.ctx, rep.ctx.modulus
        Sp = local_form_p(S, p).matrix()
        X = rep.completion.matrix()
        C = congruence(Sp, X, mod)
        if (C[0][0] - t) % mod:
            raise InvariantViolation(f"x'Sx != t at p={p}")
        d = C[0][1:]
        H = [[(t * C[i + 1][j + 1] - d[i] * d[j]) % mod for j in range(S.n - 1)] for i in range(S.n - 1)]
        frame.local[p] = (ctx, d, H)
    frame.child = child_symbol(frame)
    return frame


def child_symbol(frame: Frame) -> GenusSymbol:
    S, t = frame.symbol, frame.plan.t
    st = 1 if t > 0 else -1
    sig = st * (S.sig - st)
    comps = {}
    for p, (ctx, _, H) in frame.local.items():
        B, _ = block_diagonalize(H, ctx)
        try:
            cs = constituents(B)
        except ScaleOverflow as exc:
            raise ChildInvalid(f"child form at p={p} is not resolved: {exc}") from None
        comps[p] = canonical_two(cs) if p == 2 else tuple(cs)
    child = GenusSymbol(S.n - 1, sig, _drop_trivial(comps))
    want = t ** (S.n - 2) * det_of_symbol(S)
    if det_of_symbol(child) != want:
        raise ChildInvalid(f"child determinant {det_of_symbol(child)} != t^(n-2) det = {want}")
    rep = validate_symbol(child)
    if not rep.valid:
        raise ChildInvalid(f"child symbol fails validation: {rep.violations}")
    return child


def _balanced(v: int, m: int) -> int:
    v %= m
    return v - m if v > m // 2 else v


def assemble_Q(frame: Frame, Ht, rng: random.Random) -> QuadForm:
    """Glue ``t``, ``d U_p`` and the child form into an n-dimensional form."""
    t, n = frame.plan.t, frame.symbol.n
    Hm = Ht.matrix() if isinstance(Ht, QuadForm) else Ht
    parts = []
    for p, (ctx, d, H) in frame.local.items():
        try:
            U = find_equivalence_mod_pk(H, [[v % ctx.modulus for v in row] for row in Hm], ctx, rng).matrix()
        except NotEquivalent as exc:
            raise ChildInvalid(f"child form is not locally equivalent to H at p={p}") from exc
        dU = [sum(d[i] * U[i][j] for i in range(n - 1)) % ctx.modulus for j in range(n - 1)]
        parts.append((dU, ctx.modulus))
    D = []
    for j in range(n - 1):
        v, m = crt((dU[j], mod) for dU, mod in parts)
        D.append(_balanced(v, m))
    rows = [[t] + D]
    for i in range(n - 1):
        row = [D[i]]
        for j in range(n - 1):
            num = Hm[i][j] + D[i] * D[j]
            if num % t:
                raise NonIntegralAssembly(f"entry ({i},{j}) is not divisible by t = {t}")
            row.append(num // t)
        rows.append(row)
    return QuadForm.of(rows)


def _max_scales(S: GenusSymbol) -> dict:
    return {p: max(c.scale for c in cs) for p, cs in S.components.items()}


def _generate(S: GenusSymbol, rng: random.Random, trace: list | None) -> QuadForm:
    Sr, g = reduce_symbol(S)
    if S.n == 1:
        Q = QuadForm.of([[det_of_symbol(S)]])
    else:
        frame = build_frame(Sr, rng)
        child_reduced, child_g = reduce_symbol(frame.child)
        if trace is not None:
            trace.append(
                LevelTrace(
                    Sr.n,
                    det_of_symbol(Sr),
                    g,
                    frame.plan.t,
                    frame.plan.branch,
                    frame.plan.cases[2].kind,
                    det_of_symbol(frame.child),
                    child_g,
                    _max_scales(Sr),
                    _max_scales(child_reduced),
                )
            )
        Ht = _generate(frame.child, rng, trace)
        Qr = assemble_Q(frame, Ht, rng)
        if det(Qr) != det_of_symbol(Sr) or signature(Qr) != Sr.sig:
            raise InvariantViolation("assembled form has the wrong determinant or signature")
        Q = QuadForm.of([[g * v for v in row] for row in Qr.rows])
    if det(Q) != det_of_symbol(S):
        raise InvariantViolation("generated determinant differs from the symbol")
    return Q


def qfgen_poly(S: GenusSymbol, rng: random.Random, retries: int = 16, trace: list | None = None) -> QuadForm:
    """A form in the genus ``S``; retried with fresh randomness on Las Vegas failures."""
    rep = validate_symbol(S)
    if not rep.valid:
        raise InvalidSymbol(f"symbol is not valid: {rep.violations}")
    S = normalize_symbol(S)
    last = None
    for attempt in range(max(1, retries)):
        level_trace = [] if trace is not None else None
        try:
            Q = _generate(S, rng, level_trace)
        except RetryableFailure as exc:
            last = exc
            log.info("generation attempt %d failed: %s", attempt, exc)
            continue
        if trace is not None:
            trace[:] = level_trace
        return Q
    raise GenerationFailed(f"no form after {retries} attempts; last error: {last}")


# ---------------------------------------------------------------- checks and reports


@dataclass
class MembershipReport:
    member: bool
    det_ok: bool
    sig_ok: bool
    mismatched_primes: list

    def to_json(self) -> dict:
        return {
            "member": self.member,
            "det_ok": self.det_ok,
            "sig_ok": self.sig_ok,
            "mismatched_primes": self.mismatched_primes,
        }


def verify_membership(Q, S: GenusSymbol, rng: random.Random | None = None) -> MembershipReport:
    Q = Q if isinstance(Q, QuadForm) else QuadForm.of(Q)
    d = det(Q)
    det_ok = d == det_of_symbol(S) and Q.n == S.n
    sig_ok = signature(Q) == S.sig if d else False
    if not (det_ok and sig_ok):
        return MembershipReport(False, det_ok, sig_ok, [])
    mine = genus_symbol(Q, hints={p: 1 for p in S.primes()})
    want = normalize_symbol(S)
    a, b = _drop_trivial(mine.components), _drop_trivial(want.components)
    bad = sorted(p for p in set(a) | set(b) if a.get(p) != b.get(p))
    if bad == [2]:
        ctx = LocalContext(2, ord_p(d, 2) + 3)
        try:
            find_equivalence_mod_pk(Q, local_form_p(S, 2), ctx, rng)
            log.warning("2-adic symbols differ but an isometry was found")
            bad = []
        except (EquivalenceNotFound, NotEquivalent):
            pass
    return MembershipReport(not bad, det_ok, sig_ok, bad)


def trace_blowup(levels: list) -> dict:
    """Determinant and scale bookkeeping across recursion levels.

    Hard checks land in ``problems``. The 2-adic change on levels that use
    an even block is only bounded above, so it is tallied in
    ``two_scale_deltas_even`` rather than asserted.
    """
    rows, problems, even_deltas = [], [], []
    for lv in levels:
        row = lv.to_json()
        rows.append(row)
        if lv.child_det != lv.t ** (lv.n - 2) * lv.det:
            problems.append(f"n={lv.n}: child det differs from t^(n-2) det")
        if lv.n < 4:
            continue
        for p, top in lv.max_scales.items():
            child_top = lv.child_max_scales.get(p, 0)
            if p != 2 and child_top != top:
                problems.append(f"n={lv.n}: max {p}-scale changed from {top} to {child_top}")
        delta = lv.child_max_scales.get(2, 0) - lv.max_scales.get(2, 0)
        row["two_scale_delta"] = delta
        if lv.two_case == "typeII":
            even_deltas.append(delta)
            if delta > 1:
                problems.append(f"n={lv.n}: 2-scale grew by {delta} on an even block")
        elif delta > 0:
            problems.append(f"n={lv.n}: 2-scale grew by {delta} without an even block")
        reduced_child = abs(lv.child_det) // lv.child_gcd ** (lv.n - 1)
        row["child_reduced_det"] = str(reduced_child)
        if reduced_child > 2 ** (lv.n - 2) * abs(lv.det):
            problems.append(f"n={lv.n}: reduced child det {reduced_child} exceeds 2^(n-2) det")
    return {"levels": rows, "problems": problems, "two_scale_deltas_even": even_deltas, "ok": not problems}
