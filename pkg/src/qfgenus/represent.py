"""Primitive representations of an integer by block-diagonal local forms.

Only the shapes that the target construction produces are handled: a single
scaled unit, two units at scales of equal parity, one 2x2 even block, four
odd 2-adic entries, and unimodular diagonals at a prime outside the
determinant. Coordinates that a case does not touch are zero.
"""

from __future__ import annotations

import random
from collections.abc import Sequence
from dataclasses import dataclass, field

from .errors import CaseMismatch, NotPrimitive, NotRepresentable
from .forms import QuadForm, Transform, det_mod
from .oracle import dim4_solution
from .zmod import INF, LocalContext, _unit_root, inverse, legendre, ord_cop


@dataclass(frozen=True)
class LocalBlock:
    """One block of a block-diagonal local form.

    ``kind`` is ``"I"`` for a diagonal entry ``p^scale * unit`` and ``"II"``
    for a 2x2 even block ``2^scale * [[2a, b], [b, 2c]]``.
    """

    kind: str
    index: int
    scale: int
    unit: int = 0
    abc: tuple = ()


@dataclass(frozen=True)
class Case:
    kind: str  # first-entry | two-entry | typeII | four-entry | unimodular
    indices: tuple[int, ...]

    def to_json(self) -> dict:
        return {"kind": self.kind, "indices": list(self.indices)}


@dataclass(frozen=True)
class LocalRepresentation:
    ctx: LocalContext
    x: tuple[int, ...]
    completion: Transform
    t: int
    case: Case = field(default=None)


def local_blocks(S, p: int) -> list[LocalBlock]:
    """Read the blocks of a block-diagonal matrix (diagonal for odd ``p``)."""
    M = S.matrix() if isinstance(S, QuadForm) else [list(r) for r in S]
    n = len(M)
    out, i = [], 0
    while i < n:
        if p == 2 and i + 1 < n and M[i][i + 1]:
            e, b = ord_cop(M[i][i + 1], 2)
            out.append(LocalBlock("II", i, e, abc=(M[i][i] >> (e + 1), b, M[i + 1][i + 1] >> (e + 1))))
            i += 2
            continue
        e, u = ord_cop(M[i][i], p)
        out.append(LocalBlock("I", i, e, u))
        i += 1
    return out


def _smallest_root(x: int, p: int, m: int) -> int:
    mod = p ** m
    roots = {x % mod, -x % mod}
    if p == 2 and m >= 2:
        half = mod >> 1
        roots |= {(x + half) % mod, (-x + half) % mod}
    return min(roots)


def represent_unit_scaled(d: int, t: int, ctx: LocalContext) -> int:
    """Some ``x`` with ``d * x^2 = t (mod p^k)``, where ``d = p^i * u``."""
    p, k = ctx.p, ctx.k
    i, u = ord_cop(d, p)
    t %= ctx.modulus
    e, v = ord_cop(t, p)
    if i is INF or e is INF or e < i or (e - i) % 2:
        raise NotRepresentable(f"{t} is not {d} times a square mod {p}^{k}")
    m = k - e
    if m <= 0:
        return 0
    w = v * inverse(u, p ** m) % p ** m
    if p == 2:
        if w % (1 << min(m, 3)) != 1:
            raise NotRepresentable(f"{t} is not {d} times a square mod 2^{k}")
    elif legendre(w, p) != 1:
        raise NotRepresentable(f"{t} is not {d} times a square mod {p}^{k}")
    y = _smallest_root(_unit_root(w, p, m), p, m)
    x = y * p ** ((e - i) // 2)
    assert (d * x * x - t) % ctx.modulus == 0
    return x % ctx.modulus


def two_nonresidue_split(t: int, p: int, tau1: int = 1, tau2: int = 1) -> tuple[int, int]:
    """``(y1, y2)`` with ``tau1*y1^2 + tau2*y2^2 = t (mod p)`` and ``y2`` nonzero.

    Scans ``y1 = 0, 1, 2, ...``; for the unit ``t`` such a pair always exists.
    """
    if p == 2:
        raise ValueError("odd primes only")
    inv2 = inverse(tau2, p)
    for y1 in range(p):
        rest = (t - tau1 * y1 * y1) * inv2 % p
        if rest and legendre(rest, p) == 1:
            return y1, _smallest_root(_unit_root(rest, p, 1), p, 1)
    raise NotRepresentable(f"{t} is not a value of {tau1}x^2 + {tau2}y^2 with y nonzero mod {p}")


def represent_dim2_oddp(tau1: int, i: int, tau2: int, t: int, ctx: LocalContext) -> tuple[int, int]:
    """Primitive ``(x1, x2)`` with ``tau1*x1^2 + p^i*tau2*x2^2 = p^i*t (mod p^k)``.

    ``i`` is even and ``t`` a unit. ``x2`` is always a unit unless ``i == 0``
    and ``t`` matches ``tau1``.
    """
    p, k = ctx.p, ctx.k
    if p == 2 or i % 2 or t % p == 0:
        raise NotRepresentable("needs an odd prime, an even scale gap and a unit target")
    lt, l1, l2 = legendre(t, p), legendre(tau1, p), legendre(tau2, p)
    m = k - i
    target = p ** i * t
    if lt == l2:
        x1 = 0
        x2 = represent_unit_scaled(tau2, t, LocalContext(p, m)) if m > 0 else 1
    elif lt != l1:
        y1, _ = two_nonresidue_split(t, p, tau1, tau2)
        x1 = p ** (i // 2) * y1
        rest = (t - tau1 * y1 * y1) % p ** m
        x2 = represent_unit_scaled(tau2, rest, LocalContext(p, m))
    elif i == 0:
        return represent_unit_scaled(tau1, t, ctx), 0
    else:
        raise NotRepresentable(f"{t} matches the square class of the scale-0 entry")
    x1 %= ctx.modulus
    x2 %= ctx.modulus
    assert (tau1 * x1 * x1 + p ** i * tau2 * x2 * x2 - target) % ctx.modulus == 0
    return x1, x2


def _lift_bitwise(f, x: int, other: int, start: int, m: int, var: int) -> int:
    """Fix bits ``start..m-1`` of one variable of ``f`` (odd partial derivative)."""
    for j in range(start, m):
        args = (x, other) if var == 0 else (other, x)
        if f(*args) % (1 << (j + 1)):
            x += 1 << j
            args = (x, other) if var == 0 else (other, x)
        assert f(*args) % (1 << (j + 1)) == 0
    return x


def represent_typeII(block: Sequence[Sequence[int]], t: int, ctx: LocalContext) -> tuple[int, int]:
    """Primitive ``(x1, x2)`` with value ``t`` in a 2x2 even block ``2^l [[2a,b],[b,2c]]``."""
    if ctx.p != 2:
        raise NotRepresentable("even blocks only occur at p = 2")
    (A, B), (_, C) = block
    ell, b = ord_cop(B, 2)
    a, c = A >> (ell + 1), C >> (ell + 1)
    e, _ = ord_cop(t % ctx.modulus, 2)
    if e != ell + 1:
        raise NotRepresentable(f"2-order of {t} must be {ell + 1}")
    m = ctx.k - ell - 1
    tt = (t >> (ell + 1)) % (1 << m)

    def f(x, y):
        return a * x * x + b * x * y + c * y * y - tt

    start = min(3, m)
    for x in range(8):
        for y in range(8):
            if (x | y) & 1 == 0 or f(x, y) % (1 << start):
                continue
            if y & 1:
                x = _lift_bitwise(f, x, y, start, m, 0)
            else:
                y = _lift_bitwise(f, y, x, start, m, 1)
            mod = ctx.modulus
            x, y = x % mod, y % mod
            assert (A * x * x + 2 * B * x * y + C * y * y - t) % mod == 0
            return x, y
    raise NotRepresentable(f"{t} has no primitive representation by the even block")


def represent_dim4_mod2k(entries: Sequence[int], t: int, ctx: LocalContext) -> tuple[int, int, int, int]:
    """Represent ``2^(i4) * t`` by four odd-unit entries ``2^(i_j) tau_j`` (ascending scales).

    ``x4`` is odd and ``x_j = 2^ceil((i4 - i_j)/2) * y_j`` for the others, so
    every term has 2-order at least ``i4``.
    """
    if ctx.p != 2:
        raise NotRepresentable("four-entry case is 2-adic")
    sc = [ord_cop(d, 2) for d in entries]
    scales = [s.ord for s in sc]
    taus = [s.cop for s in sc]
    i4 = scales[3]
    if scales != sorted(scales) or t % 2 == 0:
        raise NotRepresentable("entries must have ascending scales and t must be odd")
    kk = max(ctx.k, i4 + 4)  # the table is keyed mod 16; extra bits are harmless
    par = tuple((i4 - s) % 2 for s in scales[:3])
    sol = dim4_solution(tuple(u % 16 for u in taus), par, t % 16)
    if sol is None:
        raise NotRepresentable("mod-16 table has no entry")
    y1, y2, y3, x4 = sol
    ys = (y1, y2, y3)
    m = kk - i4
    rest = sum((taus[j] << par[j]) * ys[j] * ys[j] for j in range(3))
    w = (t - rest) * inverse(taus[3], 1 << m) % (1 << m)
    assert w % 8 == 1
    x4 = _unit_root(w, 2, m)
    xs = [ys[j] << ((i4 - scales[j] + 1) // 2) for j in range(3)] + [x4]
    wide = 1 << kk
    total = sum(entries[j] * xs[j] * xs[j] for j in range(4))
    assert (total - (t << i4)) % wide == 0
    for j in range(4):
        d = entries[j] * xs[j] * xs[j] % wide
        assert d == 0 or ord_cop(d, 2).ord >= i4
    return tuple(v % ctx.modulus for v in xs)


def represent_unimodular(units: Sequence[int], t: int, ctx: LocalContext, rng: random.Random | None = None):
    """Primitive representation of ``t`` by a diagonal of units at an odd prime.

    The last coordinate is solved by a square root; earlier coordinates are
    scanned (then sampled) until the remaining value is a nonzero square.
    Each coordinate is tried as the solved one, since some values force the
    last coordinate to vanish mod p.
    """
    p, mod = ctx.p, ctx.modulus
    n = len(units)
    if p == 2 or n < 2:
        raise NotRepresentable("needs an odd prime and at least two coordinates")
    rng = rng or random.Random(p)

    def attempt(solved, head):
        others = [j for j in range(n) if j != solved]
        rest = (t - sum(units[j] * v * v for j, v in zip(others, head))) % mod
        if rest % p == 0:
            return None
        w = rest * inverse(units[solved], mod) % mod
        if legendre(w, p) != 1:
            return None
        x = [0] * n
        for j, v in zip(others, head):
            x[j] = v % mod
        x[solved] = _smallest_root(_unit_root(w, p, ctx.k), p, ctx.k)
        return tuple(x)

    free = n - 1
    span = min(p, 64)
    for solved in reversed(range(n)):
        for a in range(span):
            for b in range(span if free > 1 else 1):
                head = [0] * free
                head[0] = a
                if free > 1:
                    head[1] = b
                out = attempt(solved, head)
                if out is not None:
                    return out
    for _ in range(4096):
        out = attempt(n - 1, [rng.randrange(p) for _ in range(free)])
        if out is not None:
            return out
    raise NotRepresentable(f"{t} not found as a value of the unimodular form mod {p}")


def _complete(x: Sequence[int], pivot: int, ctx: LocalContext) -> Transform:
    """``[x | A]`` of determinant 1: the pivot coordinate of ``x`` is a unit.

    Columns after the first are standard basis vectors skipping the pivot,
    with the first of them scaled so that the determinant is exactly 1.
    """
    n, mod = len(x), ctx.modulus
    if x[pivot] % ctx.p == 0:
        raise NotPrimitive("pivot coordinate is not a unit")
    others = [j for j in range(n) if j != pivot]
    cols = [[v % mod for v in x]]
    for j in others:
        cols.append([int(i == j) for i in range(n)])
    rows = [[cols[c][r] for c in range(n)] for r in range(n)]
    d = det_mod(rows, mod)
    fix = inverse(d, mod)
    if n > 1:
        for r in range(n):
            rows[r][1] = rows[r][1] * fix % mod
    return Transform.of(rows, mod)


def build_local_representation(S, t: int, ctx: LocalContext, case: Case, rng=None) -> LocalRepresentation:
    """Primitive ``x`` with ``x'Sx = t (mod p^k)`` plus a completion ``[x | A]``."""
    M = S.matrix() if isinstance(S, QuadForm) else [list(r) for r in S]
    n, p, mod = len(M), ctx.p, ctx.modulus
    x = [0] * n
    idx = case.indices
    try:
        if case.kind == "first-entry":
            (j,) = idx
            x[j] = represent_unit_scaled(M[j][j], t, ctx)
            pivot = j
        elif case.kind == "two-entry":
            a, b = idx
            ia, ua = ord_cop(M[a][a], p)
            ib, ub = ord_cop(M[b][b], p)
            e, v = ord_cop(t % mod, p)
            if e != ib:
                raise CaseMismatch("two-entry case needs ord(t) equal to the larger scale")
            sub = LocalContext(p, ctx.k - ia)
            x1, x2 = represent_dim2_oddp(ua, ib - ia, ub, v, sub)
            x[a], x[b] = x1, x2
            pivot = b if x2 % p else a
        elif case.kind == "typeII":
            (j,) = idx
            block = [[M[j][j], M[j][j + 1]], [M[j + 1][j], M[j + 1][j + 1]]]
            x[j], x[j + 1] = represent_typeII(block, t, ctx)
            pivot = j if x[j] % 2 else j + 1
        elif case.kind == "four-entry":
            e, v = ord_cop(t % mod, 2)
            xs = represent_dim4_mod2k([M[j][j] for j in idx], v, ctx)
            if ord_cop(M[idx[3]][idx[3]], 2).ord != e:
                raise CaseMismatch("four-entry case needs ord(t) equal to the fourth scale")
            for j, v in zip(idx, xs):
                x[j] = v
            pivot = idx[3]
        elif case.kind == "unimodular":
            xs = represent_unimodular([M[j][j] for j in idx], t, ctx, rng)
            for j, v in zip(idx, xs):
                x[j] = v
            pivot = next(j for j in idx if x[j] % p)
        else:
            raise CaseMismatch(f"unknown case {case.kind!r}")
    except NotRepresentable as exc:
        raise CaseMismatch(f"case {case.kind} at p={p} does not represent {t}: {exc}") from None
    val = sum(M[i][j] * x[i] * x[j] for i in range(n) for j in range(n) if x[i] and x[j])
    if (val - t) % mod:
        raise CaseMismatch(f"representation check failed at p={p}")
    comp = _complete(x, pivot, ctx)
    return LocalRepresentation(ctx, tuple(v % mod for v in x), comp, t, case)
