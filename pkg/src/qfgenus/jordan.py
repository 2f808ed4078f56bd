"""Block diagonalization over Z/p^kZ and extraction of Jordan constituents.

The elimination always pivots on an entry of least p-order, preferring
diagonal entries and breaking ties by (row, col). At p = 2, an off-diagonal
pivot produces a 2x2 type II block, and its rows and columns are cleared by
Cramer's rule. If that scale already holds odd diagonal entries, the block
is merged back into them so that every scale ends up either purely odd
(diagonal) or purely even (type II blocks). This is the shape used for
oddities.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ScaleOverflow
from .forms import Matrix, QuadForm, Transform, det_mod, identity
from .zmod import INF, LocalContext, inverse, legendre, ord_cop


@dataclass(frozen=True)
class TypeI:
    scale: int
    unit: int  # entry is p**scale * unit; unit == 0 marks a zero sentinel

    size = 1


@dataclass(frozen=True)
class TypeII:
    scale: int
    a: int
    b: int
    c: int  # block [[2^(l+1) a, 2^l b], [2^l b, 2^(l+1) c]]

    size = 2

    @property
    def plus(self) -> bool:
        """True for the T+ class (det = 7 mod 8), False for T- (det = 3)."""
        return (self.a * self.c) % 2 == 0


Block = TypeI | TypeII


@dataclass(frozen=True)
class BlockDiagForm:
    p: int
    k: int
    blocks: tuple[Block, ...]

    @property
    def n(self) -> int:
        return sum(b.size for b in self.blocks)

    def matrix(self) -> Matrix:
        m = self.p ** self.k
        n = self.n
        M = [[0] * n for _ in range(n)]
        i = 0
        for b in self.blocks:
            if isinstance(b, TypeI):
                M[i][i] = (self.p ** b.scale * b.unit) % m if b.scale < self.k else 0
                i += 1
            else:
                s = 1 << b.scale
                M[i][i] = (2 * s * b.a) % m
                M[i + 1][i + 1] = (2 * s * b.c) % m
                M[i][i + 1] = M[i + 1][i] = (s * b.b) % m
                i += 2
        return M


@dataclass(frozen=True)
class JordanConstituent:
    scale: int
    dim: int
    sign: int
    type: str | None = None  # "I" or "II" at p = 2
    oddity: int | None = None

    def to_json(self) -> dict:
        out = {"scale": self.scale, "dim": self.dim, "sign": self.sign}
        if self.type is not None:
            out["type"] = self.type
            out["oddity"] = self.oddity
        return out


class OpCounter:
    """Counts ring multiplications performed during elimination."""

    def __init__(self):
        self.mults = 0


def _order(v: int, p: int, k: int):
    if v == 0:
        return INF
    e = ord_cop(v, p).ord
    return e if e < k else INF


def block_diagonalize(Q, ctx: LocalContext, counter: OpCounter | None = None):
    """Return ``(BlockDiagForm, Transform)`` with ``U'QU == blocks (mod p^k)``."""
    p, k, m = ctx.p, ctx.k, ctx.modulus
    rows = Q.matrix() if isinstance(Q, QuadForm) else [list(r) for r in Q]
    n = len(rows)
    M = [[v % m for v in r] for r in rows]
    U = identity(n)
    blocks: list[Block] = []
    cnt = counter or OpCounter()

    def swap(i, j):
        if i == j:
            return
        M[i], M[j] = M[j], M[i]
        for r in M:
            r[i], r[j] = r[j], r[i]
        for r in U:
            r[i], r[j] = r[j], r[i]

    def add_to(dst, src):
        # basis vector dst <- dst + src
        for r in range(n):
            M[r][dst] = (M[r][dst] + M[r][src]) % m
        for c in range(n):
            M[dst][c] = (M[dst][c] + M[src][c]) % m
        for r in range(n):
            U[r][dst] = (U[r][dst] + U[r][src]) % m
        cnt.mults += 3 * n

    def pivot_diag(s):
        e, u = ord_cop(M[s][s], p)
        uinv = inverse(u, m)
        pe = p ** e
        row_s = M[s]
        fs = {}
        for r in range(s + 1, n):
            v = row_s[r]
            if v:
                fs[r] = (v // pe) * uinv % m
        for r, f in fs.items():
            row_r = M[r]
            for j in range(s + 1, n):
                if row_s[j]:
                    row_r[j] = (row_r[j] - f * row_s[j]) % m
            for urow in U:
                urow[r] = (urow[r] - f * urow[s]) % m
            cnt.mults += 2 * n
        for r in fs:
            M[r][s] = M[s][r] = 0
        blocks.append(TypeI(e, u % p ** (k - e)))

    def pivot_pair(s, ell):
        a2, b, c2 = M[s][s], M[s][s + 1], M[s + 1][s + 1]
        D = a2 * c2 - b * b
        scale2 = 1 << (2 * ell)
        Dinv = inverse(D // scale2, m)
        coeffs = {}
        for r in range(s + 2, n):
            v1, v2 = M[s][r], M[s + 1][r]
            if v1 or v2:
                al = ((c2 * v1 - b * v2) // scale2) * Dinv % m
                be = ((a2 * v2 - b * v1) // scale2) * Dinv % m
                coeffs[r] = (al, be)
        row1, row2 = M[s], M[s + 1]
        for r, (al, be) in coeffs.items():
            row_r = M[r]
            for j in range(s + 2, n):
                row_r[j] = (row_r[j] - al * row1[j] - be * row2[j]) % m
            for urow in U:
                urow[r] = (urow[r] - al * urow[s] - be * urow[s + 1]) % m
            cnt.mults += 4 * n
        for r in coeffs:
            M[r][s] = M[s][r] = M[r][s + 1] = M[s + 1][r] = 0
        sh = 1 << ell
        mod_rest = 1 << (k - ell - 1)
        blocks.append(TypeII(ell, (a2 // (2 * sh)) % mod_rest, (b // sh) % (2 * mod_rest), (c2 // (2 * sh)) % mod_rest))

    s = 0
    forced: int | None = None
    while s < n:
        cnt.mults += (n - s) ** 2
        if forced is not None:
            swap(s, forced)
            forced = None
            pivot_diag(s)
            s += 1
            continue
        best = None  # (order, is_offdiag, i, j)
        for i in range(s, n):
            row = M[i]
            for j in range(i, n):
                v = row[j]
                if not v:
                    continue
                o = _order(v, p, k)
                if o is INF:
                    continue
                key = (o, i != j, i, j)
                if best is None or key < best:
                    best = key
            if best is not None and best[0] == 0 and not best[1]:
                break
        if best is None:
            for _ in range(s, n):
                blocks.append(TypeI(k, 0))
            break
        o, off, i, j = best
        if not off:
            swap(s, i)
            pivot_diag(s)
            s += 1
            continue
        if p != 2:
            add_to(i, j)
            swap(s, i)
            pivot_diag(s)
            s += 1
            continue
        prev = blocks[-1] if blocks else None
        if isinstance(prev, TypeI) and prev.scale == o:
            # Merge with the odd entry just split off at this scale.
            blocks.pop()
            s -= 1
            add_to(i, s)
            forced = i
            continue
        swap(s, i)
        swap(s + 1, j)
        pivot_pair(s, o)
        s += 2
    _unit_determinant(U, blocks, p, k, m)
    return BlockDiagForm(p, k, tuple(blocks)), Transform.of(U, m)


def _unit_determinant(U, blocks, p: int, k: int, m: int) -> None:
    """Rescale the first basis vector so that det U = 1; the first block keeps its class."""
    d = det_mod(U, m)
    if d == 1 % m:
        return
    w = inverse(d, m)
    for row in U:
        row[0] = row[0] * w % m
    b = blocks[0]
    if isinstance(b, TypeI):
        blocks[0] = TypeI(b.scale, b.unit * w * w % p ** (k - b.scale) if b.scale < k else 0)
    else:
        mod_rest = 1 << (k - b.scale - 1)
        blocks[0] = TypeII(b.scale, b.a * w * w % mod_rest, b.b * w % (2 * mod_rest), b.c)


def constituents(B: BlockDiagForm) -> list[JordanConstituent]:
    p = B.p
    groups: dict[int, list[Block]] = {}
    for b in B.blocks:
        if b.scale >= B.k or (p == 2 and b.scale > B.k - 3):
            raise ScaleOverflow(f"block at scale {b.scale} is not resolved mod {p}^{B.k}")
        groups.setdefault(b.scale, []).append(b)
    out = []
    for scale in sorted(groups):
        bs = groups[scale]
        dim = sum(b.size for b in bs)
        if p != 2:
            prod = 1
            for b in bs:
                prod = prod * b.unit % p
            out.append(JordanConstituent(scale, dim, legendre(prod, p)))
            continue
        prod = 1
        odd = 0
        typ = "II"
        for b in bs:
            if isinstance(b, TypeI):
                prod = prod * b.unit % 8
                odd += b.unit
                typ = "I"
            else:
                prod = prod * (4 * b.a * b.c - b.b * b.b) % 8
        if typ == "I" and any(isinstance(b, TypeII) for b in bs):
            # Cannot happen: mixed scales are merged during elimination.
            raise AssertionError("mixed type I / type II scale")
        out.append(
            JordanConstituent(scale, dim, legendre(prod, 2), typ, odd % 8 if typ == "I" else 0)
        )
    return out
