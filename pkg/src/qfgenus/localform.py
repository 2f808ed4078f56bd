"""Block-diagonal forms that realize a symbol at a single prime, and their CRT gluing."""

from __future__ import annotations

import random

from .errors import InvalidSymbol
from .forms import QuadForm, diagonal, direct_sum
from .symbol import GenusSymbol, det_of_symbol
from .zmod import crt, find_nonresidue

T_PLUS = QuadForm.of([[2, 1], [1, 4]])
T_MINUS = QuadForm.of([[2, 1], [1, 2]])

# every listed two-dimensional odd form, grouped by (sign, oddity)
TABLE_DIM2_ALL = {
    (1, 0): ((1, 7), (3, 5)),
    (1, 2): ((1, 1), (5, 5)),
    (1, 6): ((3, 3), (7, 7)),
    (-1, 2): ((3, 7),),
    (-1, 4): ((1, 3), (5, 7)),
    (-1, 6): ((1, 5),),
}
TABLE_DIM2 = {key: forms[0] for key, forms in TABLE_DIM2_ALL.items()}

TABLE_DIM3 = {
    (1, 1): (1, 1, 7),
    (1, 3): (1, 1, 1),
    (1, 5): (7, 7, 7),
    (1, 7): (1, 7, 7),
    (-1, 1): (3, 3, 3),
    (-1, 3): (3, 3, 5),
    (-1, 5): (1, 1, 3),
    (-1, 7): (1, 1, 5),
}


def odd_units(dim: int, sign: int, oddity: int) -> tuple[int, ...]:
    """Diagonal of odd units with the given dimension, sign and oddity."""
    if dim == 1:
        if (1 if oddity % 8 in (1, 7) else -1) != sign or oddity % 2 == 0:
            raise InvalidSymbol(f"no unit of oddity {oddity} has sign {sign}")
        return (oddity % 8,)
    if dim == 2:
        try:
            return TABLE_DIM2[(sign, oddity % 8)]
        except KeyError:
            raise InvalidSymbol(f"no odd binary form has sign {sign} and oddity {oddity}") from None
    if (oddity - dim) % 2:
        raise InvalidSymbol(f"oddity {oddity} has the wrong parity for dimension {dim}")
    return (1,) * (dim - 3) + TABLE_DIM3[(sign, (oddity - (dim - 3)) % 8)]


def even_blocks(dim: int, sign: int) -> list[QuadForm]:
    if dim % 2:
        raise InvalidSymbol("type II constituent with odd dimension")
    blocks = [T_PLUS] * (dim // 2)
    if sign == -1:
        blocks[-1] = T_MINUS
    return blocks


def _scaled(Q: QuadForm, f: int) -> QuadForm:
    return QuadForm.of([[f * v for v in r] for r in Q.rows])


def local_form_p(S: GenusSymbol, p: int, rng: random.Random | None = None) -> QuadForm:
    if p != 2 and p not in S.components:
        return diagonal([det_of_symbol(S)] + [1] * (S.n - 1))
    parts = []
    if p == 2:
        for c in S.components[2]:
            f = 1 << c.scale
            if c.type == "II":
                parts.extend(_scaled(b, f) for b in even_blocks(c.dim, c.sign))
            else:
                parts.append(diagonal([f * u for u in odd_units(c.dim, c.sign, c.oddity)]))
        return direct_sum(parts)
    tau = None
    for c in S.components[p]:
        f = p ** c.scale
        units = [1] * c.dim
        if c.sign == -1:
            tau = tau or find_nonresidue(p, rng)
            units[-1] = tau
        parts.append(diagonal([f * u for u in units]))
    return direct_sum(parts)


def local_form_q(S: GenusSymbol, q: int, factorization: dict[int, int], rng=None) -> QuadForm:
    """Entrywise CRT of the local forms at each prime power dividing ``q``."""
    prod = 1
    for p, e in factorization.items():
        prod *= p ** e
    if prod != q:
        from .errors import BadFactorization

        raise BadFactorization(f"factorization multiplies to {prod}, not {q}")
    locals_ = {p: local_form_p(S, p, rng).rows for p, e in factorization.items() if e > 0}
    n = S.n
    rows = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            rows[i][j], _ = crt((locals_[p][i][j], p ** e) for p, e in factorization.items() if e > 0)
    return QuadForm.of(rows)
