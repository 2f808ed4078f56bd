"""Symmetric integer matrices, congruence transforms and rational diagonalization.

A modulus of ``0`` always means exact integer arithmetic.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction

from .errors import DimensionMismatch, NotPrimitive, SchemaError, SingularForm
from .zmod import LocalContext, inverse

Matrix = list[list[int]]


@dataclass(frozen=True)
class QuadForm:
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        n = len(self.rows)
        if n == 0:
            raise SchemaError("a form needs dimension at least 1")
        for i, r in enumerate(self.rows):
            if len(r) != n:
                raise SchemaError(f"row {i} has length {len(r)}, expected {n}")
        for i in range(n):
            for j in range(i + 1, n):
                if self.rows[i][j] != self.rows[j][i]:
                    raise SchemaError(f"matrix is not symmetric at ({i},{j})")

    @classmethod
    def of(cls, rows: Sequence[Sequence[int]]) -> QuadForm:
        return cls(tuple(tuple(int(v) for v in r) for r in rows))

    @property
    def n(self) -> int:
        return len(self.rows)

    def matrix(self) -> Matrix:
        return [list(r) for r in self.rows]

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]


@dataclass(frozen=True)
class Transform:
    rows: tuple[tuple[int, ...], ...]
    modulus: int = 0

    @classmethod
    def of(cls, rows: Sequence[Sequence[int]], modulus: int = 0) -> Transform:
        if modulus:
            rows = [[v % modulus for v in r] for r in rows]
        return cls(tuple(tuple(int(v) for v in r) for r in rows), modulus)

    @property
    def n(self) -> int:
        return len(self.rows)

    def matrix(self) -> Matrix:
        return [list(r) for r in self.rows]


@dataclass(frozen=True)
class RationalDiag:
    diagonal: tuple[Fraction, ...]
    transform: tuple[tuple[Fraction, ...], ...]

    @property
    def positives(self) -> int:
        return sum(1 for q in self.diagonal if q > 0)


def _rows(M) -> Matrix:
    if isinstance(M, (QuadForm, Transform)):
        return M.matrix()
    return [list(r) for r in M]


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def transpose(A: Matrix) -> Matrix:
    return [list(c) for c in zip(*A)]


def matmul(A: Matrix, B: Matrix, m: int = 0) -> Matrix:
    Bt = list(zip(*B))
    if m:
        return [[sum(a * b for a, b in zip(r, c)) % m for c in Bt] for r in A]
    return [[sum(a * b for a, b in zip(r, c)) for c in Bt] for r in A]


def reduce_mod(A: Matrix, m: int) -> Matrix:
    return [[v % m for v in r] for r in A] if m else [list(r) for r in A]


def direct_sum(parts) -> QuadForm:
    mats = [_rows(p) for p in parts]
    n = sum(len(m) for m in mats)
    out = [[0] * n for _ in range(n)]
    off = 0
    for m in mats:
        for i, r in enumerate(m):
            for j, v in enumerate(r):
                out[off + i][off + j] = v
        off += len(m)
    return QuadForm.of(out)


def diagonal(values: Sequence[int]) -> QuadForm:
    return QuadForm.of([[v if i == j else 0 for j in range(len(values))] for i, v in enumerate(values)])


def congruence(Q: Matrix, U: Matrix, m: int = 0) -> Matrix:
    """``U' Q U`` as a plain matrix, reduced mod ``m`` when ``m > 0``."""
    return matmul(matmul(transpose(U), Q, m), U, m)


def conjugate(Q, U, q: int = 0) -> QuadForm:
    Qm, Um = _rows(Q), _rows(U)
    if len(Qm) != len(Um):
        raise DimensionMismatch(f"form has dimension {len(Qm)}, transform {len(Um)}")
    return QuadForm.of(congruence(Qm, Um, q))


def det(M) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    A = _rows(M)
    n = len(A)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for i in range(k + 1, n):
                if A[i][k] != 0:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = A[k][k]
        for i in range(k + 1, n):
            aik = A[i][k]
            row_i, row_k = A[i], A[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
        prev = akk
    return sign * A[n - 1][n - 1] if n else 1


def det_mod(M, m: int) -> int:
    return det(M) % m


def inverse_mod(M, m: int) -> Matrix:
    """Inverse of a matrix whose determinant is a unit mod ``m``.

    ``m`` must be a prime power so that a unit pivot exists in every column.
    """
    A = _rows(M)
    n = len(A)
    aug = [[v % m for v in A[i]] + [int(i == j) for j in range(n)] for i in range(n)]
    for c in range(n):
        piv = None
        for r in range(c, n):
            try:
                inv = inverse(aug[r][c], m)
            except ValueError:
                continue
            piv = r
            break
        if piv is None:
            raise ValueError("matrix is not invertible modulo m")
        aug[c], aug[piv] = aug[piv], aug[c]
        row = [v * inv % m for v in aug[c]]
        aug[c] = row
        for r in range(n):
            if r != c and aug[r][c]:
                f = aug[r][c]
                aug[r] = [(a - f * b) % m for a, b in zip(aug[r], row)]
    return [r[n:] for r in aug]


def extend_primitive(x: Sequence[int], ctx: LocalContext) -> Transform:
    """Square matrix with first column ``x`` and unit determinant mod p^k.

    The remaining columns are the standard basis vectors except the one at a
    coordinate where ``x`` is a unit, so the determinant is ``+-x_i``.
    """
    n = len(x)
    piv = next((i for i, v in enumerate(x) if v % ctx.p), None)
    if piv is None:
        raise NotPrimitive("vector has no unit coordinate")
    cols = [[v % ctx.modulus for v in x]]
    for j in range(n):
        if j != piv:
            cols.append([int(i == j) for i in range(n)])
    return Transform.of(transpose(cols), ctx.modulus)


def rational_diagonalize(Q, with_transform: bool = True) -> RationalDiag:
    """Congruence-diagonalize over the rationals; positive entries first."""
    A = [[Fraction(v) for v in r] for r in _rows(Q)]
    n = len(A)
    T = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)] if with_transform else None

    def add_to(dst, src):
        # basis change e_dst <- e_dst + e_src
        for r in range(n):
            A[r][dst] += A[r][src]
        for c in range(n):
            A[dst][c] += A[src][c]
        if T is not None:
            for r in range(n):
                T[r][dst] += T[r][src]

    def swap(i, j):
        A[i], A[j] = A[j], A[i]
        for r in A:
            r[i], r[j] = r[j], r[i]
        if T is not None:
            for r in T:
                r[i], r[j] = r[j], r[i]

    for c in range(n):
        if A[c][c] == 0:
            i = next((i for i in range(c + 1, n) if A[i][i] != 0), None)
            if i is not None:
                swap(c, i)
            else:
                i = next((i for i in range(c + 1, n) if A[c][i] != 0), None)
                if i is None:
                    raise SingularForm("form is singular")
                add_to(c, i)
        piv = A[c][c]
        for r in range(c + 1, n):
            f = A[c][r] / piv
            if not f:
                continue
            for j in range(n):
                A[r][j] -= f * A[c][j]
            for j in range(n):
                A[j][r] -= f * A[j][c]
            if T is not None:
                for j in range(n):
                    T[j][r] -= f * T[j][c]
    diag = [A[i][i] for i in range(n)]
    order = sorted(range(n), key=lambda i: (diag[i] < 0, i))
    diag = [diag[i] for i in order]
    if T is None:
        return RationalDiag(tuple(diag), ())
    T = [[row[i] for i in order] for row in T]
    return RationalDiag(tuple(diag), tuple(tuple(r) for r in T))


def signature(Q) -> int:
    d = rational_diagonalize(Q, with_transform=False)
    return 2 * d.positives - len(d.diagonal)


def form_to_json(Q) -> dict:
    rows = _rows(Q)
    return {"n": len(rows), "rows": [[str(v) for v in r] for r in rows]}


def form_from_json(obj) -> QuadForm:
    if not isinstance(obj, dict) or "rows" not in obj:
        raise SchemaError("matrix JSON needs a 'rows' field")
    try:
        rows = [[int(v) for v in r] for r in obj["rows"]]
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"matrix entries must be integers: {exc}") from None
    if "n" in obj and int(obj["n"]) != len(rows):
        raise SchemaError(f"field n={obj['n']} disagrees with {len(rows)} rows")
    return QuadForm.of(rows)
