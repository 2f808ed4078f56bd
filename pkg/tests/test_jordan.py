import random

import pytest
from conftest import random_form, random_unimodular

from qfgenus.errors import ScaleOverflow
from qfgenus.forms import conjugate, det, diagonal
from qfgenus.jordan import OpCounter, TypeI, TypeII, block_diagonalize, constituents
from qfgenus.localform import T_PLUS
from qfgenus.symbol import p_symbol
from qfgenus.zmod import LocalContext


def _check(Q, ctx):
    B, U = block_diagonalize(Q, ctx)
    m = ctx.modulus
    assert det(U.matrix()) % ctx.modulus == 1 % ctx.modulus
    assert conjugate(Q, U.matrix(), m).rows == tuple(tuple(r) for r in B.matrix())
    return B


def test_examples():
    B = _check([[0, 1], [1, 0]], LocalContext(2, 3))
    assert B.blocks == (TypeII(0, 0, 1, 0),)
    B = _check([[0, 1], [1, 0]], LocalContext(3, 1))
    assert all(isinstance(b, TypeI) and b.scale == 0 for b in B.blocks)
    u = [b.unit for b in B.blocks]
    assert u[0] * u[1] % 3 == 2
    B = _check(diagonal([1, 12, 9]).rows, LocalContext(3, 3))
    assert [b.scale for b in B.blocks] == [0, 1, 2]


def test_constituent_examples():
    B, _ = block_diagonalize(diagonal([2, 6]).rows, LocalContext(3, 2))
    cs = constituents(B)
    assert [(c.scale, c.dim, c.sign) for c in cs] == [(0, 1, -1), (1, 1, -1)]
    B, _ = block_diagonalize(T_PLUS.rows, LocalContext(2, 3))
    (c,) = constituents(B)
    assert (c.scale, c.dim, c.sign, c.type, c.oddity) == (0, 2, 1, "II", 0)
    B, _ = block_diagonalize(diagonal([1, 7]).rows, LocalContext(2, 3))
    (c,) = constituents(B)
    assert (c.scale, c.dim, c.sign, c.type, c.oddity) == (0, 2, 1, "I", 0)


def test_scale_overflow():
    B, _ = block_diagonalize(diagonal([1, 64]).rows, LocalContext(2, 3))
    with pytest.raises(ScaleOverflow):
        constituents(B)


def test_random_block_diagonalization(rng):
    for _ in range(500):
        n = rng.randint(1, 6)
        p = rng.choice([2, 3, 5])
        ctx = LocalContext(p, rng.randint(1, 6))
        B = _check(random_form(rng, n, -50, 50, 10**12), ctx)
        if p != 2:
            assert all(isinstance(b, TypeI) for b in B.blocks)
        for b in B.blocks:
            if isinstance(b, TypeII):
                assert b.b % 2 == 1


def test_symbol_invariant_under_unimodular(rng):
    for _ in range(80):
        n = rng.randint(1, 4)
        Q = random_form(rng, n)
        U = random_unimodular(rng, n)
        for p in (3, 5, 7):
            assert p_symbol(Q, p) == p_symbol(conjugate(Q, U), p)


def test_op_count_growth():
    counts = {}
    for n in (4, 8, 16):
        rng = random.Random(n)
        c = OpCounter()
        block_diagonalize(random_form(rng, n, -9, 9, 10**80), LocalContext(3, 6), c)
        counts[n] = c.mults
    # quartic in n at most, with generous slack
    assert counts[16] <= 10 * counts[4] * 4**4
    assert all(v > 0 for v in counts.values())
