import itertools

import pytest

from qfgenus.errors import NotRepresentable
from qfgenus.findt import plan_case
from qfgenus.forms import congruence, det, diagonal
from qfgenus.localform import T_MINUS, T_PLUS
from qfgenus.oracle import dim4_solution
from qfgenus.represent import (
    build_local_representation,
    local_blocks,
    represent_dim2_oddp,
    represent_dim4_mod2k,
    represent_typeII,
    represent_unimodular,
    represent_unit_scaled,
    two_nonresidue_split,
)
from qfgenus.zmod import LocalContext


def test_unit_scaled_examples():
    assert represent_unit_scaled(1, 4, LocalContext(3, 3)) == 2
    assert represent_unit_scaled(5, 20, LocalContext(5, 3)) == 2
    assert represent_unit_scaled(1, 17, LocalContext(2, 5)) == 7
    with pytest.raises(NotRepresentable):
        represent_unit_scaled(1, 2, LocalContext(3, 2))


def test_two_nonresidue_split():
    y1, y2 = two_nonresidue_split(3, 7)
    assert (y1 * y1 + y2 * y2 - 3) % 7 == 0 and y1 % 7 and y2 % 7
    y1, y2 = two_nonresidue_split(2, 5)
    assert (y1 * y1 + y2 * y2 - 2) % 5 == 0
    for p in (5, 7, 11, 13, 17):
        for t in range(1, p):
            y1, y2 = two_nonresidue_split(t, p)
            assert (y1 * y1 + y2 * y2 - t) % p == 0


def test_dim2_oddp_examples():
    ctx = LocalContext(5, 3)
    x1, x2 = represent_dim2_oddp(1, 2, 1, 2, ctx)
    assert (x1 * x1 + 25 * x2 * x2 - 50) % 125 == 0 and (x1 % 5 or x2 % 5)
    x1, x2 = represent_dim2_oddp(1, 0, 2, 2, ctx)
    assert (x1 * x1 + 2 * x2 * x2 - 2) % 125 == 0
    ctx = LocalContext(7, 3)
    x1, x2 = represent_dim2_oddp(1, 2, 3, 3, ctx)
    assert (x1 * x1 + 49 * 3 * x2 * x2 - 49 * 3) % 343 == 0


def test_type_ii_examples():
    assert represent_typeII(T_PLUS.rows, 2, LocalContext(2, 4)) == (1, 0)
    assert represent_typeII(T_MINUS.rows, 6, LocalContext(2, 4)) == (1, 1)
    x, y = represent_typeII(T_PLUS.rows, 10, LocalContext(2, 5))
    assert (2 * x * x + 2 * x * y + 4 * y * y - 10) % 32 == 0 and (x | y) & 1


def test_dim4_examples():
    xs = represent_dim4_mod2k([1, 1, 1, 1], 7, LocalContext(2, 6))
    assert sum(v * v for v in xs) % 64 == 7 and xs[3] % 2
    xs = represent_dim4_mod2k([1, 1, 1, 1], 1, LocalContext(2, 6))
    assert sum(v * v for v in xs) % 64 == 1 and xs[3] % 2
    entries = [1, 1, 2, 2]
    xs = represent_dim4_mod2k(entries, 3, LocalContext(2, 8))
    assert sum(e * v * v for e, v in zip(entries, xs)) % 256 == 6


def test_dim4_table_complete():
    for taus in itertools.product((1, 3, 5, 7), repeat=4):
        for par in itertools.product((0, 1), repeat=3):
            for t in range(1, 16, 2):
                sol = dim4_solution(taus, par, t)
                assert sol is not None and sol[3] % 2


def test_dim4_random_scales(rng):
    for _ in range(300):
        scales = sorted(rng.randint(0, 5) for _ in range(4))
        units = [rng.choice((1, 3, 5, 7)) for _ in range(4)]
        entries = [u << s for u, s in zip(units, scales)]
        t = rng.randrange(1, 64, 2)
        ctx = LocalContext(2, scales[3] + rng.randint(3, 8))
        xs = represent_dim4_mod2k(entries, t, ctx)
        assert (sum(e * v * v for e, v in zip(entries, xs)) - (t << scales[3])) % ctx.modulus == 0
        assert xs[3] % 2


def test_unimodular(rng):
    for p in (3, 5, 7, 11):
        ctx = LocalContext(p, 4)
        for _ in range(20):
            units = [rng.randrange(1, p) for _ in range(rng.randint(2, 4))]
            t = rng.randrange(1, ctx.modulus)
            if t % p == 0:
                continue
            xs = represent_unimodular(units, t, ctx, rng)
            assert (sum(u * v * v for u, v in zip(units, xs)) - t) % ctx.modulus == 0


def _check_rep(S, t, p, k, rng=None):
    ctx = LocalContext(p, k)
    case = plan_case(local_blocks(S, p), t, p)
    rep = build_local_representation(S, t, ctx, case, rng)
    M = rep.completion.matrix()
    assert [r[0] for r in M] == list(rep.x)
    assert det(M) % p
    C = congruence(S, M, ctx.modulus)
    assert (C[0][0] - t) % ctx.modulus == 0
    return case


def test_build_examples():
    assert _check_rep([[1, 0], [0, 1]], 1, 5, 3).kind == "first-entry"
    assert _check_rep([[1, 0], [0, 25]], 50, 5, 4).kind == "two-entry"
    assert _check_rep(T_PLUS.rows, 2, 2, 5).kind == "typeII"
    assert _check_rep(diagonal([1, 1, 1, 1]).rows, 7, 2, 4).kind in ("first-entry", "four-entry")
    assert _check_rep(diagonal([1, 3, 3, 3]).rows, 3, 2, 6).kind in ("first-entry", "four-entry")
