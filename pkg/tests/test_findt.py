import collections
import random

import pytest
from conftest import random_form

from qfgenus.errors import InvalidSymbol
from qfgenus.findt import (
    attach_representations,
    dim2_statistics,
    find_t,
    find_t_dim2_typeI_odd,
)
from qfgenus.forms import congruence, diagonal
from qfgenus.localform import T_MINUS, T_PLUS, local_form_p
from qfgenus.oracle import fxi
from qfgenus.symbol import excess_of_symbol, genus_symbol, reduce_symbol
from qfgenus.zmod import is_probable_prime, legendre, ord_p


def _plan(Q, seed=0):
    S, _ = reduce_symbol(genus_symbol(Q))
    return S, find_t(S, random.Random(seed))


def _assert_reps(S, plan):
    for p, rep in plan.reps.items():
        L = local_form_p(S, p).matrix()
        C = congruence(L, rep.completion.matrix(), rep.ctx.modulus)
        assert (C[0][0] - plan.t) % rep.ctx.modulus == 0


def test_identity_dim4_and_5():
    for n in (4, 5):
        S, plan = _plan(diagonal([1] * n).rows)
        assert plan.t == 1
        _assert_reps(S, plan)


def test_identity_dim2():
    S, plan = _plan(diagonal([1, 1]).rows)
    assert is_probable_prime(plan.t) and plan.t % 8 == 1
    _assert_reps(S, plan)


def test_negative_definite_dim3():
    S, plan = _plan(diagonal([-1, -1, -1]).rows)
    assert plan.t < 0
    _assert_reps(S, plan)


def test_identity_dim3():
    S, plan = _plan(diagonal([1, 1, 1]).rows)
    assert plan.wp is not None and plan.wp % 8 == 1 and plan.t == plan.wp
    S, plan = _plan(diagonal([1, 1, 3]).rows)
    assert is_probable_prime(plan.wp) and plan.wp != 3
    _assert_reps(S, plan)


def test_type_ii_dim3_needs_no_aux_prime():
    Q = [[2, 1, 0], [1, 2, 0], [0, 0, 2]]
    _, plan = _plan(Q)
    assert plan.branch == "dim3-typeII" and plan.wp is None


def test_binary_even_forms():
    for B in (T_PLUS, T_MINUS):
        S, plan = _plan(B.rows)
        assert plan.branch == "dim2-typeII"
        assert plan.t == 2 * plan.wp and plan.wp % 4 == 1
        assert legendre(-int(B.rows[0][0] * B.rows[1][1] - 1), plan.wp) == 1
        _assert_reps(S, plan)
    S, plan = _plan([[-2, 1], [1, -4]])
    assert plan.t < 0


def test_binary_odd_gap():
    S, plan = _plan(diagonal([1, 2]).rows)
    assert plan.branch == "dim2-typeI-odd-a" and plan.t % 8 == 1
    S, _ = reduce_symbol(genus_symbol(diagonal([3, 6]).rows))
    plan = attach_representations(S, find_t_dim2_typeI_odd(S, random.Random(1), prefer_second=True), random.Random(1))
    assert plan.branch == "dim2-typeI-odd-b" and ord_p(plan.t, 2) == 1
    _assert_reps(S, plan)


def test_dim_ge4_parity_and_type_ii():
    _, plan = _plan(diagonal([1, 3, 3, 3]).rows)
    assert ord_p(plan.t, 3) % 2 == 1
    Q = [[2, 1, 0, 0], [1, 2, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]
    _, plan = _plan(Q)
    assert ord_p(plan.t, 2) in (0, 1)


def test_dim2_statistics():
    st = dim2_statistics(genus_symbol(diagonal([1, 1]).rows))
    assert (st["rho"], st["eps"], st["S_minus"], st["excess_sum"]) == (1, 1, 0, 0)
    S = genus_symbol(diagonal([1, 3]).rows)
    st = dim2_statistics(S)
    assert st["S"]["3"] == 1 and st["excess_sum"] == excess_of_symbol(S, 3)
    assert fxi(3) == 1


def test_dim2_closed_form_random(rng):
    n = 0
    while n < 200:
        Q = random_form(rng, 2, -60, 60, 10**8)
        S, _ = reduce_symbol(genus_symbol(Q))
        st = dim2_statistics(S)
        assert st["excess_sum"] == sum(excess_of_symbol(S, p) for p in S.odd_primes()) % 8
        n += 1


def test_random_plans_cover_branches(rng):
    seen = collections.Counter()
    for _ in range(800):
        S, _ = reduce_symbol(genus_symbol(random_form(rng, rng.randint(2, 6))))
        plan = find_t(S, rng)
        seen[plan.branch] += 1
        assert plan.t != 0
        _assert_reps(S, plan)
    assert {"dim>=4", "dim3", "dim2-typeII", "dim2-typeI-even", "dim2-typeI-odd-a"} <= set(seen)


def test_rejects_unreduced():
    with pytest.raises(InvalidSymbol):
        find_t(genus_symbol(diagonal([3, 3, 3, 3]).rows), random.Random(0))
