from fractions import Fraction

import pytest
from conftest import random_form, random_unimodular

from qfgenus.errors import NotPrimitive, SchemaError, SingularForm
from qfgenus.forms import (
    QuadForm,
    conjugate,
    det,
    det_mod,
    diagonal,
    direct_sum,
    extend_primitive,
    form_from_json,
    form_to_json,
    inverse_mod,
    matmul,
    rational_diagonalize,
    signature,
)
from qfgenus.localform import T_MINUS, T_PLUS
from qfgenus.zmod import LocalContext


def test_direct_sum():
    assert direct_sum([diagonal([1]), diagonal([7])]) == diagonal([1, 7])
    I2 = diagonal([1, 1])
    assert direct_sum([I2]) == I2
    M = direct_sum([T_PLUS, diagonal([3])])
    assert M.rows == ((2, 1, 0), (1, 4, 0), (0, 0, 3))


def test_det_direct_sum(rng):
    for _ in range(30):
        A, B = random_form(rng, rng.randint(1, 3)), random_form(rng, rng.randint(1, 3))
        assert det(direct_sum([QuadForm.of(A), QuadForm.of(B)])) == det(A) * det(B)


def test_det_examples():
    assert det(diagonal([1, 1, 1])) == 1
    assert det(T_PLUS) == 7
    assert det(T_MINUS) == 3


def test_conjugate():
    Q = QuadForm.of([[3, 1], [1, 5]])
    assert conjugate(Q, [[1, 0], [0, 1]], 4).rows == ((3, 1), (1, 1))
    assert conjugate(diagonal([1, 1]), [[1, 1], [0, 1]]).rows == ((1, 1), (1, 2))
    U = [[1, 2], [3, 3]]  # det -3, odd
    C = conjugate(T_PLUS, U, 8)
    assert det_mod(C.rows, 8) == det(T_PLUS) * 9 % 8


def test_conjugate_roundtrip(rng):
    for _ in range(40):
        n = rng.randint(1, 6)
        q = rng.choice([8, 9, 25, 49, 72])
        Q = random_form(rng, n)
        while True:
            U = [[rng.randrange(q) for _ in range(n)] for _ in range(n)]
            try:
                Ui = inverse_mod(U, q)
                break
            except ValueError:
                continue
        back = conjugate(conjugate(Q, U, q), Ui, q)
        assert back.rows == tuple(tuple(v % q for v in r) for r in Q)


def test_extend_primitive():
    ctx = LocalContext(2, 2)
    T = extend_primitive([2, 1], ctx)
    assert T.matrix() == [[2, 1], [1, 0]]
    assert det(T.matrix()) == -1
    assert extend_primitive([1, 0, 0], LocalContext(7, 3)).matrix() == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    T = extend_primitive([0, 5, 3], LocalContext(5, 2))
    assert [r[0] for r in T.matrix()] == [0, 5, 3] and det(T.matrix()) % 5
    with pytest.raises(NotPrimitive):
        extend_primitive([5, 10], LocalContext(5, 2))


def test_extend_primitive_random(rng):
    for _ in range(200):
        p = rng.choice([2, 3, 5, 7])
        ctx = LocalContext(p, rng.randint(1, 5))
        n = rng.randint(1, 6)
        x = [rng.randrange(ctx.modulus) for _ in range(n)]
        if all(v % p == 0 for v in x):
            continue
        M = extend_primitive(x, ctx).matrix()
        assert [r[0] for r in M] == [v % ctx.modulus for v in x]
        assert det(M) % p


def test_rational_diagonalize_exact(rng):
    for _ in range(50):
        Q = random_form(rng, rng.randint(1, 6))
        rd = rational_diagonalize(Q)
        T = [list(r) for r in rd.transform]
        n = len(Q)
        D = matmul(matmul([[T[j][i] for j in range(n)] for i in range(n)], [[Fraction(v) for v in r] for r in Q]), T)
        for i in range(n):
            for j in range(n):
                assert D[i][j] == (rd.diagonal[i] if i == j else 0)
        signs = [q > 0 for q in rd.diagonal]
        assert signs == sorted(signs, reverse=True)


def test_signature_examples():
    assert signature(diagonal([1, 1, 1, 1])) == 4
    assert signature(diagonal([-1, -1])) == -2
    assert signature([[0, 1], [1, 0]]) == 0
    rd = rational_diagonalize([[0, 1], [1, 0]])
    assert rd.positives == 1
    assert rational_diagonalize(diagonal([2, -3])).diagonal == (2, -3)
    with pytest.raises(SingularForm):
        signature([[1, 1], [1, 1]])


def test_signature_invariant(rng):
    for _ in range(60):
        n = rng.randint(1, 5)
        Q = random_form(rng, n)
        U = random_unimodular(rng, n)
        assert signature(conjugate(Q, U)) == signature(Q)


def test_json_roundtrip():
    Q = QuadForm.of([[10**30, -1], [-1, 3]])
    obj = form_to_json(Q)
    assert obj["rows"][0][0] == str(10**30)
    assert form_from_json(obj) == Q
    with pytest.raises(SchemaError, match=r"\(0,1\)"):
        form_from_json({"n": 2, "rows": [["1", "2"], ["3", "4"]]})
    with pytest.raises(SchemaError):
        form_from_json({"n": 2, "rows": [["1", "x"], ["x", "4"]]})
