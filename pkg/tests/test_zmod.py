import random

import pytest

from qfgenus.errors import NonCoprimeModuli, NotASquare
from qfgenus.zmod import (
    INF,
    LocalContext,
    crt,
    find_nonresidue,
    find_prime_in_ap,
    is_antisquare,
    is_probable_prime,
    is_square_mod_pk,
    legendre,
    make_qbar,
    ord_cop,
    sgn_p,
    sqrt_mod_pk,
)


def test_ord_cop_examples():
    assert tuple(ord_cop(18, 3)) == (2, 2)
    assert tuple(ord_cop(7, 2)) == (0, 7)
    r = ord_cop(0, 5)
    assert r.ord is INF and r.cop == 0


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_ord_cop_reassembles(p):
    for a in range(-2000, 2001):
        if a == 0:
            continue
        e, c = ord_cop(a, p)
        assert p**e * c == a and c % p


def test_legendre_examples():
    assert legendre(2, 7) == 1
    assert all(legendre(1, p) == 1 for p in (3, 5, 7, 11, 101))
    assert legendre(3, 2) == -1
    assert legendre(7, 2) == 1 and legendre(5, 2) == -1


def test_legendre_multiplicative(rng):
    for p in (3, 5, 7, 11, 13, 101):
        for _ in range(50):
            a, b = rng.randrange(1, p), rng.randrange(1, p)
            assert legendre(a * b, p) == legendre(a, p) * legendre(b, p)


def _primes(bound):
    return [p for p in range(3, bound) if is_probable_prime(p)]


def test_quadratic_reciprocity():
    ps = _primes(200)
    for p in ps:
        for q in ps:
            if p == q:
                continue
            sign = -1 if p % 4 == 3 and q % 4 == 3 else 1
            assert legendre(p, q) == sign * legendre(q, p)


def test_sum_of_two_nonresidues():
    for p in _primes(100):
        if p == 3:
            continue
        res = {x for x in range(1, p) if legendre(x, p) == 1}
        non = set(range(1, p)) - res
        for t in res:
            assert any((t - a) % p in non for a in non)
        for t in non:
            assert any((t - a) % p in res for a in res)


def test_sgn_p_examples():
    assert sgn_p(40, 2) == 5
    assert sgn_p(0, 3) == 0
    assert sgn_p(12, 3) == 1


@pytest.mark.parametrize("p,k", [(p, k) for p in (2, 3, 5) for k in range(1, 7)])
def test_is_square_matches_exhaustive(p, k):
    ctx = LocalContext(p, k)
    m = ctx.modulus
    squares = {x * x % m for x in range(m)}
    for t in range(m):
        assert is_square_mod_pk(t, ctx) == (t in squares)
        if t and t in squares:
            x = sqrt_mod_pk(t, ctx)
            assert x * x % m == t


def test_sqrt_examples():
    assert sqrt_mod_pk(17, LocalContext(2, 5)) in (7, 9, 23, 25)
    assert sqrt_mod_pk(4, LocalContext(3, 3)) in (2, 25)
    x = sqrt_mod_pk(63, LocalContext(3, 4))
    assert x * x % 81 == 63 and x % 3 == 0
    assert is_square_mod_pk(9, LocalContext(3, 1))
    assert not is_square_mod_pk(5, LocalContext(2, 3))
    with pytest.raises(NotASquare):
        sqrt_mod_pk(5, LocalContext(2, 3))


def test_find_nonresidue():
    assert find_nonresidue(7) == 3
    assert find_nonresidue(3) == 2
    assert find_nonresidue(17) == 3
    big = 1000000007
    assert legendre(find_nonresidue(big, random.Random(1)), big) == -1


def test_crt():
    assert crt([(2, 9), (3, 4)]) == (11, 36)
    assert crt([(0, 7)]) == (0, 7)
    assert crt([(1, 3), (1, 5), (1, 7)]) == (1, 105)
    with pytest.raises(NonCoprimeModuli):
        crt([(1, 4), (1, 6)])


def test_antisquare():
    assert not is_antisquare(3, 1, 3)
    assert is_antisquare(6, 1, 3)
    assert is_antisquare(1, 6, 3)


@pytest.mark.parametrize("a,q", [(1, 8), (2, 3), (3, 4), (7, 120), (11, 10**6)])
def test_find_prime_in_ap(a, q):
    rng = random.Random(a * q)
    for _ in range(5):
        p = find_prime_in_ap(a, q, rng)
        assert is_probable_prime(p) and p % q == a % q
        assert p <= max(q**3, a + 1024 * q)


def test_make_qbar():
    assert make_qbar(3, {3: 1})[0] == 72
    assert make_qbar(1, {})[0] == 8
    assert make_qbar(12, {2: 2, 3: 1})[0] == 288


def test_local_context():
    ctx = LocalContext(5, 3)
    assert ctx.modulus == 125 and ctx.kp == 1
    assert LocalContext(2, 4).kp == 3
    with pytest.raises(ValueError):
        LocalContext(9, 2)
