"""Integer and modular arithmetic kernel.

Everything works on Python integers, so values of any size are exact.
Randomized helpers take an explicit ``random.Random`` so results are
reproducible from a seed.
"""

from __future__ import annotations

import math
import random
from collections.abc import Iterable
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple

from sympy.ntheory import isprime
from sympy.ntheory import sqrt_mod as _sympy_sqrt_mod
from sympy.ntheory.modular import crt as _sympy_crt

from .errors import (
    BadFactorization,
    NonCoprimeModuli,
    NotASquare,
    SearchExhausted,
)


class _Infinity:
    """Order of zero. Compares above every integer."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("qfgenus-infinity")

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True


INF = _Infinity()


class OrdCop(NamedTuple):
    ord: object  # int or INF
    cop: int


def ord_cop(a: int, p: int) -> OrdCop:
    """Split ``a = p**ord * cop`` with ``cop`` coprime to ``p``."""
    if a == 0:
        return OrdCop(INF, 0)
    e = 0
    if p == 2:
        e = (a & -a).bit_length() - 1
        return OrdCop(e, a >> e)
    while a % p == 0:
        a //= p
        e += 1
    return OrdCop(e, a)


def ord_p(a: int, p: int):
    return ord_cop(a, p).ord


def cop_p(a: int, p: int) -> int:
    return ord_cop(a, p).cop


def legendre(t: int, p: int) -> int:
    """Legendre symbol for odd ``p``; Kronecker symbol (t/2) for ``p == 2``."""
    if p == 2:
        if t % 2 == 0:
            raise ValueError("Kronecker symbol at 2 needs an odd argument")
        return 1 if t % 8 in (1, 7) else -1
    r = pow(t % p, (p - 1) // 2, p)
    if r == 0:
        return 0
    return 1 if r == 1 else -1


def sgn_p(t: int, p: int) -> int:
    """p-sign: a Legendre value for odd p, the odd part mod 8 for p = 2."""
    if t == 0:
        return 0
    c = cop_p(t, p)
    if p == 2:
        return c % 8
    return legendre(c, p)


def unit_class(u: int, p: int) -> int:
    """Square class of a p-adic unit: Legendre value, or residue mod 8 at 2."""
    return u % 8 if p == 2 else legendre(u, p)


@lru_cache(maxsize=4096)
def is_probable_prime(n: int) -> bool:
    return n >= 2 and bool(isprime(n))


@dataclass(frozen=True)
class LocalContext:
    """A prime ``p`` with working precision ``k`` (modulus ``p**k``)."""

    p: int
    k: int
    modulus: int = field(init=False)
    kp: int = field(init=False)

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("precision k must be positive")
        if not is_probable_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        object.__setattr__(self, "modulus", self.p ** self.k)
        object.__setattr__(self, "kp", 3 if self.p == 2 else 1)

    def with_k(self, k: int) -> LocalContext:
        return LocalContext(self.p, k)


def kp_of(p: int) -> int:
    return 3 if p == 2 else 1


def inverse(a: int, m: int) -> int:
    return pow(a, -1, m)


def _unit_root(u: int, p: int, m: int) -> int:
    """Root of the unit ``u`` modulo ``p**m``; caller guarantees existence."""
    mod = p ** m
    u %= mod
    if p == 2:
        if m <= 3:
            for x in range(1, min(mod, 8), 2):
                if (x * x - u) % mod == 0:
                    return x
            raise NotASquare(f"{u} is not a square mod {mod}")
        x = 1
        # x^2 = u mod 2^j; keep x odd and fix one bit per step
        for j in range(3, m):
            if (x * x - u) % (1 << (j + 1)):
                x += 1 << (j - 1)
        return x % mod
    x = _sympy_sqrt_mod(u % p, p)
    if x is None:
        raise NotASquare(f"{u} is not a square mod {p}")
    prec = 1
    while prec < m:
        prec = min(2 * prec, m)
        pk = p ** prec
        x = (x - (x * x - u) * inverse(2 * x, pk)) % pk
    return x


def is_square_mod_pk(t: int, ctx: LocalContext) -> bool:
    p, k = ctx.p, ctx.k
    t %= ctx.modulus
    if t == 0:
        return True
    e, u = ord_cop(t, p)
    if e % 2:
        return False
    rest = k - e
    if p == 2:
        return u % (1 << min(rest, 3)) == 1
    return legendre(u, p) == 1


def sqrt_mod_pk(t: int, ctx: LocalContext) -> int:
    """Some ``x`` with ``x*x == t (mod p**k)``."""
    if not is_square_mod_pk(t, ctx):
        raise NotASquare(f"{t} is not a square mod {ctx.p}^{ctx.k}")
    t %= ctx.modulus
    if t == 0:
        return 0
    e, u = ord_cop(t, ctx.p)
    x = _unit_root(u, ctx.p, ctx.k - e) * ctx.p ** (e // 2)
    x %= ctx.modulus
    assert (x * x - t) % ctx.modulus == 0
    return x


def find_nonresidue(p: int, rng: random.Random | None = None, cap: int = 4096) -> int:
    """A quadratic nonresidue mod odd ``p``: small scan first, then sampling."""
    if p == 2:
        raise ValueError("no nonresidues are defined at 2")
    bound = max(2, math.ceil(1.5 * math.log(p) ** 2))
    for a in range(2, min(bound, p - 1) + 1):
        if legendre(a, p) == -1:
            return a
    rng = rng or random.Random(p)
    for _ in range(cap):
        a = rng.randrange(2, p)
        if legendre(a, p) == -1:
            return a
    raise SearchExhausted(f"no nonresidue found mod {p}")


def crt(residues: Iterable[tuple[int, int]]) -> tuple[int, int]:
    """Combine ``(value, modulus)`` pairs; returns ``(x, product)``."""
    pairs = [(v, m) for v, m in residues]
    if not pairs:
        return 0, 1
    mods = [m for _, m in pairs]
    for i in range(len(mods)):
        for j in range(i + 1, len(mods)):
            if math.gcd(mods[i], mods[j]) != 1:
                raise NonCoprimeModuli(f"{mods[i]} and {mods[j]} share a factor")
    if len(pairs) == 1:
        v, m = pairs[0]
        return v % m, m
    x, m = _sympy_crt(mods, [v for v, _ in pairs])
    return int(x), int(m)


def is_antisquare(num: int, den: int, p: int) -> bool:
    """True when num/den = p^alpha * a/b with alpha odd and sgn(a) != sgn(b)."""
    if den == 0:
        raise ValueError("zero denominator")
    en, a = ord_cop(num, p)
    ed, b = ord_cop(den, p)
    if num == 0:
        return False
    if (en - ed) % 2 == 0:
        return False
    if p == 2:
        # compare square classes via the Kronecker symbol: 2^odd * (+-3 mod 8)
        return legendre(a, 2) != legendre(b, 2)
    return sgn_p(a, p) != sgn_p(b, p)


def find_prime_in_ap(
    a: int,
    q: int,
    rng: random.Random,
    extra_congruences: Iterable[tuple[int, int]] = (),
    exclude: Iterable[int] = (),
    budget_factor: int = 16,
) -> int:
    """Random prime ``P = a (mod q)`` also meeting the extra congruences.

    Candidates are ``a + b*q`` with ``b`` uniform in ``[0, max(q^2, 1024)]``.
    """
    a, q = crt([(a, q), *extra_congruences])
    if math.gcd(a, q) != 1:
        raise ValueError(f"residue {a} is not a unit mod {q}")
    excluded = set(exclude)
    hi = max(q * q, 1024)
    tries = budget_factor * max(1, math.ceil(math.log(max(q, 2) ** 3))) ** 2
    tries = max(tries, 256)
    for _ in range(tries):
        cand = a + rng.randint(0, hi) * q
        if cand > 2 and cand not in excluded and is_probable_prime(cand):
            return cand
    raise SearchExhausted(f"no prime found congruent to {a} mod {q}")


def make_qbar(q: int, factorization: dict[int, int]) -> tuple[int, dict[int, int]]:
    """Multiply ``q`` by ``p**k_p`` for each prime dividing ``2q``."""
    prod = 1
    for p, e in factorization.items():
        prod *= p ** e
    if prod != q:
        raise BadFactorization(f"factorization multiplies to {prod}, not {q}")
    fac = {p: e for p, e in factorization.items() if e > 0}
    fac[2] = fac.get(2, 0)
    out = {p: e + kp_of(p) for p, e in fac.items()}
    qbar = 1
    for p, e in out.items():
        qbar *= p ** e
    return qbar, dict(sorted(out.items()))
