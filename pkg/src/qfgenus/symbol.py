"""Genus symbols: computation, invariants, validity and reduction.

The 2-adic part of a symbol is not unique: different Jordan decompositions
of the same 2-adic form can disagree on individual signs and oddities.
``two_adic_label`` computes the Conway-Sloane invariant (signs walked to the
head of each train, oddities fused per compartment), and ``canonical_two``
replaces a 2-adic component by the lexicographically least admissible
component with the same label. Every symbol this module produces is in that
form, so comparing symbols is plain equality.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass, field, replace
from fractions import Fraction

from sympy import factorint

from .errors import FactorizationNeeded, SchemaError, SingularForm
from .forms import QuadForm, det, rational_diagonalize, signature
from .jordan import JordanConstituent, block_diagonalize, constituents
from .zmod import LocalContext, cop_p, is_antisquare, legendre, ord_cop

# admissible oddities of a type I constituent, keyed by (dim, sign)
_ODDITIES_DIM1 = {1: (1, 7), -1: (3, 5)}
_ODDITIES_DIM2 = {1: (0, 2, 6), -1: (2, 4, 6)}


def admissible_oddities(dim: int, sign: int) -> tuple[int, ...]:
    if dim == 1:
        return _ODDITIES_DIM1[sign]
    if dim == 2:
        return _ODDITIES_DIM2[sign]
    return tuple(range(dim % 2, 8, 2))


@dataclass(frozen=True)
class GenusSymbol:
    n: int
    sig: int
    components: dict = field(default_factory=dict)  # prime -> tuple of constituents

    def __post_init__(self):
        comps = {int(p): tuple(cs) for p, cs in sorted(self.components.items())}
        object.__setattr__(self, "components", comps)

    def __hash__(self):
        return hash((self.n, self.sig, tuple(self.components.items())))

    def primes(self) -> list[int]:
        return sorted(self.components)

    def odd_primes(self) -> list[int]:
        return [p for p in self.primes() if p != 2]

    def component(self, p: int) -> tuple[JordanConstituent, ...]:
        """Constituents at ``p``; a prime that is not stored carries det as a unit."""
        if p in self.components:
            return self.components[p]
        if p == 2:
            raise KeyError("2-adic component missing")
        return (JordanConstituent(0, self.n, legendre(det_of_symbol(self), p)),)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "sig": self.sig,
            "components": {str(p): [c.to_json() for c in cs] for p, cs in self.components.items()},
        }

    @classmethod
    def from_json(cls, obj) -> GenusSymbol:
        try:
            n = int(obj["n"])
            sig = int(obj["sig"])
            comps = {}
            for key, items in obj["components"].items():
                p = int(key)
                cs = []
                for it in items:
                    if p == 2:
                        typ = it.get("type")
                        if typ not in ("I", "II"):
                            raise SchemaError(f"2-adic constituent needs type I or II, got {typ!r}")
                        cs.append(
                            JordanConstituent(
                                int(it["scale"]), int(it["dim"]), int(it["sign"]), typ, int(it.get("oddity", 0))
                            )
                        )
                    else:
                        cs.append(JordanConstituent(int(it["scale"]), int(it["dim"]), int(it["sign"])))
                comps[p] = tuple(sorted(cs, key=lambda c: c.scale))
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise SchemaError(f"malformed symbol JSON: {exc!r}") from None
        for p, cs in comps.items():
            total = sum(c.dim for c in cs)
            if total != n:
                raise SchemaError(f"constituent dimensions at p={p} sum to {total}, expected n={n}")
        if 2 not in comps:
            raise SchemaError("symbol must list its 2-adic component")
        return cls(n, sig, comps)


@dataclass
class ValidityReport:
    determinant_ok: bool = True
    oddity_ok: bool = True
    jordan_ok: bool = True
    violations: list = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return self.determinant_ok and self.oddity_ok and self.jordan_ok

    def to_json(self) -> dict:
        return {
            "valid": self.valid,
            "determinant_ok": self.determinant_ok,
            "oddity_ok": self.oddity_ok,
            "jordan_ok": self.jordan_ok,
            "violations": [{"prime": p, "scale": s, "rule": r} for p, s, r in self.violations],
        }


# ---------------------------------------------------------------- 2-adic canonical form


def _compartments(cs) -> list[list[int]]:
    out, cur = [], []
    for i, c in enumerate(cs):
        if c.type == "I" and cur and cs[cur[-1]].scale == c.scale - 1:
            cur.append(i)
        else:
            if cur:
                out.append(cur)
            cur = [i] if c.type == "I" else []
    if cur:
        out.append(cur)
    return out


def _trains(cs) -> list[list[int]]:
    if not cs:
        return []
    trains, cur = [], [0]
    for i in range(1, len(cs)):
        prev, c = cs[i - 1], cs[i]
        gap = c.scale - prev.scale
        odd_prev, odd_cur = prev.type == "I", c.type == "I"
        if gap > 2 or (gap == 2 and not (odd_prev and odd_cur)) or not (odd_prev or odd_cur):
            trains.append(cur)
            cur = [i]
        else:
            cur.append(i)
    trains.append(cur)
    return trains


def two_adic_label(cs) -> tuple:
    """Conway-Sloane invariant of a 2-adic symbol with fixed scales and types.

    Signs are walked to the first constituent of each train, and the
    oddities of each compartment are fused into a single total. The label is
    the walked signs of the train heads plus the compartment totals.
    """
    cs = sorted((c for c in cs if c.dim > 0), key=lambda c: c.scale)
    signs = [c.sign for c in cs]
    comps = _compartments(cs)
    totals = [sum(cs[i].oddity for i in comp) % 8 for comp in comps]
    where = {i: ci for ci, comp in enumerate(comps) for i in comp}
    trains = _trains(cs)
    for train in trains:
        for t1 in reversed(train[1:]):
            if signs[t1] == -1:
                signs[t1] = 1
                signs[t1 - 1] = -signs[t1 - 1]
                for ci in {where.get(t1 - 1), where.get(t1)} - {None}:
                    totals[ci] = (totals[ci] + 4) % 8
    shape = tuple((c.scale, c.dim, c.type) for c in cs)
    return shape, tuple(signs[t[0]] for t in trains), tuple(totals)


def _representative(cs) -> tuple[JordanConstituent, ...]:
    """Lexicographically least admissible raw symbol with the same label."""
    cs = sorted((c for c in cs if c.dim > 0), key=lambda c: c.scale)
    m = len(cs)
    _, train_signs, totals = two_adic_label(cs)
    comps = _compartments(cs)
    comp_of = {i: ci for ci, comp in enumerate(comps) for i in comp}
    train_of, first = {}, set()
    for ti, train in enumerate(_trains(cs)):
        first.add(train[0])
        for i in train:
            train_of[i] = ti
    last_of_train = {train[-1] for train in _trains(cs)}

    def choices(i):
        c = cs[i]
        out = []
        for sg in (1, -1):
            if c.type == "I":
                out.extend((sg, o) for o in admissible_oddities(c.dim, sg))
            elif c.dim % 2 == 0:
                out.append((sg, 0))
        return out

    def step(i, state, choice):
        """Advance the scan over constituent ``i``; None if a check fails."""
        prefix, partial = state
        sg, odd = choice
        if i in first:
            prefix = 1
            flip = False
        else:
            flip = train_signs[train_of[i]] * prefix == -1
        prev_comp = comp_of.get(i - 1)
        cur_comp = comp_of.get(i)
        if flip and prev_comp is not None:
            partial = (partial + 4) % 8
        if cur_comp is not None and cur_comp == prev_comp:
            partial = (partial + odd) % 8
        else:
            if prev_comp is not None and partial != totals[prev_comp]:
                return None
            partial = None
            if cur_comp is not None:
                partial = (odd + (4 if flip else 0)) % 8
        prefix *= sg
        if i in last_of_train and prefix != train_signs[train_of[i]]:
            return None
        return prefix, partial

    memo = {}

    def feasible(i, state):
        if i == m:
            prev_comp = comp_of.get(m - 1)
            return prev_comp is None or state[1] == totals[prev_comp]
        key = (i, state)
        if key not in memo:
            memo[key] = any(
                (nxt := step(i, state, ch)) is not None and feasible(i + 1, nxt) for ch in choices(i)
            )
        return memo[key]

    state = (1, None)
    out = []
    for i in range(m):
        for ch in choices(i):
            nxt = step(i, state, ch)
            if nxt is not None and feasible(i + 1, nxt):
                out.append(replace(cs[i], sign=ch[0], oddity=ch[1]))
                state = nxt
                break
        else:
            raise ValueError("2-adic symbol admits no admissible representative")
    return tuple(out)


def canonical_two(cs: Iterable[JordanConstituent]) -> tuple[JordanConstituent, ...]:
    return _representative(list(cs))


def normalize_symbol(S: GenusSymbol) -> GenusSymbol:
    """Canonical 2-adic part; odd components with only scale 0 are implied and dropped."""
    comps = {p: cs for p, cs in S.components.items() if p == 2 or any(c.scale for c in cs)}
    comps[2] = canonical_two(comps[2])
    return GenusSymbol(S.n, S.sig, comps)


# ---------------------------------------------------------------- from forms


def _require_nonsingular(Q) -> int:
    d = det(Q)
    if d == 0:
        raise SingularForm("form is singular")
    return d


def p_symbol(Q, p: int) -> tuple[JordanConstituent, ...]:
    d = _require_nonsingular(Q)
    k = ord_cop(d, p).ord + 1
    B, _ = block_diagonalize(Q, LocalContext(p, k))
    return tuple(constituents(B))


def two_symbol_raw(Q) -> tuple[JordanConstituent, ...]:
    d = _require_nonsingular(Q)
    k = ord_cop(d, 2).ord + 3
    B, _ = block_diagonalize(Q, LocalContext(2, k))
    return tuple(constituents(B))


def two_symbol(Q) -> tuple[JordanConstituent, ...]:
    return canonical_two(two_symbol_raw(Q))


def factor_abs(d: int, hints: dict | None = None) -> dict[int, int]:
    """Prime factorization of ``|d|``; ``hints`` may supply known factors."""
    d = abs(d)
    if d == 0:
        raise SingularForm("zero determinant")
    fac: dict[int, int] = {}
    if hints:
        for p in hints:
            p = int(p)
            while p > 1 and d % p == 0:
                d //= p
                fac[p] = fac.get(p, 0) + 1
    if d > 1:
        try:
            rest = factorint(d)
        except Exception as exc:  # pragma: no cover - sympy failure is unexpected
            raise FactorizationNeeded(f"could not factor {d}: {exc}") from None
        for p, e in rest.items():
            fac[int(p)] = fac.get(int(p), 0) + int(e)
    return dict(sorted(fac.items()))


def genus_symbol(Q, hints: dict | None = None) -> GenusSymbol:
    Q = Q if isinstance(Q, QuadForm) else QuadForm.of(Q)
    d = _require_nonsingular(Q)
    comps = {2: two_symbol(Q)}
    for p in factor_abs(d, hints):
        if p != 2:
            comps[p] = p_symbol(Q, p)
    return GenusSymbol(Q.n, signature(Q), comps)


# ---------------------------------------------------------------- invariants


def det_of_symbol(S: GenusSymbol) -> int:
    mag = 1
    for p, cs in S.components.items():
        mag *= p ** sum(c.scale * c.dim for c in cs)
    return mag if ((S.n - S.sig) // 2) % 2 == 0 else -mag


def p_excess(Q, p: int) -> int:
    """p-excess mod 8 computed from a rational diagonalization; ``p = -1`` allowed."""
    diag = rational_diagonalize(Q, with_transform=False).diagonal
    n = len(diag)
    if p == -1:
        return (sum(1 if q > 0 else -1 for q in diag) - n) % 8
    total, anti = 0, 0
    for q in diag:
        q = Fraction(q)
        num, den = q.numerator, q.denominator
        if is_antisquare(num, den, p):
            anti += 1
        en, a = ord_cop(num, p)
        ed, b = ord_cop(den, p)
        if p == 2:
            total += a * pow(b, -1, 8)
        else:
            total += pow(p, (en - ed) % 2, 8)
    sig_p = (total + 4 * anti) % 8
    return (n - sig_p) % 8 if p == 2 else (sig_p - n) % 8


def excess_closed_form(cs, p: int) -> int:
    """p-excess of an odd-prime component straight from its constituents."""
    tot = 0
    for c in cs:
        tot += c.dim * (pow(p, c.scale, 8) - 1)
        if c.scale % 2 and c.sign == -1:
            tot += 4
    return tot % 8


def oddity_closed_form(cs) -> int:
    """Oddity (2-signature) including the antisquare correction."""
    tot = 0
    for c in cs:
        tot += c.oddity or 0
        if c.scale % 2 and c.sign == -1:
            tot += 4
    return tot % 8


def oddity_of_symbol(S: GenusSymbol) -> int:
    from .localform import local_form_p

    return (S.n - p_excess(local_form_p(S, 2), 2)) % 8


def excess_of_symbol(S: GenusSymbol, p: int) -> int:
    from .localform import local_form_p

    if p == -1:
        return (S.sig - S.n) % 8
    return p_excess(local_form_p(S, p), p)


# ---------------------------------------------------------------- validity


def validate_symbol(S: GenusSymbol) -> ValidityReport:
    rep = ValidityReport()

    def fail(kind, p, scale, rule):
        setattr(rep, kind, False)
        rep.violations.append((p, scale, rule))

    if abs(S.sig) > S.n or (S.n - S.sig) % 2:
        fail("jordan_ok", -1, None, "signature must satisfy |sig| <= n and sig = n mod 2")
    if 2 not in S.components:
        fail("jordan_ok", 2, None, "2-adic component missing")
        return rep
    for p, cs in S.components.items():
        if p < 2 or (p > 2 and p % 2 == 0):
            fail("jordan_ok", p, None, "not a prime")
            continue
        scales = [c.scale for c in cs]
        if len(set(scales)) != len(scales) or any(s < 0 for s in scales):
            fail("jordan_ok", p, None, "scales must be distinct and non-negative")
        if sum(c.dim for c in cs) != S.n:
            fail("jordan_ok", p, None, "dimensions must sum to n")
        for c in cs:
            if c.dim < 1:
                fail("jordan_ok", p, c.scale, "dimension must be positive")
            if c.sign not in (1, -1):
                fail("jordan_ok", p, c.scale, "sign must be +1 or -1")
            if p != 2:
                continue
            if c.type == "II":
                if c.dim % 2:
                    fail("jordan_ok", p, c.scale, "type II constituent needs even dimension")
                if c.oddity not in (0, None):
                    fail("jordan_ok", p, c.scale, "type II constituent has oddity 0")
            elif c.type == "I":
                if c.oddity is None or not 0 <= c.oddity < 8:
                    fail("jordan_ok", p, c.scale, "oddity must lie in 0..7")
                elif c.dim >= 1 and c.sign in (1, -1) and c.oddity not in admissible_oddities(c.dim, c.sign):
                    fail("jordan_ok", p, c.scale, f"oddity {c.oddity} impossible for dim {c.dim}, sign {c.sign}")
            else:
                fail("jordan_ok", p, c.scale, "type must be I or II")
    if not rep.jordan_ok:
        return rep
    d = det_of_symbol(S)
    for p, cs in S.components.items():
        prod = 1
        for c in cs:
            prod *= c.sign
        if prod != legendre(cop_p(d, p), p):
            fail("determinant_ok", p, None, "product of signs disagrees with the determinant")
    lhs = S.sig + sum(excess_closed_form(cs, p) for p, cs in S.components.items() if p != 2)
    if (lhs - oddity_closed_form(S.components[2])) % 8:
        fail("oddity_ok", 2, None, "oddity formula fails")
    return rep


def _times_unit(cs, p: int, u: int, shift: int) -> tuple[JordanConstituent, ...]:
    """Constituents of ``p^shift * u * D`` given those of ``D`` (u a p-adic unit)."""
    out = []
    for c in cs:
        if p == 2:
            if c.type == "I":
                sign = c.sign * legendre(u, 2) ** c.dim
                out.append(replace(c, scale=c.scale + shift, sign=sign, oddity=u * c.oddity % 8))
            else:
                out.append(replace(c, scale=c.scale + shift))
        else:
            out.append(replace(c, scale=c.scale + shift, sign=c.sign * legendre(u, p) ** c.dim))
    return tuple(out)


def _rescale(S: GenusSymbol, g_fac: dict[int, int], sign: int) -> GenusSymbol:
    g = 1
    for p, e in g_fac.items():
        g *= p ** e
    comps = {}
    for p in sorted(set(S.components) | set(g_fac)):
        cs = S.component(p)
        e, u = ord_cop(g, p)
        if sign < 0:
            u = pow(u, -1, 8 if p == 2 else p)
        comps[p] = _times_unit(cs, p, u, sign * e)
    out = GenusSymbol(S.n, S.sig, comps)
    return normalize_symbol(out)


def reduce_symbol(S: GenusSymbol) -> tuple[GenusSymbol, int]:
    """Divide out ``gcd = prod p^(min scale)``; returns the reduced symbol and gcd."""
    fac = {p: min(c.scale for c in cs) for p, cs in S.components.items()}
    fac = {p: e for p, e in fac.items() if e}
    g = 1
    for p, e in fac.items():
        g *= p ** e
    if g == 1:
        return S, 1
    return _rescale(S, fac, -1), g


def scale_symbol(S: GenusSymbol, g: int) -> GenusSymbol:
    """Symbol of ``g * Q`` given the symbol of ``Q`` (``g > 0``)."""
    return _rescale(S, factor_abs(g), 1)
