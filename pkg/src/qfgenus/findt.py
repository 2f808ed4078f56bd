"""Choosing an integer t that a reduced genus represents primitively.

The construction depends on the dimension. In dimension at least four, t
divides the determinant. In dimension three and two, an auxiliary prime
(called ``wp`` here) absorbs the congruence conditions. Every plan is
checked before it is returned: the local representations at each prime
dividing ``2 t det`` are built at the precision the generator needs and
kept on the plan.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .errors import CaseMismatch, InvalidSymbol, NoCaseApplies
from .localform import local_form_p
from .oracle import fxi
from .represent import Case, LocalBlock, build_local_representation, local_blocks
from .symbol import GenusSymbol, det_of_symbol, excess_closed_form, validate_symbol
from .zmod import LocalContext, cop_p, find_prime_in_ap, kp_of, legendre, ord_cop, ord_p


@dataclass
class TargetPlan:
    t: int
    exponents: dict
    branch: str
    wp: int | None = None
    r: int = 1
    cases: dict = field(default_factory=dict)
    dim2: dict | None = None
    reps: dict = field(default_factory=dict, repr=False)

    def to_json(self) -> dict:
        out = {
            "t": str(self.t),
            "branch": self.branch,
            "exponents": {str(p): e for p, e in sorted(self.exponents.items())},
            "wp": None if self.wp is None else str(self.wp),
            "r": str(self.r),
            "cases": {str(p): c.to_json() for p, c in sorted(self.cases.items())},
        }
        if self.dim2 is not None:
            out["dim2"] = self.dim2
        return out


def relevant_odd_primes(S: GenusSymbol) -> list[int]:
    return [p for p in S.odd_primes() if any(c.scale for c in S.components[p])]


def _blocks(S: GenusSymbol, p: int) -> list[LocalBlock]:
    return local_blocks(local_form_p(S, p), p)


# ---------------------------------------------------------------- local case planner


def plan_case(blocks: list[LocalBlock], t: int, p: int) -> Case:
    """Pick the representation shape for ``t`` among the local blocks."""
    e, v = ord_cop(t, p)
    ones = [b for b in blocks if b.kind == "I"]
    if p == 2:
        for b in ones:
            if b.scale == e and (v - b.unit) % 8 == 0:
                return Case("first-entry", (b.index,))
        for b in blocks:
            if b.kind == "II" and b.scale + 1 == e:
                return Case("typeII", (b.index,))
        tops = [b for b in ones if b.scale == e]
        low = sorted((b for b in ones if b.scale <= e), key=lambda b: (b.scale, b.index))
        if tops and len(low) >= 4:
            top = tops[0]
            rest = [b for b in low if b is not top][:3]
            return Case("four-entry", tuple(b.index for b in rest) + (top.index,))
        raise NoCaseApplies(f"no 2-adic shape represents {t}")
    lv = legendre(v, p)
    for b in ones:
        if b.scale == e and legendre(b.unit, p) == lv:
            return Case("first-entry", (b.index,))
    for b in ones:
        if b.scale != e:
            continue
        for a in ones:
            if a is not b and a.scale <= e and (e - a.scale) % 2 == 0 and legendre(a.unit, p) != lv:
                return Case("two-entry", (a.index, b.index))
    units = [b for b in ones if b.scale == 0]
    if len(units) >= 2 and len(units) == len(blocks):
        return Case("unimodular", tuple(b.index for b in units))
    raise NoCaseApplies(f"no shape at p={p} represents {t}")


def precision_for(S: GenusSymbol, t: int, p: int) -> int:
    """Working exponent ``ord_p(t^(n-1) det) + k_p``."""
    d = det_of_symbol(S)
    return (S.n - 1) * ord_p(t, p) + ord_p(d, p) + kp_of(p)


def attach_representations(S: GenusSymbol, plan: TargetPlan, rng: random.Random) -> TargetPlan:
    """Build and store a local representation at every prime dividing ``2 t det``."""
    primes = {2} | set(S.odd_primes())
    d = det_of_symbol(S)
    for p in _prime_divisors(plan.t, primes, plan.wp):
        primes.add(p)
    for p in sorted(primes):
        if p != 2 and d % p and plan.t % p:
            continue
        ctx = LocalContext(p, precision_for(S, plan.t, p))
        Sp = local_form_p(S, p)
        case = plan_case(local_blocks(Sp, p), plan.t, p)
        try:
            rep = build_local_representation(Sp, plan.t, ctx, case, rng)
        except CaseMismatch as exc:
            raise NoCaseApplies(f"{plan.branch}: {exc}") from None
        plan.cases[p] = case
        plan.reps[p] = rep
    return plan


def _prime_divisors(t: int, known, wp) -> list[int]:
    rest = abs(t)
    out = []
    for p in sorted(set(known) | ({wp} if wp else set())):
        if rest % p == 0:
            out.append(p)
            while rest % p == 0:
                rest //= p
    if rest != 1:
        raise InvalidSymbol(f"t has a prime factor outside the determinant: {rest}")
    return out


# ---------------------------------------------------------------- dimension >= 3


def _odd_prime_choices(S: GenusSymbol):
    """For each relevant odd prime: majority parity and the two candidate entries."""
    out = {}
    for p in relevant_odd_primes(S):
        first = _blocks(S, p)[:3]
        pars = [b.scale % 2 for b in first]
        maj = 1 if sum(pars) >= 2 else 0
        a, b = [blk for blk in first if blk.scale % 2 == maj][:2]
        out[p] = (maj, a, b)
    return out


def _exponents_from_r(choices: dict, r: int) -> dict:
    exps = {}
    for p, (_, a, b) in choices.items():
        exps[p] = a.scale if legendre(cop_p(r, p), p) == legendre(a.unit, p) else b.scale
    return exps


def find_t_dim_ge4(S: GenusSymbol, rng: random.Random) -> TargetPlan:
    n = S.n
    neg = 1 if S.sig == -n else 0
    two = _blocks(S, 2)
    even = [b for b in two if b.kind == "II"]
    if even:
        e2 = min(b.scale for b in even) + 1
    else:
        e2 = sorted(b.scale for b in two)[3]
    choices = _odd_prime_choices(S)
    r = (-1) ** neg * 2 ** (e2 % 2)
    for p, (maj, _, _) in choices.items():
        r *= p ** maj
    exps = _exponents_from_r(choices, r)
    t = (-1) ** neg * 2 ** e2
    for p, e in exps.items():
        t *= p ** e
    exps.update({-1: neg, 2: e2})
    return TargetPlan(t, exps, "dim>=4", r=r)


def find_t_dim3(S: GenusSymbol, rng: random.Random) -> TargetPlan:
    two = _blocks(S, 2)
    if any(b.kind == "II" for b in two):
        plan = find_t_dim_ge4(S, rng)
        plan.branch = "dim3-typeII"
        return plan
    neg = 1 if S.sig == -3 else 0
    first = min(two, key=lambda b: (b.scale, b.index))
    j1, tau1 = first.scale, first.unit % 8
    choices = _odd_prime_choices(S)
    prod = (-1) ** neg
    for p, (maj, _, _) in choices.items():
        prod *= p ** maj
    cls = tau1 * pow(prod % 8, -1, 8) % 8
    wp = find_prime_in_ap(cls, 8, rng, exclude=set(S.primes()))
    r = prod * wp * 2 ** (j1 % 2)
    exps = _exponents_from_r(choices, r)
    t = (-1) ** neg * 2 ** j1 * wp
    for p, e in exps.items():
        t *= p ** e
    exps.update({-1: neg, 2: j1, wp: 1})
    assert (cop_p(t, 2) - tau1) % 8 == 0
    return TargetPlan(t, exps, "dim3", wp=wp, r=r)


# ---------------------------------------------------------------- dimension 2


def dim2_statistics(S: GenusSymbol) -> dict:
    """Sign data and prime counts of a binary genus, with the excess cross-check."""
    if S.n != 2:
        raise InvalidSymbol("binary genus expected")
    d = det_of_symbol(S)
    eps = 1 if d > 0 else -1
    rho = 1 if S.sig in (0, 2) else -1
    counts = {(r, s): 0 for r in (1, 3, 5, 7) for s in (1, -1)}
    local = {}
    for p in relevant_odd_primes(S):
        blocks = _blocks(S, p)
        a, b = blocks[0], blocks[1]
        local[p] = {"a": a.unit, "i": b.scale, "b": b.unit}
        if b.scale % 2:
            counts[(p % 8, legendre(a.unit, p))] += 1
    s = {k: sum(v for (r, _), v in counts.items() if r == k) for k in (1, 3, 5, 7)}
    sm = sum(v for (_, sg), v in counts.items() if sg == -1)
    s37 = s[3] + s[7]
    odd2 = ord_p(d, 2) % 2
    extra = (s[3] + s[5]) if odd2 else 0
    closed = (2 * s[3] + 4 * s[5] + 6 * s[7] + 2 * (1 - eps ** s37 * (-1) ** (sm + fxi(s37) + extra))) % 8
    direct = sum(excess_closed_form(cs, p) for p, cs in S.components.items() if p != 2) % 8
    if closed != direct:
        raise InvalidSymbol(f"excess sum {direct} disagrees with the binary closed form {closed}")
    return {
        "eps": eps,
        "rho": rho,
        "S_minus": sm,
        "S": {str(k): v for k, v in s.items()},
        "counts": {f"{r}{'+' if sg == 1 else '-'}": v for (r, sg), v in counts.items()},
        "excess_sum": direct,
        "local": {str(p): v for p, v in local.items()},
    }


def _two_shape(S: GenusSymbol):
    blocks = _blocks(S, 2)
    if blocks[0].kind == "II":
        return "II", None, None, None
    return "I", blocks[0].unit % 8, blocks[1].scale, blocks[1].unit % 8


def _find_wp(mod_class: int, mod: int, congruences, S: GenusSymbol, rng) -> int:
    return find_prime_in_ap(mod_class, mod, rng, extra_congruences=congruences, exclude=set(S.primes()))


def _square_part(S: GenusSymbol, skip, ref: int) -> tuple[dict, int]:
    """Exponents ``0`` or ``i_p`` for odd primes outside ``skip`` and the root ``r``."""
    exps, r = {}, 1
    for p in relevant_odd_primes(S):
        if p in skip:
            exps[p] = 0
            continue
        a, b = _blocks(S, p)[:2]
        exps[p] = 0 if legendre(a.unit, p) == legendre(ref, p) else b.scale
        r *= p ** (exps[p] // 2)
    return exps, r


def _check_wp(S: GenusSymbol, wp: int):
    if legendre(-det_of_symbol(S), wp) != 1:
        raise NoCaseApplies(f"-det is not a square modulo the auxiliary prime {wp}")


def find_t_dim2_typeII(S: GenusSymbol, rng: random.Random) -> TargetPlan:
    st = dim2_statistics(S)
    eps, rho, sm = st["eps"], st["rho"], st["S_minus"]
    s = {int(k): v for k, v in st["S"].items()}
    s35m, s57m = s[3] + s[5] + sm, s[5] + s[7] + sm
    if (rho == 1 and s35m % 2 == 0) or (rho == -1 and s57m % 2 == 0):
        cls = 1
    elif (
        (rho == 1 and eps == 1 and s57m % 2)
        or (rho == 1 and eps == -1 and s57m % 2 == 0)
        or (rho == -1 and eps == -1 and s35m % 2 == 0)
        or (rho == -1 and eps == 1 and s35m % 2)
    ):
        cls = 3
    else:
        raise NoCaseApplies("no mod-4 class fits the even binary genus")
    S_odd = [p for p, v in st["local"].items() if v["i"] % 2]
    cong = [(2 * rho * st["local"][p]["a"], int(p)) for p in S_odd]
    wp = _find_wp(cls, 4, cong, S, rng)
    _check_wp(S, wp)
    exps, r = _square_part(S, {int(p) for p in S_odd}, 2 * rho * wp)
    t = 2 * rho * wp * r * r
    exps.update({-1: int(rho < 0), 2: 1, wp: 1})
    return TargetPlan(t, exps, "dim2-typeII", wp=wp, r=r, dim2=st)


def find_t_dim2_typeI_even(S: GenusSymbol, rng: random.Random) -> TargetPlan:
    st = dim2_statistics(S)
    eps, rho, sm = st["eps"], st["rho"], st["S_minus"]
    s = {int(k): v for k, v in st["S"].items()}
    s37m = s[3] + s[7] + sm
    _, a2, i2, b2 = _two_shape(S)
    X = {rho * a2 % 8, rho * b2 % 8}
    fives, sevens = sorted(X & {1, 5}), sorted(X & {3, 7})
    cls = None
    if fives and ((rho == 1 and sm % 2 == 0) or (rho == -1 and s37m % 2 == 0)):
        cls = fives[0]
    elif sevens and (
        (rho == 1 and eps == 1 and s37m % 2)
        or (rho == 1 and eps == -1 and s37m % 2 == 0)
        or (rho == -1 and eps == -1 and sm % 2 == 0)
        or (rho == -1 and eps == 1 and sm % 2)
    ):
        cls = sevens[0]
    if cls is None:
        raise NoCaseApplies("no mod-8 class fits the binary genus with even 2-scale gap")
    S_odd = [p for p, v in st["local"].items() if v["i"] % 2]
    cong = [(rho * st["local"][p]["a"], int(p)) for p in S_odd]
    wp = _find_wp(cls, 8, cong, S, rng)
    _check_wp(S, wp)
    e2 = 0 if (wp - rho * a2) % 8 == 0 else i2
    exps, r = _square_part(S, {int(p) for p in S_odd}, rho * wp)
    r *= 2 ** (e2 // 2)
    t = rho * wp * r * r
    exps.update({-1: int(rho < 0), 2: e2, wp: 1})
    return TargetPlan(t, exps, "dim2-typeI-even", wp=wp, r=r, dim2=st)


def find_t_dim2_typeI_odd(S: GenusSymbol, rng: random.Random, prefer_second: bool = False) -> TargetPlan:
    """Binary genus with odd 2-scale gap.

    On valid symbols the first guard always holds, so the second branch only
    runs when ``prefer_second`` is set and its guard holds too.
    """
    st = dim2_statistics(S)
    eps, rho, sm = st["eps"], st["rho"], st["S_minus"]
    s = {int(k): v for k, v in st["S"].items()}
    s37 = s[3] + s[7]
    _, a2, i2, b2 = _two_shape(S)
    la, lb = legendre(a2, 2), legendre(b2, 2)
    rr = rho ** s37
    first = (rho * a2 % 4 == 1 and (-1) ** sm * rr * la == 1) or (
        rho * a2 % 4 == 3 and (-1) ** (sm + s37 + 1) * rr * eps * la == 1
    )
    second = (rho * b2 % 4 == 1 and (-1) ** (s[3] + s[5] + sm) * rr * lb == 1) or (
        rho * b2 % 4 == 3 and (-1) ** (sm + s[5] + s[7] + 1) * rr * eps * lb == 1
    )
    S_odd = [p for p, v in st["local"].items() if v["i"] % 2]
    skip = {int(p) for p in S_odd}
    if first and not (prefer_second and second):
        cong = [(rho * st["local"][p]["a"], int(p)) for p in S_odd]
        wp = _find_wp(rho * a2 % 8, 8, cong, S, rng)
        _check_wp(S, wp)
        exps, r = _square_part(S, skip, rho * wp)
        t, e2, branch = rho * wp * r * r, 0, "dim2-typeI-odd-a"
    elif second:
        cong = [(2 * rho * st["local"][p]["a"], int(p)) for p in S_odd]
        wp = _find_wp(rho * b2 % 8, 8, cong, S, rng)
        _check_wp(S, wp)
        exps, r = _square_part(S, skip, 2 * rho * wp)
        t, e2, branch = rho * 2 ** i2 * wp * r * r, i2, "dim2-typeI-odd-b"
    else:
        raise NoCaseApplies("neither branch fits the binary genus with odd 2-scale gap")
    exps.update({-1: int(rho < 0), 2: e2, wp: 1})
    return TargetPlan(t, exps, branch, wp=wp, r=r, dim2=st)


# ---------------------------------------------------------------- dispatch


def find_t(S: GenusSymbol, rng: random.Random, check: bool = True) -> TargetPlan:
    """Target plan for a valid reduced symbol, with local representations attached."""
    if S.n < 2:
        raise InvalidSymbol("dimension must be at least 2")
    if check:
        rep = validate_symbol(S)
        if not rep.valid:
            raise InvalidSymbol(f"symbol is not valid: {rep.violations}")
    if any(min(c.scale for c in cs) for cs in S.components.values()):
        raise InvalidSymbol("symbol is not reduced")
    if S.n >= 4:
        plan = find_t_dim_ge4(S, rng)
    elif S.n == 3:
        plan = find_t_dim3(S, rng)
    else:
        kind, _, i2, _ = _two_shape(S)
        if kind == "II":
            plan = find_t_dim2_typeII(S, rng)
        elif i2 % 2 == 0:
            plan = find_t_dim2_typeI_even(S, rng)
        else:
            plan = find_t_dim2_typeI_odd(S, rng)
    if plan.t == 0:
        raise NoCaseApplies("zero target")
    return attach_representations(S, plan, rng)
