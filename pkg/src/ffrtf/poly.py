"""Dense univariate polynomials over a finite field.

A polynomial is a tuple of field elements, lowest degree first, with no
trailing zeros; the zero polynomial is the empty tuple.
"""

from __future__ import annotations

import random
import re
from functools import lru_cache
from itertools import product
from typing import Iterator, Sequence

from .fields import Field, PrimeField

Poly = tuple[int, ...]

ZERO: Poly = ()
ONE: Poly = (1,)
T: Poly = (0, 1)


def trim(a: Sequence[int]) -> Poly:
    a = tuple(a)
    n = len(a)
    while n and a[n - 1] == 0:
        n -= 1
    return a[:n]


def deg(a: Poly) -> int:
    return len(a) - 1


def lead(a: Poly) -> int:
    if not a:
        raise ValueError("zero polynomial has no leading coefficient")
    return a[-1]


def const(F: Field, c: int) -> Poly:
    return trim((F.from_int(c),))


def add(F: Field, a: Poly, b: Poly) -> Poly:
    if len(a) < len(b):
        a, b = b, a
    if F.is_prime_field:
        p = F.p
        return trim(tuple((x + y) % p for x, y in zip(a, b)) + a[len(b):])
    return trim(tuple(F.add(x, y) for x, y in zip(a, b)) + a[len(b):])


def neg(F: Field, a: Poly) -> Poly:
    return tuple(F.neg(x) for x in a)


def sub(F: Field, a: Poly, b: Poly) -> Poly:
    return add(F, a, neg(F, b))


def scale(F: Field, c: int, a: Poly) -> Poly:
    if c == 0:
        return ZERO
    return trim(tuple(F.mul(c, x) for x in a))


def shift(a: Poly, n: int) -> Poly:
    return (0,) * n + a if a else ZERO


def mul(F: Field, a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return ZERO
    if F.is_prime_field:
        p = F.p
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return trim(tuple(c % p for c in out))
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] = F.add(out[i + j], F.mul(x, y))
    return trim(out)


def divmod_poly(F: Field, a: Poly, b: Poly) -> tuple[Poly, Poly]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    if len(a) < len(b):
        return ZERO, a
    r = list(a)
    db = len(b) - 1
    inv_lead = F.inv(b[-1])
    qt = [0] * (len(a) - db)
    if F.is_prime_field:
        p = F.p
        for i in range(len(a) - 1, db - 1, -1):
            c = (r[i] * inv_lead) % p
            if c:
                qt[i - db] = c
                for j in range(db + 1):
                    r[i - db + j] = (r[i - db + j] - c * b[j]) % p
        return trim(qt), trim(r[:db])
    for i in range(len(a) - 1, db - 1, -1):
        c = F.mul(r[i], inv_lead)
        if c:
            qt[i - db] = c
            for j in range(db + 1):
                r[i - db + j] = F.sub(r[i - db + j], F.mul(c, b[j]))
    return trim(qt), trim(r[:db])


def polymod(F: Field, a: Poly, m: Poly) -> Poly:
    return divmod_poly(F, a, m)[1]


def exact_div(F: Field, a: Poly, b: Poly) -> Poly:
    qt, r = divmod_poly(F, a, b)
    if r:
        raise ArithmeticError("polynomial division is not exact")
    return qt


def monic(F: Field, a: Poly) -> Poly:
    if not a:
        return ZERO
    return scale(F, F.inv(a[-1]), a)


def gcd(F: Field, a: Poly, b: Poly) -> Poly:
    while b:
        a, b = b, polymod(F, a, b)
    return monic(F, a)


def pow_mod(F: Field, a: Poly, n: int, m: Poly) -> Poly:
    result = polymod(F, ONE, m)
    a = polymod(F, a, m)
    while n:
        if n & 1:
            result = polymod(F, mul(F, result, a), m)
        a = polymod(F, mul(F, a, a), m)
        n >>= 1
    return result


def power(F: Field, a: Poly, n: int) -> Poly:
    result = ONE
    while n:
        if n & 1:
            result = mul(F, result, a)
        a = mul(F, a, a)
        n >>= 1
    return result


def derivative(F: Field, a: Poly) -> Poly:
    return trim(tuple(F.mul(F.from_int(i), c) for i, c in enumerate(a))[1:])


def evaluate(F: Field, a: Poly, x: int) -> int:
    r = 0
    for c in reversed(a):
        r = F.add(F.mul(r, x), c)
    return r


def compose(F: Field, a: Poly, b: Poly) -> Poly:
    r = ZERO
    for c in reversed(a):
        r = add(F, mul(F, r, b), (c,) if c else ZERO)
    return r


def linear(F: Field, c: int) -> Poly:
    """The monic polynomial t - c."""
    return (F.neg(c), 1)


# irreducibility and factorization


def is_irreducible(F: Field, f: Poly) -> bool:
    """Rabin's test."""
    n = deg(f)
    if n < 1:
        return False
    if n == 1:
        return True
    q = F.order
    f = monic(F, f)
    primes = [r for r in range(2, n + 1) if n % r == 0 and all(r % s for s in range(2, r))]
    for r in primes:
        h = sub(F, _frob_power(F, n // r, f), T)
        if deg(gcd(F, f, h)) > 0:
            return False
    return polymod(F, sub(F, _frob_power(F, n, f), T), f) == ZERO


def _frob_power(F: Field, k: int, f: Poly) -> Poly:
    """t^(q^k) mod f."""
    x = polymod(F, T, f)
    for _ in range(k):
        x = pow_mod(F, x, F.order, f)
    return x


def _pth_root_poly(F: Field, a: Poly) -> Poly:
    p = F.char
    return trim(tuple(F.pth_root(a[i]) for i in range(0, len(a), p)))


def squarefree_decomposition(F: Field, f: Poly) -> list[tuple[Poly, int]]:
    """Monic squarefree factors with multiplicities (gcd with the derivative, char p aware)."""
    f = monic(F, f)
    out: dict[int, Poly] = {}

    def rec(g: Poly, mult: int) -> None:
        if deg(g) < 1:
            return
        dg = derivative(F, g)
        if not dg:
            rec(_pth_root_poly(F, g), mult * F.char)
            return
        c = gcd(F, g, dg)
        w = exact_div(F, g, c)
        i = 1
        while deg(w) > 0:
            y = gcd(F, w, c)
            z = exact_div(F, w, y)
            if deg(z) > 0:
                key = i * mult
                out[key] = monic(F, mul(F, out.get(key, ONE), z))
            w = y
            c = exact_div(F, c, y)
            i += 1
        if deg(c) > 0:
            rec(_pth_root_poly(F, c), mult * F.char)

    rec(f, 1)
    return sorted(((g, m) for m, g in out.items()), key=lambda gm: (gm[1], gm[0]))


def distinct_degree(F: Field, f: Poly) -> list[tuple[Poly, int]]:
    out = []
    h = polymod(F, T, f)
    i = 0
    f = monic(F, f)
    while deg(f) >= 2 * (i + 1):
        i += 1
        h = pow_mod(F, h, F.order, f)
        g = gcd(F, f, sub(F, h, T))
        if deg(g) > 0:
            out.append((g, i))
            f = exact_div(F, f, g)
            h = polymod(F, h, f)
    if deg(f) > 0:
        out.append((monic(F, f), deg(f)))
    return out


def equal_degree(F: Field, f: Poly, d: int, rng: random.Random) -> list[Poly]:
    """Cantor-Zassenhaus splitting of a product of degree-d irreducibles (odd q)."""
    n = deg(f)
    if n == d:
        return [monic(F, f)]
    e = (F.order**d - 1) // 2
    while True:
        a = trim(tuple(rng.randrange(F.order) for _ in range(n)))
        if deg(a) < 1:
            continue
        g = gcd(F, f, a)
        if 0 < deg(g) < n:
            break
        b = sub(F, pow_mod(F, a, e, f), ONE)
        g = gcd(F, f, b)
        if 0 < deg(g) < n:
            break
    return equal_degree(F, g, d, rng) + equal_degree(F, exact_div(F, f, g), d, rng)


def factor(F: Field, f: Poly) -> tuple[int, list[tuple[Poly, int]]]:
    """Return (leading coefficient, sorted [(monic irreducible, multiplicity)])."""
    f = trim(f)
    if not f:
        raise ValueError("cannot factor the zero polynomial")
    return lead(f), list(_factor_monic(F, monic(F, f)))


@lru_cache(maxsize=200000)
def _factor_monic(F: Field, f: Poly) -> tuple[tuple[Poly, int], ...]:
    if deg(f) == 0:
        return ()
    rng = random.Random(hash((F.order, f)) & 0xFFFFFFFF)
    acc: dict[Poly, int] = {}
    for g, m in squarefree_decomposition(F, f):
        for h, d in distinct_degree(F, g):
            for irr in equal_degree(F, h, d, rng):
                acc[irr] = acc.get(irr, 0) + m
    return tuple(sorted(acc.items(), key=lambda it: (len(it[0]), it[0])))


def iter_monic(F: Field, d: int) -> Iterator[Poly]:
    for tail in product(range(F.order), repeat=d):
        yield tuple(tail) + (1,)


def iter_polys(F: Field, max_deg: int) -> Iterator[Poly]:
    """All polynomials of degree <= max_deg, zero included."""
    for coeffs in product(range(F.order), repeat=max_deg + 1):
        yield trim(coeffs)


@lru_cache(maxsize=None)
def monic_irreducibles(F: Field, d: int) -> tuple[Poly, ...]:
    return tuple(f for f in iter_monic(F, d) if is_irreducible(F, f))


# text form over a prime field

def to_str(a: Poly, var: str = "t") -> str:
    if not a:
        return "0"
    terms = []
    for i in range(len(a) - 1, -1, -1):
        c = a[i]
        if c == 0:
            continue
        if i == 0:
            terms.append(str(c))
        else:
            mon = var if i == 1 else f"{var}^{i}"
            terms.append(mon if c == 1 else f"{c}*{mon}")
    return " + ".join(terms)


_TERM = re.compile(r"^(?:(\d+)\*?)?(?:(t)(?:\^(\d+))?)?$")


def parse(F: PrimeField, text: str) -> Poly:
    """Parse a polynomial in t with integer coefficients, e.g. 't^2 - t + 1'."""
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty polynomial")
    s = s.replace("-", "+-")
    acc: dict[int, int] = {}
    for raw in s.split("+"):
        if raw == "":
            continue
        sign = 1
        while raw.startswith("-"):
            sign, raw = -sign, raw[1:]
        m = _TERM.match(raw)
        if not m or raw == "":
            raise ValueError(f"cannot parse term {raw!r} in {text!r}")
        coef_s, var, exp_s = m.groups()
        if coef_s is None and var is None:
            raise ValueError(f"cannot parse term {raw!r} in {text!r}")
        coef = int(coef_s) if coef_s is not None else 1
        exp = (int(exp_s) if exp_s else 1) if var else 0
        acc[exp] = acc.get(exp, 0) + sign * coef
    if not acc:
        return ZERO
    top = max(acc)
    return trim(tuple(F.from_int(acc.get(i, 0)) for i in range(top + 1)))
