"""The projective line over F_q, its places and completions, and the
quadratic cover y^2 = f(t) with its idele class character eta.

Uniformizers: pi_x(t) at a finite place x, 1/t at infinity.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Iterator, Mapping, Sequence

from . import poly as P
from .fields import ExtField, Field, PrimeField
from .poly import Poly


@dataclass(frozen=True, order=False)
class Place:
    """A closed point of P^1: a monic irreducible polynomial, or infinity (pi=None)."""

    pi: Poly | None = None

    @property
    def is_infinity(self) -> bool:
        return self.pi is None

    @property
    def degree(self) -> int:
        return 1 if self.pi is None else len(self.pi) - 1

    def sort_key(self) -> tuple:
        return (1, 0, ()) if self.pi is None else (0, len(self.pi), self.pi)

    def __lt__(self, other: "Place") -> bool:
        return self.sort_key() < other.sort_key()

    def text(self) -> str:
        return "inf" if self.pi is None else P.to_str(self.pi)

    def __repr__(self) -> str:
        return f"Place({self.text()})"


INFINITY = Place(None)


def finite_place(F: Field, pi: Sequence[int]) -> Place:
    pi = P.monic(F, P.trim(tuple(pi)))
    if not P.is_irreducible(F, pi):
        raise ValueError(f"{P.to_str(pi)} is not irreducible")
    return Place(pi)


def parse_place(F: PrimeField, text: str) -> Place:
    s = text.strip()
    if s == "inf":
        return INFINITY
    return finite_place(F, P.parse(F, s))


@lru_cache(maxsize=None)
def residue_field(F: PrimeField, place: Place) -> Field:
    if place.degree == 1:
        return F
    return ExtField(F, place.pi)


def reduce_poly(F: PrimeField, place: Place, g: Poly) -> int:
    """Image of a polynomial in k(x) (finite place)."""
    if place.is_infinity:
        raise ValueError("use unit_residue at infinity")
    if place.degree == 1:
        return P.evaluate(F, g, F.neg(place.pi[0]))
    k = residue_field(F, place)
    return k.from_vec(P.polymod(F, g, place.pi))


def lift_residue(F: PrimeField, place: Place, c: int) -> Poly:
    """The polynomial of degree < d_x representing c in k(x)."""
    if place.degree == 1:
        return P.trim((c,))
    return P.trim(residue_field(F, place).to_vec(c))


def valuation_poly(F: PrimeField, place: Place, g: Poly) -> int:
    if not g:
        raise ValueError("valuation of zero")
    if place.is_infinity:
        return -P.deg(g)
    v = 0
    while True:
        qt, r = P.divmod_poly(F, g, place.pi)
        if r:
            return v
        g, v = qt, v + 1


def split_valuation(F: PrimeField, place: Place, g: Poly) -> tuple[int, int]:
    """(v_x(g), residue of g / uniformizer^v) for a nonzero polynomial."""
    if not g:
        raise ValueError("valuation of zero")
    if place.is_infinity:
        return -P.deg(g), g[-1]
    v = 0
    while True:
        qt, r = P.divmod_poly(F, g, place.pi)
        if r:
            return v, reduce_poly(F, place, g)
        g, v = qt, v + 1


@dataclass(frozen=True)
class RatFn:
    """A rational function num/den in F_q(t), den monic."""

    num: Poly
    den: Poly = P.ONE

    @classmethod
    def make(cls, F: PrimeField, num: Poly, den: Poly = P.ONE) -> "RatFn":
        num, den = P.trim(num), P.trim(den)
        if not den:
            raise ZeroDivisionError("zero denominator")
        if not num:
            return cls(P.ZERO, P.ONE)
        g = P.gcd(F, num, den)
        num, den = P.exact_div(F, num, g), P.exact_div(F, den, g)
        c = F.inv(den[-1])
        return cls(P.scale(F, c, num), P.scale(F, c, den))

    def is_zero(self) -> bool:
        return not self.num

    def text(self) -> str:
        if self.den == P.ONE:
            return f"({P.to_str(self.num)})"
        return f"({P.to_str(self.num)})/({P.to_str(self.den)})"


def rat_mul(F: PrimeField, a: RatFn, b: RatFn) -> RatFn:
    return RatFn.make(F, P.mul(F, a.num, b.num), P.mul(F, a.den, b.den))


def rat_add(F: PrimeField, a: RatFn, b: RatFn) -> RatFn:
    return RatFn.make(F, P.add(F, P.mul(F, a.num, b.den), P.mul(F, b.num, a.den)), P.mul(F, a.den, b.den))


def rat_sub(F: PrimeField, a: RatFn, b: RatFn) -> RatFn:
    return rat_add(F, a, RatFn(P.neg(F, b.num), b.den))


def rat_inv(F: PrimeField, a: RatFn) -> RatFn:
    if a.is_zero():
        raise ZeroDivisionError("inverse of zero")
    return RatFn.make(F, a.den, a.num)


def rat_split_valuation(F: PrimeField, place: Place, g: RatFn) -> tuple[int, int]:
    """(valuation, unit residue) of a nonzero rational function at a place."""
    vn, rn = split_valuation(F, place, g.num)
    vd, rd = split_valuation(F, place, g.den)
    k = residue_field(F, place) if not place.is_infinity else F
    return vn - vd, k.div(rn, rd)


def rat_divisor(F: PrimeField, g: RatFn) -> "Divisor":
    """Divisor of a nonzero rational function, infinity included."""
    if g.is_zero():
        raise ValueError("divisor of zero")
    acc: dict[Place, int] = {}
    for pol, sign in ((g.num, 1), (g.den, -1)):
        _, facs = P.factor(F, pol)
        for h, m in facs:
            pl = Place(h)
            acc[pl] = acc.get(pl, 0) + sign * m
    vinf = P.deg(g.den) - P.deg(g.num)
    if vinf:
        acc[INFINITY] = acc.get(INFINITY, 0) + vinf
    return Divisor.make(acc)


# ---------------------------------------------------------------- local fields


class LocalElement:
    """An element sum_{i >= v} c_i w^i of k(x)((w)) known modulo w^prec.

    The digits c_i live in a coefficient field k(x) inside the completion; w is
    the chosen uniformizer.  A tracked zero has digits == () and v == prec.
    """

    __slots__ = ("place", "k", "v", "digits", "prec")

    def __init__(self, place: Place, k: Field, v: int, digits: Sequence[int], prec: int) -> None:
        digits = list(digits)[: max(prec - v, 0)]
        while digits and digits[0] == 0:
            digits.pop(0)
            v += 1
        if not digits:
            v = prec
        self.place, self.k, self.v, self.digits, self.prec = place, k, v, tuple(digits), prec

    def is_zero(self) -> bool:
        return not self.digits

    def valuation(self) -> int:
        if self.is_zero():
            raise ArithmeticError(f"element is zero modulo w^{self.prec}: valuation unknown")
        return self.v

    def unit_residue(self) -> int:
        if self.is_zero():
            raise ArithmeticError(f"element is zero modulo w^{self.prec}: residue unknown")
        return self.digits[0]

    def coeff(self, i: int) -> int:
        if i >= self.prec:
            raise ArithmeticError(f"coefficient of w^{i} requested beyond precision {self.prec}")
        j = i - self.v
        return self.digits[j] if 0 <= j < len(self.digits) else 0

    def __mul__(self, other: "LocalElement") -> "LocalElement":
        k = self.k
        if self.is_zero() or other.is_zero():
            prec = min(self.prec + (other.v if not other.is_zero() else other.prec),
                       other.prec + (self.v if not self.is_zero() else self.prec))
            return LocalElement(self.place, k, prec, (), prec)
        v = self.v + other.v
        prec = min(self.v + other.prec, other.v + self.prec)
        n = prec - v
        out = [0] * n
        for i, a in enumerate(self.digits[:n]):
            if a:
                for j, b in enumerate(other.digits[: n - i]):
                    if b:
                        out[i + j] = k.add(out[i + j], k.mul(a, b))
        return LocalElement(self.place, k, v, out, prec)

    def inverse(self) -> "LocalElement":
        k = self.k
        v = self.valuation()
        n = self.prec - v
        a = list(self.digits) + [0] * (n - len(self.digits))
        inv0 = k.inv(a[0])
        b = [inv0] + [0] * (n - 1)
        for m in range(1, n):
            s = 0
            for i in range(1, m + 1):
                s = k.add(s, k.mul(a[i], b[m - i]))
            b[m] = k.neg(k.mul(inv0, s))
        return LocalElement(self.place, k, -v, b, -v + n)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LocalElement):
            return NotImplemented
        return (self.place, self.v, self.digits, self.prec) == (other.place, other.v, other.digits, other.prec)

    def __repr__(self) -> str:
        return f"LocalElement({self.place.text()}, v={self.v}, digits={self.digits}, prec={self.prec})"


def _teichmuller_t(F: PrimeField, place: Place, N: int) -> Poly:
    """The lift of the residue class of t to F_q[t]/(pi^N) lying in the coefficient field."""
    mod = P.power(F, place.pi, N)
    qx = F.order**place.degree
    e = qx
    while e < N:
        e *= qx
    return P.pow_mod(F, P.T, e, mod)


def _unit_digits_finite(F: PrimeField, place: Place, g: Poly, n: int) -> list[int]:
    """First n w-adic digits of a polynomial g (with w = pi_x)."""
    k = residue_field(F, place)
    if place.degree == 1:
        c = F.neg(place.pi[0])
        shifted = P.compose(F, g, (c, 1))  # g(w + c)
        return [shifted[i] if i < len(shifted) else 0 for i in range(n)]
    mod = P.power(F, place.pi, n)
    theta = _teichmuller_t(F, place, n)
    h = P.polymod(F, g, mod)
    digits = []
    for _ in range(n):
        c = reduce_poly(F, place, h)
        digits.append(c)
        lift = P.polymod(F, P.compose(F, lift_residue(F, place, c), theta), mod)
        h = P.exact_div(F, P.sub(F, h, lift), place.pi)
    del k
    return digits


def local_expansion(F: PrimeField, place: Place, g: RatFn, prec: int) -> LocalElement:
    """w-adic expansion of a rational function, correct modulo w^prec."""
    k = residue_field(F, place) if not place.is_infinity else F
    if g.is_zero():
        return LocalElement(place, k, prec, (), prec)

    def unit_part(pol: Poly, n: int) -> tuple[int, list[int]]:
        if place.is_infinity:
            d = P.deg(pol)
            rev = tuple(reversed(pol))  # coefficients of w^0, w^1, ... in w^d pol
            return -d, [rev[i] if i < len(rev) else 0 for i in range(n)]
        v = valuation_poly(F, place, pol)
        u = P.exact_div(F, pol, P.power(F, place.pi, v))
        return v, _unit_digits_finite(F, place, u, n)

    vn, _ = (valuation_poly(F, place, g.num), None) if not place.is_infinity else (-P.deg(g.num), None)
    vd = valuation_poly(F, place, g.den) if not place.is_infinity else -P.deg(g.den)
    v = vn - vd
    n = max(prec - v, 0)
    if n == 0:
        return LocalElement(place, k, prec, (), prec)
    _, num_digits = unit_part(g.num, n)
    _, den_digits = unit_part(g.den, n)
    num = LocalElement(place, k, 0, num_digits, n)
    den = LocalElement(place, k, 0, den_digits, n)
    q = num * den.inverse()
    return LocalElement(place, k, v, q.digits, v + n)


# --------------------------------------------------------------- the cover


SPLIT, INERT, RAMIFIED = "split", "inert", "ramified"


class DoubleCover:
    """X' : y^2 = f(t) over P^1_{F_q}, f squarefree of even degree."""

    def __init__(self, q: int, f: Sequence[int]) -> None:
        self.F = PrimeField(q)
        self.q = q
        F = self.F
        self.f = P.trim(tuple(c % q for c in f))
        if len(self.f) < 3 or P.deg(self.f) % 2:
            raise ValueError("f must have even positive degree (so infinity is unramified)")
        if P.deg(P.gcd(F, self.f, P.derivative(F, self.f))) > 0:
            raise ValueError("f must be squarefree")
        _, facs = P.factor(F, self.f)
        self.R: tuple[Place, ...] = tuple(sorted(Place(h) for h, _ in facs))
        self.rho = sum(x.degree for x in self.R)
        self.genus_cover = P.deg(self.f) // 2 - 1

    def __repr__(self) -> str:
        return f"DoubleCover(q={self.q}, f={P.to_str(self.f)})"

    def text(self) -> str:
        return f"q={self.q}, f={P.to_str(self.f)}"

    def k(self, place: Place) -> Field:
        return self.F if place.is_infinity else residue_field(self.F, place)

    def is_ramified(self, place: Place) -> bool:
        return place in self.R

    @lru_cache(maxsize=None)
    def splitting_type(self, place: Place) -> str:
        F = self.F
        if place.is_infinity:
            return SPLIT if F.is_square(self.f[-1]) else INERT
        if place in self.R:
            return RAMIFIED
        k = residue_field(F, place)
        return SPLIT if k.chi(reduce_poly(F, place, self.f)) == 1 else INERT

    @lru_cache(maxsize=None)
    def f_local(self, place: Place) -> tuple[int, int]:
        """(v_x(f), unit residue of f) for the standard uniformizer."""
        return split_valuation(self.F, place, self.f)

    def hilbert(self, place: Place, v: int, residue: int) -> int:
        """Tame Hilbert symbol (z, f)_x for z = w^v * (unit with the given residue)."""
        k = self.k(place)
        beta, b0 = self.f_local(place)
        # ((-1)^{v beta} z0^beta / b0^v) up to squares
        val = k.pow(residue, beta % 2) if beta % 2 else 1
        if v % 2:
            val = k.div(val, b0)
        if (v * beta) % 2:
            val = k.neg(val)
        return k.chi(val)

    def eta_unit(self, place: Place, residue: int) -> int:
        """eta_x on a unit with the given residue."""
        return self.hilbert(place, 0, residue)

    @lru_cache(maxsize=None)
    def eta_uniformizer(self, place: Place) -> int:
        return self.hilbert(place, 1, 1)

    def eta_local(self, place: Place, z: LocalElement) -> int:
        return self.hilbert(place, z.valuation(), z.unit_residue())

    def eta_local_split(self, place: Place, v: int, residue: int) -> int:
        return self.hilbert(place, v, residue)

    def eta_rational(self, place: Place, g: RatFn) -> int:
        v, r = rat_split_valuation(self.F, place, g)
        return self.hilbert(place, v, r)

    def sign_class(self, place: Place, residue: int) -> int:
        """+1 if the residue is a square in k(x), -1 otherwise (residue nonzero)."""
        c = self.k(place).chi(residue)
        if c == 0:
            raise ValueError("sign class of zero")
        return c

    def eta_global(self, c: "SqrtRClass") -> int:
        out = 1
        for x, v in c.valuations.items():
            if v % 2:
                out *= self.eta_uniformizer(x)
        for x in self.R:
            if c.signs.get(x, 1) == -1:
                out *= -1  # eta_x on a nonsquare unit at a ramified place
        return out

    def principal(self, g: RatFn) -> "SqrtRClass":
        """Class of the principal idele of g in Div^sqrtR."""
        div = rat_divisor(self.F, g)
        signs = {}
        for x in self.R:
            _, r = rat_split_valuation(self.F, x, g)
            signs[x] = self.sign_class(x, r)
        return SqrtRClass.make(div.mult, signs)

    def count_points(self, extension_degree: int = 1) -> int:
        """#X'(F_{q^e}) by direct enumeration of the smooth model."""
        F = self.F
        if extension_degree == 1:
            K: Field = F
            emb = lambda c: c  # noqa: E731
        else:
            mod = next(iter(P.monic_irreducibles(F, extension_degree)))
            K = ExtField(F, mod)
            emb = K.from_int
        fk = [emb(c) for c in self.f]
        total = 0
        for t in K.elements():
            val = 0
            for c in reversed(fk):
                val = K.add(K.mul(val, t), c)
            total += 1 + K.chi(val)
        total += 1 + K.chi(emb(self.f[-1]))
        return total


@dataclass(frozen=True)
class Divisor:
    mult: Mapping[Place, int] = field(default_factory=dict)

    @classmethod
    def make(cls, mult: Mapping[Place, int]) -> "Divisor":
        return cls({x: m for x, m in sorted(mult.items(), key=lambda it: it[0].sort_key()) if m})

    def __hash__(self) -> int:
        return hash(tuple(sorted(((x.sort_key(), m) for x, m in self.mult.items()))))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Divisor) and dict(self.mult) == dict(other.mult)

    @property
    def degree(self) -> int:
        return sum(m * x.degree for x, m in self.mult.items())

    def __add__(self, other: "Divisor") -> "Divisor":
        acc = dict(self.mult)
        for x, m in other.mult.items():
            acc[x] = acc.get(x, 0) + m
        return Divisor.make(acc)

    def __neg__(self) -> "Divisor":
        return Divisor.make({x: -m for x, m in self.mult.items()})

    def __sub__(self, other: "Divisor") -> "Divisor":
        return self + (-other)

    def __getitem__(self, x: Place) -> int:
        return self.mult.get(x, 0)

    def is_effective(self) -> bool:
        return all(m >= 0 for m in self.mult.values())

    def support(self) -> list[Place]:
        return sorted(self.mult, key=lambda x: x.sort_key())

    def __le__(self, other: "Divisor") -> bool:
        return (other - self).is_effective()

    def text(self) -> str:
        if not self.mult:
            return "0"
        return ",".join(f"{x.text()}^{m}" for x, m in sorted(self.mult.items(), key=lambda it: it[0].sort_key()))

    def __repr__(self) -> str:
        return f"Divisor({self.text()})"

    @classmethod
    def of_places(cls, places: Iterable[Place]) -> "Divisor":
        acc: dict[Place, int] = {}
        for x in places:
            acc[x] = acc.get(x, 0) + 1
        return cls.make(acc)


def places_up_to(F: PrimeField, d: int, include_infinity: bool = True) -> list[Place]:
    out = [INFINITY] if include_infinity and d >= 1 else []
    for e in range(1, d + 1):
        out.extend(Place(h) for h in P.monic_irreducibles(F, e))
    return sorted(out, key=lambda x: x.sort_key())


def enumerate_effective_divisors(F: PrimeField, d: int, avoid: Iterable[Place] = ()) -> list[Divisor]:
    """All effective divisors of degree d whose support avoids the given places."""
    if d < 0:
        raise ValueError("degree must be nonnegative")
    banned = set(avoid)
    pls = [x for x in places_up_to(F, d) if x not in banned]
    out: list[Divisor] = []

    # each level picks the next place with positive multiplicity, so the depth is at most d
    def rec(i: int, remaining: int, acc: dict[Place, int]) -> None:
        if remaining == 0:
            out.append(Divisor.make(acc))
            return
        for j in range(i, len(pls)):
            x = pls[j]
            m = 1
            while m * x.degree <= remaining:
                acc[x] = m
                rec(j + 1, remaining - m * x.degree, acc)
                m += 1
            acc.pop(x, None)

    rec(0, d, {})
    return sorted(out, key=lambda D: tuple((x.sort_key(), m) for x, m in D.mult.items()))


@dataclass(frozen=True)
class SqrtRClass:
    """An element of Div^sqrtR = A^x / O^x_sqrtR: valuations plus unit square classes on R."""

    valuations: Mapping[Place, int]
    signs: Mapping[Place, int]

    @classmethod
    def make(cls, valuations: Mapping[Place, int], signs: Mapping[Place, int]) -> "SqrtRClass":
        return cls({x: v for x, v in sorted(valuations.items(), key=lambda it: it[0].sort_key()) if v},
                   {x: s for x, s in sorted(signs.items(), key=lambda it: it[0].sort_key())})

    @classmethod
    def identity(cls, R: Iterable[Place]) -> "SqrtRClass":
        return cls.make({}, {x: 1 for x in R})

    def __hash__(self) -> int:
        return hash((tuple(sorted((x.sort_key(), v) for x, v in self.valuations.items())),
                     tuple(sorted((x.sort_key(), s) for x, s in self.signs.items()))))

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, SqrtRClass) and dict(self.valuations) == dict(other.valuations)
                and dict(self.signs) == dict(other.signs))

    def __add__(self, other: "SqrtRClass") -> "SqrtRClass":
        vals = dict(self.valuations)
        for x, v in other.valuations.items():
            vals[x] = vals.get(x, 0) + v
        signs = {x: self.signs.get(x, 1) * other.signs.get(x, 1) for x in set(self.signs) | set(other.signs)}
        return SqrtRClass.make(vals, signs)

    def __neg__(self) -> "SqrtRClass":
        return SqrtRClass.make({x: -v for x, v in self.valuations.items()}, dict(self.signs))

    def __sub__(self, other: "SqrtRClass") -> "SqrtRClass":
        return self + (-other)

    @property
    def degree(self) -> int:
        return sum(v * x.degree for x, v in self.valuations.items())


@dataclass(frozen=True)
class SigmaData:
    plus: tuple[Place, ...] = ()
    minus: tuple[Place, ...] = ()

    def __post_init__(self) -> None:
        if set(self.plus) & set(self.minus):
            raise ValueError("Sigma_+ and Sigma_- must be disjoint")
        if INFINITY in self.plus or INFINITY in self.minus:
            raise ValueError("infinity may not lie in Sigma")

    @property
    def n_plus(self) -> int:
        return sum(x.degree for x in self.plus)

    @property
    def n_minus(self) -> int:
        return sum(x.degree for x in self.minus)

    @property
    def n(self) -> int:
        return self.n_plus + self.n_minus

    def places(self) -> tuple[Place, ...]:
        return self.plus + self.minus

    def check_against(self, cover: DoubleCover) -> None:
        bad = [x for x in self.places() if x in cover.R]
        if bad:
            raise ValueError(f"Sigma meets R at {[x.text() for x in bad]}")

    def swapped(self) -> "SigmaData":
        return SigmaData(self.minus, self.plus)

    def text(self) -> str:
        fmt = lambda xs: "{" + ",".join(x.text() for x in xs) + "}"  # noqa: E731
        return f"S+={fmt(self.plus)} S-={fmt(self.minus)}"


def iter_rational_functions(F: PrimeField, height: int) -> Iterator[RatFn]:
    """All nonzero g = a/b in F_q(t) with coprime a, b monic b, max(deg a, deg b) <= height."""
    seen = set()
    for den in (d for e in range(height + 1) for d in P.iter_monic(F, e)):
        for num in P.iter_polys(F, height):
            if not num:
                continue
            if P.deg(P.gcd(F, num, den)) > 0:
                continue
            key = (num, den)
            if key not in seen:
                seen.add(key)
                yield RatFn(num, den)
