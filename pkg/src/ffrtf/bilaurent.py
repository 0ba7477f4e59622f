"""Exact Laurent polynomials in Q1 = q^{s1} and Q2 = q^{s2}.

Coefficients are rationals, or elements of one fixed cyclotomic field.  The
coefficient ring of a value is its ``ring`` attribute: ``None`` for Q and the
prime p for Q(zeta_p).  Promotion from Q to Q(zeta_p) is explicit.

Text form: terms sorted by (a, b), each "c*Q1^a*Q2^b" with c as "num/den" or a
cyclotomic literal, joined by " + "; zero is "0" over Q and "0@p" over Q(zeta_p).
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping, Union

from .cyclo import CycloRat

Coeff = Union[Fraction, CycloRat]
Exp = tuple[int, int]


def _coeff_ring(c: object) -> int | None:
    if isinstance(c, CycloRat):
        return c.p
    if isinstance(c, (int, Fraction)):
        return None
    raise TypeError(f"unsupported coefficient type {type(c).__name__}")


class BiLaurent:
    __slots__ = ("terms", "ring")

    def __init__(self, terms: Mapping[Exp, object] | Iterable[tuple[Exp, object]] = (), ring: int | None = None) -> None:
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Exp, Coeff] = {}
        for (a, b), c in items:
            r = _coeff_ring(c)
            if r is not None and ring is None:
                raise TypeError("cyclotomic coefficient in a rational BiLaurent; promote explicitly")
            if r is not None and r != ring:
                raise TypeError("mixed cyclotomic rings")
            if ring is not None and r is None:
                c = CycloRat(ring, [c])
            elif r is None:
                c = Fraction(c)
            key = (int(a), int(b))
            acc[key] = acc[key] + c if key in acc else c
        self.terms: dict[Exp, Coeff] = {k: v for k, v in acc.items() if v != 0}
        self.ring = ring

    # constructors

    @classmethod
    def zero(cls, ring: int | None = None) -> "BiLaurent":
        return cls({}, ring)

    @classmethod
    def one(cls, ring: int | None = None) -> "BiLaurent":
        return cls({(0, 0): 1}, ring)

    @classmethod
    def monomial(cls, a: int, b: int, c: object = 1, ring: int | None = None) -> "BiLaurent":
        return cls({(a, b): c}, ring)

    def promote(self, p: int) -> "BiLaurent":
        if self.ring == p:
            return self
        if self.ring is not None:
            raise TypeError("already over a different cyclotomic ring")
        return BiLaurent({k: CycloRat(p, [v]) for k, v in self.terms.items()}, p)

    # arithmetic

    def _check(self, other: "BiLaurent") -> None:
        if self.ring != other.ring:
            raise TypeError(f"mixed coefficient rings: {self.ring} vs {other.ring}")

    def _lift(self, other: object) -> "BiLaurent":
        if isinstance(other, BiLaurent):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return BiLaurent({(0, 0): other}, self.ring)
        if isinstance(other, CycloRat):
            if self.ring != other.p:
                raise TypeError("mixed coefficient rings")
            return BiLaurent({(0, 0): other}, self.ring)
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other: object) -> "BiLaurent":
        o = self._lift(other)
        acc = dict(self.terms)
        for k, v in o.terms.items():
            acc[k] = acc[k] + v if k in acc else v
        return BiLaurent(acc, self.ring)

    __radd__ = __add__

    def __neg__(self) -> "BiLaurent":
        return BiLaurent({k: -v for k, v in self.terms.items()}, self.ring)

    def __sub__(self, other: object) -> "BiLaurent":
        return self + (-self._lift(other))

    def __rsub__(self, other: object) -> "BiLaurent":
        return self._lift(other) - self

    def __mul__(self, other: object) -> "BiLaurent":
        o = self._lift(other)
        acc: dict[Exp, Coeff] = {}
        for (a1, b1), c1 in self.terms.items():
            for (a2, b2), c2 in o.terms.items():
                k = (a1 + a2, b1 + b2)
                v = c1 * c2
                acc[k] = acc[k] + v if k in acc else v
        return BiLaurent(acc, self.ring)

    __rmul__ = __mul__

    def scalar(self, c: object) -> "BiLaurent":
        return self * c

    def shift(self, a: int, b: int) -> "BiLaurent":
        return BiLaurent({(x + a, y + b): v for (x, y), v in self.terms.items()}, self.ring)

    def swap(self) -> "BiLaurent":
        """Exchange the roles of Q1 and Q2."""
        return BiLaurent({(y, x): v for (x, y), v in self.terms.items()}, self.ring)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, BiLaurent):
            return self.ring == other.ring and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == BiLaurent({(0, 0): other}, self.ring)
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.ring, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def eval_at_zero(self) -> Coeff:
        """Value at s1 = s2 = 0, i.e. the sum of coefficients."""
        total: Coeff = Fraction(0) if self.ring is None else CycloRat(self.ring, [0])
        for v in self.terms.values():
            total = total + v
        return total

    def derivative_functional(self, r_plus: int, r_minus: int) -> Fraction:
        """(log q)^{-r} d^{r+}/ds1 d^{r-}/ds2 at s = 0: sum of c a^{r+} b^{r-}."""
        if self.ring is not None:
            raise TypeError("derivative functional needs rational coefficients")
        return sum((c * a**r_plus * b**r_minus for (a, b), c in self.terms.items()), Fraction(0))

    # text form

    def text(self) -> str:
        if not self.terms:
            return "0" if self.ring is None else f"0@{self.ring}"
        parts = []
        for a, b in sorted(self.terms):
            c = self.terms[(a, b)]
            ctext = f"{c.numerator}/{c.denominator}" if isinstance(c, Fraction) else c.text()
            parts.append(f"{ctext}*Q1^{a}*Q2^{b}")
        return " + ".join(parts)

    def __str__(self) -> str:
        return self.text()

    def __repr__(self) -> str:
        return f"BiLaurent({self.text()!r})"

    @classmethod
    def parse(cls, text: str) -> "BiLaurent":
        s = text.strip()
        if s == "0":
            return cls()
        if s.startswith("0@"):
            return cls((), int(s[2:]))
        ring: int | None = None
        terms: list[tuple[Exp, object]] = []
        for part in s.split(" + "):
            m = _TERM.match(part.strip())
            if not m:
                raise ValueError(f"cannot parse term {part!r}")
            ctext, a, b = m.groups()
            if ctext.startswith("<"):
                c: object = CycloRat.parse(ctext)
                if ring is None:
                    ring = c.p  # type: ignore[attr-defined]
            else:
                c = Fraction(ctext)
            terms.append(((int(a), int(b)), c))
        if ring is not None:
            terms = [(k, c if isinstance(c, CycloRat) else CycloRat(ring, [c])) for k, c in terms]
        return cls(terms, ring)


_TERM = re.compile(r"^(<[^>]*>|-?\d+/\d+)\*Q1\^(-?\d+)\*Q2\^(-?\d+)$")
