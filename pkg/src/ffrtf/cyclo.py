"""The cyclotomic field Q(zeta_p) = Q[Z]/Phi_p(Z), exact.

An element is stored by its coordinates in the basis 1, Z, ..., Z^{p-2}.
Rationals (int, Fraction) mix in freely; two elements with different p do not.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Union

Rational = Union[int, Fraction]


class CycloRat:
    __slots__ = ("p", "c")

    def __init__(self, p: int, coeffs: Iterable[Rational]) -> None:
        vec = [Fraction(x) for x in coeffs]
        if len(vec) > p - 1:
            # reduce modulo Z^p - 1, then modulo Phi_p
            full = [Fraction(0)] * p
            for i, x in enumerate(vec):
                full[i % p] += x
            top = full[p - 1]
            vec = [full[i] - top for i in range(p - 1)]
        else:
            vec = vec + [Fraction(0)] * (p - 1 - len(vec))
        self.p = p
        self.c = tuple(vec)

    @classmethod
    def zeta(cls, p: int, k: int = 1) -> "CycloRat":
        k %= p
        vec = [0] * p
        vec[k] = 1
        return cls(p, vec)

    @classmethod
    def rational(cls, p: int, r: Rational) -> "CycloRat":
        return cls(p, [r])

    def _coerce(self, other: object) -> "CycloRat":
        if isinstance(other, CycloRat):
            if other.p != self.p:
                raise TypeError(f"cannot mix Q(zeta_{self.p}) with Q(zeta_{other.p})")
            return other
        if isinstance(other, (int, Fraction)):
            return CycloRat(self.p, [other])
        raise TypeError(f"cannot combine CycloRat with {type(other).__name__}")

    def __add__(self, other: object) -> "CycloRat":
        o = self._coerce(other)
        return CycloRat(self.p, [a + b for a, b in zip(self.c, o.c)])

    __radd__ = __add__

    def __neg__(self) -> "CycloRat":
        return CycloRat(self.p, [-a for a in self.c])

    def __sub__(self, other: object) -> "CycloRat":
        return self + (-self._coerce(other))

    def __rsub__(self, other: object) -> "CycloRat":
        return self._coerce(other) - self

    def __mul__(self, other: object) -> "CycloRat":
        if isinstance(other, (int, Fraction)):
            return CycloRat(self.p, [a * other for a in self.c])
        o = self._coerce(other)
        full = [Fraction(0)] * self.p
        for i, a in enumerate(self.c):
            if a:
                for j, b in enumerate(o.c):
                    if b:
                        full[(i + j) % self.p] += a * b
        return CycloRat(self.p, full)

    __rmul__ = __mul__

    def galois(self, a: int) -> "CycloRat":
        """The automorphism Z -> Z^a, gcd(a, p) = 1."""
        if a % self.p == 0:
            raise ValueError("Galois action needs a unit exponent")
        full = [Fraction(0)] * self.p
        for i, x in enumerate(self.c):
            full[(i * a) % self.p] += x
        return CycloRat(self.p, full)

    def conj(self) -> "CycloRat":
        return self.galois(-1)

    def norm(self) -> Fraction:
        prod: CycloRat = CycloRat(self.p, [1])
        for a in range(1, self.p):
            prod = prod * self.galois(a)
        if not prod.is_rational():
            raise ArithmeticError("norm is not rational")
        return prod.c[0]

    def inverse(self) -> "CycloRat":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in Q(zeta_p)")
        others: CycloRat = CycloRat(self.p, [1])
        for a in range(2, self.p):
            others = others * self.galois(a)
        n = (self * others)
        if not n.is_rational():
            raise ArithmeticError("norm is not rational")
        return others * (1 / n.c[0])

    def __truediv__(self, other: object) -> "CycloRat":
        if isinstance(other, (int, Fraction)):
            return CycloRat(self.p, [a / Fraction(other) for a in self.c])
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other: object) -> "CycloRat":
        return self._coerce(other) * self.inverse()

    def __pow__(self, n: int) -> "CycloRat":
        if n < 0:
            return self.inverse() ** (-n)
        r: CycloRat = CycloRat(self.p, [1])
        b = self
        while n:
            if n & 1:
                r = r * b
            b = b * b
            n >>= 1
        return r

    def is_zero(self) -> bool:
        return not any(self.c)

    def is_rational(self) -> bool:
        return not any(self.c[1:])

    def to_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("element is not rational")
        return self.c[0]

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.c[0] == other
        if isinstance(other, CycloRat):
            return self.p == other.p and self.c == other.c
        return NotImplemented

    def __hash__(self) -> int:
        if self.is_rational():
            return hash(self.c[0])
        return hash((self.p, self.c))

    def __repr__(self) -> str:
        return f"CycloRat({self.p}, {self.text()})"

    def text(self) -> str:
        """Canonical text: <p:c0,c1,...,c_{p-2}> with every c as num/den."""
        return f"<{self.p}:" + ",".join(f"{x.numerator}/{x.denominator}" for x in self.c) + ">"

    @classmethod
    def parse(cls, text: str) -> "CycloRat":
        s = text.strip()
        if not (s.startswith("<") and s.endswith(">") and ":" in s):
            raise ValueError(f"not a cyclotomic literal: {text!r}")
        head, body = s[1:-1].split(":", 1)
        p = int(head)
        coeffs = [Fraction(x) for x in body.split(",")]
        if len(coeffs) != p - 1:
            raise ValueError(f"expected {p - 1} coordinates in {text!r}")
        return cls(p, coeffs)
