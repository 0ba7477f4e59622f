"""Rational functions in one formal variable over Q or Q(zeta_p).

A value is Y^shift * num(Y) / den(Y) with den monic, gcd(num, den) = 1 and
Y not dividing num or den.  Coefficients are Fractions or CycloRats.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence, Union

from .cyclo import CycloRat

Scalar = Union[Fraction, CycloRat]


def _is_zero(c: object) -> bool:
    return c == 0


def _trim(a: Sequence[Scalar]) -> list[Scalar]:
    a = list(a)
    while a and _is_zero(a[-1]):
        a.pop()
    return a


def _low(a: Sequence[Scalar]) -> int:
    for i, c in enumerate(a):
        if not _is_zero(c):
            return i
    return len(a)


def _add(a: Sequence[Scalar], b: Sequence[Scalar]) -> list[Scalar]:
    n = max(len(a), len(b))
    out = []
    for i in range(n):
        x = a[i] if i < len(a) else Fraction(0)
        y = b[i] if i < len(b) else Fraction(0)
        out.append(x + y)
    return _trim(out)


def _mul(a: Sequence[Scalar], b: Sequence[Scalar]) -> list[Scalar]:
    if not a or not b:
        return []
    out: list[Scalar] = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if _is_zero(x):
            continue
        for j, y in enumerate(b):
            if not _is_zero(y):
                out[i + j] = out[i + j] + x * y
    return _trim(out)


def _scale(c: Scalar, a: Sequence[Scalar]) -> list[Scalar]:
    return _trim([c * x for x in a])


def _divmod(a: Sequence[Scalar], b: Sequence[Scalar]) -> tuple[list[Scalar], list[Scalar]]:
    b = _trim(b)
    if not b:
        raise ZeroDivisionError("division by the zero polynomial")
    r = _trim(a)
    if len(r) < len(b):
        return [], r
    inv = 1 / b[-1]
    qt: list[Scalar] = [Fraction(0)] * (len(r) - len(b) + 1)
    r = list(r)
    for i in range(len(r) - len(b), -1, -1):
        c = r[i + len(b) - 1] * inv
        if _is_zero(c):
            continue
        qt[i] = c
        for j, y in enumerate(b):
            r[i + j] = r[i + j] - c * y
    return _trim(qt), _trim(r[: len(b) - 1])


def _monic(a: Sequence[Scalar]) -> list[Scalar]:
    a = _trim(a)
    if not a:
        return []
    return _scale(1 / a[-1], a)


def _gcd(a: Sequence[Scalar], b: Sequence[Scalar]) -> list[Scalar]:
    a, b = _trim(a), _trim(b)
    while b:
        a, b = b, _divmod(a, b)[1]
    return _monic(a)


class RatFunc1:
    __slots__ = ("shift", "num", "den")

    def __init__(self, num: Sequence[Scalar], den: Sequence[Scalar] = (Fraction(1),), shift: int = 0) -> None:
        num = _trim([_coerce(c) for c in num])
        den = _trim([_coerce(c) for c in den])
        if not den:
            raise ZeroDivisionError("zero denominator")
        if not num:
            self.shift, self.num, self.den = 0, (), (Fraction(1),)
            return
        ln, ld = _low(num), _low(den)
        num, den = num[ln:], den[ld:]
        shift += ln - ld
        g = _gcd(num, den)
        if len(g) > 1:
            num = _divmod(num, g)[0]
            den = _divmod(den, g)[0]
        lead = den[-1]
        self.num = tuple(_scale(1 / lead, num))
        self.den = tuple(_scale(1 / lead, den))
        self.shift = shift

    @classmethod
    def const(cls, c: Scalar) -> "RatFunc1":
        return cls([c])

    @classmethod
    def monomial(cls, c: Scalar, k: int) -> "RatFunc1":
        return cls([c], shift=k)

    @classmethod
    def geometric(cls, c: Scalar, r: Scalar, start: int) -> "RatFunc1":
        """sum_{n >= start} c r^n Y^n as a formal series."""
        lead = c * _power(r, start)
        return cls([lead], [Fraction(1), -r], shift=start)

    def __add__(self, other: object) -> "RatFunc1":
        o = _lift(other)
        m = min(self.shift, o.shift)
        a = _mul([Fraction(0)] * (self.shift - m) + list(self.num), o.den)
        b = _mul([Fraction(0)] * (o.shift - m) + list(o.num), self.den)
        return RatFunc1(_add(a, b), _mul(self.den, o.den), m)

    __radd__ = __add__

    def __neg__(self) -> "RatFunc1":
        return RatFunc1([-c for c in self.num], self.den, self.shift)

    def __sub__(self, other: object) -> "RatFunc1":
        return self + (-_lift(other))

    def __mul__(self, other: object) -> "RatFunc1":
        o = _lift(other)
        return RatFunc1(_mul(self.num, o.num), _mul(self.den, o.den), self.shift + o.shift)

    __rmul__ = __mul__

    def __truediv__(self, other: object) -> "RatFunc1":
        o = _lift(other)
        if not o.num:
            raise ZeroDivisionError("division by the zero rational function")
        return RatFunc1(_mul(self.num, o.den), _mul(self.den, o.num), self.shift - o.shift)

    def __eq__(self, other: object) -> bool:
        try:
            o = _lift(other)
        except TypeError:
            return NotImplemented
        return self.shift == o.shift and self.num == o.num and self.den == o.den

    def __hash__(self) -> int:
        return hash((self.shift, self.num, self.den))

    def is_laurent(self) -> bool:
        return len(self.den) == 1

    def laurent_terms(self) -> dict[int, Scalar]:
        """Exponent -> coefficient, for a Laurent polynomial; error otherwise."""
        if not self.is_laurent():
            raise ValueError("not a Laurent polynomial: the series has a non-terminating tail")
        return {self.shift + i: c for i, c in enumerate(self.num) if not _is_zero(c)}

    def value_at_one(self) -> Scalar:
        d = sum(self.den, Fraction(0))
        if _is_zero(d):
            raise ZeroDivisionError("pole at Y = 1")
        return sum(self.num, Fraction(0)) / d

    def __repr__(self) -> str:
        return f"RatFunc1(shift={self.shift}, num={list(self.num)}, den={list(self.den)})"


def _coerce(c: object) -> Scalar:
    if isinstance(c, CycloRat):
        return c
    if isinstance(c, (int, Fraction)):
        return Fraction(c)
    raise TypeError(f"unsupported coefficient {type(c).__name__}")


def _lift(other: object) -> RatFunc1:
    if isinstance(other, RatFunc1):
        return other
    if isinstance(other, (int, Fraction, CycloRat)):
        return RatFunc1([other])
    raise TypeError(f"cannot combine RatFunc1 with {type(other).__name__}")


def _power(r: Scalar, n: int) -> Scalar:
    if n >= 0:
        out: Scalar = Fraction(1)
        for _ in range(n):
            out = out * r
        return out
    return 1 / _power(r, -n)
