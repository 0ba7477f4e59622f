"""Finite fields: prime fields F_p and extensions F_p[t]/(m(t)).

Elements of every field are plain Python ints.  In a prime field they are
residues 0..p-1; in an extension of degree d they encode the coefficient
vector (c_0, ..., c_{d-1}) of a polynomial in the generator as
sum c_i p^i.
"""

from __future__ import annotations

from functools import cached_property
from typing import Iterator, Sequence

_TABLE_LIMIT = 20000


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


class PrimeField:
    """The field F_p for an odd prime 3 <= p <= 13."""

    is_prime_field = True

    def __init__(self, p: int) -> None:
        if not (isinstance(p, int) and 3 <= p <= 13 and is_prime(p)):
            raise ValueError(f"prime field needs an odd prime 3 <= p <= 13, got {p!r}")
        self.p = p
        self.char = p
        self.order = p
        self.degree = 1
        self.zero = 0
        self.one = 1

    def __repr__(self) -> str:
        return f"PrimeField({self.p})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("F", self.p))

    def elements(self) -> range:
        return range(self.p)

    def from_int(self, n: int) -> int:
        return n % self.p

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.p

    def neg(self, a: int) -> int:
        return (-a) % self.p

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.p

    def inv(self, a: int) -> int:
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of zero in a finite field")
        return pow(a, self.p - 2, self.p)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, n: int) -> int:
        if n < 0:
            return pow(self.inv(a), -n, self.p)
        return pow(a, n, self.p)

    def frobenius(self, a: int) -> int:
        return a

    def pth_root(self, a: int) -> int:
        return a

    @cached_property
    def _chi(self) -> tuple[int, ...]:
        sq = {(x * x) % self.p for x in range(1, self.p)}
        return tuple(0 if a == 0 else (1 if a in sq else -1) for a in range(self.p))

    def chi(self, a: int) -> int:
        """Quadratic character: 0 at 0, +1 on nonzero squares, -1 otherwise."""
        return self._chi[a % self.p]

    def is_square(self, a: int) -> bool:
        return self._chi[a % self.p] >= 0

    def sqrts(self, a: int) -> list[int]:
        return sorted(x for x in range(self.p) if (x * x - a) % self.p == 0)

    def nonsquare(self) -> int:
        return next(a for a in range(1, self.p) if self._chi[a] == -1)

    def trace_to_prime(self, a: int) -> int:
        return a


class ExtField:
    """The field base[t]/(modulus) for a monic irreducible modulus."""

    is_prime_field = False

    def __init__(self, base: PrimeField, modulus: Sequence[int]) -> None:
        from . import poly as P

        mod = P.trim(tuple(c % base.p for c in modulus))
        if len(mod) < 2 or mod[-1] != 1:
            raise ValueError("modulus must be monic of degree >= 1")
        if not P.is_irreducible(base, mod):
            raise ValueError(f"modulus {mod} is not irreducible over F_{base.p}")
        self.base = base
        self.modulus = mod
        self.p = base.p
        self.char = base.p
        self.degree = len(mod) - 1
        self.order = base.p**self.degree
        self.zero = 0
        self.one = 1

    def __repr__(self) -> str:
        return f"ExtField({self.p}, {self.modulus})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ExtField) and other.p == self.p and other.modulus == self.modulus

    def __hash__(self) -> int:
        return hash(("E", self.p, self.modulus))

    def elements(self) -> range:
        return range(self.order)

    # vector encoding

    def to_vec(self, a: int) -> tuple[int, ...]:
        out = []
        for _ in range(self.degree):
            a, r = divmod(a, self.p)
            out.append(r)
        return tuple(out)

    def from_vec(self, v: Sequence[int]) -> int:
        if len(v) > self.degree:
            from . import poly as P

            v = P.polymod(self.base, P.trim(tuple(c % self.p for c in v)), self.modulus)
        n = 0
        for c in reversed(tuple(v)):
            n = n * self.p + (c % self.p)
        return n

    def from_int(self, n: int) -> int:
        return n % self.p

    def generator(self) -> int:
        """The class of t."""
        return self.from_vec((0, 1)) if self.degree > 1 else (-self.modulus[0]) % self.p

    # arithmetic

    def add(self, a: int, b: int) -> int:
        va, vb = self.to_vec(a), self.to_vec(b)
        return self.from_vec(tuple((x + y) % self.p for x, y in zip(va, vb)))

    def neg(self, a: int) -> int:
        return self.from_vec(tuple((-x) % self.p for x in self.to_vec(a)))

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def _mul_slow(self, a: int, b: int) -> int:
        from . import poly as P

        prod = P.mul(self.base, P.trim(self.to_vec(a)), P.trim(self.to_vec(b)))
        return self.from_vec(P.polymod(self.base, prod, self.modulus))

    @cached_property
    def _tables(self) -> tuple[list[int], list[int]] | None:
        if self.order > _TABLE_LIMIT:
            return None
        n = self.order - 1
        for g in range(2, self.order):
            exp = [1]
            x = 1
            ok = True
            for i in range(1, n):
                x = self._mul_slow(x, g)
                if x == 1:
                    ok = False
                    break
                exp.append(x)
            if ok:
                log = [0] * self.order
                for i, e in enumerate(exp):
                    log[e] = i
                return exp, log
        raise RuntimeError("no primitive element found")

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        t = self._tables
        if t is None:
            return self._mul_slow(a, b)
        exp, log = t
        return exp[(log[a] + log[b]) % (self.order - 1)]

    def pow(self, a: int, n: int) -> int:
        if a == 0:
            if n <= 0:
                raise ZeroDivisionError("zero to a non-positive power")
            return 0
        t = self._tables
        if t is not None:
            exp, log = t
            return exp[(log[a] * n) % (self.order - 1)]
        if n < 0:
            a, n = self.inv(a), -n
        r = 1
        while n:
            if n & 1:
                r = self._mul_slow(r, a)
            a = self._mul_slow(a, a)
            n >>= 1
        return r

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in a finite field")
        t = self._tables
        if t is not None:
            exp, log = t
            return exp[(-log[a]) % (self.order - 1)]
        return self.pow(a, self.order - 2)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def frobenius(self, a: int) -> int:
        return self.pow(a, self.p)

    def pth_root(self, a: int) -> int:
        return self.pow(a, self.order // self.p)

    def chi(self, a: int) -> int:
        if a == 0:
            return 0
        t = self._tables
        if t is not None:
            return 1 if t[1][a] % 2 == 0 else -1
        return 1 if self.pow(a, (self.order - 1) // 2) == 1 else -1

    def is_square(self, a: int) -> bool:
        return self.chi(a) >= 0

    def sqrts(self, a: int) -> list[int]:
        if a == 0:
            return [0]
        if self.chi(a) < 0:
            return []
        t = self._tables
        if t is not None:
            exp, log = t
            r = exp[log[a] // 2]
            return sorted({r, self.neg(r)})
        return sorted(x for x in range(self.order) if self.mul(x, x) == a)

    def nonsquare(self) -> int:
        return next(a for a in range(1, self.order) if self.chi(a) == -1)

    def trace_to_prime(self, a: int) -> int:
        """Absolute trace to F_p: a + a^p + ... + a^{p^{d-1}}."""
        s = 0
        x = a
        for _ in range(self.degree):
            s = self.add(s, x)
            x = self.frobenius(x)
        vec = self.to_vec(s)
        if any(vec[1:]):
            raise ArithmeticError("trace did not land in the prime field")
        return vec[0]


Field = PrimeField | ExtField


def iter_nonzero(F: Field) -> Iterator[int]:
    return iter(range(1, F.order))
