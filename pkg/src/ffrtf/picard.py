"""Line bundles on P^1 with a square root of their restriction to R.

A sign object at x in R is the class of the trivialization iota: theta^2 -> L|_x
modulo squares; it is represented by +1 (iota = 1) or -1 (iota = a fixed
nonsquare nu_x of k(x)).  A point (L, s, alpha) of degree n then has
alpha_x^2 = e_x * s(x), where e_x is 1 or nu_x.  Sections are forms of degree n
written in the affine chart, so s is a polynomial of degree <= n and the
multiplicity at infinity is n - deg s.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterator, Sequence

from . import poly as P
from .places import (
    INFINITY,
    DoubleCover,
    Place,
    RatFn,
    SqrtRClass,
    lift_residue,
    local_expansion,
    rat_divisor,
    reduce_poly,
    split_valuation,
)
from .poly import Poly


def sign_rep(cover: DoubleCover, x: Place, sign: int) -> int:
    k = cover.k(x)
    return 1 if sign == 1 else k.nonsquare()


def section_value(cover: DoubleCover, x: Place, s: Poly) -> int:
    return reduce_poly(cover.F, x, s)


@dataclass(frozen=True)
class SqrtSectionPoint:
    """(O(n), s, alpha) with alpha_x^2 = e_x s(x) for x in R (ordered as cover.R)."""

    n: int
    s: Poly
    alpha: tuple[int, ...]
    signs: tuple[int, ...]

    def text(self) -> str:
        return f"(n={self.n}, s={P.to_str(self.s)}, inf^{self.n - P.deg(self.s) if self.s else self.n}, alpha={list(self.alpha)})"


def canonical_alpha(cover: DoubleCover, x: Place, a: int) -> int:
    """Representative of alpha up to sign."""
    k = cover.k(x)
    return min(a, k.neg(a))


def make_point(cover: DoubleCover, n: int, s: Sequence[int], alpha: Sequence[int],
               signs: Sequence[int] | None = None) -> SqrtSectionPoint:
    s = P.trim(tuple(s))
    if s and P.deg(s) > n:
        raise ValueError("section degree exceeds the bundle degree")
    signs = tuple(signs) if signs is not None else (1,) * len(cover.R)
    if len(alpha) != len(cover.R) or len(signs) != len(cover.R):
        raise ValueError("one alpha and one sign per ramified place")
    out = []
    for x, a, e in zip(cover.R, alpha, signs):
        k = cover.k(x)
        if e not in (1, -1):
            raise ValueError("signs are +1 or -1")
        if k.mul(a, a) != k.mul(sign_rep(cover, x, e), section_value(cover, x, s)):
            raise ValueError(f"alpha^2 != e*s at {x.text()}")
        out.append(canonical_alpha(cover, x, a))
    return SqrtSectionPoint(n, s, tuple(out), signs)


def unit_point(cover: DoubleCover) -> SqrtSectionPoint:
    return make_point(cover, 0, P.ONE, (1,) * len(cover.R))


def add_points(cover: DoubleCover, p1: SqrtSectionPoint, p2: SqrtSectionPoint) -> SqrtSectionPoint:
    F = cover.F
    alpha, signs = [], []
    for x, a1, a2, e1, e2 in zip(cover.R, p1.alpha, p2.alpha, p1.signs, p2.signs):
        k = cover.k(x)
        a = k.mul(a1, a2)
        if e1 == e2 == -1:
            a = k.div(a, k.nonsquare())  # nu^2 is a square: return to the trivial sign object
        alpha.append(a)
        signs.append(e1 * e2)
    return make_point(cover, p1.n + p2.n, P.mul(F, p1.s, p2.s), alpha, signs)


def point_class(cover: DoubleCover, p: SqrtSectionPoint) -> SqrtRClass:
    """Class in Div^sqrtR of the idele of s in the chart trivializations, twisted by the sign objects."""
    if not p.s:
        raise ValueError("weight is undefined on the zero section")
    F = cover.F
    vals = dict(rat_divisor(F, RatFn(p.s)).mult)
    vals.pop(INFINITY, None)
    vals[INFINITY] = p.n - P.deg(p.s)
    signs = {}
    for x, e in zip(cover.R, p.signs):
        _, r = split_valuation(F, x, p.s)
        signs[x] = cover.sign_class(x, cover.k(x).mul(sign_rep(cover, x, e), r))
    return SqrtRClass.make(vals, signs)


def weight(cover: DoubleCover, p: SqrtSectionPoint) -> int:
    """eta of the Abel-Jacobi image of a point with nonzero section."""
    return cover.eta_global(point_class(cover, p))


def weight_via_local(cover: DoubleCover, p: SqrtSectionPoint, prec: int = 4) -> int:
    """Same weight as a product of local Hilbert symbols on expansions of the idele."""
    if not p.s:
        raise ValueError("weight is undefined on the zero section")
    F = cover.F
    places = set(rat_divisor(F, RatFn(p.s)).mult) | set(cover.R) | {INFINITY}
    out = 1
    for x in sorted(places, key=lambda y: y.sort_key()):
        if x.is_infinity:
            z = local_expansion(F, x, RatFn.make(F, p.s, P.power(F, P.T, p.n)), prec)
        else:
            z = local_expansion(F, x, RatFn(p.s), prec)
            if x in cover.R:
                e = p.signs[cover.R.index(x)]
                z = z * local_expansion(F, x, RatFn(lift_residue(F, x, sign_rep(cover, x, e))), prec)
        out *= cover.eta_local(x, z)
    return out


def weight_closed_form(cover: DoubleCover, p: SqrtSectionPoint) -> int:
    """prod eta_x(w_x)^{m_x}, valid when the divisor of s avoids R."""
    if any(section_value(cover, x, p.s) == 0 for x in cover.R):
        raise ValueError("closed form needs a section nonvanishing on R")
    vals = dict(rat_divisor(cover.F, RatFn(p.s)).mult)
    vals[INFINITY] = p.n - P.deg(p.s)
    out = 1
    for x, m in vals.items():
        if m % 2:
            out *= cover.eta_uniformizer(x)
    return out


def alpha_choices(cover: DoubleCover, x: Place, value: int, sign: int = 1) -> list[int]:
    """All alpha in k(x) with alpha^2 = e * value."""
    k = cover.k(x)
    target = k.mul(sign_rep(cover, x, sign), value)
    return [a for a in k.elements() if k.mul(a, a) == target]


def groupoid_count_fiber(cover: DoubleCover, s: Poly, signs: Sequence[int] | None = None) -> Fraction:
    """Groupoid cardinality of alpha-data over a fixed nonzero section: |S| / |G| with G = mu_2^R."""
    if not P.trim(s):
        raise ValueError("fiber count needs a nonzero section")
    signs = tuple(signs) if signs is not None else (1,) * len(cover.R)
    total = Fraction(1)
    for x, e in zip(cover.R, signs):
        total *= Fraction(len(alpha_choices(cover, x, section_value(cover, x, s), e)), 2)
    return total


def fiber_closed_form(cover: DoubleCover, s: Poly) -> Fraction:
    out = Fraction(1)
    for x in cover.R:
        v = section_value(cover, x, s)
        k = cover.k(x)
        out *= Fraction(1, 2) if v == 0 else (1 if k.chi(v) == 1 else 0)
    return out


def iter_points(cover: DoubleCover, n: int, signs: Sequence[int] | None = None) -> Iterator[SqrtSectionPoint]:
    """All isomorphism classes of points of degree n with nonzero section over the given sign objects."""
    signs = tuple(signs) if signs is not None else (1,) * len(cover.R)
    for s in P.iter_polys(cover.F, n):
        if not s:
            continue
        per_place = []
        for x, e in zip(cover.R, signs):
            k = cover.k(x)
            reps = sorted({canonical_alpha(cover, x, a) for a in alpha_choices(cover, x, section_value(cover, x, s), e)})
            per_place.append(reps)
            del k
        for alpha in product(*per_place):
            yield SqrtSectionPoint(n, s, tuple(alpha), signs)


def automorphism_count(cover: DoubleCover, p: SqrtSectionPoint) -> int:
    return 2 ** sum(1 for a in p.alpha if a == 0)


def norm_point(cover: DoubleCover, A: Poly, B: Poly, k: int) -> SqrtSectionPoint:
    """Norm of the section A + B y of the pullback of O(k) to the cover.

    The norm is A^2 - f B^2, a form of degree 2k on P^1; alpha_x is the value
    of A + B y at the ramification point over x, where y = 0.
    """
    F = cover.F
    A, B = P.trim(A), P.trim(B)
    half = P.deg(cover.f) // 2
    if (A and P.deg(A) > k) or (B and P.deg(B) > k - half):
        raise ValueError("section does not lie in the pulled-back bundle")
    s = P.sub(F, P.mul(F, A, A), P.mul(F, cover.f, P.mul(F, B, B)))
    alpha = [section_value(cover, x, A) for x in cover.R]
    return make_point(cover, 2 * k, s, alpha)


def iter_cover_sections(cover: DoubleCover, k: int) -> Iterator[tuple[Poly, Poly]]:
    half = P.deg(cover.f) // 2
    for A in P.iter_polys(cover.F, k):
        for B in (P.iter_polys(cover.F, k - half) if k >= half else [P.ZERO]):
            if A or B:
                yield A, B


def sign_objects(cover: DoubleCover) -> list[tuple[int, ...]]:
    return [tuple(e) for e in product((1, -1), repeat=len(cover.R))]


def gerbe_cardinality(cover: DoubleCover) -> Fraction:
    """Groupoid cardinality of Pic^{sqrtR, n} on P^1 from the presentation S / G.

    S = prod_{x in R} k(x)^x (the trivializations iota), G = prod k(x)^x acting by
    iota -> c^2 iota.  The global scalars of O(n) are not divided out (the Pic
    convention counts |Pic^n| = 1).
    """
    total = Fraction(0)
    units = [[a for a in cover.k(x).elements() if a] for x in cover.R]
    S = list(product(*units))
    seen: set[tuple[int, ...]] = set()
    for iota in S:
        if iota in seen:
            continue
        orbit = set()
        stab = 0
        for c in product(*units):
            img = tuple(cover.k(x).mul(cover.k(x).mul(ci, ci), a) for x, ci, a in zip(cover.R, c, iota))
            orbit.add(img)
            if img == iota:
                stab += 1
        seen |= orbit
        total += Fraction(1, stab)
    return total
