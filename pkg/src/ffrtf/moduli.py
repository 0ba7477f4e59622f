"""Point counts of the section-pair moduli over P^1 and the Picard group of the cover.

Forms of degree n on P^1 are polynomials of degree <= n; the multiplicity at
infinity is n - deg.  A base point is a pair of forms (a, b) of degree d + rho,
normalized by a - b = F_D * f where F_D is the monic polynomial of the finite
part of D; this fixes the overall scaling.

Sign objects at x in R are +1 / -1 (see picard.py).  A quadruple of sign
objects (e1', e1, e2, e2' = 1) gives the entry (i, j) the twist r(e_j) / r(e_i'),
where r(+1) = 1 and r(-1) is the fixed nonsquare of k(x).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Iterator, Sequence

from . import poly as P
from .fields import ExtField, Field
from .places import (
    INFINITY,
    INERT,
    RAMIFIED,
    SPLIT,
    DoubleCover,
    Divisor,
    Place,
    RatFn,
    SigmaData,
    SqrtRClass,
    enumerate_effective_divisors,
    rat_divisor,
    reduce_poly,
    split_valuation,
)
from .poly import Poly

ENTRIES = ("11", "12", "21", "22")


# ---------------------------------------------------------------- degrees


@dataclass(frozen=True, order=True)
class QuadDegree:
    d11: int
    d12: int
    d21: int
    d22: int

    def in_Q(self, d: int, rho: int) -> bool:
        return self.in_Q_hat(d, rho) and min(self.d11, self.d12, self.d21, self.d22) >= 0

    def in_Q_hat(self, d: int, rho: int) -> bool:
        return self.d11 + self.d22 == d + rho == self.d12 + self.d21

    def exponents(self, d: int, rho: int) -> tuple[int, int]:
        """(a, b) with q^{a s1 + b s2} the monomial attached to this quadruple."""
        return 2 * self.d12 - d - rho, 2 * self.d11 - d - rho

    def text(self) -> str:
        return f"({self.d11},{self.d12},{self.d21},{self.d22})"


def iter_Q(d: int, rho: int) -> Iterator[QuadDegree]:
    n = d + rho
    for d11 in range(n + 1):
        for d12 in range(n + 1):
            yield QuadDegree(d11, d12, n - d12, n - d11)


# ---------------------------------------------------------------- forms and divisors


def poly_of_divisor(F: Field, E: Divisor) -> Poly:
    """Monic polynomial of the finite part of an effective divisor."""
    out = P.ONE
    for x, m in E.mult.items():
        if not x.is_infinity:
            out = P.mul(F, out, P.power(F, x.pi, m))
    return out


def form_divisor(F: Field, g: Poly, n: int) -> Divisor:
    """Divisor of a nonzero form of degree n, infinity included."""
    if not g:
        raise ValueError("divisor of the zero form")
    mult = dict(rat_divisor(F, RatFn(g)).mult)
    mult.pop(INFINITY, None)
    if n - P.deg(g):
        mult[INFINITY] = n - P.deg(g)
    return Divisor.make(mult)


def form_value(F: Field, x: Place, g: Poly) -> int:
    return reduce_poly(F, x, g) if g else 0


def sub_divisors(B: Divisor, lower: Divisor = Divisor.make({}), degree: int | None = None) -> list[Divisor]:
    """Effective G with lower <= G <= B (optionally of a fixed degree)."""
    if not lower <= B or not lower.is_effective():
        return []
    pls = B.support()
    ranges = [range(lower[x], B[x] + 1) for x in pls]
    out = []
    for ms in product(*ranges):
        G = Divisor.make(dict(zip(pls, ms)))
        if degree is None or G.degree == degree:
            out.append(G)
    return out


def free_divisors(F: Field, degree: int, lower: Divisor, avoid: Sequence[Place]) -> list[Divisor]:
    """Effective G of the given degree with G >= lower, off the avoided places outside lower."""
    rest = degree - lower.degree
    if rest < 0:
        return []
    return [lower + E for E in enumerate_effective_divisors(F, rest, avoid)]


def sigma_divisor(places: Sequence[Place]) -> Divisor:
    return Divisor.of_places(places)


# ---------------------------------------------------------------- square roots along R


def sign_value(k: Field, e: int) -> int:
    return 1 if e == 1 else k.nonsquare()


def sign_patterns() -> list[tuple[int, int, int]]:
    """(e1', e1, e2) with e2' fixed to +1."""
    return list(product((1, -1), repeat=3))


@lru_cache(maxsize=None)
def twisted_targets(k: Field, values: tuple[int, ...], pattern: tuple[int, int, int]) -> tuple[int, ...]:
    e1p, e1, e2 = pattern
    ep = (sign_value(k, e1p), 1)
    e = (sign_value(k, e1), sign_value(k, e2))
    out = []
    for (i, j), v in zip(((0, 0), (0, 1), (1, 0), (1, 1)), values):
        out.append(k.mul(k.div(e[j], ep[i]), v))
    return tuple(out)


@lru_cache(maxsize=None)
def count_square_root_matrices(k: Field, targets: tuple[int, ...]) -> int:
    """#{psi in k^4 : psi_ij^2 = target_ij, psi11 psi22 = psi12 psi21}."""
    roots = [[0] if c == 0 else k.sqrts(c) for c in targets]
    n = 0
    for p11, p12, p21, p22 in product(*roots):
        if k.mul(p11, p22) == k.mul(p12, p21):
            n += 1
    return n


def signed_root_mass(cover: DoubleCover, x: Place, values: Sequence[int]) -> Fraction:
    """(1/8) sum over sign patterns of #psi times eta of the sign object of x11 + x12.

    The sign object of L11 (x) L12 at x is e1' e1 * e1' e2 = e1 e2.
    """
    k = cover.k(x)
    total = 0
    for pat in sign_patterns():
        n = count_square_root_matrices(k, twisted_targets(k, values, pat))
        if n:
            total += n * cover.eta_global(SqrtRClass.make({}, {x: pat[1] * pat[2]}))
    return Fraction(total, 8)


def bundle_eta(cover: DoubleCover, n: int) -> int:
    """eta of O(n) with trivial sign objects (class n * infinity)."""
    return cover.eta_global(SqrtRClass.make({INFINITY: n}, {}))


# ---------------------------------------------------------------- base points


@dataclass(frozen=True)
class BasePoint:
    """A point of the flat base: forms a, b of degree n = d + rho with a - b = F_D f."""

    a: Poly
    b: Poly
    n: int

    def text(self) -> str:
        return f"a={P.to_str(self.a)};b={P.to_str(self.b)}"


def base_difference(cover: DoubleCover, D: Divisor) -> Poly:
    return P.mul(cover.F, poly_of_divisor(cover.F, D), cover.f)


def check_divisor_on_U(cover: DoubleCover, sigma: SigmaData, D: Divisor) -> None:
    if not D.is_effective():
        raise ValueError("D must be effective")
    bad = [x for x in D.support() if x in cover.R or x in sigma.places()]
    if bad:
        raise ValueError(f"D must avoid Sigma and R; it meets {[x.text() for x in bad]}")


def base_conditions_hold(cover: DoubleCover, sigma: SigmaData, D: Divisor, base: BasePoint) -> bool:
    """The defining conditions of the flat base over D, checked literally."""
    F = cover.F
    a, b, n = base.a, base.b, base.n
    if n != D.degree + cover.rho or a == b:
        return False
    for g in (a, b):
        if g and P.deg(g) > n:
            return False
    for x in sigma.minus:
        if form_value(F, x, a) != 0 or form_value(F, x, b) == 0:
            return False
    for x in sigma.plus:
        if form_value(F, x, b) != 0 or form_value(F, x, a) == 0:
            return False
    diff = P.sub(F, a, b)
    return form_divisor(F, diff, n) == D + Divisor.of_places(cover.R)


def enumerate_base(cover: DoubleCover, sigma: SigmaData, D: Divisor) -> list[BasePoint]:
    """All base points over D, one per scaling class."""
    check_divisor_on_U(cover, sigma, D)
    sigma.check_against(cover)
    F = cover.F
    n = D.degree + cover.rho
    diff = base_difference(cover, D)
    out = []
    for a in P.iter_polys(F, n):
        if any(form_value(F, x, a) != 0 for x in sigma.minus):
            continue
        if any(form_value(F, x, a) == 0 for x in sigma.plus):
            continue
        b = P.sub(F, a, diff)
        if any(form_value(F, x, b) != 0 for x in sigma.plus):
            continue
        if any(form_value(F, x, b) == 0 for x in sigma.minus):
            continue
        out.append(BasePoint(a, b, n))
    return out


def inv_D(cover: DoubleCover, base: BasePoint) -> RatFn | None:
    """b / a as a point of P^1(F); None stands for infinity."""
    if not base.a:
        return None
    return RatFn.make(cover.F, base.b, base.a)


def base_from_u(cover: DoubleCover, sigma: SigmaData, D: Divisor, u: RatFn | None) -> BasePoint | None:
    """The base point with inv_D = u, or None when u is not in the image."""
    F = cover.F
    n = D.degree + cover.rho
    diff = base_difference(cover, D)
    if u is None:
        base = BasePoint(P.ZERO, P.neg(F, diff), n)
    else:
        one_minus = RatFn.make(F, P.sub(F, u.den, u.num), u.den)
        if one_minus.is_zero():
            return None
        # a = diff / (1 - u) must be a polynomial of degree <= n
        num = P.mul(F, diff, one_minus.den)
        qt, r = P.divmod_poly(F, num, one_minus.num)
        if r or (qt and P.deg(qt) > n):
            return None
        a = qt
        b = P.sub(F, a, diff)
        base = BasePoint(a, b, n)
    return base if base_conditions_hold(cover, sigma, D, base) else None


# ---------------------------------------------------------------- the N-side count


def _factor_choices(cover: DoubleCover, sigma: SigmaData, g: Poly, n: int, first_deg: int,
                    second_deg: int, second_lower: Divisor, zero_choice: str | None,
                    first_avoid: Sequence[Place], second_avoid: Sequence[Place]) -> list[tuple[Poly, Poly]]:
    """Pairs of forms (phi_first, phi_second) of degrees (first_deg, second_deg) with product g.

    second >= second_lower as divisors.  For g = 0, zero_choice says which factor
    vanishes; the other is any nonzero form (up to scaling).
    """
    F = cover.F
    if first_deg < 0 or second_deg < 0:
        if g or zero_choice is None:
            return []
    if g:
        div = form_divisor(F, g, n)
        out = []
        for G2 in sub_divisors(div, second_lower, second_deg):
            G1 = div - G2
            if any(G1[x] for x in first_avoid) or any((G2 - second_lower)[x] for x in second_avoid):
                continue
            p1 = poly_of_divisor(F, G1)
            out.append((p1, P.exact_div(F, g, p1)))
        return out
    if zero_choice == "first":
        if second_deg < 0:
            return []
        return [(P.ZERO, poly_of_divisor(F, G)) for G in free_divisors(F, second_deg, second_lower, second_avoid)]
    if zero_choice == "second":
        if first_deg < 0:
            return []
        return [(poly_of_divisor(F, G), P.ZERO) for G in free_divisors(F, first_deg, Divisor.make({}), first_avoid)]
    raise ValueError("a zero form needs a choice of vanishing factor")


def _N_sum(cover: DoubleCover, sigma: SigmaData, dq: QuadDegree, base: BasePoint,
           zero_a: str | None, zero_b: str | None) -> Fraction:
    F = cover.F
    n = base.n
    S_plus, S_minus = sigma_divisor(sigma.plus), sigma_divisor(sigma.minus)
    # a = phi11 phi22 with phi22 >= Sigma_-; b = phi12 phi21 with phi21 >= Sigma_+
    diag = _factor_choices(cover, sigma, base.a, n, dq.d11, dq.d22, S_minus, zero_a,
                           sigma.plus, sigma.plus)
    if not diag:
        return Fraction(0)
    anti = _factor_choices(cover, sigma, base.b, n, dq.d12, dq.d21, S_plus, zero_b,
                           sigma.minus, sigma.minus)
    if not anti:
        return Fraction(0)
    w_inf = bundle_eta(cover, dq.d11 + dq.d12)
    total = Fraction(0)
    for p11, p22 in diag:
        for p12, p21 in anti:
            mass = Fraction(w_inf)
            for x in cover.R:
                vals = tuple(form_value(F, x, p) for p in (p11, p12, p21, p22))
                mass *= signed_root_mass(cover, x, vals)
                if not mass:
                    break
            total += mass
    return total


def count_N(cover: DoubleCover, sigma: SigmaData, dq: QuadDegree, base: BasePoint) -> Fraction:
    """eta-weighted groupoid count of the fiber of N_dq over the base point."""
    d = base.n - cover.rho
    if not dq.in_Q(d, cover.rho):
        raise ValueError(f"{dq.text()} is not in Q_{d}")
    Nm, Np = sigma.n_minus, sigma.n_plus
    zero_a = zero_b = None
    if not base.a:
        # degree dichotomy: the smaller-degree diagonal entry is the nonzero one
        zero_a = "second" if dq.d11 < dq.d22 - Nm else "first"
    if not base.b:
        zero_b = "second" if dq.d12 < dq.d21 - Np else "first"
    return _N_sum(cover, sigma, dq, base, zero_a, zero_b)


# strata of the degenerate fibers: which entry of phi vanishes
HAT_STRATA = {("0", "+"): "21", ("0", "-"): "12", ("inf", "+"): "22", ("inf", "-"): "11"}


def count_N_hat_pm(cover: DoubleCover, sigma: SigmaData, dq: QuadDegree, sign: str, base: BasePoint) -> Fraction:
    """Count on the stratum with one off-diagonal (b = 0) or diagonal (a = 0) entry zero; the degree dichotomy is dropped."""
    d = base.n - cover.rho
    if not dq.in_Q_hat(d, cover.rho):
        raise ValueError(f"{dq.text()} is not in Q^_{d}")
    if base.b and base.a:
        raise ValueError("the hat count lives over a base point with a = 0 or b = 0")
    which = "0" if not base.b else "inf"
    entry = HAT_STRATA[(which, sign)]
    zero_a = zero_b = None
    if which == "0":
        zero_b = "second" if entry == "21" else "first"
    else:
        zero_a = "second" if entry == "22" else "first"
    return _N_sum(cover, sigma, dq, base, zero_a, zero_b)


def N_generating_function(cover: DoubleCover, sigma: SigmaData, base: BasePoint):
    """sum over Q_d of q^{(2d12-d-rho) s1 + (2d11-d-rho) s2} count_N."""
    from .bilaurent import BiLaurent

    d = base.n - cover.rho
    terms: dict[tuple[int, int], Fraction] = {}
    for dq in iter_Q(d, cover.rho):
        c = count_N(cover, sigma, dq, base)
        if c:
            e = dq.exponents(d, cover.rho)
            terms[e] = terms.get(e, Fraction(0)) + c
    return BiLaurent(terms)


def N_counts(cover: DoubleCover, sigma: SigmaData, base: BasePoint) -> dict[QuadDegree, Fraction]:
    d = base.n - cover.rho
    return {dq: c for dq in iter_Q(d, cover.rho) if (c := count_N(cover, sigma, dq, base))}


# ---------------------------------------------------------------- the M-side count


def norm_factorization_count(cover: DoubleCover, E: Divisor) -> int:
    """Number of effective divisors on the cover with pushforward E."""
    out = 1
    for x, m in E.mult.items():
        kind = cover.splitting_type(x)
        if kind == SPLIT:
            out *= m + 1
        elif kind == INERT:
            out *= 1 if m % 2 == 0 else 0
        # ramified: m times the point above x
    return out


def _norm_generator_value(cover: DoubleCover, x: Place, g: Poly) -> int:
    """Value at x of g / Nm(y)^m, m = v_x(g): the image of the norm of a local generator."""
    F = cover.F
    k = cover.k(x)
    m, g1 = split_valuation(F, x, g)
    _, f1 = cover.f_local(x)
    return k.div(g1, k.pow(k.neg(f1), m))


def count_M(cover: DoubleCover, sigma: SigmaData, d: int, base: BasePoint) -> Fraction:
    """Groupoid count of the fiber of M_d over the base point.

    With alpha, beta nonzero, (I, alpha) and (J, beta) are determined by their
    divisors on the cover and the norm matching is forced; at a point of R where
    both vanish the square root j_x of j_Nm exists (2 choices) iff the ratio of
    the norm-generator images is a square.  With beta = 0 the bundle J is free
    (|Pic^0| classes, automorphisms k^x) and j_Nm runs over a k^x-torsor.
    """
    if cover.genus_cover > 1:
        raise NotImplementedError("count_M supports covers of genus <= 1")
    if base.n != d + cover.rho:
        raise ValueError("base degree does not match d + rho")
    F = cover.F
    S_plus, S_minus = sigma_divisor(sigma.plus), sigma_divisor(sigma.minus)
    out = Fraction(1)
    if base.a:
        out *= norm_factorization_count(cover, form_divisor(F, base.a, base.n) - S_minus)
    if base.b:
        out *= norm_factorization_count(cover, form_divisor(F, base.b, base.n) - S_plus)
    if not out:
        return out
    if base.a and base.b:
        for x in cover.R:
            if form_value(F, x, base.a) == 0:
                k = cover.k(x)
                lam = k.div(_norm_generator_value(cover, x, base.a), _norm_generator_value(cover, x, base.b))
                out *= 2 if k.chi(lam) == 1 else 0
        return out
    live = base.a if base.a else base.b
    # the free bundle meets R through its Sigma twist: Nm of a section is a square there
    free_twist = poly_of_divisor(F, S_plus if base.a else S_minus)
    h = class_group(cover).order
    total = 0
    for c in range(1, F.order):
        m = 1
        for x in cover.R:
            k = cover.k(x)
            lam = k.mul(k.from_int(c), k.mul(form_value(F, x, free_twist), _norm_generator_value(cover, x, live)))
            m *= 2 if k.chi(lam) == 1 else 0
        total += m
    return out * h * Fraction(total, F.order - 1)


# ---------------------------------------------------------------- Picard group of the cover


@dataclass(frozen=True)
class CoverPicard:
    """Pic^0 of the cover over F_q with explicit representatives.

    For genus 1 the class of P - O is represented by the point P of the quartic
    model; the group law is transported from a cubic model.
    """

    genus: int
    elements: tuple
    add: object = None
    neg: object = None

    @property
    def order(self) -> int:
        return len(self.elements)


def _cubic_model(cover: DoubleCover) -> tuple[int, tuple[int, int, int]]:
    """(r, (a2, a4, a6)) with Y^2 = X^3 + a2 X^2 + a4 X + a6 birational to y^2 = f via t = r + c3 / X."""
    F = cover.F
    f = cover.f
    roots = [r for r in F.elements() if P.evaluate(F, f, r) == 0]
    if not roots:
        raise NotImplementedError("genus-1 engine needs a rational root of f")
    r = roots[0]
    # g(s) = s^4 f(r + 1/s) is a cubic c3 s^3 + c2 s^2 + c1 s + c0
    shifted = P.compose(F, f, (r, 1))  # f(r + t) = sum e_i t^i, e_0 = 0
    e = list(shifted) + [0] * (5 - len(shifted))
    c3, c2, c1, c0 = e[1], e[2], e[3], e[4]
    if c3 == 0:
        raise ValueError("rational root is not simple")
    return r, (c2, F.mul(c1, c3), F.mul(c0, F.mul(c3, c3)))


def _ec_ops(k: Field, coeffs: tuple[int, int, int]):
    a2, a4, a6 = coeffs
    O = None

    def neg(Pt):
        if Pt is O:
            return O
        return (Pt[0], k.neg(Pt[1]))

    def add(P1, P2):
        if P1 is O:
            return P2
        if P2 is O:
            return P1
        x1, y1 = P1
        x2, y2 = P2
        if x1 == x2:
            if k.add(y1, y2) == 0:
                return O
            num = k.add(k.add(k.mul(k.from_int(3), k.mul(x1, x1)), k.mul(k.mul(k.from_int(2), a2), x1)), a4)
            lam = k.div(num, k.mul(k.from_int(2), y1))
        else:
            lam = k.div(k.sub(y2, y1), k.sub(x2, x1))
        x3 = k.sub(k.sub(k.sub(k.mul(lam, lam), a2), x1), x2)
        y3 = k.neg(k.add(y1, k.mul(lam, k.sub(x3, x1))))
        return (x3, y3)

    return add, neg


def _ec_points(k: Field, coeffs: tuple[int, int, int]) -> list:
    a2, a4, a6 = coeffs
    pts: list = [None]
    for x in k.elements():
        rhs = k.add(k.add(k.mul(k.mul(x, x), k.add(x, a2)), k.mul(a4, x)), a6)
        for y in ([0] if rhs == 0 else k.sqrts(rhs)):
            pts.append((x, y))
    return pts


def _embed_coeffs(k: Field, coeffs: tuple[int, int, int]) -> tuple[int, int, int]:
    return tuple(k.from_int(c) for c in coeffs)  # type: ignore[return-value]


def elliptic_group(cover: DoubleCover, extension_degree: int = 1) -> CoverPicard:
    _, coeffs = _cubic_model(cover)
    if extension_degree == 1:
        k: Field = cover.F
    else:
        k = ExtField(cover.F, next(iter(P.monic_irreducibles(cover.F, extension_degree))))
    cf = _embed_coeffs(k, coeffs)
    add, neg = _ec_ops(k, cf)
    return CoverPicard(1, tuple(_ec_points(k, cf)), add, neg)


def class_group(cover: DoubleCover) -> CoverPicard:
    g = cover.genus_cover
    if g == 0:
        return CoverPicard(0, (None,), lambda a, b: None, lambda a: None)
    if g == 1:
        return elliptic_group(cover)
    raise NotImplementedError("class group engine supports genus <= 1")


def l_polynomial(cover: DoubleCover) -> tuple[int, ...]:
    """Coefficients of P(T) for genus <= 1 from point counts."""
    g = cover.genus_cover
    if g == 0:
        return (1,)
    if g == 1:
        a1 = cover.count_points(1) - cover.q - 1
        return (1, a1, cover.q)
    raise NotImplementedError("L-polynomial engine supports genus <= 1")


def l_polynomial_from_counts(cover: DoubleCover) -> tuple[int, ...]:
    """P(T) = exp(sum_e (N_e - q^e - 1) T^e / e) truncated at degree 2g', from N_1, ..., N_2g'."""
    g = cover.genus_cover
    S = [Fraction(cover.count_points(e) - cover.q**e - 1) for e in range(1, 2 * g + 1)]
    # c_n = (1/n) sum_{e=1}^{n} S_e c_{n-e}
    c = [Fraction(1)]
    for n in range(1, 2 * g + 1):
        c.append(sum((S[e - 1] * c[n - e] for e in range(1, n + 1)), Fraction(0)) / n)
    if any(x.denominator != 1 for x in c):
        raise ValueError("point counts do not come from an L-polynomial")
    return tuple(int(x) for x in c)


def predicted_count(cover: DoubleCover, e: int) -> int:
    """#X'(F_{q^e}) predicted by the L-polynomial (genus <= 1)."""
    coeffs = l_polynomial(cover)
    if len(coeffs) == 1:
        return cover.q**e + 1
    # P(T) = (1 - a T)(1 - b T) with a + b = -a1, ab = q; power sums by Newton
    s_prev, s_cur = 2, -coeffs[1]
    for _ in range(e - 1):
        s_prev, s_cur = s_cur, -coeffs[1] * s_cur - cover.q * s_prev
    return cover.q**e + 1 - s_cur


def check_group_axioms(G: CoverPicard) -> bool:
    els = G.elements
    e = None
    for a in els:
        if G.add(a, e) != a or G.add(a, G.neg(a)) is not None:
            return False
        for b in els:
            ab = G.add(a, b)
            if ab not in els or ab != G.add(b, a):
                return False
            for c in els:
                if G.add(ab, c) != G.add(a, G.add(b, c)):
                    return False
    return True
