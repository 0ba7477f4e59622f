"""Global orbital integrals of h_D with the ramified and Sigma test functions.

Two routes for a regular orbit u:

* divisor route: enumerate quadruples (E1, E2, E1', E2' = 0) of divisors with
  square-root data along R for which gamma(u) = (1 u; 1 1) induces an
  everywhere-defined map with det divisor D + R;
* local route: a product over places of local double-coset sums over
  valuations (n1, n2, n1') with t2' = 1, using the closed-form test function at
  R averaged over unit square classes.

The degenerate orbits u = 0, infinity are evaluated on the divisor route as the
sum over the two nontrivial torus double cosets, truncated in the degree of the
free entry.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterator, Mapping

from . import poly as P
from .bilaurent import BiLaurent
from .local_pgl2 import h_square
from .moduli import (
    BasePoint,
    N_counts,
    QuadDegree,
    base_from_u,
    count_N,
    count_square_root_matrices,
    enumerate_base,
    inv_D,
    iter_Q,
    sign_patterns,
    sign_value,
    sub_divisors,
    free_divisors,
    twisted_targets,
)
from .places import (
    DoubleCover,
    Divisor,
    Place,
    RatFn,
    SigmaData,
    SqrtRClass,
    rat_divisor,
    rat_mul,
    rat_split_valuation,
    rat_sub,
)

TAGS = ("generic", "1", "n+", "n-", "w0", "n+w0", "n-w0")


# ---------------------------------------------------------------- orbit representatives


@dataclass(frozen=True)
class OrbitRep:
    """u in P^1(F) - {1} (None is infinity) with a torus double-coset tag."""

    u: RatFn | None
    tag: str

    def __post_init__(self) -> None:
        if self.tag not in TAGS:
            raise ValueError(f"unknown tag {self.tag}")
        if self.tag == "generic":
            if self.u is None or self.u.is_zero() or self.u == RatFn((1,)):
                raise ValueError("generic representative needs u outside {0, 1, inf}")
        elif self.tag in ("1", "n+", "n-"):
            if self.u is None or not self.u.is_zero():
                raise ValueError(f"tag {self.tag} lies over u = 0")
        elif self.u is not None:
            raise ValueError(f"tag {self.tag} lies over u = inf")

    def matrix(self) -> tuple[RatFn, RatFn, RatFn, RatFn]:
        z, o = RatFn(P.ZERO), RatFn(P.ONE)
        return {
            "generic": (o, self.u, o, o),
            "1": (o, z, z, o),
            "n+": (o, o, z, o),
            "n-": (o, z, o, o),
            "w0": (z, o, o, z),
            "n+w0": (o, o, o, z),
            "n-w0": (z, o, o, o),
        }[self.tag]  # type: ignore[return-value]


def inv(F, gamma: tuple[RatFn, RatFn, RatFn, RatFn]) -> RatFn | None:
    """bc / ad as a point of P^1(F); None is infinity."""
    a, b, c, d = gamma
    ad, bc = rat_mul(F, a, d), rat_mul(F, b, c)
    if ad.is_zero():
        if bc.is_zero():
            raise ValueError("singular matrix")
        return None
    return RatFn.make(F, P.mul(F, bc.num, ad.den), P.mul(F, bc.den, ad.num))


def _is_regular(u: RatFn | None) -> bool:
    return u is not None and not u.is_zero() and u != RatFn((1,))


# ---------------------------------------------------------------- divisor route


@dataclass(frozen=True)
class XPoint:
    """(E1, E2, E1') with E2' = 0, sign objects per R place, and the groupoid mass of psi-data."""

    E1: Divisor
    E2: Divisor
    E1p: Divisor
    signs: tuple[tuple[int, int, int], ...]
    mass: Fraction
    eta: int
    free_degree: int | None

    def exponents(self) -> tuple[int, int]:
        e1, e2, e1p = self.E1.degree, self.E2.degree, self.E1p.degree
        return -(e1 - e2 + e1p), -(-e1 + e2 + e1p)

    def quad_degree(self) -> QuadDegree:
        e1, e2, e1p = self.E1.degree, self.E2.degree, self.E1p.degree
        return QuadDegree(e1 - e1p, e2 - e1p, e1, e2)


def _div(F, g: RatFn) -> Divisor:
    return rat_divisor(F, g)


def _column_choices(cover: DoubleCover, sigma: SigmaData, D: Divisor, gamma, det: RatFn, column: int,
                    window: range | None) -> list[tuple[Divisor, int | None]]:
    """Candidates for E_column with the free-entry degree when one entry of the column is zero.

    Column 1 pairs G21 = div g21 + E1 with G12 = div g12 - div det + D + R - E1;
    column 2 pairs G22 = div g22 + E2 with G11 = div g11 - div det + D + R - E2.
    """
    F = cover.F
    DR = D + Divisor.of_places(cover.R)
    if column == 1:
        low_g, high_g, lower = gamma[2], gamma[1], Divisor.of_places(sigma.plus)
        avoid = sigma.minus
    else:
        low_g, high_g, lower = gamma[3], gamma[0], Divisor.of_places(sigma.minus)
        avoid = sigma.plus
    out: list[tuple[Divisor, int | None]] = []
    if not low_g.is_zero() and not high_g.is_zero():
        B = _div(F, low_g) + _div(F, high_g) - _div(F, det) + DR
        for G in sub_divisors(B, lower) if B.is_effective() else []:
            out.append((G - _div(F, low_g), None))
        return out
    if window is None:
        raise ValueError("unbounded enumeration: this orbit needs a degree window")
    if high_g.is_zero():
        # only the lower entry survives; G_low is free of its degree
        for m in window:
            for G in free_divisors(F, m + lower.degree, lower, avoid):
                out.append((G - _div(F, low_g), m))
    else:
        # the lower entry vanishes; G_high is free
        base = _div(F, high_g) - _div(F, det) + DR
        for m in window:
            for G in free_divisors(F, m, Divisor.make({}), avoid):
                out.append((base - G, m))
    return out


def iter_x_points(cover: DoubleCover, sigma: SigmaData, D: Divisor, rep: OrbitRep,
                  window: range | None = None) -> Iterator[XPoint]:
    F = cover.F
    gamma = rep.matrix()
    g11, g12, g21, g22 = gamma
    det = rat_sub(F, rat_mul(F, g11, g22), rat_mul(F, g12, g21))
    DR = D + Divisor.of_places(cover.R)
    col1 = _column_choices(cover, sigma, D, gamma, det, 1, window)
    col2 = _column_choices(cover, sigma, D, gamma, det, 2, window)
    entry_div = [None if g.is_zero() else _div(F, g) for g in gamma]
    shift = _div(F, det) - DR
    residues = {x: [None if g.is_zero() else rat_split_valuation(F, x, g)[1] for g in gamma] for x in cover.R}
    zero = Divisor.make({})
    for E1, m1 in col1:
        for E2, m2 in col2:
            E1p = E1 + E2 + shift
            Es = ((E1p, zero), (E1, E2))
            G: dict[tuple[int, int], Divisor | None] = {}
            ok = True
            for i in range(2):
                for j in range(2):
                    dv = entry_div[2 * i + j]
                    if dv is None:
                        G[(i, j)] = None
                        continue
                    Gij = dv + Es[1][j] - Es[0][i]
                    if not Gij.is_effective():
                        ok = False
                        break
                    G[(i, j)] = Gij
                if not ok:
                    break
            if not ok:
                continue
            # phi22 vanishes on Sigma_-, phi21 on Sigma_+
            if G[(1, 1)] is not None and any(G[(1, 1)][x] < 1 for x in sigma.minus):
                continue
            if G[(1, 0)] is not None and any(G[(1, 0)][x] < 1 for x in sigma.plus):
                continue
            # residues of the entries at R in the standard generators
            per_place = []
            for x in cover.R:
                vals = []
                for idx, key in enumerate(((0, 0), (0, 1), (1, 0), (1, 1))):
                    Gij = G[key]
                    vals.append(0 if Gij is None or Gij[x] > 0 else residues[x][idx])
                per_place.append((x, cover.k(x), tuple(vals)))
            free = m1 if m1 is not None else m2
            live = []
            for x, k, vals in per_place:
                opts = [(pat, n) for pat in sign_patterns()
                        if (n := count_square_root_matrices(k, twisted_targets(k, vals, pat)))]
                if not opts:
                    break
                live.append(opts)
            if len(live) < len(per_place):
                continue
            for choice in product(*live):
                pats = tuple(pat for pat, _ in choice)
                mass = Fraction(1)
                for _, n in choice:
                    mass *= Fraction(n, 8)
                signs = {x: pat[1] * pat[2] for (x, _, _), pat in zip(per_place, pats)}
                eta = cover.eta_global(SqrtRClass.make((E1 - E2).mult, signs))
                yield XPoint(E1, E2, E1p, pats, mass, eta, free)


def _sum_points(points) -> BiLaurent:
    terms: dict[tuple[int, int], Fraction] = {}
    for p in points:
        e = p.exponents()
        terms[e] = terms.get(e, Fraction(0)) + p.mass * p.eta
    return BiLaurent(terms)


def orbital_via_X(cover: DoubleCover, sigma: SigmaData, D: Divisor, u: RatFn) -> BiLaurent:
    """J(u) as a weighted count of divisor data for the representative (1 u; 1 1)."""
    if not _is_regular(u):
        raise ValueError("u in {0, 1, inf}: use orbital_regularized")
    return _sum_points(iter_x_points(cover, sigma, D, OrbitRep(u, "generic")))


# ---------------------------------------------------------------- local route

WIDEN = 2


def _local_factor(cover: DoubleCover, sigma: SigmaData, x: Place, n_x: int, u: RatFn) -> BiLaurent:
    F = cover.F
    k = cover.k(x)
    deg = x.degree
    vu, ru = rat_split_valuation(F, x, u)
    one_minus = rat_sub(F, RatFn(P.ONE), u)
    v1u, _ = rat_split_valuation(F, x, one_minus)
    hi1, hi2 = n_x + vu - v1u, n_x - v1u
    eta_pi = cover.eta_uniformizer(x)
    ramified = x in cover.R
    terms: dict[tuple[int, int], Fraction] = {}
    seen: list[tuple[int, int]] = []
    for n1 in range(-WIDEN, max(hi1, 0) + WIDEN + 1):
        for n2 in range(-WIDEN, max(hi2, 0) + WIDEN + 1):
            n1p = n1 + n2 + v1u - n_x
            vals = (n1 - n1p, n2 + vu - n1p, n1, n2)
            if min(vals) < 0:
                continue
            if x in sigma.plus and vals[2] < 1:
                continue
            if x in sigma.minus and vals[3] < 1:
                continue
            if ramified:
                weight = Fraction(0)
                for e1p, e1, e2 in product((1, -1), repeat=3):
                    s1p, s1, s2 = sign_value(k, e1p), sign_value(k, e1), sign_value(k, e2)
                    units = (k.div(s1, s1p), k.div(k.mul(s2, ru), s1p), s1, s2)
                    res = tuple(c if v == 0 else 0 for c, v in zip(units, vals))
                    weight += h_square(k, res) * cover.eta_unit(x, k.div(s1, s2))
                weight = weight / 8 * eta_pi ** ((n1 - n2) % 2)
            else:
                weight = Fraction(eta_pi ** ((n1 - n2) % 2))
            if not weight:
                continue
            seen.append((n1, n2))
            e = (-deg * (n1 - n2 + n1p), -deg * (n2 - n1 + n1p))
            terms[e] = terms.get(e, Fraction(0)) + weight
    for n1, n2 in seen:
        if not (0 <= n1 <= hi1 and 0 <= n2 <= hi2):
            raise ValueError(f"local sum at {x.text()} reaches ({n1}, {n2}) outside the derived bounds")
    return BiLaurent(terms)


def orbital_via_local_product(cover: DoubleCover, sigma: SigmaData, D: Divisor, u: RatFn) -> BiLaurent:
    """J(u) as a product of local double-coset sums over the places with nontrivial data."""
    if not _is_regular(u):
        raise ValueError("u in {0, 1, inf}: use orbital_regularized")
    F = cover.F
    one_minus = rat_sub(F, RatFn(P.ONE), u)
    places = set(D.support()) | set(cover.R) | set(sigma.places())
    places |= set(_div(F, u).support()) | set(_div(F, one_minus).support())
    out = BiLaurent.one()
    for x in sorted(places, key=lambda y: y.sort_key()):
        n_x = D[x] + (1 if x in cover.R else 0)
        out = out * _local_factor(cover, sigma, x, n_x, u)
        if out.is_zero():
            break
    return out


# ---------------------------------------------------------------- degenerate orbits


def regularization_threshold(cover: DoubleCover, sigma: SigmaData) -> int:
    """d >= 4g - 3 + rho + N with g = 0."""
    return cover.rho + sigma.n - 3


def _degenerate_tags(which: str) -> tuple[str, str]:
    if which == "0":
        return "n+", "n-"
    if which == "inf":
        return "n+w0", "n-w0"
    raise ValueError("which must be '0' or 'inf'")


def _degenerate_rep(which: str, tag: str) -> OrbitRep:
    return OrbitRep(RatFn(P.ZERO) if which == "0" else None, tag)


def degenerate_points(cover: DoubleCover, sigma: SigmaData, D: Divisor, which: str, tag: str,
                      window: range) -> list[XPoint]:
    return list(iter_x_points(cover, sigma, D, _degenerate_rep(which, tag), window))


def orbital_regularized(cover: DoubleCover, sigma: SigmaData, D: Divisor, which: str) -> BiLaurent:
    """J(0) = J(n+) + J(n-) (or the analogue at infinity), truncated where the free entry has degree <= rho - 2."""
    d = D.degree
    if d < regularization_threshold(cover, sigma):
        raise ValueError(f"d = {d} < rho + N - 3 = {regularization_threshold(cover, sigma)}")
    if (which == "0" and sigma.minus) or (which == "inf" and sigma.plus):
        return BiLaurent.zero()
    window = range(0, cover.rho - 1)
    pts: list[XPoint] = []
    for tag in _degenerate_tags(which):
        pts.extend(degenerate_points(cover, sigma, D, which, tag, window))
    return _sum_points(pts)


def regularized_tail(cover: DoubleCover, sigma: SigmaData, D: Divisor, which: str,
                     extra: int = 2) -> dict[tuple[str, QuadDegree], Fraction]:
    """eta-weighted counts per (tag, quadruple) for free degrees in [rho - 1, rho - 1 + extra]."""
    window = range(cover.rho - 1, cover.rho + extra)
    out: dict[tuple[str, QuadDegree], Fraction] = {}
    if (which == "0" and sigma.minus) or (which == "inf" and sigma.plus):
        return out
    for tag in _degenerate_tags(which):
        for p in degenerate_points(cover, sigma, D, which, tag, window):
            key = (tag, p.quad_degree())
            out[key] = out.get(key, Fraction(0)) + p.mass * p.eta
    return out


def degenerate_base(cover: DoubleCover, sigma: SigmaData, D: Divisor, which: str) -> BasePoint | None:
    return base_from_u(cover, sigma, D, RatFn(P.ZERO) if which == "0" else None)


def N_side_from_counts(cover: DoubleCover, d: int, counts: Mapping[QuadDegree, Fraction]) -> BiLaurent:
    terms: dict[tuple[int, int], Fraction] = {}
    for dq, c in counts.items():
        e = dq.exponents(d, cover.rho)
        terms[e] = terms.get(e, Fraction(0)) + c
    return BiLaurent(terms)


def N_side(cover: DoubleCover, sigma: SigmaData, base: BasePoint) -> BiLaurent:
    return N_side_from_counts(cover, base.n - cover.rho, N_counts(cover, sigma, base))


# ---------------------------------------------------------------- derivative functional


def orbital_at(cover: DoubleCover, sigma: SigmaData, D: Divisor, u: RatFn | None) -> BiLaurent:
    if u is None:
        return orbital_regularized(cover, sigma, D, "inf")
    if u.is_zero():
        return orbital_regularized(cover, sigma, D, "0")
    return orbital_via_X(cover, sigma, D, u)


def J_sum(cover: DoubleCover, sigma: SigmaData, D: Divisor) -> BiLaurent:
    """sum over u in the image of inv_D of J(u)."""
    total = BiLaurent.zero()
    for base in enumerate_base(cover, sigma, D):
        total = total + orbital_at(cover, sigma, D, inv_D(cover, base))
    return total


def J_functional(cover: DoubleCover, sigma: SigmaData, D: Divisor, r_plus: int, r_minus: int) -> Fraction:
    """Mixed derivative at s = 0 of q^{N+ s1 + N- s2} sum_u J(u), without the log q factors."""
    check_thresholds(cover, sigma, D)
    total = J_sum(cover, sigma, D) * BiLaurent.monomial(sigma.n_plus, sigma.n_minus)
    return total.derivative_functional(r_plus, r_minus)


def J_functional_weighted(cover: DoubleCover, sigma: SigmaData, D: Divisor, r_plus: int, r_minus: int) -> Fraction:
    """The same functional as a weighted sum of N-counts over all base points."""
    check_thresholds(cover, sigma, D)
    d, rho = D.degree, cover.rho
    total = Fraction(0)
    for base in enumerate_base(cover, sigma, D):
        for dq in iter_Q(d, rho):
            c = count_N(cover, sigma, dq, base)
            if c:
                wp = (2 * dq.d12 - d - rho + sigma.n_plus) ** r_plus
                wm = (2 * dq.d11 - d - rho + sigma.n_minus) ** r_minus
                total += c * wp * wm
    return total


def J_functional_table(cover: DoubleCover, sigma: SigmaData, D: Divisor, max_order: int,
                       orbitals: Mapping[BasePoint, BiLaurent] | None = None,
                       counts: Mapping[BasePoint, Mapping[QuadDegree, Fraction]] | None = None,
                       ) -> dict[tuple[int, int], tuple[Fraction, Fraction]]:
    """(symbolic, weighted) for every r+ + r- <= max_order; per-base values may be passed in precomputed."""
    check_thresholds(cover, sigma, D)
    d, rho = D.degree, cover.rho
    orbitals = orbitals or {}
    counts = counts or {}
    total = BiLaurent.zero()
    flat: list[tuple[QuadDegree, Fraction]] = []
    for base in enumerate_base(cover, sigma, D):
        J = orbitals.get(base)
        total = total + (J if J is not None else orbital_at(cover, sigma, D, inv_D(cover, base)))
        c = counts.get(base)
        flat.extend((c if c is not None else N_counts(cover, sigma, base)).items())
    total = total * BiLaurent.monomial(sigma.n_plus, sigma.n_minus)
    out = {}
    for rp in range(max_order + 1):
        for rm in range(max_order + 1 - rp):
            weighted = sum((c * (2 * dq.d12 - d - rho + sigma.n_plus) ** rp * (2 * dq.d11 - d - rho + sigma.n_minus) ** rm
                            for dq, c in flat), Fraction(0))
            out[(rp, rm)] = (total.derivative_functional(rp, rm), weighted)
    return out


def check_thresholds(cover: DoubleCover, sigma: SigmaData, D: Divisor) -> None:
    """d >= max(2g' - 1 + N, 2g) and, for the degenerate orbits, d >= rho + N - 3."""
    d = D.degree
    need = max(2 * cover.genus_cover - 1 + sigma.n, 0)
    if d < need:
        raise ValueError(f"d = {d} < max(2g' - 1 + N, 2g) = {need}")
    if d < regularization_threshold(cover, sigma):
        raise ValueError(f"d = {d} < rho + N - 3 = {regularization_threshold(cover, sigma)}")
