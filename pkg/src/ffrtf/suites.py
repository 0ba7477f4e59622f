"""The verification suites: each yields check records comparing two canonical strings."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from itertools import product
from typing import Callable, Iterator

from . import poly as P
from .config import SUITE_NAMES, PreconditionError, RunConfig
from .bilaurent import BiLaurent
from .cyclo import CycloRat
from .fields import Field
from .local_pgl2 import (
    F_SQUARE,
    H_SQUARE,
    IWAHORI,
    IWAHORI_W,
    LocalData,
    Representation,
    act_and_char,
    characterize_f_square,
    closed_form_ramified,
    closed_form_steinberg,
    gauss_sum,
    verify_hf_decomposition,
    verify_xi_pushforward,
)
from .moduli import (
    N_counts,
    check_group_axioms,
    class_group,
    count_M,
    enumerate_base,
    inv_D,
    l_polynomial_from_counts,
    predicted_count,
)
from .orbital import (
    J_functional_table,
    N_side,
    N_side_from_counts,
    _is_regular,
    degenerate_base,
    orbital_regularized,
    orbital_via_local_product,
    orbital_via_X,
    regularization_threshold,
    regularized_tail,
)
from .picard import gerbe_cardinality
from .places import (
    INERT,
    INFINITY,
    SPLIT,
    Divisor,
    DoubleCover,
    Place,
    RatFn,
    SigmaData,
    SqrtRClass,
    iter_rational_functions,
    places_up_to,
)
from .report import Check, exact_text

SUITES = SUITE_NAMES
OFF_IMAGE_HEIGHT = 2
DERIVATIVE_ORDER = 3


class EtaCorruptedCover(DoubleCover):
    """Test hook: the cover with eta of the uniformizer negated at one ramified place."""

    def __init__(self, q: int, f, place: Place) -> None:
        super().__init__(q, f)
        if place not in self.R:
            raise ValueError(f"{place.text()} is not a ramified place")
        self.corrupted = place

    def eta_uniformizer(self, place: Place) -> int:
        value = super().eta_uniformizer(place)
        return -value if place == self.corrupted else value


def _check(suite: str, cid: str, inputs: str, left, right) -> Check:
    return Check(suite, cid, inputs, exact_text(left), exact_text(right))


# ---------------------------------------------------------------- local-lemmas


def residue_fields(cover: DoubleCover) -> list[Field]:
    out: dict[int, Field] = {cover.q: cover.F}
    for x in cover.R:
        k = cover.k(x)
        out.setdefault(k.order, k)
    return [out[q] for q in sorted(out)]


def suite_local_lemmas(cfg: RunConfig, cover: DoubleCover) -> Iterator[Check]:
    s = "local-lemmas"
    for k in residue_fields(cover):
        qx = f"q_x={k.order}"
        xi = verify_xi_pushforward(k)
        yield _check(s, f"{qx}/xi-pushforward", qx,
                     f"mismatches={len(xi.failures)};all-units={xi.notes['all-square-units value']}",
                     "mismatches=0;all-units=8")
        ev = characterize_f_square(k)
        yield _check(s, f"{qx}/eta-eigenspace", qx,
                     f"dim={ev.dimension};matches={ev.matches_coset_formula and ev.f_square_table_matches};"
                     f"invariant={ev.left_invariant and ev.right_eigen};value-at-one={ev.value_at_one}",
                     "dim=1;matches=True;invariant=True;value-at-one=1")
        dec = verify_hf_decomposition(k)
        yield _check(s, f"{qx}/delta-decomposition", qx,
                     f"identities={dec.identities_hold};symmetries={dec.symmetries_hold};"
                     f"parts-nonzero={dec.right_part_nonzero and dec.left_part_nonzero}",
                     "identities=True;symmetries=True;parts-nonzero=True")


# ---------------------------------------------------------------- local-chars


def suite_local_chars(cfg: RunConfig, cover: DoubleCover) -> Iterator[Check]:
    s = "local-chars"
    for x in places_up_to(cover.F, 2, include_infinity=False):
        ld = LocalData.from_place(cover, x)
        if x in cover.R:
            stated = closed_form_ramified(ld).text()
            for alpha in cfg.alphas:
                rep = Representation("unramified", alpha)
                for f in (H_SQUARE, F_SQUARE):
                    yield _check(s, f"x={x.text()}/alpha={alpha}/{f.tag}", f"x={x.text()};alpha={alpha}",
                                 act_and_char(ld, rep, f).text(), stated)
        else:
            for chi in (1, -1):
                rep = Representation("steinberg", Fraction(chi))
                for f, with_w in ((IWAHORI, False), (IWAHORI_W, True)):
                    yield _check(s, f"x={x.text()}/chi={chi}/{f.tag}", f"x={x.text()};chi={chi}",
                                 act_and_char(ld, rep, f).text(), closed_form_steinberg(ld, chi, with_w).text())


# ---------------------------------------------------------------- eta


def _eta_local_product(cover: DoubleCover, g: RatFn) -> int:
    F = cover.F
    places = set(cover.R) | {INFINITY}
    for pol in (g.num, g.den):
        _, facs = P.factor(F, pol) if P.deg(pol) > 0 else (None, [])
        places |= {Place(h) for h, _ in facs}
    out = 1
    for x in sorted(places):
        out *= cover.eta_rational(x, g)
    return out


def _sample_classes(cover: DoubleCover) -> list[SqrtRClass]:
    deg1 = places_up_to(cover.F, 1)
    out = []
    for vals in product((0, 1), repeat=len(deg1)):
        for signs in product((1, -1), repeat=len(cover.R)):
            out.append(SqrtRClass.make(dict(zip(deg1, vals)), dict(zip(cover.R, signs))))
    return out


def suite_eta(cfg: RunConfig, cover: DoubleCover) -> Iterator[Check]:
    s = "eta"
    F = cover.F
    functions = [("f", RatFn(cover.f))]
    for a in range(F.order):
        lin = P.trim((F.neg(a), 1))
        functions.append((f"t-{a}", RatFn(lin)))
        functions.append((f"1/(t-{a})", RatFn.make(F, P.ONE, lin)))
    for name, g in functions:
        yield _check(s, f"product-formula/{name}/local", name, _eta_local_product(cover, g), 1)
        yield _check(s, f"product-formula/{name}/global", name, cover.eta_global(cover.principal(g)), 1)
    classes = _sample_classes(cover)
    bad = sum(1 for c1 in classes for c2 in classes
              if cover.eta_global(c1 + c2) != cover.eta_global(c1) * cover.eta_global(c2))
    yield _check(s, "multiplicativity", f"pairs={len(classes) ** 2}", f"failures={bad}", "failures=0")
    for x in places_up_to(F, 2):
        if x in cover.R:
            continue
        kind = cover.splitting_type(x)
        expected = {SPLIT: 1, INERT: -1}[kind]
        yield _check(s, f"unramified/{x.text()}", f"x={x.text()};{kind}", cover.eta_uniformizer(x), expected)
    for x in cover.R:
        ld = LocalData.from_place(cover, x)
        g = gauss_sum(ld)
        yield _check(s, f"gauss-square/{x.text()}", f"x={x.text()}", (g * g).text(),
                     CycloRat.rational(ld.p, ld.k.chi(ld.k.neg(1)) * ld.q).text())
    yield _check(s, "gerbe-cardinality", f"R={len(cover.R)} places", gerbe_cardinality(cover), Fraction(1))


# ---------------------------------------------------------------- orbital-vs-N


def _orbital_routes(args: tuple) -> tuple[BiLaurent, BiLaurent, dict]:
    cover, sigma, D, base = args
    u = inv_D(cover, base)
    return (orbital_via_X(cover, sigma, D, u), orbital_via_local_product(cover, sigma, D, u),
            N_counts(cover, sigma, base))


def _map(fn: Callable, items: list, jobs: int) -> list:
    if jobs <= 1 or len(items) < 2:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * jobs))))


def orbital_threshold(cover: DoubleCover, sigma: SigmaData) -> int:
    """d >= max(2g' - 1 + N, 2g) with g = 0."""
    return max(2 * cover.genus_cover - 1 + sigma.n, 0)


def _tested_divisors(cfg: RunConfig, cover: DoubleCover, need: int, inequality: str) -> list[Divisor]:
    if cfg.D is not None:
        if cfg.D.degree < need:
            raise PreconditionError(f"{inequality} violated: d = {cfg.D.degree} < {need}")
        return [cfg.D]
    return [D for D in cfg.divisors() if D.degree >= need]


def suite_orbital_vs_N(cfg: RunConfig, cover: DoubleCover, jobs: int = 1) -> Iterator[Check]:
    s = "orbital-vs-N"
    sigma = cfg.sigma
    need = orbital_threshold(cover, sigma)
    for D in _tested_divisors(cfg, cover, need, "d >= max(2g' - 1 + N, 2g)"):
        bases = enumerate_base(cover, sigma, D)
        images = {inv_D(cover, b) for b in bases}
        regular = cfg.sample_bases([b for b in bases if _is_regular(inv_D(cover, b))])
        routes = _map(_orbital_routes, [(cover, sigma, D, b) for b in regular], jobs)
        for base, (x_route, local_route, counts) in zip(regular, routes):
            cid = f"D={D.text()}/{base.text()}"
            inputs = f"D={D.text()};u={inv_D(cover, base).text()}"
            n_side = N_side_from_counts(cover, D.degree, counts)
            yield _check(s, cid + "/X=local", inputs, x_route.text(), local_route.text())
            yield _check(s, cid + "/local=N", inputs, local_route.text(), n_side.text())
        off = [u for u in iter_rational_functions(cover.F, OFF_IMAGE_HEIGHT) if _is_regular(u) and u not in images]
        nonzero = [u.text() for u in off
                   if not orbital_via_X(cover, sigma, D, u).is_zero()
                   or not orbital_via_local_product(cover, sigma, D, u).is_zero()]
        yield _check(s, f"D={D.text()}/off-image", f"D={D.text()};height<={OFF_IMAGE_HEIGHT};tested={len(off)}",
                     "nonzero=" + ",".join(nonzero), "nonzero=")
        # the derivative functional needs every base point, so it only runs without sampling
        if len(regular) == sum(1 for b in bases if _is_regular(inv_D(cover, b))) \
                and D.degree >= regularization_threshold(cover, sigma):
            orbitals = {b: r[0] for b, r in zip(regular, routes)}
            counts = {b: r[2] for b, r in zip(regular, routes)}
            table = J_functional_table(cover, sigma, D, DERIVATIVE_ORDER, orbitals, counts)
            for (rp, rm), (sym, weighted) in sorted(table.items()):
                yield _check(s, f"D={D.text()}/derivative/r+={rp},r-={rm}", f"D={D.text()};r+={rp};r-={rm}",
                             sym, weighted)


# ---------------------------------------------------------------- regularized


def suite_regularized(cfg: RunConfig, cover: DoubleCover) -> Iterator[Check]:
    s = "regularized"
    sigma = cfg.sigma
    need = regularization_threshold(cover, sigma)
    for D in _tested_divisors(cfg, cover, max(need, 0), "d >= rho + N - 3"):
        for which in ("0", "inf"):
            base = degenerate_base(cover, sigma, D, which)
            J = orbital_regularized(cover, sigma, D, which)
            n_side = N_side(cover, sigma, base).text() if base else "0"
            inputs = f"D={D.text()};u={which}"
            yield _check(s, f"D={D.text()}/u={which}", inputs, J.text(), n_side)
            tail = regularized_tail(cover, sigma, D, which)
            nonzero = [f"{tag}:{dq.text()}={v}" for (tag, dq), v in sorted(tail.items(), key=lambda it: (it[0][0], it[0][1].text())) if v]
            yield _check(s, f"D={D.text()}/u={which}/tail", inputs + f";window=[{cover.rho - 1},{cover.rho + 1}]",
                         "nonzero=" + ",".join(nonzero), "nonzero=")


# ---------------------------------------------------------------- M-vs-N


def suite_M_vs_N(cfg: RunConfig, cover: DoubleCover) -> Iterator[Check]:
    s = "M-vs-N"
    sigma = cfg.sigma
    if cover.genus_cover > 1:
        raise PreconditionError(f"g' <= 1 violated: g' = {cover.genus_cover}")
    need = orbital_threshold(cover, sigma)
    for D in _tested_divisors(cfg, cover, need, "d >= max(2g' - 1 + N, 2g)"):
        for base in cfg.sample_bases(enumerate_base(cover, sigma, D)):
            total = sum(N_counts(cover, sigma, base).values(), Fraction(0))
            yield _check(s, f"D={D.text()}/{base.text()}", f"D={D.text()};d={D.degree}",
                         count_M(cover, sigma, D.degree, base), total)


# ---------------------------------------------------------------- picard-sanity


def suite_picard_sanity(cfg: RunConfig, cover: DoubleCover) -> Iterator[Check]:
    s = "picard-sanity"
    if cover.genus_cover > 1:
        raise PreconditionError(f"g' <= 1 violated: g' = {cover.genus_cover}")
    G = class_group(cover)
    Lp = l_polynomial_from_counts(cover)
    yield _check(s, "class-number", f"g'={cover.genus_cover};P={Lp}", G.order, sum(Lp))
    yield _check(s, "group-axioms", f"order={G.order}", check_group_axioms(G), True)
    for e in (1, 2, 3):
        yield _check(s, f"point-count/e={e}", f"e={e}", cover.count_points(e), predicted_count(cover, e))


# ---------------------------------------------------------------- dispatch


def run_suite(name: str, cfg: RunConfig, cover: DoubleCover, jobs: int = 1) -> list[Check]:
    if name == "local-lemmas":
        return list(suite_local_lemmas(cfg, cover))
    if name == "local-chars":
        return list(suite_local_chars(cfg, cover))
    if name == "eta":
        return list(suite_eta(cfg, cover))
    if name == "orbital-vs-N":
        return list(suite_orbital_vs_N(cfg, cover, jobs))
    if name == "regularized":
        return list(suite_regularized(cfg, cover))
    if name == "M-vs-N":
        return list(suite_M_vs_N(cfg, cover))
    if name == "picard-sanity":
        return list(suite_picard_sanity(cfg, cover))
    raise ValueError(f"unknown suite {name!r}; expected one of {', '.join(SUITES)}")


def build_cover(cfg: RunConfig, corrupt_eta_at: Place | None = None) -> DoubleCover:
    if corrupt_eta_at is None:
        return cfg.cover
    return EtaCorruptedCover(cfg.q, cfg.f, corrupt_eta_at)
