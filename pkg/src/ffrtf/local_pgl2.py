"""Local harmonic analysis for PGL_2 over a local field k((w)) with finite residue field k.

Test functions supported on Mat_2(O)_{v(det)=1} that depend only on the
residues of the entries are stored as functions on the rank-one matrices of
M_2(k) (the residues of that set).  Whittaker functions are recorded by their
torus values W(diag(w^n e, 1)) for n in Z and e in k^x.

The additive character has conductor O: psi(w^{-1} e) = zeta_p^{Tr(kappa e)}
for a fixed kappa in k^x, and psi is trivial on O.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
from typing import Callable, Iterable, Sequence, Union

from . import poly as P
from .bilaurent import BiLaurent
from .cyclo import CycloRat
from .fields import Field
from .places import DoubleCover, Place, reduce_poly
from .ratfunc import RatFunc1

Scalar = Union[Fraction, CycloRat]
Mat = tuple[int, int, int, int]  # (a11, a12, a21, a22)
ResidueFunction = Callable[[Mat], Fraction]

POSITIONS = (0, 1, 2, 3)
ROWS = ((0, 1), (2, 3))
COLUMNS = ((0, 2), (1, 3))
DIAGONALS = ((0, 3), (1, 2))
ALL_SUBSETS: tuple[tuple[int, ...], ...] = tuple(
    s for r in range(5) for s in combinations(POSITIONS, r)
)


# ------------------------------------------------------------------ local data


@dataclass(frozen=True)
class LocalData:
    """Residue field, additive character and eta at one place."""

    k: Field
    kappa: int
    eta_pi: int
    ramified: bool
    psi_unramified: bool = True

    @property
    def q(self) -> int:
        return self.k.order

    @property
    def p(self) -> int:
        return self.k.char

    def eta_unit(self, e: int) -> int:
        return self.k.chi(e) if self.ramified else 1

    def eta_bar(self, e: int) -> int:
        """The residual character extended by zero (nontrivial only at ramified places)."""
        return self.k.chi(e)

    def psi_level_minus_one(self, e: int) -> CycloRat:
        if not self.psi_unramified:
            raise ValueError("psi is ramified at this place: outside the verified regime")
        return CycloRat.zeta(self.p, self.k.trace_to_prime(self.k.mul(self.kappa, e)))

    @classmethod
    def from_place(cls, cover: DoubleCover, x: Place) -> "LocalData":
        """Data for psi = Res(. dt); at infinity dt has a double pole, so psi is ramified there."""
        k = cover.k(x)
        if x.is_infinity:
            return cls(k, 1, cover.eta_uniformizer(x), False, psi_unramified=False)
        dpi = reduce_poly(cover.F, x, P.derivative(cover.F, x.pi))
        return cls(k, k.inv(dpi), cover.eta_uniformizer(x), x in cover.R)

    @classmethod
    def abstract(cls, k: Field, ramified: bool, eta_pi: int = 1, kappa: int = 1) -> "LocalData":
        return cls(k, kappa, eta_pi, ramified)


# --------------------------------------------------- residue-level matrix algebra


def mat_mul(k: Field, a: Mat, b: Mat) -> Mat:
    return (
        k.add(k.mul(a[0], b[0]), k.mul(a[1], b[2])),
        k.add(k.mul(a[0], b[1]), k.mul(a[1], b[3])),
        k.add(k.mul(a[2], b[0]), k.mul(a[3], b[2])),
        k.add(k.mul(a[2], b[1]), k.mul(a[3], b[3])),
    )


def mat_det(k: Field, a: Mat) -> int:
    return k.sub(k.mul(a[0], a[3]), k.mul(a[1], a[2]))


def adjugate(k: Field, a: Mat) -> Mat:
    return (a[3], k.neg(a[1]), k.neg(a[2]), a[0])


def diag(a: int, d: int) -> Mat:
    return (a, 0, 0, d)


def scalar_mat(z: int) -> Mat:
    return (z, 0, 0, z)


@lru_cache(maxsize=None)
def rank_one_matrices(k: Field) -> tuple[Mat, ...]:
    """Residues of Mat_2(O)_{v(det)=1}: nonzero singular matrices over k."""
    return tuple(m for m in product(range(k.order), repeat=4) if any(m) and mat_det(k, m) == 0)


@lru_cache(maxsize=None)
def gl2(k: Field) -> tuple[Mat, ...]:
    return tuple(m for m in product(range(k.order), repeat=4) if mat_det(k, m) != 0)


def gl2_generators(k: Field) -> list[Mat]:
    """Generators of GL_2(k): unipotents over an additive basis and a diagonal generator."""
    basis = [1] if k.degree == 1 else [k.from_vec(tuple(1 if j == i else 0 for j in range(k.degree))) for i in range(k.degree)]
    g = unit_generator(k)
    out = [(1, b, 0, 1) for b in basis] + [(1, 0, b, 1) for b in basis]
    out += [diag(g, 1), diag(1, g)]
    return out


def torus_generators(k: Field) -> list[tuple[int, int]]:
    """(a, d) pairs generating k^x x k^x."""
    g = unit_generator(k)
    return [(g, 1), (1, g)]


@lru_cache(maxsize=None)
def unit_generator(k: Field) -> int:
    return next(a for a in range(1, k.order) if _mult_order(k, a) == k.order - 1)


def _mult_order(k: Field, a: int) -> int:
    n, x = 1, a
    while x != 1:
        x = k.mul(x, a)
        n += 1
    return n


def coset_point(k: Field, m: Mat) -> int | None:
    """GL_2(O) M (M with v(det) = 1) as a point of P^1(k): r2/r1 for the row space (r1, r2) of M mod w.

    The representative (1 u; 0 w) maps to u and (w 0; 0 1) maps to infinity (None).
    """
    r = (m[0], m[1]) if (m[0], m[1]) != (0, 0) else (m[2], m[3])
    if r[0] == 0:
        return None
    return k.div(r[1], r[0])


def coset_rep_residue(u: int | None) -> Mat:
    """Residue of (1 u; 0 w), or of (w 0; 0 1) for u = None."""
    return (0, 0, 0, 1) if u is None else (1, u, 0, 0)


# ---------------------------------------------------------------- test functions


def is_unit(a: int) -> bool:
    return a != 0


def h_square(k: Field, m: Mat) -> Fraction:
    """The lifted test function at a ramified place, on the residue of a matrix with v(det) = 1."""
    prod_ = Fraction(1)
    for a in m:
        prod_ *= 1 + k.chi(a)
    return prod_ / 2 if all(map(is_unit, m)) else prod_


def f_square(k: Field, m: Mat) -> Fraction:
    if is_unit(m[0]) and is_unit(m[1]):
        return Fraction(k.chi(k.mul(m[0], m[1])))
    if is_unit(m[2]) and is_unit(m[3]):
        return Fraction(k.chi(k.mul(m[2], m[3])))
    return Fraction(0)


def f_square_from_cosets(k: Field, m: Mat) -> Fraction:
    """sum_{u in k^x} eta(u) 1_{GL_2(O) (1 u; 0 w)} evaluated at m."""
    u = coset_point(k, m)
    return Fraction(0) if u is None or u == 0 else Fraction(k.chi(u))


def delta(k: Field, S: Sequence[int], all_units_only: bool, m: Mat) -> Fraction:
    if all_units_only and not all(map(is_unit, m)):
        return Fraction(0)
    out = 1
    for i in S:
        out *= k.chi(m[i])
    return Fraction(out)


def phi_all(k: Field, m: Mat) -> Fraction:
    prod_ = Fraction(1)
    for a in m:
        prod_ *= 1 + k.chi(a)
    return prod_


def phi_units(k: Field, m: Mat) -> Fraction:
    return phi_all(k, m) if all(map(is_unit, m)) else Fraction(0)


def ones(k: Field, m: Mat) -> Fraction:
    return Fraction(1)


@dataclass(frozen=True)
class LocalTestFunction:
    """A test function: a tag, with a residue table for the v(det) = 1 family."""

    tag: str
    table: ResidueFunction | None = None

    def value(self, k: Field, m: Mat) -> Fraction:
        if self.table is None:
            raise ValueError(f"{self.tag} has no residue table")
        return self.table(k, m)  # type: ignore[call-arg]


H_SQUARE = LocalTestFunction("h_sq", h_square)
F_SQUARE = LocalTestFunction("f_sq", f_square)
HECKE_ONE = LocalTestFunction("h_D(1)", ones)
IWAHORI = LocalTestFunction("1_Iw")
IWAHORI_W = LocalTestFunction("1_Iw.w")
UNIT = LocalTestFunction("unit")


# ------------------------------------------------------- lemma checks (sweeps)


@dataclass
class SweepResult:
    name: str
    checked: int
    failures: list = field(default_factory=list)
    notes: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures


@lru_cache(maxsize=None)
def xi_pushforward_table(k: Field) -> dict[Mat, int]:
    """#{alpha in M_2(k): det alpha = 0, alpha_ij^2 = a_ij} for every residue a."""
    counts: dict[Mat, int] = {}
    for alpha in product(range(k.order), repeat=4):
        if mat_det(k, alpha) != 0:
            continue
        sq = tuple(k.mul(a, a) for a in alpha)
        counts[sq] = counts.get(sq, 0) + 1  # type: ignore[index]
    return counts


def verify_xi_pushforward(k: Field, full_lifts: bool | None = None) -> SweepResult:
    """h_square = mu_* 1_Xi on Mat_2(O/m^2)_{v(det)=1}.

    Both sides depend only on residues; with full_lifts the sweep runs over every
    matrix modulo w^2 and also confirms that the residues met are exactly the
    rank-one matrices.
    """
    if full_lifts is None:
        full_lifts = k.order <= 5
    table = xi_pushforward_table(k)
    res = SweepResult(f"xi-pushforward q={k.order}", 0)
    if full_lifts:
        seen: set[Mat] = set()
        digits = list(product(range(k.order), repeat=2))
        for entries in product(digits, repeat=4):
            r = tuple(e[0] for e in entries)
            (a0, a1), (b0, b1), (c0, c1), (d0, d1) = entries
            det0 = k.sub(k.mul(a0, d0), k.mul(b0, c0))
            det1 = k.sub(k.add(k.mul(a0, d1), k.mul(a1, d0)), k.add(k.mul(b0, c1), k.mul(b1, c0)))
            if det0 != 0 or det1 == 0:
                continue
            res.checked += 1
            seen.add(r)  # type: ignore[arg-type]
            if h_square(k, r) != table.get(r, 0):  # type: ignore[arg-type]
                res.failures.append(entries)
        if seen != set(rank_one_matrices(k)):
            res.failures.append("residue set is not the rank-one locus")
    else:
        for r in rank_one_matrices(k):
            res.checked += 1
            if h_square(k, r) != table.get(r, 0):
                res.failures.append(r)
    squares = [a for a in range(1, k.order) if k.chi(a) == 1]
    all_square_units = next(r for r in rank_one_matrices(k) if all(a in squares for a in r))
    res.notes["all-square-units value"] = table[all_square_units]
    return res


def _solve_nullspace(rows: list[list[Fraction]], n: int) -> list[list[Fraction]]:
    """Basis of {v : rows . v = 0} over Q by Gauss-Jordan elimination."""
    mat = [list(r) for r in rows if any(r)]
    pivots: list[int] = []
    rank = 0
    for col in range(n):
        piv = next((i for i in range(rank, len(mat)) if mat[i][col] != 0), None)
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        inv = 1 / mat[rank][col]
        mat[rank] = [x * inv for x in mat[rank]]
        for i in range(len(mat)):
            if i != rank and mat[i][col] != 0:
                c = mat[i][col]
                mat[i] = [x - c * y for x, y in zip(mat[i], mat[rank])]
        pivots.append(col)
        rank += 1
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fcol in free:
        v = [Fraction(0)] * n
        v[fcol] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -mat[i][fcol]
        basis.append(v)
    return basis


@dataclass
class EigenspaceResult:
    dimension: int
    spanning: dict
    matches_coset_formula: bool
    value_at_one: Fraction
    f_square_table_matches: bool
    left_invariant: bool
    right_eigen: bool


def characterize_f_square(k: Field) -> EigenspaceResult:
    """The eta-eigenspace of the right diagonal action on functions on P^1(k).

    The action of diag(a, d) on P^1(k) is read off from the coset
    representatives, not assumed.
    """
    points: list[int | None] = list(range(k.order)) + [None]
    index = {u: i for i, u in enumerate(points)}
    rows = []
    units = range(1, k.order)
    for a in units:
        for d in units:
            e = k.chi(k.div(a, d))
            for u in points:
                moved = coset_point(k, mat_mul(k, coset_rep_residue(u), diag(a, d)))
                row = [Fraction(0)] * len(points)
                row[index[moved]] += 1
                row[index[u]] -= e
                rows.append(row)
    basis = _solve_nullspace(rows, len(points))
    dim = len(basis)
    spanning: dict = {}
    matches = False
    v1 = Fraction(0)
    if dim == 1:
        v = basis[0]
        scale = v[index[1]]
        spanning = {u: (v[index[u]] / scale if scale else v[index[u]]) for u in points}
        v1 = spanning[1]
        matches = all(spanning[u] == (0 if u in (0, None) else k.chi(u)) for u in points)
    table_ok = all(f_square(k, m) == f_square_from_cosets(k, m) for m in rank_one_matrices(k))
    gens = gl2_generators(k)
    left_ok = all(f_square(k, mat_mul(k, g, m)) == f_square(k, m) for g in gens for m in rank_one_matrices(k))
    right_ok = all(
        f_square(k, mat_mul(k, m, diag(a, d))) == k.chi(k.div(a, d)) * f_square(k, m)
        for a, d in torus_generators(k) for m in rank_one_matrices(k)
    )
    return EigenspaceResult(dim, spanning, matches, v1, table_ok, left_ok, right_ok)


def _symmetry_class(S: Sequence[int]) -> str:
    S = tuple(S)
    if len(S) % 2:
        return "scalar-odd"
    if S in COLUMNS or len(S) in (0, 4):
        return "right-invariant"
    if S in DIAGONALS:
        return "left-eigen"
    if S in ROWS:
        return "row"
    raise AssertionError(S)


@dataclass
class DecompositionResult:
    q: int
    identities_hold: bool
    coefficients: dict  # (S, all_units_only) -> coefficient in h - f
    classes: dict  # (S, all_units_only) -> symmetry class
    symmetries_hold: bool
    right_part_nonzero: bool
    left_part_nonzero: bool
    failures: list


@lru_cache(maxsize=None)
def verify_hf_decomposition(k: Field) -> DecompositionResult:
    """Expand h_square and f_square in the delta basis and check each piece's symmetry."""
    mats = rank_one_matrices(k)
    failures: list = []
    for m in mats:
        phi0 = sum(delta(k, S, False, m) for S in ALL_SUBSETS)
        phi1 = sum(delta(k, S, True, m) for S in ALL_SUBSETS)
        if phi0 != phi_all(k, m) or phi1 != phi_units(k, m):
            failures.append(("phi expansion", m))
        if h_square(k, m) != phi0 - phi1 / 2:
            failures.append(("h expansion", m))
        f_exp = sum(delta(k, S, False, m) for S in ROWS) - sum(delta(k, S, True, m) for S in ROWS) / 2
        if f_square(k, m) != f_exp:
            failures.append(("f expansion", m))
    coeffs: dict = {}
    for S in ALL_SUBSETS:
        c0 = Fraction(1) - (1 if S in ROWS else 0)
        c1 = Fraction(-1, 2) + (Fraction(1, 2) if S in ROWS else 0)
        if c0:
            coeffs[(S, False)] = c0
        if c1:
            coeffs[(S, True)] = c1
    for m in mats:
        diff = h_square(k, m) - f_square(k, m)
        if diff != sum(c * delta(k, S, u, m) for (S, u), c in coeffs.items()):
            failures.append(("h - f expansion", m))
    classes = {key: _symmetry_class(key[0]) for key in coeffs}
    if "row" in classes.values():
        failures.append("a row subset survives in h - f")
    units = list(range(1, k.order))
    for (S, u), cls in classes.items():
        fn = lambda m, S=S, u=u: delta(k, S, u, m)  # noqa: E731
        for m in mats:
            if cls == "scalar-odd":
                z = unit_generator(k)
                if fn(mat_mul(k, scalar_mat(z), m)) != k.chi(z) * fn(m):
                    failures.append(("scalar eigen", S, u, m))
                    break
                if sum(fn(mat_mul(k, scalar_mat(z), m)) for z in units) != 0:
                    failures.append(("pushforward", S, u, m))
                    break
            elif cls == "right-invariant":
                if any(fn(mat_mul(k, m, diag(a, d))) != fn(m) for a, d in torus_generators(k)):
                    failures.append(("right invariance", S, u, m))
                    break
            elif cls == "left-eigen":
                if any(fn(mat_mul(k, diag(a, d), m)) != k.chi(k.div(a, d)) * fn(m) for a, d in torus_generators(k)):
                    failures.append(("left eigen", S, u, m))
                    break

    def pushed(cls_name: str, m: Mat) -> Fraction:
        return sum(
            c * sum(delta(k, S, u, mat_mul(k, scalar_mat(z), m)) for z in units)
            for (S, u), c in coeffs.items() if classes[(S, u)] == cls_name
        )

    right_nonzero = any(pushed("right-invariant", m) != 0 for m in mats)
    left_nonzero = any(pushed("left-eigen", m) != 0 for m in mats)
    ident_ok = not any(isinstance(f, tuple) and f[0].endswith("expansion") for f in failures)
    sym_ok = not [f for f in failures if not (isinstance(f, tuple) and f[0].endswith("expansion"))]
    return DecompositionResult(k.order, ident_ok, coeffs, classes, sym_ok, right_nonzero, left_nonzero, failures)


# ----------------------------------------------------------- epsilon factors


def gauss_sum(ld: LocalData, a_unit: int = 1) -> CycloRat:
    """g = sum_{u in k^x} eta(a' u) psi(a' u) with a' = w^{-1} a_unit; g = q^{1/2} eps(eta, 1/2, psi)."""
    if not ld.psi_unramified:
        raise ValueError("psi is ramified at this place: outside the verified regime")
    if not ld.ramified:
        raise ValueError("the Gauss sum is attached to a ramified place")
    k = ld.k
    total = CycloRat(ld.p, [0])
    for u in range(1, k.order):
        v = k.mul(a_unit, u)
        total = total + ld.psi_level_minus_one(v) * (ld.eta_pi * ld.eta_bar(v))
    return total


# ------------------------------------------------------------- Whittaker model


def _geom_value(tails: Sequence[tuple[Scalar, Scalar]], n: int) -> Scalar:
    total: Scalar = Fraction(0)
    for c, r in tails:
        total = total + c * _pow(r, n)
    return total


def _pow(r: Scalar, n: int) -> Scalar:
    if n >= 0:
        out: Scalar = Fraction(1)
        for _ in range(n):
            out = out * r
        return out
    return 1 / _pow(r, -n)


def _conj(c: Scalar) -> Scalar:
    return c.conj() if isinstance(c, CycloRat) else c


@dataclass(frozen=True)
class WhittakerVector:
    """Torus values W(diag(w^n e, 1)) = q^{(shift - half*n)/2} T(n, e).

    T(n, e) is read from levels[n][e - 1] for lo <= n < tail_start and equals
    sum c r^n (independent of e) for n >= tail_start; it vanishes for n < lo.
    """

    q: int
    half: int
    shift: int
    lo: int
    levels: dict
    tail_start: int
    tails: tuple

    def T(self, n: int, e: int) -> Scalar:
        if n < self.lo:
            return Fraction(0)
        if n < self.tail_start:
            return self.levels[n][e - 1]
        return _geom_value(self.tails, n)

    def conj(self) -> "WhittakerVector":
        levels = {n: tuple(_conj(c) for c in row) for n, row in self.levels.items()}
        tails = tuple((_conj(c), r) for c, r in self.tails)
        return WhittakerVector(self.q, self.half, self.shift, self.lo, levels, self.tail_start, tails)

    def scaled(self, c: Scalar) -> "WhittakerVector":
        levels = {n: tuple(c * v for v in row) for n, row in self.levels.items()}
        tails = tuple((c * a, r) for a, r in self.tails)
        return WhittakerVector(self.q, self.half, self.shift, self.lo, levels, self.tail_start, tails)

    def value_scaled(self, n: int, e: int, target_shift: int) -> Scalar:
        """q^{(target - half n)/2}-normalized value: W(n, e) / q^{(target - half n)/2}."""
        d = self.shift - target_shift
        if d % 2:
            raise ValueError("shifts differ by an odd power of q^{1/2}")
        return self.T(n, e) * Fraction(self.q) ** (d // 2)

    def agrees_with(self, other: "WhittakerVector", upto: int) -> bool:
        if self.half != other.half or (self.shift - other.shift) % 2:
            return False
        lo = min(self.lo, other.lo)
        target = min(self.shift, other.shift)
        for n in range(lo, upto + 1):
            for e in range(1, self.q):
                if self.value_scaled(n, e, target) != other.value_scaled(n, e, target):
                    return False
        return True

    def translate(self, k_shift: int, unit: int, k: Field) -> "WhittakerVector":
        """W'(diag(a, 1)) = W(diag(a w^k_shift unit, 1))."""
        levels = {}
        for n in range(self.lo - k_shift, self.tail_start - k_shift):
            levels[n] = tuple(self.T(n + k_shift, k.mul(unit, e)) for e in range(1, self.q))
        tails = tuple((c * _pow(r, k_shift), r) for c, r in self.tails)
        return WhittakerVector(self.q, self.half, self.shift - self.half * k_shift, self.lo - k_shift,
                               levels, self.tail_start - k_shift, tails)


def unramified_W0(q: int, alpha: Fraction) -> WhittakerVector:
    """Spherical vector: W(w^n) = q^{-n/2} (alpha^{n+1} - beta^{n+1}) / (alpha - beta), beta = 1/alpha."""
    alpha = Fraction(alpha)
    beta = 1 / alpha
    if alpha == beta:
        raise ValueError("Satake parameter must satisfy alpha != beta for the closed form")
    tails = ((alpha / (alpha - beta), alpha), (-beta / (alpha - beta), beta))
    return WhittakerVector(q, 1, 0, 0, {}, 0, tails)


def steinberg_W0(q: int, chi_pi: int) -> WhittakerVector:
    """Iwahori-fixed vector of St x chi: W(w^n e) = chi(w)^n q^{-n} for n >= 0."""
    return WhittakerVector(q, 2, 0, 0, {}, 0, ((Fraction(1), Fraction(chi_pi)),))


def steinberg_w_translate(k: Field, chi_pi: int) -> WhittakerVector:
    """pi(w) W0 for St x chi.

    w = diag(1, -w^{-1}) * AL with AL = (0 1; w 0), and AL acts on the
    Iwahori-fixed line by -chi(w).  Hence pi(w)W0(diag(a,1)) = -chi(w) W0(diag(-a w, 1)).
    """
    W0 = steinberg_W0(k.order, chi_pi)
    return W0.translate(1, k.neg(1), k).scaled(Fraction(-chi_pi))


def iwahori_w_hecke(k: Field, ld: LocalData, W: WhittakerVector) -> WhittakerVector:
    """T_w W = sum_{u in k} pi(n(u) w) W, applied to W = pi(w) W0 already (input)."""
    levels = {}
    hi = max(W.tail_start, 1)
    for n in range(W.lo, hi):
        row = []
        for e in range(1, k.order):
            if n >= 0:
                s: Scalar = Fraction(k.order)
            elif n == -1:
                s = sum((ld.psi_level_minus_one(k.mul(e, u)) for u in range(k.order)), CycloRat(ld.p, [0]))
            else:
                raise ValueError("psi beyond level -1")
            row.append(s * W.T(n, e))
        levels[n] = tuple(row)
    tails = tuple((c * k.order, r) for c, r in W.tails)
    return WhittakerVector(W.q, W.half, W.shift, W.lo, levels, hi, tails)


@lru_cache(maxsize=None)
def _rank_one_by_span(k: Field) -> tuple[dict, dict]:
    """Rank-one matrices grouped by column space and by row space (as points of P^1(k))."""
    by_col: dict = {}
    by_row: dict = {}
    for m in rank_one_matrices(k):
        by_row.setdefault(coset_point(k, m), []).append(m)
        t = (m[0], m[2], m[1], m[3])
        by_col.setdefault(coset_point(k, t), []).append(m)
    return by_col, by_row


def coset_masses(k: Field, phi: ResidueFunction, dual: bool) -> dict:
    """m_c = average over GL_2(k) of phi(h_c g) (or of phi(g adj(h_c)) for the dual function).

    h_u = (w u; 0 1) for u in k and h_inf = (1 0; 0 w) are the right GL_2(O)
    coset representatives of Mat_2(O)_{v(det)=1}.  As g runs over GL_2(k) the
    residue of h_c g runs uniformly over the rank-one matrices with the column
    space of h_c (and g adj(h_c) over those with the row space of adj(h_c)).
    """
    by_col, by_row = _rank_one_by_span(k)
    reps: dict = {u: (0, u, 0, 1) for u in range(k.order)}
    reps[None] = (1, 0, 0, 0)
    out = {}
    for c, h in reps.items():
        if dual:
            group = by_row[coset_point(k, adjugate(k, h))]
        else:
            group = by_col[coset_point(k, (h[0], h[2], h[1], h[3]))]
        out[c] = sum((phi(k, m) for m in group), Fraction(0)) / len(group)
    return out


def coset_masses_by_group_average(k: Field, phi: ResidueFunction, dual: bool) -> dict:
    """The same masses by the literal average over GL_2(k) (oracle for small q)."""
    reps: dict = {u: (0, u, 0, 1) for u in range(k.order)}
    reps[None] = (1, 0, 0, 0)
    G = gl2(k)
    out = {}
    for c, h in reps.items():
        if dual:
            adj = adjugate(k, h)
            total = sum((phi(k, mat_mul(k, g, adj)) for g in G), Fraction(0))
        else:
            total = sum((phi(k, mat_mul(k, h, g)) for g in G), Fraction(0))
        out[c] = total / len(G)
    return out


def convolve_whittaker(ld: LocalData, f: LocalTestFunction, W: WhittakerVector, dual: bool = False) -> WhittakerVector:
    """pi(f)W (or pi(f^vee)W) for f supported on Mat_2(O)_{v(det)=1}, divided by vol(G(O)).

    pi(f)W(diag(a,1)) = V [sum_u m_u psi(a u) W(diag(a w, 1)) + m_inf W(diag(a / w, 1))].
    """
    if f.tag == "unit":
        return W
    if f.table is None:
        raise ValueError(f"no coset expansion for {f.tag}")
    if W.lo < 0:
        raise ValueError("input support below level 0 would need psi beyond level -1")
    k = ld.k
    m = coset_masses(k, f.table, dual)  # type: ignore[arg-type]
    m_inf = m.pop(None)
    total_m = sum(m.values(), Fraction(0))
    qh = Fraction(W.q) ** W.half
    lo = W.lo - 1
    n0 = max(W.tail_start + 1, 0)
    levels = {}
    for n in range(lo, n0):
        row = []
        for e in range(1, k.order):
            if n >= 0:
                M: Scalar = total_m
            elif n == -1:
                M = CycloRat(ld.p, [0])
                for u, mu in m.items():
                    if mu:
                        M = M + ld.psi_level_minus_one(k.mul(e, u)) * mu
            else:
                raise AssertionError("unreachable")
            row.append(M * W.T(n + 1, e) + m_inf * qh * W.T(n - 1, e))
        levels[n] = tuple(row)
    tails = tuple((total_m * c * r + m_inf * qh * c / r, r) for c, r in W.tails)
    return WhittakerVector(W.q, W.half, W.shift - W.half, lo, levels, n0, tails)


# ------------------------------------------------------ periods and products


@dataclass(frozen=True)
class Representation:
    kind: str  # "unramified" or "steinberg"
    param: Fraction  # Satake alpha, or chi(w) for St x chi

    def L_inverse(self, twist_pi: int | None, half: int) -> list[Fraction]:
        """1 / L(pi x chi, s + 1/2) as a polynomial in Y = q^{-half/2} X; twist_pi None for ramified chi."""
        if twist_pi is None:
            return [Fraction(1)]
        if self.kind == "unramified":
            if half != 1:
                raise ValueError("unramified L-factor needs half = 1")
            a, b = self.param, 1 / self.param
            return [Fraction(1), -twist_pi * (a + b), Fraction(twist_pi * twist_pi)]
        if half != 2:
            raise ValueError("Steinberg L-factor needs half = 2")
        return [Fraction(1), -twist_pi * self.param]


@dataclass(frozen=True)
class HalfMonomial:
    """coef * q^{qhalf/2} * X^x_exp with X = q^{-s}."""

    coef: Scalar
    qhalf: int
    x_exp: int

    def __mul__(self, other: "HalfMonomial") -> "HalfMonomial":
        return HalfMonomial(self.coef * other.coef, self.qhalf + other.qhalf, self.x_exp + other.x_exp)


def lambda_series(ld: LocalData, W: WhittakerVector, twist: str) -> RatFunc1:
    """sum_n Y^n (1/(q-1)) sum_e chi(w^n e) T(n, e) with Y = q^{-half/2} X (the q^{shift/2} factor omitted)."""
    k = ld.k
    if twist == "trivial":
        pi_val, unit = 1, (lambda e: 1)
    elif twist == "eta":
        pi_val, unit = ld.eta_pi, ld.eta_unit
    else:
        raise ValueError(twist)
    out = RatFunc1([])
    for n in range(W.lo, W.tail_start):
        c: Scalar = Fraction(0)
        for e in range(1, k.order):
            c = c + W.T(n, e) * unit(e)
        c = c * Fraction(pi_val) ** n / (k.order - 1)
        if c != 0:
            out = out + RatFunc1.monomial(c, n)
    ramified_twist = twist == "eta" and ld.ramified
    if not ramified_twist:
        for c, r in W.tails:
            out = out + RatFunc1.geometric(c, r * pi_val, W.tail_start)
    return out


def lambda_nat(ld: LocalData, W: WhittakerVector, twist: str, rep: Representation) -> HalfMonomial:
    """Normalized period lambda(W, chi, s) / L(pi x chi, s + 1/2); must be a monomial in X."""
    series = lambda_series(ld, W, twist)
    twist_pi: int | None
    if twist == "trivial":
        twist_pi = 1
    else:
        twist_pi = None if ld.ramified else ld.eta_pi
    series = series * RatFunc1(rep.L_inverse(twist_pi, W.half))
    terms = series.laurent_terms()
    if len(terms) > 1:
        raise ValueError("normalized period is not a monomial")
    if not terms:
        return HalfMonomial(Fraction(0), 0, 0)
    (m, c), = terms.items()
    return HalfMonomial(c, W.shift - W.half * m, m)


def theta_nat(ld: LocalData, W: WhittakerVector, W2: WhittakerVector, rep: Representation) -> Scalar:
    """Normalized inner product sum_n (1/(q-1)) sum_e W conj(W2) / L(pi x pi~, 1).

    Computed in the family Y = q^{1-s} (term n weighted by Y^n) and evaluated at
    Y = 1 after multiplying by 1/L(pi x pi~, s), so nontempered parameters are
    handled by analytic continuation.
    """
    q = ld.q
    hh = W.half + W2.half
    if hh % 2 or (W.shift + W2.shift) % 2:
        raise ValueError("inner product would involve odd powers of q^{1/2}")
    Z = Fraction(1, q) ** (hh // 2)
    lo = max(W.lo, W2.lo)
    start = max(W.tail_start, W2.tail_start, lo)
    series = RatFunc1([])
    for n in range(lo, start):
        c: Scalar = Fraction(0)
        for e in range(1, q):
            c = c + W.T(n, e) * _conj(W2.T(n, e))
        if c != 0:
            series = series + RatFunc1.monomial(c / (q - 1) * _pow(Z, n), n)
    for c1, r1 in W.tails:
        for c2, r2 in W2.tails:
            series = series + RatFunc1.geometric(c1 * _conj(c2), r1 * _conj(r2) * Z, start)
    qi = Fraction(1, q)
    if rep.kind == "unramified":
        a2 = rep.param * rep.param
        roots = [a2 * qi, qi, qi, qi / a2]
    else:
        roots = [qi * qi, qi]
    inv_L = RatFunc1([1])
    for r in roots:
        inv_L = inv_L * RatFunc1([Fraction(1), -r])
    return (series * inv_L).value_at_one() * Fraction(q) ** ((W.shift + W2.shift) // 2)


# ------------------------------------------------------ local characters


@dataclass(frozen=True)
class LocalChar:
    """vol(G(O))^vol_power * value, value a BiLaurent in (q_x^{s1}, q_x^{s2})."""

    vol_power: int
    value: BiLaurent

    def text(self) -> str:
        prefix = "V_x*" if self.vol_power == 1 else f"V_x^{self.vol_power}*"
        return prefix + "(" + self.value.text() + ")"


def zeta2(q: int) -> Fraction:
    return 1 / (1 - Fraction(1, q * q))


def _assemble(ld: LocalData, l1: HalfMonomial, l2: HalfMonomial, theta: Scalar, scale: Fraction) -> LocalChar:
    """J = scale * l1(s1 + s2) * l2(s1 - s2) / theta as a BiLaurent in Q1 = q_x^{s1}, Q2 = q_x^{s2}."""
    qh = l1.qhalf + l2.qhalf
    if qh % 2:
        raise ValueError("half-integral power of q survives")
    coef = l1.coef * l2.coef * Fraction(ld.q) ** (qh // 2) * scale / theta
    # X1^m1 = q^{-m1 (s1 + s2)}, X2^m2 = q^{-m2 (s1 - s2)}
    a = -l1.x_exp - l2.x_exp
    b = -l1.x_exp + l2.x_exp
    if isinstance(coef, CycloRat):
        val = BiLaurent({(a, b): coef}, ld.p)
    else:
        val = BiLaurent({(a, b): coef}).promote(ld.p)
    return LocalChar(1, val)


def j_delta_piece_on_W0(ld: LocalData, S: Sequence[int], units_only: bool, cls: str, rep: Representation) -> HalfMonomial:
    """The W0-term of the spherical character of one delta piece (expected zero)."""
    W0 = unramified_W0(ld.q, rep.param)
    fn = LocalTestFunction(f"delta{int(units_only)}{tuple(S)}", lambda k, m: delta(k, S, units_only, m))
    if cls == "right-invariant":
        W = convolve_whittaker(ld, fn, W0, dual=True).conj()
        return lambda_nat(ld, W, "eta", rep)
    if cls == "left-eigen":
        return lambda_nat(ld, convolve_whittaker(ld, fn, W0), "trivial", rep)
    raise ValueError(cls)


def act_and_char(ld: LocalData, rep: Representation, f: LocalTestFunction) -> LocalChar:
    """Local spherical character by the single-term collapse, each ingredient computed directly."""
    q = ld.q
    if rep.kind == "unramified" and f.tag in ("f_sq", "h_sq"):
        if not ld.ramified:
            raise ValueError("these test functions live at ramified places")
        W0 = unramified_W0(q, rep.param)
        l1 = lambda_nat(ld, W0, "trivial", rep)
        W2 = convolve_whittaker(ld, F_SQUARE, W0, dual=True).conj()
        l2 = lambda_nat(ld, W2, "eta", rep)
        theta = theta_nat(ld, W0, W0, rep)
        out = _assemble(ld, l1, l2, theta, Fraction(1))
        if f.tag == "h_sq":
            dec = verify_hf_decomposition(ld.k)
            if not (dec.identities_hold and dec.symmetries_hold):
                raise ArithmeticError("delta decomposition failed")
            for (S, u), c in dec.coefficients.items():
                cls = dec.classes[(S, u)]
                if cls == "scalar-odd":
                    continue  # pushforward to PGL_2 is zero (checked in the decomposition)
                piece = j_delta_piece_on_W0(ld, S, u, cls, rep)
                if piece.coef != 0:
                    raise ArithmeticError(f"delta piece {S} does not vanish")
        return out
    if rep.kind == "steinberg" and f.tag in ("1_Iw", "1_Iw.w"):
        if ld.ramified:
            raise ValueError("Steinberg characters are computed at unramified places")
        W0 = steinberg_W0(q, int(rep.param))
        l1 = lambda_nat(ld, W0, "trivial", rep)
        W2 = W0 if f.tag == "1_Iw" else steinberg_w_translate(ld.k, int(rep.param))
        l2 = lambda_nat(ld, W2.conj(), "eta", rep)
        theta = theta_nat(ld, W0, W0, rep)
        return _assemble(ld, l1, l2, theta, Fraction(1, q + 1))
    raise ValueError(f"unsupported pair ({rep.kind}, {f.tag})")


# closed forms stated for these characters


def closed_form_ramified(ld: LocalData) -> LocalChar:
    """V zeta(2) eta(-1) eps(eta, 1/2, psi) q^{s1 - s2 + 1/2}, with q^{1/2} eps = g."""
    g = gauss_sum(ld)
    c = g * (zeta2(ld.q) * ld.eta_unit(ld.k.neg(1)))
    return LocalChar(1, BiLaurent({(1, -1): c}, ld.p))


def faithful_form_ramified(ld: LocalData) -> LocalChar:
    """V zeta(2) g q^{s1 - s2}: the value obtained when the complex conjugation is kept."""
    g = gauss_sum(ld)
    return LocalChar(1, BiLaurent({(1, -1): g * zeta2(ld.q)}, ld.p))


def closed_form_steinberg(ld: LocalData, chi_pi: int, with_w: bool) -> LocalChar:
    q = ld.q
    if not with_w:
        return LocalChar(1, BiLaurent({(0, 0): zeta2(q) / q}).promote(ld.p))
    eps = -chi_pi * ld.eta_pi  # Atkin-Lehner eigenvalue of St x chi eta
    return LocalChar(1, BiLaurent({(1, -1): zeta2(q) * eps / q}).promote(ld.p))


def hecke_eigenvalue_check(ld: LocalData, alpha: Fraction, upto: int = 6) -> bool:
    """pi(1_{Mat_2(O)_{v(det)=1}}) W0 = V q^{1/2} (alpha + beta) W0."""
    W0 = unramified_W0(ld.q, alpha)
    out = convolve_whittaker(ld, HECKE_ONE, W0)
    expected = W0.scaled(Fraction(ld.q) * (alpha + 1 / alpha))
    expected = WhittakerVector(expected.q, expected.half, -1, expected.lo, expected.levels, expected.tail_start, expected.tails)
    return out.agrees_with(expected, upto)


def sweep_local_lemmas(fields: Iterable[Field]) -> dict:
    out = {}
    for k in fields:
        out[k.order] = (verify_xi_pushforward(k), characterize_f_square(k), verify_hf_decomposition(k))
    return out
