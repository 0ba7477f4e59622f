"""Run configuration: plain-text key=value lines.

Grammar (version 1)::

    # comment
    q=5                       prime, required
    f=t^2 - t                 polynomial in t, required
    sigma_plus=t + 2          comma-separated places (monic irreducibles); empty for none
    sigma_minus=
    D=t + 1^2, t^2 + 2        effective divisor; a trailing ^N is the multiplicity (default 1); "inf" allowed
    max_degree=2              sweep every effective D on U up to this degree (instead of D)
    alphas=2,3,5              Satake parameters for the local character suite
    bases_per_divisor=0       0 enumerates every base point; otherwise a seeded sample
    divisors_per_degree=0     0 takes every D in the sweep; otherwise a seeded sample
    seed=0
    suites=eta,picard-sanity  default suites for `run` (all when absent)
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from . import poly as P
from .fields import PrimeField, is_prime
from .places import INFINITY, DoubleCover, Divisor, Place, SigmaData, enumerate_effective_divisors, parse_place

GRAMMAR_VERSION = 1
KEYS = ("q", "f", "sigma_plus", "sigma_minus", "D", "max_degree", "alphas", "bases_per_divisor",
        "divisors_per_degree", "seed", "suites")
SUITE_NAMES = ("local-lemmas", "local-chars", "eta", "orbital-vs-N", "regularized", "M-vs-N", "picard-sanity")


class ConfigError(ValueError):
    """Malformed configuration, reported with line and field."""


class PreconditionError(ValueError):
    """A configuration that parses but violates a precondition of a suite."""


@dataclass
class RunConfig:
    q: int
    f: tuple[int, ...]
    sigma: SigmaData
    D: Divisor | None = None
    max_degree: int | None = None
    alphas: tuple[Fraction, ...] = (Fraction(2), Fraction(3), Fraction(5))
    bases_per_divisor: int = 0
    divisors_per_degree: int = 0
    seed: int = 0
    suites: tuple[str, ...] = SUITE_NAMES
    source: dict[str, str] = field(default_factory=dict)

    @property
    def cover(self) -> DoubleCover:
        return DoubleCover(self.q, self.f)

    def divisors(self) -> list[Divisor]:
        """The D's to test: the given one, or a (sampled) sweep over effective divisors on U."""
        if self.D is not None:
            return [self.D]
        if self.max_degree is None:
            return []
        cover = self.cover
        avoid = list(cover.R) + list(self.sigma.places())
        rng = random.Random(self.seed)
        out = []
        for d in range(self.max_degree + 1):
            ds = enumerate_effective_divisors(cover.F, d, avoid)
            if self.divisors_per_degree and len(ds) > self.divisors_per_degree:
                ds = sorted(rng.sample(ds, self.divisors_per_degree), key=divisor_key)
            out.extend(ds)
        return out

    def sample_bases(self, bases: list) -> list:
        if not self.bases_per_divisor or len(bases) <= self.bases_per_divisor:
            return bases
        rng = random.Random(self.seed)
        idx = sorted(rng.sample(range(len(bases)), self.bases_per_divisor))
        return [bases[i] for i in idx]

    def as_dict(self) -> dict[str, str]:
        return {k: self.source[k] for k in KEYS if k in self.source}


def divisor_key(D: Divisor) -> tuple:
    return tuple((x.sort_key(), m) for x, m in D.mult.items())


def _places(F, text: str, key: str, lineno: int) -> tuple[Place, ...]:
    out = []
    for part in (p.strip() for p in text.split(",")):
        if not part:
            continue
        try:
            out.append(parse_place(F, part))
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: field {key}: {exc}") from None
    return tuple(out)


def parse_divisor(F, text: str, key: str = "D", lineno: int = 0) -> Divisor:
    acc: dict[Place, int] = {}
    for part in (p.strip() for p in text.split(",")):
        if not part:
            continue
        # a trailing ^N is the multiplicity
        head, sep, tail = part.rpartition("^")
        poly_text, mult_text = (head, tail) if sep and tail.strip().isdigit() else (part, "1")
        try:
            x = parse_place(F, poly_text)
            m = int(mult_text)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: field {key}: {exc}") from None
        if m < 0:
            raise ConfigError(f"line {lineno}: field {key}: multiplicity must be >= 0")
        acc[x] = acc.get(x, 0) + m
    return Divisor.make(acc)


def _int(text: str, key: str, lineno: int, minimum: int = 0) -> int:
    try:
        v = int(text)
    except ValueError:
        raise ConfigError(f"line {lineno}: field {key}: expected an integer, got {text!r}") from None
    if v < minimum:
        raise ConfigError(f"line {lineno}: field {key}: must be >= {minimum}")
    return v


def parse_config(text: str) -> RunConfig:
    raw: dict[str, tuple[str, int]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        s = line.split("#", 1)[0].strip()
        if not s:
            continue
        if "=" not in s:
            raise ConfigError(f"line {lineno}: expected key=value")
        key, value = (p.strip() for p in s.split("=", 1))
        if key not in KEYS:
            raise ConfigError(f"line {lineno}: unknown field {key!r}")
        if key in raw:
            raise ConfigError(f"line {lineno}: field {key} given twice")
        raw[key] = (value, lineno)
    for key in ("q", "f"):
        if key not in raw:
            raise ConfigError(f"field {key} is required")
    qtext, qline = raw["q"]
    q = _int(qtext, "q", qline, 2)
    if not is_prime(q):
        raise ConfigError(f"line {qline}: field q: {q} is not prime")
    F = PrimeField(q)
    ftext, fline = raw["f"]
    try:
        f = P.parse(F, ftext)
        DoubleCover(q, f)
    except ValueError as exc:
        raise ConfigError(f"line {fline}: field f: {exc}") from None
    plus_text, plus_line = raw.get("sigma_plus", ("", 0))
    minus_text, minus_line = raw.get("sigma_minus", ("", 0))
    plus = _places(F, plus_text, "sigma_plus", plus_line)
    minus = _places(F, minus_text, "sigma_minus", minus_line)
    if INFINITY in plus + minus:
        raise PreconditionError("∞ ∉ Sigma violated")
    if set(plus) & set(minus):
        raise ConfigError(f"line {minus_line}: field sigma_minus: must be disjoint from sigma_plus")
    sigma = SigmaData(plus, minus)
    cfg = RunConfig(q, f, sigma, source={k: v for k, (v, _) in raw.items()})
    if "D" in raw and "max_degree" in raw:
        raise ConfigError(f"line {raw['max_degree'][1]}: fields D and max_degree are exclusive")
    if "D" in raw:
        cfg.D = parse_divisor(F, raw["D"][0], "D", raw["D"][1])
    if "max_degree" in raw:
        cfg.max_degree = _int(raw["max_degree"][0], "max_degree", raw["max_degree"][1])
    if "alphas" in raw:
        text, line = raw["alphas"]
        try:
            cfg.alphas = tuple(Fraction(p.strip()) for p in text.split(",") if p.strip())
        except (ValueError, ZeroDivisionError):
            raise ConfigError(f"line {line}: field alphas: expected rationals") from None
        if any(a in (0, 1, -1) for a in cfg.alphas):
            raise ConfigError(f"line {line}: field alphas: values 0 and +-1 are excluded")
    for key in ("bases_per_divisor", "divisors_per_degree", "seed"):
        if key in raw:
            setattr(cfg, key, _int(raw[key][0], key, raw[key][1]))
    if "suites" in raw:
        text, line = raw["suites"]
        names = tuple(p.strip() for p in text.split(",") if p.strip())
        bad = [n for n in names if n not in SUITE_NAMES]
        if bad:
            raise ConfigError(f"line {line}: field suites: unknown suite {bad[0]!r}")
        cfg.suites = names
    return cfg


def load_config(path: str) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def check_preconditions(cfg: RunConfig) -> None:
    """Sigma and D against R and infinity; raises PreconditionError naming the violated condition."""
    cover = cfg.cover
    meet = [x.text() for x in cfg.sigma.places() if x in cover.R]
    if meet:
        raise PreconditionError(f"Sigma ∩ R = ∅ violated at {meet}")
    if cfg.D is not None:
        bad = [x.text() for x in cfg.D.support() if x in cover.R or x in cfg.sigma.places()]
        if bad:
            raise PreconditionError(f"supp D ⊂ U = X - Sigma - R violated at {bad}")


def places_text(xs: Iterable[Place]) -> str:
    return ",".join(x.text() for x in xs)
