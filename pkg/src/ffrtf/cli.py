"""Command line entry point: ffrtf <verb> --config <path> ..."""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from . import poly as P
from .config import ConfigError, PreconditionError, RunConfig, check_preconditions, load_config
from .moduli import N_counts, count_M, enumerate_base, inv_D
from .orbital import N_side, orbital_at, orbital_via_local_product, orbital_via_X, _is_regular
from .places import RatFn, parse_place
from .report import Report, exact_text, rows_json
from .suites import SUITES, build_cover, run_suite

EXIT_OK, EXIT_FAIL, EXIT_REFUSED = 0, 1, 2


def parse_u(cfg: RunConfig, text: str) -> RatFn | None:
    """'inf', or 'num' or 'num/den' with polynomials in t (parentheses optional)."""
    s = text.strip()
    if s == "inf":
        return None
    num, _, den = s.partition("/")
    F = cfg.cover.F
    strip = lambda part: part.strip().removeprefix("(").removesuffix(")")  # noqa: E731
    try:
        return RatFn.make(F, P.parse(F, strip(num)), P.parse(F, strip(den)) if den else P.ONE)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"argument --u: {exc}") from None


def _write(path: str | None, text: str) -> None:
    if path is None:
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _need_D(cfg: RunConfig):
    if cfg.D is None:
        raise ConfigError("field D is required for this verb")
    return cfg.D


def cmd_run(args: argparse.Namespace, cfg: RunConfig) -> int:
    suites = list(cfg.suites) if args.suite is None else args.suite
    for name in suites:
        if name not in SUITES:
            raise ConfigError(f"argument --suite: unknown suite {name!r}; expected one of {', '.join(SUITES)}")
    try:
        corrupt = parse_place(cfg.cover.F, args.mutate_eta) if args.mutate_eta else None
        cover = build_cover(cfg, corrupt)
    except ValueError as exc:
        raise ConfigError(f"argument --mutate-eta: {exc}") from None
    report = Report(cfg.as_dict(), suites)
    for name in suites:
        report.checks.extend(run_suite(name, cfg, cover, args.jobs))
    sys.stdout.write(report.to_text())
    _write(args.json, report.to_json())
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_bases(args: argparse.Namespace, cfg: RunConfig) -> int:
    cover, D = cfg.cover, _need_D(cfg)
    rows = []
    for base in enumerate_base(cover, cfg.sigma, D):
        u = inv_D(cover, base)
        rows.append({"base": base.text(), "u": "inf" if u is None else u.text()})
        sys.stdout.write(f"{rows[-1]['base']}\tu={rows[-1]['u']}\n")
    _write(args.json, rows_json("bases", cfg.as_dict(), rows))
    return EXIT_OK


def cmd_count_n(args: argparse.Namespace, cfg: RunConfig) -> int:
    cover, D = cfg.cover, _need_D(cfg)
    rows = []
    for base in enumerate_base(cover, cfg.sigma, D):
        for dq, c in N_counts(cover, cfg.sigma, base).items():
            rows.append({"base": base.text(), "d": dq.text(), "count": exact_text(c)})
            sys.stdout.write(f"{base.text()}\t{dq.text()}\t{exact_text(c)}\n")
    _write(args.json, rows_json("count-n", cfg.as_dict(), rows))
    return EXIT_OK


def cmd_count_m(args: argparse.Namespace, cfg: RunConfig) -> int:
    cover, D = cfg.cover, _need_D(cfg)
    rows = []
    for base in enumerate_base(cover, cfg.sigma, D):
        c = count_M(cover, cfg.sigma, D.degree, base)
        rows.append({"base": base.text(), "d": str(D.degree), "count": exact_text(c)})
        sys.stdout.write(f"{base.text()}\t{D.degree}\t{exact_text(c)}\n")
    _write(args.json, rows_json("count-m", cfg.as_dict(), rows))
    return EXIT_OK


def cmd_orbital(args: argparse.Namespace, cfg: RunConfig) -> int:
    cover, D = cfg.cover, _need_D(cfg)
    u = parse_u(cfg, args.u)
    if _is_regular(u):
        lines = [f"X-route: {orbital_via_X(cover, cfg.sigma, D, u).text()}",
                 f"local-product: {orbital_via_local_product(cover, cfg.sigma, D, u).text()}"]
    else:
        try:
            lines = [f"regularized: {orbital_at(cover, cfg.sigma, D, u).text()}"]
        except ValueError as exc:
            raise PreconditionError(str(exc)) from None
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_orbital_all(args: argparse.Namespace, cfg: RunConfig) -> int:
    cover, D = cfg.cover, _need_D(cfg)
    rows = []
    for base in enumerate_base(cover, cfg.sigma, D):
        u = inv_D(cover, base)
        J = orbital_at(cover, cfg.sigma, D, u) if not _is_regular(u) else orbital_via_X(cover, cfg.sigma, D, u)
        rows.append({"base": base.text(), "u": "inf" if u is None else u.text(), "orbital": J.text(),
                     "N-side": N_side(cover, cfg.sigma, base).text()})
        sys.stdout.write(f"u={rows[-1]['u']}\t{rows[-1]['orbital']}\n")
    _write(args.json, rows_json("orbital-all", cfg.as_dict(), rows))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ffrtf", description="Exact checks of orbital and moduli counting identities.")
    sub = parser.add_subparsers(dest="verb", required=True)

    def verb(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="path to a key=value configuration")
        p.add_argument("--json", help="write a machine-readable report to this path")
        return p

    run = verb("run", "run verification suites")
    run.add_argument("--suite", nargs="*", action="extend",
                     help=f"suites to run (default: the config's suites field, else all of {', '.join(SUITES)}); bare --suite runs none")
    run.add_argument("--jobs", type=int, default=1, help="worker processes for per-base checks")
    run.add_argument("--mutate-eta", metavar="PLACE", help="test hook: negate eta of the uniformizer at a ramified place")
    run.set_defaults(handler=cmd_run)
    verb("bases", "list base points over D").set_defaults(handler=cmd_bases)
    verb("count-n", "eta-weighted counts per degree quadruple").set_defaults(handler=cmd_count_n)
    verb("count-m", "fiber counts of the M-side").set_defaults(handler=cmd_count_m)
    orb = verb("orbital", "orbital integral at one u")
    orb.add_argument("--u", required=True, help="'inf', '0', or num/den in t")
    orb.set_defaults(handler=cmd_orbital)
    verb("orbital-all", "orbital integrals at every u in the image of inv_D").set_defaults(handler=cmd_orbital_all)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        check_preconditions(cfg)
        return args.handler(args, cfg)
    except ConfigError as exc:
        sys.stderr.write(f"ffrtf: invalid config {args.config}: {exc}\n")
        return EXIT_REFUSED
    except PreconditionError as exc:
        sys.stderr.write(f"ffrtf: refused: {exc}\n")
        return EXIT_REFUSED
    except OSError as exc:
        sys.stderr.write(f"ffrtf: {exc}\n")
        return EXIT_REFUSED


if __name__ == "__main__":
    sys.exit(main())
