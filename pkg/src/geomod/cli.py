"""Command-line driver: ``geomod <subcommand> [options]``.

Exit codes: 0 success, 1 a verification failed, 2 bad configuration or I/O.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Sequence

from . import hodge, hoforms, poincare
from .chen import IteratedIntegralFunctional, LoopTable, pair
from .formbank import builtin_letters, load_letters
from .groupring import parse_xi
from .modgroup import PRESETS
from .suites import (SUITES, ConfigError, RunConfig, _jsonable, holomorphic_letters, parse_complex,
                     random_elements, random_functional, run_suite)


def _dump(obj, fmt: str, text: str | None = None) -> str:
    if fmt == "json" or text is None:
        return json.dumps(obj, indent=2, sort_keys=True, default=_jsonable)
    return text


def _build_config(args) -> RunConfig:
    data = {}
    if args.config:
        data = RunConfig.load(args.config).to_dict()
    overrides = {"group": args.group, "tol": args.tol, "seed": args.seed, "jobs": args.jobs,
                 "basepoint": args.basepoint, "output_format": getattr(args, "format", None)}
    for key, value in overrides.items():
        if value is not None:
            data[key] = value
    cache = args.cache_dir or os.environ.get("GEOMOD_CACHE") or data.get("cache_dir")
    data["cache_dir"] = cache
    return RunConfig.from_dict(data)


def _letters(cfg: RunConfig, letters_file: str | None):
    letters = list(builtin_letters(cfg.preset))
    if letters_file:
        try:
            letters.extend(load_letters(letters_file))
        except (OSError, ValueError, KeyError) as exc:
            raise ConfigError(f"cannot read letters from {letters_file}: {exc}") from None
    return letters


def _load_functional(path: str, letters) -> IteratedIntegralFunctional:
    try:
        with open(path) as fh:
            record = json.load(fh)
        return IteratedIntegralFunctional.from_json(record, letters)
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        raise ConfigError(f"cannot read functional from {path}: {exc}") from None


# ---------------------------------------------------------------------------
# subcommands


def cmd_pair(args, cfg: RunConfig) -> int:
    I = _load_functional(args.functional, _letters(cfg, args.letters))
    try:
        xi = parse_xi(args.xi, cfg.preset)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    table = LoopTable(cfg.preset, I.letters, max(I.declared_length, 1), cfg.z0, cfg.tol, cfg.cache_dir)
    value = pair(I, xi, table)
    payload = {"value": [value.real, value.imag], "tol": cfg.tol, "xi": args.xi, "group": cfg.group}
    print(_dump(payload, cfg.output_format, f"{value.real:.15g} {value.imag:+.15g}i  (tol {cfg.tol:.1e})"))
    return 0


def _functional_for(args, cfg: RunConfig, length: int, holomorphic_only: bool = True):
    if args.functional:
        return _load_functional(args.functional, _letters(cfg, args.letters))
    letters = holomorphic_letters(cfg.preset) if holomorphic_only else builtin_letters(cfg.preset)
    return random_functional(cfg.rng(11), letters, length)


def cmd_verify_order(args, cfg: RunConfig) -> int:
    s = args.order - 1
    if s < 1:
        raise ConfigError("--order must be at least 2")
    I = _functional_for(args, cfg, s)
    F = hoforms.HigherOrderForm(I, cfg.preset, cfg.z0, cfg.tol, cache_dir=cfg.cache_dir)
    rng = cfg.rng(12)
    ts = [random_elements(rng, cfg.preset, s) for _ in range(args.tuples)]
    ts1 = [random_elements(rng, cfg.preset, s + 1) for _ in range(args.tuples)]
    rep = hoforms.verify_order(F, ts, ts1, args.check_tol, hoforms.default_points(F, args.samples, rng))
    print(_dump(rep.to_json(), cfg.output_format, rep.to_text()))
    return 0 if rep.passed else 1


def cmd_verify_cuspidal(args, cfg: RunConfig) -> int:
    if args.functional:
        I = _load_functional(args.functional, _letters(cfg, args.letters))
    else:
        cusp = [w for w in builtin_letters(cfg.preset) if w.kind == "holomorphic-cusp"]
        if not cusp:
            raise ConfigError(f"{cfg.group} has no cusp-form letters; pass --functional")
        I = IteratedIntegralFunctional(cusp, {(cusp[0].label,) * (args.order - 1): 1.0})
    F = hoforms.HigherOrderForm(I, cfg.preset, cfg.z0, cfg.tol, cache_dir=cfg.cache_dir)
    rep = hoforms.verify_cuspidal(F, args.check_tol, args.samples, cfg.rng(13))
    payload = rep.to_json()
    payload["cuspidal_flag"] = F.cuspidal_flag
    print(_dump(payload, cfg.output_format, rep.to_text()))
    return 0 if rep.passed else 1


def cmd_poincare(args, cfg: RunConfig) -> int:
    twist = None
    if args.kind in poincare.TWISTED:
        if not args.twist:
            raise ConfigError(f"--kind {args.kind} needs --twist")
        twist = _load_functional(args.twist, _letters(cfg, args.letters))
    try:
        bounds = [int(b) for b in str(args.cbound).split(",")]
        spec = poincare.PoincareSpec(args.kind, args.k, cfg.preset, args.cusp, args.m, twist, bounds[-1], cfg.z0)
    except (ValueError, KeyError) as exc:
        raise ConfigError(str(exc)) from None
    profile = poincare.convergence_profile(spec, parse_complex(args.z), bounds, cfg.tol)
    sys.stdout.write(profile.to_csv())
    return 0 if profile.passed else 1


def cmd_filtration(args, cfg: RunConfig) -> int:
    table = hodge.primitive_space_table(args.k, args.s)
    print(hodge.dumps_table(table, args.format or "text"))
    return 0


def cmd_suite(args, cfg: RunConfig) -> int:
    code, reports = run_suite(args.name, cfg, args.out)
    if cfg.output_format == "json":
        print(json.dumps(reports, indent=2, sort_keys=True, default=_jsonable))
    else:
        for name, rep in reports.items():
            print(f"{name:<12}{'PASS' if rep['passed'] else 'FAIL'}")
    return code


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--group", choices=None, help="group preset: gamma2 or gamma0_11")
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--jobs", type=int, help="worker processes for suites")
    common.add_argument("--cache-dir", help="loop-signature cache directory")
    common.add_argument("--seed", type=int, help="random seed for sample tuples")
    common.add_argument("--basepoint", help="basepoint z0, e.g. 0.1+0.9i")
    common.add_argument("--letters", help="JSON file with extra letters")

    quad = argparse.ArgumentParser(add_help=False, parents=[common])
    quad.add_argument("--tol", type=float, help="quadrature tolerance")

    parser = argparse.ArgumentParser(prog="geomod", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pair", parents=[quad], help="pair a functional with a group-ring element")
    p.add_argument("--functional", required=True)
    p.add_argument("--xi", required=True, help='e.g. "(g1-1)(g2-1)"')
    p.add_argument("--format", choices=("text", "json"))
    p.set_defaults(func=cmd_pair)

    for name, func in (("verify-order", cmd_verify_order), ("verify-cuspidal", cmd_verify_cuspidal)):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("--order", type=int, default=2, help="claimed order s+1")
        p.add_argument("--samples", type=int, default=5)
        p.add_argument("--tuples", type=int, default=3)
        p.add_argument("--tol", dest="check_tol", type=float, default=1e-6 if name == "verify-order" else 1e-7,
                       help="verification tolerance")
        p.add_argument("--quad-tol", dest="tol", type=float, help="quadrature tolerance")
        p.add_argument("--functional")
        p.add_argument("--format", choices=("text", "json"))
        p.set_defaults(func=func)

    p = sub.add_parser("poincare", parents=[quad], help="truncated Poincare series as CSV")
    p.add_argument("--kind", default="classical", choices=poincare.KINDS)
    p.add_argument("--k", type=int, default=6)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--cusp", default="inf")
    p.add_argument("--twist")
    p.add_argument("--cbound", default="4,8,16,32", help="one bound or an increasing list")
    p.add_argument("--z", default="0.1+0.8i")
    p.set_defaults(func=cmd_poincare)

    p = sub.add_parser("filtration", parents=[quad], help="filtration table of primitive forms")
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--s", type=int, default=2)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_filtration)

    p = sub.add_parser("suite", parents=[quad], help="run a verification suite")
    p.add_argument("name", choices=SUITES + ("all",))
    p.add_argument("--out", help="directory for per-suite JSON reports")
    p.add_argument("--format", choices=("text", "json"))
    p.set_defaults(func=cmd_suite)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        if args.group is not None and args.group not in PRESETS:
            raise ConfigError(f"unknown group preset {args.group!r}")
        cfg = _build_config(args)
        return args.func(args, cfg)
    except ConfigError as exc:
        print(f"geomod: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"geomod: I/O error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
