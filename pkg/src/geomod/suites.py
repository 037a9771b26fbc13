"""Batch verification suites used by ``geomod suite``.

Every suite takes a RunConfig, draws its samples from a generator seeded by
``config.seed`` and returns a JSON-ready report with a ``passed`` flag.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path as FsPath
from typing import Callable

import numpy as np

from . import chen, hodge, hoforms, poincare
from .chen import IteratedIntegralFunctional, LoopTable, Path, path_signature, shuffles
from .formbank import builtin_letters
from .modgroup import PRESETS, GroupPreset, get_preset, random_word

SUITES = ("chen", "order", "cuspidal", "poincare", "filtration")


class ConfigError(ValueError):
    """Invalid run configuration."""


def parse_complex(text) -> complex:
    if isinstance(text, (int, float, complex)):
        return complex(text)
    if isinstance(text, (list, tuple)) and len(text) == 2:
        return complex(float(text[0]), float(text[1]))
    s = str(text).strip().replace(" ", "").replace("i", "j")
    try:
        return complex(s)
    except ValueError:
        raise ConfigError(f"cannot parse complex number {text!r}") from None


@dataclass
class RunConfig:
    group: str = "gamma0_11"
    basepoint: complex | None = None
    tol: float = 1e-12
    c_bounds: list[int] = field(default_factory=lambda: [8, 16, 32])
    output_format: str = "text"
    cache_dir: str | None = None
    seed: int = 20240601
    samples: int = 5
    jobs: int = 1

    def __post_init__(self):
        if self.group not in PRESETS:
            raise ConfigError(f"unknown group preset {self.group!r}; choose from {sorted(PRESETS)}")
        if self.basepoint is not None:
            self.basepoint = parse_complex(self.basepoint)
            if self.basepoint.imag <= 0:
                raise ConfigError("basepoint must lie in the upper half-plane")
        if not self.tol > 0:
            raise ConfigError("tol must be positive")
        if self.output_format not in ("text", "json"):
            raise ConfigError("output_format must be 'text' or 'json'")
        self.c_bounds = [int(c) for c in self.c_bounds]
        if any(b <= a for a, b in zip(self.c_bounds, self.c_bounds[1:])) or not self.c_bounds:
            raise ConfigError("c_bounds must be a nonempty increasing list")
        if self.samples < 1 or self.jobs < 1:
            raise ConfigError("samples and jobs must be positive")

    @property
    def preset(self) -> GroupPreset:
        return get_preset(self.group)

    @property
    def z0(self) -> complex:
        return complex(self.preset.basepoint if self.basepoint is None else self.basepoint)

    def rng(self, salt: int = 0) -> np.random.Generator:
        return np.random.default_rng([self.seed, salt])

    @classmethod
    def from_dict(cls, data: dict) -> RunConfig:
        known = {f.name for f in fields(cls)}
        extra = set(data) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def load(cls, path) -> RunConfig:
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        d = asdict(self)
        if self.basepoint is not None:
            d["basepoint"] = [self.basepoint.real, self.basepoint.imag]
        return d


# ---------------------------------------------------------------------------
# sampling helpers


def random_path(rng: np.random.Generator, n_points: int = 4, x_range=(-0.5, 0.5), y_range=(0.15, 1.0),
                start: complex | None = None, end: complex | None = None) -> Path:
    pts = [complex(rng.uniform(*x_range), rng.uniform(*y_range)) for _ in range(n_points)]
    if start is not None:
        pts[0] = start
    if end is not None:
        pts[-1] = end
    return Path(pts)


def random_functional(rng: np.random.Generator, letters, length: int, n_terms: int = 3,
                      constant: bool = True) -> IteratedIntegralFunctional:
    """Random combination of words with a guaranteed top-length word."""
    labels = [w.label for w in letters]
    coeffs = {}
    if constant:
        coeffs[()] = complex(*rng.normal(size=2))
    for i in range(n_terms):
        r = length if i == 0 else int(rng.integers(1, length + 1))
        word = tuple(labels[j] for j in rng.integers(0, len(labels), size=r))
        coeffs[word] = coeffs.get(word, 0) + complex(*rng.normal(size=2))
    return IteratedIntegralFunctional(letters, coeffs, length)


def random_elements(rng: np.random.Generator, preset: GroupPreset, count: int, max_len: int = 2):
    return [preset.element(random_word(rng, len(preset.generators), int(rng.integers(1, max_len + 1))))
            for _ in range(count)]


def holomorphic_letters(preset: GroupPreset):
    return tuple(w for w in builtin_letters(preset) if w.holomorphic)


def cusp_letters(preset: GroupPreset):
    return tuple(w for w in builtin_letters(preset) if w.cuspidal)


def max_shuffle_defect(sig: chen.Signature) -> float:
    worst = 0.0
    labels = sig.labels
    for ru in range(1, sig.order):
        for rv in range(1, sig.order - ru + 1):
            for u in itertools.product(labels, repeat=ru):
                for v in itertools.product(labels, repeat=rv):
                    lhs = sig[u] * sig[v]
                    rhs = sum(sig[w] for w in shuffles(u, v))
                    worst = max(worst, abs(lhs - rhs))
    return worst


# ---------------------------------------------------------------------------
# suites


def suite_chen(cfg: RunConfig) -> dict:
    rng = cfg.rng(1)
    gamma = get_preset("gamma0_11")
    letters = cusp_letters(gamma)
    shuffle, compose, antipode = 0.0, 0.0, 0.0
    for _ in range(cfg.samples):
        p = random_path(rng, 5)
        sig = path_signature(p, letters, 3, cfg.tol)
        shuffle = max(shuffle, max_shuffle_defect(sig))
        whole = chen.segment_signature(Path((p.start, p.end)), letters, 3, cfg.tol)
        halves = path_signature(Path((p.start, (p.start + p.end) / 2, p.end)), letters, 3, cfg.tol)
        compose = max(compose, whole.distance(halves))
        back = path_signature(p.reverse(), letters, 3, cfg.tol)
        antipode = max(antipode, back.distance(sig.antipode()))
    checks = {"shuffle": (shuffle, 1e-7), "composition": (compose, 1e-8), "antipode": (antipode, 1e-8)}
    return _report(checks)


def suite_order(cfg: RunConfig) -> dict:
    rng = cfg.rng(2)
    out = {}
    ok = True
    for name in ("gamma0_11", "gamma2"):
        preset = get_preset(name)
        letters = holomorphic_letters(preset)
        z0 = cfg.z0 if name == cfg.group else None
        for s in (1, 2):
            I = random_functional(rng, letters, s)
            F = hoforms.HigherOrderForm(I, preset, z0, cfg.tol, cache_dir=cfg.cache_dir)
            ts = [random_elements(rng, preset, s) for _ in range(2)]
            ts1 = [random_elements(rng, preset, s + 1) for _ in range(2)]
            rep = hoforms.verify_order(F, ts, ts1, 1e-6, hoforms.default_points(F, cfg.samples, rng))
            out[f"{name}_s{s}"] = {"passed": rep.passed, "max_spread": rep.max_spread,
                                  "max_error": rep.max_error, "max_annihilation": rep.max_annihilation}
            ok &= rep.passed
    return {"passed": ok, "checks": out}


def suite_cuspidal(cfg: RunConfig) -> dict:
    rng = cfg.rng(3)
    preset = get_preset("gamma0_11")
    letters = cusp_letters(preset)
    out = {}
    ok = True
    for word in (("f",), ("f", "f"), ("fbar", "fbar")):
        F = hoforms.HigherOrderForm(IteratedIntegralFunctional(letters, {word: 1.0}), preset,
                                    tol=cfg.tol, cache_dir=cfg.cache_dir)
        rep = hoforms.verify_cuspidal(F, 1e-7, cfg.samples, rng)
        out["".join(word)] = {"passed": rep.passed, "max_residual": rep.max_residual}
        ok &= rep.passed
    return {"passed": ok, "checks": out}


def suite_poincare(cfg: RunConfig) -> dict:
    preset = get_preset("gamma0_11")
    f = builtin_letters(preset)[0]
    I = IteratedIntegralFunctional([f], {("f",): 1.0})
    beta = preset.generators[1]
    z = complex(-0.3, 0.8)
    residuals = {}
    for C in cfg.c_bounds:
        spec = poincare.PoincareSpec("P2", 6, preset, "inf", 1, I, C)
        residuals[C] = poincare.transformation_residual(spec, beta, z, cfg.tol).residual
    lo, hi = cfg.c_bounds[0], cfg.c_bounds[-1]
    shrink = residuals[lo] / residuals[hi] if residuals[hi] > 0 else float("inf")
    classical = poincare.convergence_profile(poincare.PoincareSpec("classical", 6, get_preset("gamma2"), "inf", 1),
                                             0.1 + 0.8j, [4, 8, 16, 32])
    twisted = poincare.convergence_profile(poincare.PoincareSpec("P2", 6, preset, "0", 1, I),
                                           0.1 + 0.8j, [4, 8, 16, 32])
    checks = {
        "residual_at_max_bound": (residuals[hi], 1e-3),
        "residual_shrink_factor": (1.0 / shrink if shrink else float("inf"), 0.25),
    }
    rep = _report(checks)
    rep["residuals"] = {str(k): v for k, v in residuals.items()}
    rep["classical_monotone"] = classical.monotone
    rep["twisted_monotone"] = twisted.monotone
    rep["passed"] = rep["passed"] and bool(classical.passed) and bool(twisted.passed)
    return rep


def suite_filtration(cfg: RunConfig) -> dict:
    table = hodge.primitive_space_table(4, 2)
    bad = hodge.golden_matches(table)
    return {"passed": not bad, "mismatched_strata": bad, "strata": table.golden()}


def _report(checks: dict[str, tuple[float, float]]) -> dict:
    out = {name: {"value": v, "threshold": t, "passed": bool(v < t)} for name, (v, t) in checks.items()}
    return {"passed": all(c["passed"] for c in out.values()), "checks": out}


SUITE_FUNCS: dict[str, Callable[[RunConfig], dict]] = {
    "chen": suite_chen,
    "order": suite_order,
    "cuspidal": suite_cuspidal,
    "poincare": suite_poincare,
    "filtration": suite_filtration,
}


def _run_one(args) -> tuple[str, dict]:
    name, cfg_dict = args
    return name, SUITE_FUNCS[name](RunConfig.from_dict(cfg_dict))


def run_suite(name: str, config: RunConfig, out_dir=None) -> tuple[int, dict]:
    """Run one suite or ``all``; returns (exit code, {suite: report})."""
    if name == "all":
        names = list(SUITES)
    elif name in SUITE_FUNCS:
        names = [name]
    else:
        raise ConfigError(f"unknown suite {name!r}")
    jobs = [(n, config.to_dict()) for n in names]
    if config.jobs > 1 and len(jobs) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            results = dict(pool.map(_run_one, jobs))
    else:
        results = dict(map(_run_one, jobs))
    reports = {n: results[n] for n in names}  # fixed order
    if out_dir is not None:
        out = FsPath(out_dir)
        try:
            out.mkdir(parents=True, exist_ok=True)
            for n, rep in reports.items():
                (out / f"{n}.json").write_text(json.dumps(rep, indent=2, sort_keys=True, default=_jsonable) + "\n")
        except OSError as exc:
            raise ConfigError(f"cannot write reports to {out}: {exc}") from None
    code = 0 if all(r["passed"] for r in reports.values()) else 1
    return code, reports


def _jsonable(x):
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.bool_):
        return bool(x)
    raise TypeError(f"cannot serialize {type(x).__name__}")
