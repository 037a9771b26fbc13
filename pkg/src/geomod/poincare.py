"""Classical, Eisenstein and twisted Poincare series of weight k >= 4.

All series are finite sums over the coset representatives returned by
``coset_reps`` (bottom rows of sigma^-1 gamma inside a box).  For a cusp of
width h the summand is

    e(m sigma^-1 gamma z / h) / j(sigma^-1 gamma, z)^k

times a twist: F_I(z) for P1, int_{z0}^{gamma z0} I for P2 and
int_z^{gamma z} I for P3.  The width division makes the summand depend only
on the coset when sigma is an integral matrix.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Sequence

import numpy as np

from .chen import (DEFAULT_TOL, IteratedIntegralFunctional, LoopTable, Path, Signature,
                   deconcatenate, path_signature)
from .groupring import GroupRingElement, j_power_element
from .modgroup import GroupElement, GroupPreset, automorphy, coset_reps

KINDS = ("classical", "eisenstein", "P1", "P2", "P3")
TWISTED = ("P1", "P2", "P3")


@dataclass(frozen=True)
class PoincareSpec:
    kind: str
    k: int
    preset: GroupPreset
    cusp: str = "inf"
    m: int = 1
    twist: IteratedIntegralFunctional | None = None
    c_bound: int = 16
    z0: complex | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown series kind {self.kind!r}")
        if self.k < 4 or self.k % 2:
            raise ValueError("weight must be an even integer >= 4 (weight 2 series do not converge)")
        if self.m < 0:
            raise ValueError("m must be non-negative")
        if self.c_bound < 0:
            raise ValueError("c_bound must be non-negative")
        if self.kind in TWISTED:
            if self.twist is None:
                raise ValueError(f"{self.kind} needs a twist functional")
            if not self.twist.cuspidal:
                raise ValueError("twists must use letters that extend to the compactified curve")
        elif self.twist is not None:
            raise ValueError(f"{self.kind} series take no twist")
        if self.kind == "eisenstein" and self.m != 0:
            raise ValueError("Eisenstein series have m = 0")
        self.preset.cusp(self.cusp)  # raises on unknown cusp

    @property
    def basepoint(self) -> complex:
        return complex(self.preset.basepoint if self.z0 is None else self.z0)

    @property
    def cusp_obj(self):
        return self.preset.cusp(self.cusp)

    def with_bound(self, c_bound: int) -> PoincareSpec:
        return replace(self, c_bound=c_bound)

    def with_twist(self, twist: IteratedIntegralFunctional | None) -> PoincareSpec:
        return replace(self, twist=twist)

    def untwisted(self) -> PoincareSpec:
        return replace(self, kind="eisenstein" if self.m == 0 else "classical", twist=None)


@dataclass
class PoincareValue:
    value: complex
    c_bound: int
    n_terms: int
    tail_estimate: float
    kind: str
    z: complex

    def to_json(self) -> dict:
        return {"kind": self.kind, "z": [self.z.real, self.z.imag], "c_bound": self.c_bound,
                "value": [self.value.real, self.value.imag], "n_terms": self.n_terms,
                "tail_estimate": self.tail_estimate}


def _box(g: GroupElement) -> int:
    return max(abs(g.c), abs(g.d))


class SeriesContext:
    """Coset representatives and twist signatures shared by evaluations of one spec family."""

    def __init__(self, preset: GroupPreset, cusp: str, c_bound: int, k: int, m: int,
                 alphabet=None, order: int = 0, z0: complex | None = None, tol: float = DEFAULT_TOL,
                 table: LoopTable | None = None, cache_dir=None):
        self.preset = preset
        self.cusp = preset.cusp(cusp)
        self.c_bound = c_bound
        self.k = k
        self.m = m
        self.z0 = complex(preset.basepoint if z0 is None else z0)
        self.tol = tol
        self.reps = coset_reps(preset, self.cusp, c_bound)
        sigma_inv = self.cusp.scaling.inverse()
        self.local = [sigma_inv @ g for g in self.reps]
        self.shell = np.array([_box(h) for h in self.local])
        self.table = table
        if self.table is None and alphabet is not None:
            self.table = LoopTable(preset, alphabet, max(order, 1), self.z0, tol, cache_dir)

    @classmethod
    def for_spec(cls, spec: PoincareSpec, tol: float = DEFAULT_TOL, table: LoopTable | None = None,
                 cache_dir=None) -> SeriesContext:
        alphabet = spec.twist.letters if spec.twist is not None else None
        order = spec.twist.declared_length if spec.twist is not None else 0
        return cls(spec.preset, spec.cusp, spec.c_bound, spec.k, spec.m, alphabet, order,
                   spec.basepoint, tol, table, cache_dir)

    @cached_property
    def loops(self) -> list[Signature]:
        return [self.table.loop_signature(g) for g in self.reps]

    def kernel(self, z: complex) -> np.ndarray:
        """e(m w / h) j^-k for every representative, w = sigma^-1 gamma z."""
        h = self.cusp.width
        out = np.empty(len(self.local), dtype=np.complex128)
        for i, g in enumerate(self.local):
            jz = g.c * z + g.d
            w = (g.a * z + g.b) / jz
            out[i] = cmath.exp(2j * math.pi * self.m * w / h) * jz ** (-self.k)
        return out

    def twist_values(self, functional: IteratedIntegralFunctional) -> np.ndarray:
        """int_{z0}^{gamma z0} I for every representative."""
        return np.array([functional.evaluate(s) for s in self.loops], dtype=np.complex128)

    def twist_values_p3(self, functional: IteratedIntegralFunctional, eta: Signature) -> np.ndarray:
        """int_z^{gamma z} I with eta the signature of a path z0 -> z."""
        back = eta.antipode()
        return np.array([functional.evaluate(back.compose(s).compose(eta)) for s in self.loops],
                        dtype=np.complex128)

    def eta(self, z: complex) -> Signature:
        if self.table is None:
            raise ValueError("no alphabet for path signatures")
        if complex(z) == self.z0:
            return Signature.identity(self.table.labels, self.table.order)
        return path_signature(Path((self.z0, z)), self.table.letters, self.table.order, self.tol)

    def tail(self, terms: np.ndarray, bound: int | None = None) -> float:
        """Tail estimate from the last two box shells, assuming |shell sum| ~ C^(1-k)."""
        C = self.c_bound if bound is None else bound
        if C < 2:
            return float("nan")
        mags = np.abs(terms)
        keep = self.shell <= C
        a = float(np.sum(mags[keep & (self.shell == C)]))
        b = float(np.sum(mags[keep & (self.shell == C - 1)]))
        return max(a, b) * C / (self.k - 2)

    def tail_bound(self, z: complex, bound: int | None = None) -> float:
        """A priori bound for the untwisted terms left out of the box at z.

        With w = sigma^-1 z, |cw + d|^2 >= lam (c^2 + d^2), lam the smallest
        eigenvalue of the quadratic form, and the lattice sum of
        (c^2 + d^2)^(-k/2) over max(|c|, |d|) > C is at most pi C^(2-k) / (k-2)
        (counting (c, d) and (-c, -d) once).  |e(m w / h)| <= 1 for m >= 0.
        """
        C = self.c_bound if bound is None else bound
        if C < 1:
            return float("inf")
        w = self.cusp.scaling.inverse()(complex(z))
        a, x, y = abs(w) ** 2, w.real, w.imag
        lam = 0.5 * ((a + 1) - math.sqrt(max((a + 1) ** 2 - 4 * y * y, 0.0)))
        j = automorphy(self.cusp.scaling.inverse(), complex(z))
        return abs(j) ** (-self.k) * lam ** (-self.k / 2) * math.pi * C ** (2 - self.k) / (self.k - 2)


def _twist_terms(spec: PoincareSpec, ctx: SeriesContext, z: complex, eta: Signature | None) -> np.ndarray:
    kern = ctx.kernel(z)
    if spec.kind in ("classical", "eisenstein"):
        return kern
    if spec.kind == "P1":
        e = ctx.eta(z) if eta is None else eta
        return kern * spec.twist.evaluate(e)
    if spec.kind == "P2":
        return kern * ctx.twist_values(spec.twist)
    e = ctx.eta(z) if eta is None else eta
    return kern * ctx.twist_values_p3(spec.twist, e)


def evaluate_series(spec: PoincareSpec, z: complex, tol: float = DEFAULT_TOL,
                    ctx: SeriesContext | None = None, eta: Signature | None = None) -> PoincareValue:
    """Truncated series at z.  ``eta`` may supply the signature of a path z0 -> z."""
    z = complex(z)
    if z.imag <= 0:
        raise ValueError("z must lie in the upper half-plane")
    ctx = ctx or SeriesContext.for_spec(spec, tol)
    if spec.kind == "P1":
        # product of the antiderivative and the classical series
        base = evaluate_series(spec.untwisted(), z, tol, ctx)
        e = ctx.eta(z) if eta is None else eta
        F = spec.twist.evaluate(e)
        return PoincareValue(F * base.value, base.c_bound, base.n_terms, abs(F) * base.tail_estimate, "P1", z)
    terms = _twist_terms(spec, ctx, z, eta)
    return PoincareValue(complex(np.sum(terms)), ctx.c_bound, len(terms), ctx.tail(terms), spec.kind, z)


def summand_shift(spec: PoincareSpec, gamma: GroupElement, sigma: GroupElement, table: LoopTable) -> float:
    """|int_{z0}^{sigma gamma z0} I - int_{z0}^{gamma z0} I| for sigma in the cusp stabilizer."""
    a = spec.twist.evaluate(table.loop_signature(gamma))
    b = spec.twist.evaluate(table.loop_signature(sigma @ gamma))
    return abs(a - b)


# ---------------------------------------------------------------------------
# Transformation law


@dataclass
class ResidualReport:
    c_bound: int
    beta: tuple[int, int, int, int]
    z: complex
    lhs: complex
    rhs: complex
    tail_estimate: float

    @property
    def residual(self) -> float:
        return abs(self.lhs - self.rhs)

    def to_json(self) -> dict:
        return {"c_bound": self.c_bound, "beta": list(self.beta), "z": [self.z.real, self.z.imag],
                "lhs": [self.lhs.real, self.lhs.imag], "rhs": [self.rhs.real, self.rhs.imag],
                "residual": self.residual, "tail_estimate": self.tail_estimate}


def transformation_residual(spec: PoincareSpec, beta: GroupElement, z: complex, tol: float = DEFAULT_TOL,
                            ctx: SeriesContext | None = None) -> ResidualReport:
    """Compare P(beta z, I) j(beta, z)^-k - P(z, I) with the deconcatenation expansion.

    The right side is sum over nonempty suffixes v of
    (int_{z0}^{beta^-1 z0} v) P(z, I1^v).  Both sides use the same coset set,
    so the mismatch is the part of the box that beta moves across its edge.
    """
    if spec.kind != "P2":
        raise ValueError("the transformation law is stated for P2 series")
    if not spec.preset.contains(beta):
        raise ValueError("beta is not in the group")
    ctx = ctx or SeriesContext.for_spec(spec, tol)
    z = complex(z)
    bz = beta(z)
    jb = automorphy(beta, z)
    twist = ctx.twist_values(spec.twist)
    lhs_terms = twist * ctx.kernel(bz) * jb ** (-spec.k) - twist * ctx.kernel(z)
    lhs = complex(np.sum(lhs_terms))
    back = ctx.table.loop_signature(beta.inverse())
    kern = ctx.kernel(z)
    rhs = 0j
    for first, second in deconcatenate(spec.twist):
        (suffix,) = second.coefficients
        if not suffix:
            continue
        rhs += back[suffix] * complex(np.sum(ctx.twist_values(first) * kern))
    return ResidualReport(ctx.c_bound, beta.entries, z, lhs, rhs, ctx.tail(lhs_terms))


# ---------------------------------------------------------------------------
# Higher-order check


@dataclass
class HigherOrderEntry:
    factors: list[tuple[int, int, int, int]]
    z: complex
    residual: float
    budget: float

    @property
    def passed(self) -> bool:
        return self.residual < self.budget

    def to_json(self) -> dict:
        return {"factors": [list(f) for f in self.factors], "z": [self.z.real, self.z.imag],
                "residual": self.residual, "budget": self.budget, "passed": self.passed}


@dataclass
class HigherOrderReport:
    kind: str
    order: int
    entries: list[HigherOrderEntry] = field(default_factory=list)
    p3_expansion_residual: float | None = None

    @property
    def passed(self) -> bool:
        ok = all(e.passed for e in self.entries)
        if self.p3_expansion_residual is not None:
            ok = ok and self.p3_expansion_residual < 1e-8
        return ok

    def to_json(self) -> dict:
        return {"kind": self.kind, "order": self.order, "passed": self.passed,
                "p3_expansion_residual": self.p3_expansion_residual,
                "entries": [e.to_json() for e in self.entries]}


def _value_at_translate(spec: PoincareSpec, ctx: SeriesContext, g: GroupElement, z: complex,
                        eta: Signature | None) -> tuple[complex, float]:
    """P(g z) and its truncation bound, with the path z0 -> g z taken as loop(g) followed by eta.

    The bound is the untwisted tail bound at g z times twice the largest
    twist magnitude seen in the box (the twists grow only logarithmically).
    """
    gz = g(z)
    eta_g = None
    if spec.kind in ("P1", "P3"):
        eta_g = ctx.table.loop_signature(g).compose(eta)
    kern = ctx.kernel(gz)
    if spec.kind == "P1":
        terms = kern * spec.twist.evaluate(eta_g)
    else:
        terms = _twist_terms(spec, ctx, gz, eta_g)
    if spec.kind in ("classical", "eisenstein"):
        factor = 1.0
    else:
        mags = np.abs(kern)
        ratio = np.divide(np.abs(terms), mags, out=np.zeros_like(mags), where=mags > 0)
        factor = 2.0 * float(np.max(ratio, initial=0.0))
    return complex(np.sum(terms)), ctx.tail_bound(gz) * factor


def p3_expansion(spec: PoincareSpec, z: complex, ctx: SeriesContext | None = None,
                 eta: Signature | None = None) -> complex:
    """P3 rewritten through P2 series: int_z^{gz} I = sum over w = a b c of
    (int_z^{z0} a)(int_{z0}^{g z0} b)(int_{z0}^z c)."""
    ctx = ctx or SeriesContext.for_spec(spec)
    eta = ctx.eta(z) if eta is None else eta
    back = eta.antipode()
    middle: dict[tuple, complex] = {}
    for w, c in spec.twist.coefficients.items():
        n = len(w)
        for i in range(n + 1):
            for j in range(i, n + 1):
                b = w[i:j]
                middle[b] = middle.get(b, 0) + c * back[w[:i]] * eta[w[j:]]
    kern = ctx.kernel(complex(z))
    total = 0j
    for b, coef in middle.items():
        if b:
            I_b = IteratedIntegralFunctional(spec.twist.letters, {b: 1.0})
            total += coef * complex(np.sum(kern * ctx.twist_values(I_b)))
        else:
            total += coef * complex(np.sum(kern))
    return total


def higher_order_check(spec: PoincareSpec, tuples: Sequence[Sequence[GroupElement]], z: complex,
                       tol: float = DEFAULT_TOL, ctx: SeriesContext | None = None,
                       budget_factor: float = 10.0) -> HigherOrderReport:
    """Slash P with prod (g_i - 1) over each tuple and compare with the truncation budget.

    The budget is ``budget_factor`` times the sum over terms of
    |a_g| |j(g, z)|^-k times the truncation bound at g z, plus ``tol``.
    """
    ctx = ctx or SeriesContext.for_spec(spec, tol)
    z = complex(z)
    eta = ctx.eta(z) if spec.kind in ("P1", "P3") else None
    order = (spec.twist.declared_length if spec.twist is not None else 0) + 1
    report = HigherOrderReport(spec.kind, order)
    if spec.kind == "P3":
        direct = evaluate_series(spec, z, tol, ctx, eta).value
        report.p3_expansion_residual = abs(direct - p3_expansion(spec, z, ctx, eta))
    for factors in tuples:
        xi = j_power_element(list(factors))
        total = 0j
        budget = tol
        for g, a in xi.items():
            val, tail = _value_at_translate(spec, ctx, g, z, eta)
            jk = automorphy(g, z) ** (-spec.k)
            total += a * jk * val
            budget += abs(a) * abs(jk) * tail
        report.entries.append(HigherOrderEntry([g.entries for g in factors], z, abs(total),
                                               budget_factor * budget))
    return report


# ---------------------------------------------------------------------------
# Convergence diagnostics


@dataclass
class ProfileRow:
    c_bound: int
    value: complex
    diff_abs: float | None
    n_terms: int


@dataclass
class ConvergenceProfile:
    rows: list[ProfileRow]
    k: int
    warmup: int

    @property
    def monotone(self) -> bool | None:
        """Whether |successive differences| decrease past the warmup bound (None if not checkable)."""
        diffs = [r.diff_abs for r in self.rows if r.diff_abs is not None and r.c_bound > self.warmup]
        if len(diffs) < 2:
            return None
        return all(b < a for a, b in zip(diffs, diffs[1:]))

    @property
    def asserted(self) -> bool:
        return self.k >= 6

    @property
    def passed(self) -> bool:
        m = self.monotone
        return m is None or not self.asserted or m

    def to_csv(self) -> str:
        lines = ["c_bound,value_re,value_im,diff_abs"]
        for r in self.rows:
            d = "" if r.diff_abs is None else f"{r.diff_abs:.17g}"
            lines.append(f"{r.c_bound},{r.value.real:.17g},{r.value.imag:.17g},{d}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {"k": self.k, "warmup": self.warmup, "monotone": self.monotone, "passed": self.passed,
                "rows": [{"c_bound": r.c_bound, "value": [r.value.real, r.value.imag],
                          "diff_abs": r.diff_abs, "n_terms": r.n_terms} for r in self.rows]}


def convergence_profile(spec: PoincareSpec, z: complex, c_bounds: Sequence[int], tol: float = DEFAULT_TOL,
                        warmup: int = 0) -> ConvergenceProfile:
    """Partial sums over growing boxes, computed from one pass at the largest bound."""
    bounds = list(c_bounds)
    if any(b >= a for a, b in zip(bounds[1:], bounds)) or not bounds:
        raise ValueError("c_bounds must be increasing")
    big = spec.with_bound(bounds[-1])
    ctx = SeriesContext.for_spec(big, tol)
    z = complex(z)
    if spec.kind == "P1":
        terms = ctx.kernel(z) * spec.twist.evaluate(ctx.eta(z))
    else:
        terms = _twist_terms(big, ctx, z, None)
    rows = []
    prev = None
    for C in bounds:
        mask = ctx.shell <= C
        val = complex(np.sum(terms[mask]))
        rows.append(ProfileRow(C, val, None if prev is None else abs(val - prev), int(mask.sum())))
        prev = val
    return ConvergenceProfile(rows, spec.k, warmup)
