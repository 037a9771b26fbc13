"""Weight-0 higher-order forms F_I(z) = int_{z0}^z I built from homotopy functionals.

F_I is evaluated along the straight path z0 -> z.  Values at translates g z
that sit too low in the half-plane are obtained from the loop table instead:
by invariance of the letters, F_I(g z) = I(Sig(z0 -> g z0) * Sig(z0 -> z)).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .chen import (DEFAULT_TOL, IteratedIntegralFunctional, LoopTable, Path, Signature,
                   path_signature, shuffle_product)
from .formbank import Y_MIN
from .groupring import GroupRingElement, j_power_element
from .modgroup import GroupElement, GroupPreset, near_isometric_circle

# translates below this height are evaluated through the loop table
DIRECT_HEIGHT = 0.05


class HigherOrderForm:
    def __init__(self, functional: IteratedIntegralFunctional, preset: GroupPreset,
                 z0: complex | None = None, tol: float = DEFAULT_TOL, table: LoopTable | None = None,
                 cache_dir=None):
        self.functional = functional
        self.preset = preset
        self.z0 = complex(preset.basepoint if z0 is None else z0)
        self.tol = tol
        self.order = max(functional.declared_length, 1)
        if table is None:
            table = LoopTable(preset, functional.letters, self.order, self.z0, tol, cache_dir)
        elif table.labels != functional.alphabet or table.z0 != self.z0 or table.order < functional.length:
            raise ValueError("loop table does not match the functional")
        self.table = table
        self._paths: dict[complex, Signature] = {}

    @property
    def claimed_order(self) -> int:
        return self.functional.declared_length + 1

    @property
    def cuspidal_flag(self) -> bool:
        return self.functional.cuspidal

    @property
    def homotopy_status(self) -> str:
        return self.functional.homotopy_status

    def path_signature(self, z: complex) -> Signature:
        z = complex(z)
        sig = self._paths.get(z)
        if sig is None:
            if z == self.z0:
                sig = Signature.identity(self.functional.alphabet, self.table.order)
            else:
                sig = path_signature(Path((self.z0, z)), self.functional.letters, self.table.order, self.tol)
            self._paths[z] = sig
        return sig

    def evaluate(self, z: complex) -> complex:
        if complex(z) == self.z0:
            return self.functional.constant_term
        if self.functional.length == 0:
            return self.functional.constant_term
        return self.functional.evaluate(self.path_signature(z))

    __call__ = evaluate

    def evaluate_translate(self, g: GroupElement, z: complex) -> complex:
        """F(g z) via the loop of g followed by the path z0 -> z."""
        if self.functional.length == 0:
            return self.functional.constant_term
        return self.functional.evaluate(self.table.loop_signature(g).compose(self.path_signature(z)))

    def value_at(self, g: GroupElement, z: complex, direct_height: float = DIRECT_HEIGHT) -> complex:
        """F(g z), directly when g z is high enough, otherwise through the loop table."""
        gz = g(z)
        if gz.imag >= direct_height:
            return self.evaluate(gz)
        return self.evaluate_translate(g, z)

    def slash(self, xi: GroupRingElement, z: complex, direct_height: float = DIRECT_HEIGHT) -> complex:
        """(F | xi)(z) in weight 0."""
        return sum((a * self.value_at(g, z, direct_height) for g, a in xi.items()), 0j)

    def period(self, label: str, g: GroupElement) -> complex:
        return self.table.period(label, g)

    def predicted_constant(self, factors: Sequence[GroupElement]) -> complex:
        """sum over words w of length s of c_w prod_i int_{g_i} w_i."""
        s = len(factors)
        total = 0j
        for w, c in self.functional.coefficients.items():
            if len(w) == s:
                prod = c
                for lab, g in zip(w, factors):
                    prod *= self.period(lab, g)
                total += prod
        return total


# ---------------------------------------------------------------------------
# Reports


@dataclass
class OrderEntry:
    factors: list[tuple[int, ...]]
    values: list[complex]
    spread: float
    predicted: complex | None
    error: float
    passed: bool

    def to_json(self) -> dict:
        return {
            "factors": [list(w) for w in self.factors],
            "values": [[v.real, v.imag] for v in self.values],
            "spread": self.spread,
            "predicted": None if self.predicted is None else [self.predicted.real, self.predicted.imag],
            "error": self.error,
            "passed": self.passed,
        }


@dataclass
class OrderReport:
    claimed_order: int
    tol: float
    constancy: list[OrderEntry] = field(default_factory=list)
    annihilation: list[OrderEntry] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.constancy + self.annihilation)

    @property
    def max_spread(self) -> float:
        return max((e.spread for e in self.constancy), default=0.0)

    @property
    def max_error(self) -> float:
        return max((e.error for e in self.constancy), default=0.0)

    @property
    def max_annihilation(self) -> float:
        return max((e.error for e in self.annihilation), default=0.0)

    def to_json(self) -> dict:
        return {
            "claimed_order": self.claimed_order,
            "tol": self.tol,
            "passed": self.passed,
            "max_spread": self.max_spread,
            "max_error": self.max_error,
            "max_annihilation": self.max_annihilation,
            "constancy": [e.to_json() for e in self.constancy],
            "annihilation": [e.to_json() for e in self.annihilation],
        }

    def to_text(self) -> str:
        lines = [f"order {self.claimed_order}  tol {self.tol:.1e}  {'PASS' if self.passed else 'FAIL'}",
                 f"{'kind':<12}{'factors':<34}{'spread':>12}{'error':>12}  ok"]
        for kind, entries in (("constant", self.constancy), ("annihilate", self.annihilation)):
            for e in entries:
                fac = " ".join("g" + ".".join(map(str, w)) if w else "1" for w in e.factors)
                lines.append(f"{kind:<12}{fac[:33]:<34}{e.spread:>12.3e}{e.error:>12.3e}  {'y' if e.passed else 'n'}")
        return "\n".join(lines)


def default_points(F: HigherOrderForm, count: int = 5, rng: np.random.Generator | None = None) -> list[complex]:
    """Sample points around the basepoint, kept above the direct-evaluation height."""
    rng = rng or np.random.default_rng(0)
    z0 = F.z0
    base = max(z0.imag, 2 * DIRECT_HEIGHT)
    pts = []
    for _ in range(count):
        pts.append(complex(z0.real + rng.uniform(-0.15, 0.15), base * rng.uniform(1.0, 1.6)))
    return pts


def _element_word(F: HigherOrderForm, g: GroupElement) -> tuple[int, ...]:
    return g.word if g.word is not None else F.preset.word_decompose(g)


def verify_order(F: HigherOrderForm, tuples_s: Sequence[Sequence[GroupElement]],
                 tuples_s1: Sequence[Sequence[GroupElement]], tol: float = 1e-6,
                 points: Sequence[complex] | None = None) -> OrderReport:
    """Constancy of F | prod_{i<=s} (g_i - 1) and vanishing of F | prod_{i<=s+1} (g_i - 1)."""
    points = list(points) if points is not None else default_points(F)
    report = OrderReport(F.claimed_order, tol)
    for factors in tuples_s:
        xi = j_power_element(list(factors))
        vals = [F.slash(xi, z) for z in points]
        mean = sum(vals) / len(vals)
        spread = max(abs(v - mean) for v in vals)
        pred = F.predicted_constant(factors)
        err = max(abs(v - pred) for v in vals)
        scale = max(1.0, abs(pred))
        report.constancy.append(OrderEntry([_element_word(F, g) for g in factors], vals, spread, pred,
                                           err, spread < tol and err < tol * scale))
    for factors in tuples_s1:
        xi = j_power_element(list(factors))
        vals = [F.slash(xi, z) for z in points]
        err = max(abs(v) for v in vals)
        report.annihilation.append(OrderEntry([_element_word(F, g) for g in factors], vals, err, 0j,
                                              err, err < tol))
    return report


@dataclass
class CuspidalEntry:
    cusp: str
    sigma: tuple[int, int, int, int]
    points: list[complex]
    residuals: list[float]
    passed: bool

    def to_json(self) -> dict:
        return {"cusp": self.cusp, "sigma": list(self.sigma),
                "points": [[z.real, z.imag] for z in self.points],
                "residuals": self.residuals, "max_residual": max(self.residuals, default=0.0),
                "passed": self.passed}


@dataclass
class CuspidalReport:
    tol: float
    entries: list[CuspidalEntry] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    @property
    def max_residual(self) -> float:
        return max((max(e.residuals) for e in self.entries if e.residuals), default=0.0)

    def to_json(self) -> dict:
        return {"tol": self.tol, "passed": self.passed, "max_residual": self.max_residual,
                "entries": [e.to_json() for e in self.entries]}

    def to_text(self) -> str:
        lines = [f"cuspidality  tol {self.tol:.1e}  {'PASS' if self.passed else 'FAIL'}",
                 f"{'cusp':<8}{'sigma':<28}{'max |F(sz)-F(z)|':>20}  ok"]
        for e in self.entries:
            lines.append(f"{e.cusp:<8}{str(list(e.sigma)):<28}{max(e.residuals):>20.3e}  {'y' if e.passed else 'n'}")
        return "\n".join(lines)


def verify_cuspidal(F: HigherOrderForm, tol: float = 1e-7, samples: int = 5,
                    rng: np.random.Generator | None = None) -> CuspidalReport:
    """|F(sigma z) - F(z)| for each cusp's stabilizer generator.

    Sample points sit near the isometric circle of sigma so that z and
    sigma z are both high enough to be reached by direct paths.
    """
    rng = rng or np.random.default_rng(1)
    report = CuspidalReport(tol)
    for cusp in F.preset.cusps:
        sigma = cusp.stabilizer_generator
        if sigma.c == 0:
            pts = [complex(F.z0.real + rng.uniform(-0.3, 0.3), max(F.z0.imag, 0.1) * rng.uniform(1.0, 2.0))
                   for _ in range(samples)]
        else:
            pts = near_isometric_circle(sigma, rng, samples, spread=0.6)
        res = []
        for z in pts:
            res.append(abs(F.value_at(sigma, z) - F.evaluate(z)))
        report.entries.append(CuspidalEntry(cusp.name, sigma.entries, pts, res, max(res) < tol))
    return report


def product(F1: HigherOrderForm, F2: HigherOrderForm) -> HigherOrderForm:
    """F1 F2 = F_{I1 sh I2}, of order s1 + s2 - 1."""
    if F1.preset is not F2.preset or F1.z0 != F2.z0:
        raise ValueError("products need the same preset and basepoint")
    I = shuffle_product(F1.functional, F2.functional)
    return HigherOrderForm(I, F1.preset, F1.z0, min(F1.tol, F2.tol))


def constant_form(alphabet, preset: GroupPreset, c: complex = 1.0, **kw) -> HigherOrderForm:
    return HigherOrderForm(IteratedIntegralFunctional.constant(alphabet, c), preset, **kw)


def reduced_words(n_gens: int, max_len: int):
    letters = [i for g in range(1, n_gens + 1) for i in (g, -g)]
    for r in range(1, max_len + 1):
        for w in itertools.product(letters, repeat=r):
            if all(w[i] != -w[i + 1] for i in range(r - 1)):
                yield w


def verify_injectivity_probe(F: HigherOrderForm | IteratedIntegralFunctional, tol: float = 1e-8,
                             max_len: int = 4, preset: GroupPreset | None = None) -> bool:
    """True if F_I(g z0) is visibly nonzero for some g of word length <= max_len.

    False means I pairs to zero on the whole search set, which is
    inconclusive rather than a proof that I vanishes.
    """
    if isinstance(F, IteratedIntegralFunctional):
        if preset is None:
            raise ValueError("a preset is needed to probe a bare functional")
        F = HigherOrderForm(F, preset)
    I = F.functional
    if I.is_zero():
        return False
    if abs(I.constant_term) > tol:
        return True
    for w in reduced_words(len(F.preset.generators), max_len):
        if abs(I.evaluate(F.table.word_signature(w))) > tol:
            return True
    return False
