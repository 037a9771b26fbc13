"""Weight-2 forms as truncated q-expansions and their 1-forms on the half-plane.

A letter with coefficients ``c_n`` and exponent step ``h`` represents

    f(z) = sum_n c_n exp(2 pi i n h z)

and, for holomorphic kinds, the 1-form ``2 pi i f(z) dz``.  Antiholomorphic
letters are complex conjugates of holomorphic ones: they store the conjugated
coefficients and represent ``conj(2 pi i f(z) dz)``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Callable, Sequence

import numpy as np

from . import _kernels
from .modgroup import GroupPreset

Y_MIN = 0.02
N_TRUNC = 512
TWO_PI_I = 2j * math.pi

KINDS = ("holomorphic-cusp", "eisenstein", "antiholomorphic-cusp")


class InsufficientPrecisionError(ValueError):
    def __init__(self, required: int, available: int, label: str = ""):
        super().__init__(
            f"letter {label!r}: tail bound needs {required} coefficients, only {available} stored"
        )
        self.required = required
        self.available = available


@dataclass(frozen=True, eq=False)
class FormLetter:
    label: str
    kind: str
    group: str
    coefficients: np.ndarray
    step: Fraction = Fraction(1)
    y_min: float = Y_MIN
    _growth: float = field(init=False, repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown letter kind {self.kind!r}")
        coeffs = np.ascontiguousarray(self.coefficients, dtype=np.complex128)
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "step", Fraction(self.step))
        n = np.arange(1, coeffs.shape[0] + 1, dtype=float)
        object.__setattr__(self, "_growth", float(np.max(np.abs(coeffs) / n**2)) if coeffs.size else 0.0)

    @property
    def hodge_p(self) -> int:
        return 0 if self.kind == "antiholomorphic-cusp" else 1

    @property
    def log_weight_l(self) -> int:
        return 1 if self.kind == "eisenstein" else 0

    @property
    def holomorphic(self) -> bool:
        return self.kind != "antiholomorphic-cusp"

    @property
    def cuspidal(self) -> bool:
        return self.kind != "eisenstein"

    @property
    def n_trunc(self) -> int:
        return self.coefficients.shape[0]

    def required_terms(self, y: float, tol: float) -> int:
        """Number of coefficients whose tail bound at height y is below tol.

        Uses |c_n| <= B (n+1)^2 with B fitted on the stored coefficients, so
        sum_{n>N} |c_n| r^n <= B r^(N+1) (N+2)^2 (1+r) / (1-r)^3.
        """
        # round the height down so the cache key stays conservative
        y_key = math.floor(y * 1000.0) / 1000.0 if y >= 0.002 else y
        return _required_terms(self._growth, float(self.step), y_key, tol)

    def _series(self, z: np.ndarray, tol: float) -> np.ndarray:
        y = float(np.min(z.imag))
        if y < self.y_min:
            raise ValueError(f"Im z = {y:.4g} below the floor y_min = {self.y_min}")
        n = self.required_terms(y, tol)
        if n > self.n_trunc:
            raise InsufficientPrecisionError(n, self.n_trunc, self.label)
        if self.holomorphic:
            q = np.exp(TWO_PI_I * float(self.step) * z)
        else:
            q = np.exp(-TWO_PI_I * float(self.step) * np.conj(z))
        return _kernels.qseries(self.coefficients[:n], q)

    def values(self, z, tol: float = 1e-14) -> np.ndarray:
        """Coefficient function at the points z (the conjugate series for antiholomorphic letters)."""
        z = np.atleast_1d(np.asarray(z, dtype=np.complex128))
        return self._series(z, tol)

    def pullback(self, z: np.ndarray, dz) -> np.ndarray:
        """Integrand of the 1-form along z(t) with derivative dz (scalar or array)."""
        vals = self._series(np.asarray(z, dtype=np.complex128), 1e-15)
        if self.holomorphic:
            return TWO_PI_I * vals * dz
        return -TWO_PI_I * vals * np.conj(dz)

    def conjugate(self, label: str | None = None) -> FormLetter:
        if self.kind != "holomorphic-cusp":
            raise ValueError("only holomorphic cusp letters have an antiholomorphic partner here")
        return FormLetter(label or self.label + "bar", "antiholomorphic-cusp", self.group,
                          np.conj(self.coefficients), self.step, self.y_min)

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "kind": self.kind,
            "group": self.group,
            "step": str(self.step),
            "coefficients": [[float(c.real), float(c.imag)] for c in self.coefficients],
        }

    @classmethod
    def from_json(cls, record: dict, y_min: float = Y_MIN) -> FormLetter:
        coeffs = np.array([complex(re, im) for re, im in record["coefficients"]])
        return cls(record["label"], record["kind"], record["group"], coeffs,
                   Fraction(record.get("step", "1")), y_min)

    def __repr__(self) -> str:
        return f"FormLetter({self.label!r}, {self.kind}, {self.group}, N={self.n_trunc})"


@lru_cache(maxsize=4096)
def _required_terms(growth: float, step: float, y: float, tol: float) -> int:
    if growth == 0.0:
        return 1
    r = math.exp(-2 * math.pi * step * y)
    log_pref = math.log(growth * (1 + r) / (1 - r) ** 3)
    logr, logtol = math.log(r), math.log(tol)
    n = 1
    while log_pref + (n + 1) * logr + 2 * math.log(n + 2) >= logtol:
        n = n + 1 if n < 64 else int(n * 1.1)
        if n > 10**7:
            break
    return n + 1


def evaluate_form(w: FormLetter, z: complex, tol: float = 1e-13) -> complex:
    if tol <= 0:
        raise ValueError("tol must be positive")
    return complex(w.values(np.array([z]), tol)[0])


def pullback_integrand(w, path, t: float) -> complex:
    """f(z(t)) z'(t) for the letter w along a piecewise straight path, t in [0, 1]."""
    z, dz = path.point_and_velocity(t)
    return complex(w.pullback(np.array([z]), dz)[0])


def _load_catalog(n_trunc: int | None = None) -> dict[str, dict]:
    text = resources.files("geomod").joinpath("data/letters.json").read_text()
    data = json.loads(text)
    out = {}
    for rec in data["letters"]:
        if n_trunc is not None:
            rec = dict(rec, coefficients=rec["coefficients"][:n_trunc])
        out[rec["label"]] = rec
    return out


_CATALOG_LABELS = {"gamma0_11": ("f", "fbar", "E"), "gamma2": ("w0", "w1")}


def builtin_letters(preset: GroupPreset | str, n_trunc: int = N_TRUNC, y_min: float = Y_MIN) -> tuple[FormLetter, ...]:
    name = preset if isinstance(preset, str) else preset.name
    catalog = _load_catalog(n_trunc)
    return tuple(FormLetter.from_json(catalog[label], y_min) for label in _CATALOG_LABELS[name])


def letter(label: str, n_trunc: int = N_TRUNC, y_min: float = Y_MIN) -> FormLetter:
    return FormLetter.from_json(_load_catalog(n_trunc)[label], y_min)


def save_letters(letters: Sequence[FormLetter], path) -> None:
    with open(path, "w") as fh:
        json.dump({"letters": [w.to_json() for w in letters]}, fh)


def load_letters(path, y_min: float = Y_MIN) -> tuple[FormLetter, ...]:
    with open(path) as fh:
        data = json.load(fh)
    records = data["letters"] if isinstance(data, dict) else data
    return tuple(FormLetter.from_json(r, y_min) for r in records)


# ---------------------------------------------------------------------------
# The modular lambda function and letters built from functions times forms.

def _sigma_table(n: int) -> np.ndarray:
    s = np.zeros(n, dtype=np.int64)
    for d in range(1, n):
        s[d::d] += d
    return s


def _theta_fourth(n: int):
    """theta_2^4, theta_3^4 as series in x = exp(pi i z)."""
    sig = _sigma_table(n)
    k = np.arange(n)
    r4 = 8 * sig - 32 * np.where(k % 4 == 0, sig[k // 4], 0)
    r4[0] = 1
    t3 = r4.astype(np.complex128)
    t2 = np.where(k % 2 == 1, 16 * sig, 0).astype(np.complex128)
    return t2, t3


_T2, _T3 = _theta_fourth(N_TRUNC)


def modular_lambda(z) -> np.ndarray:
    """lambda(z) = theta_2^4 / theta_3^4, the Hauptmodul of Gamma(2)."""
    z = np.atleast_1d(np.asarray(z, dtype=np.complex128))
    if np.min(z.imag) < Y_MIN:
        raise ValueError("point below y_min")
    x = np.exp(1j * math.pi * z)
    return _kernels.qseries(_T2, x) / _kernels.qseries(_T3, x)


@dataclass(frozen=True, eq=False)
class FunctionLetter:
    """A smooth 1-form given directly by its dz-coefficient g(z): g(z) dz.

    Used for exact forms df and products f * omega that fall outside the
    q-expansion catalog.  ``hodge_p`` is None: such letters carry no
    chirality guarantee.
    """

    label: str
    coefficient: Callable[[np.ndarray], np.ndarray]
    kind: str = "smooth"
    hodge_p: int | None = None
    log_weight_l: int = 0

    @property
    def cuspidal(self) -> bool:
        return False

    @property
    def holomorphic(self) -> bool:
        return False

    def pullback(self, z: np.ndarray, dz) -> np.ndarray:
        return self.coefficient(np.asarray(z, dtype=np.complex128)) * dz


def scaled_letter(func: Callable, w: FormLetter, label: str | None = None) -> FunctionLetter:
    """The 1-form func * w for a holomorphic letter w."""
    if not w.holomorphic:
        raise ValueError("scaled_letter expects a holomorphic letter")
    return FunctionLetter(label or f"({w.label}*fn)", lambda z: func(z) * TWO_PI_I * w.values(z))


def exact_lambda_letter(w0: FormLetter, label: str = "dlambda") -> FunctionLetter:
    """d(lambda) = lambda * dlambda/lambda, built from the catalog letter w0."""
    return FunctionLetter(label, lambda z: modular_lambda(z) * TWO_PI_I * w0.values(z), hodge_p=1)
