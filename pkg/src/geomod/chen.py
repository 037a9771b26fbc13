"""Iterated line integrals of 1-forms along paths in the upper half-plane.

The central object is the truncated signature of a path: every iterated
integral

    S(w1 ... wr) = int_{0 < t1 < ... < tr < 1} f_{w1}(t1) ... f_{wr}(tr) dt

over a fixed alphabet of letters, for all words of length at most ``order``.
Signatures of concatenated paths compose by Chen's formula, which is what
makes loops, pairings with group-ring elements and basepoint changes cheap.
"""
from __future__ import annotations

import hashlib
import itertools
import json
import os
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path as FsPath
from typing import Callable, Iterable, Iterator, Mapping, Sequence

import numpy as np
from numpy.polynomial import legendre

from . import _kernels
from .formbank import Y_MIN
from .modgroup import IDENTITY, GroupElement, GroupPreset

DEFAULT_TOL = 1e-12
NODE_BUDGET = 2**14
PANEL_NODES = 16

Word = tuple


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not meet its tolerance within the node budget."""


# ---------------------------------------------------------------------------
# Paths


class Path:
    """A piecewise straight path through the given waypoints.

    Straight segments between points of height > y_min stay above y_min,
    since the imaginary part is affine along a segment.
    """

    __slots__ = ("waypoints", "y_min")

    def __init__(self, waypoints: Iterable[complex], y_min: float = Y_MIN):
        pts = tuple(complex(z) for z in waypoints)
        if len(pts) < 1:
            raise ValueError("a path needs at least one waypoint")
        for z in pts:
            if not z.imag > y_min:
                raise ValueError(f"waypoint {z} is not above y_min = {y_min}")
        self.waypoints = pts
        self.y_min = y_min

    @classmethod
    def segment(cls, a: complex, b: complex, y_min: float = Y_MIN) -> Path:
        return cls((a, b), y_min)

    @property
    def start(self) -> complex:
        return self.waypoints[0]

    @property
    def end(self) -> complex:
        return self.waypoints[-1]

    @property
    def n_segments(self) -> int:
        return max(len(self.waypoints) - 1, 0)

    def segments(self) -> list[tuple[complex, complex]]:
        w = self.waypoints
        return [(w[i], w[i + 1]) for i in range(len(w) - 1)]

    def reverse(self) -> Path:
        return Path(self.waypoints[::-1], self.y_min)

    def concat(self, other: Path) -> Path:
        if self.end != other.start:
            raise ValueError(f"cannot concatenate: {self.end} != {other.start}")
        return Path(self.waypoints + other.waypoints[1:], min(self.y_min, other.y_min))

    def refine(self) -> Path:
        """The same path with the midpoint of every segment inserted."""
        pts = [self.start]
        for a, b in self.segments():
            pts.extend(((a + b) / 2, b))
        return Path(pts, self.y_min)

    def transform(self, g: GroupElement) -> Path:
        """Straight path through the images g(z_i); not the image curve itself."""
        return Path([g(z) for z in self.waypoints], self.y_min)

    def point_and_velocity(self, t: float) -> tuple[complex, complex]:
        """z(t) and z'(t) for the uniform parametrization over [0, 1]."""
        n = self.n_segments
        if n == 0:
            return self.start, 0j
        if not 0.0 <= t <= 1.0:
            raise ValueError("t must lie in [0, 1]")
        i = min(int(t * n), n - 1)
        a, b = self.waypoints[i], self.waypoints[i + 1]
        local = t * n - i
        return a + local * (b - a), n * (b - a)

    def to_json(self) -> dict:
        return {"waypoints": [[z.real, z.imag] for z in self.waypoints], "y_min": self.y_min}

    @classmethod
    def from_json(cls, record: dict) -> Path:
        return cls([complex(x, y) for x, y in record["waypoints"]], record.get("y_min", Y_MIN))

    def __eq__(self, other) -> bool:
        return isinstance(other, Path) and self.waypoints == other.waypoints

    def __hash__(self) -> int:
        return hash(self.waypoints)

    def __repr__(self) -> str:
        return f"Path({list(self.waypoints)})"


# ---------------------------------------------------------------------------
# Signatures


def _labels_of(alphabet) -> tuple[str, ...]:
    return tuple(a if isinstance(a, str) else a.label for a in alphabet)


class Signature:
    """Truncated signature: flat array of all words up to ``order``.

    Level r occupies ``dim**r`` slots, words ordered lexicographically with
    the first (earliest) letter most significant.
    """

    __slots__ = ("labels", "order", "data", "_offsets", "_index")

    def __init__(self, labels: Sequence[str], order: int, data: np.ndarray):
        self.labels = tuple(labels)
        self.order = int(order)
        self.data = np.asarray(data, dtype=np.complex128)
        self._offsets = _kernels.level_offsets(len(self.labels), self.order)
        if self.data.shape != (self._offsets[-1],):
            raise ValueError("signature data has the wrong size")
        self._index = {lab: i for i, lab in enumerate(self.labels)}

    @classmethod
    def identity(cls, alphabet, order: int) -> Signature:
        labels = _labels_of(alphabet)
        data = np.zeros(_kernels.level_offsets(len(labels), order)[-1], dtype=np.complex128)
        data[0] = 1.0
        return cls(labels, order, data)

    @property
    def dim(self) -> int:
        return len(self.labels)

    def _flat_index(self, word) -> int:
        r = len(word)
        if r > self.order:
            raise KeyError(f"word of length {r} exceeds order {self.order}")
        idx = 0
        for letter in word:
            i = self._index[letter] if isinstance(letter, str) else int(letter)
            idx = idx * self.dim + i
        return self._offsets[r] + idx

    def __getitem__(self, word) -> complex:
        if isinstance(word, str):
            word = (word,)
        return complex(self.data[self._flat_index(tuple(word))])

    def level(self, r: int) -> np.ndarray:
        block = self.data[self._offsets[r]: self._offsets[r + 1]]
        return block.reshape((self.dim,) * r) if r else block.reshape(())

    def words(self, max_len: int | None = None) -> Iterator[tuple[str, ...]]:
        top = self.order if max_len is None else min(max_len, self.order)
        for r in range(top + 1):
            yield from itertools.product(self.labels, repeat=r)

    def items(self):
        for w in self.words():
            yield w, self[w]

    def _check(self, other: Signature) -> None:
        if self.labels != other.labels or self.order != other.order:
            raise ValueError("signatures over different alphabets or orders")

    def compose(self, other: Signature) -> Signature:
        """Signature of the concatenation (this path first, then ``other``)."""
        self._check(other)
        data = _kernels.chen_product(self.data, other.data, self.dim, self.order)
        return Signature(self.labels, self.order, data)

    __mul__ = compose

    def antipode(self) -> Signature:
        """Signature of the reversed path: S'(w) = (-1)^|w| S(reversed w)."""
        out = np.empty_like(self.data)
        for r in range(self.order + 1):
            lv = self.level(r)
            rev = np.transpose(lv) if r > 1 else lv
            out[self._offsets[r]: self._offsets[r + 1]] = (-1) ** r * np.ravel(rev)
        return Signature(self.labels, self.order, out)

    def truncate(self, order: int) -> Signature:
        order = min(order, self.order)
        return Signature(self.labels, order, self.data[: self._offsets[order + 1]].copy())

    def restrict(self, labels: Sequence[str]) -> Signature:
        """Sub-signature over a sub-alphabet."""
        labels = tuple(labels)
        idx = [self._index[lab] for lab in labels]
        parts = []
        for r in range(self.order + 1):
            lv = self.level(r)
            if r:
                lv = lv[np.ix_(*([idx] * r))]
            parts.append(np.ravel(lv))
        return Signature(labels, self.order, np.concatenate(parts))

    def distance(self, other: Signature) -> float:
        self._check(other)
        return float(np.max(np.abs(self.data - other.data)))

    def scale(self) -> float:
        return float(max(1.0, np.max(np.abs(self.data))))

    def to_json(self) -> dict:
        return {"labels": list(self.labels), "order": self.order,
                "data": [[float(v.real), float(v.imag)] for v in self.data]}

    @classmethod
    def from_json(cls, record: dict) -> Signature:
        return cls(record["labels"], record["order"],
                   np.array([complex(a, b) for a, b in record["data"]]))

    def __repr__(self) -> str:
        return f"Signature({self.labels}, order={self.order})"


def compose_signatures(s1: Signature, s2: Signature) -> Signature:
    return s1.compose(s2)


def identity_signature(alphabet, order: int) -> Signature:
    return Signature.identity(alphabet, order)


# ---------------------------------------------------------------------------
# Quadrature


@dataclass(frozen=True)
class PanelRule:
    """Gauss-Legendre nodes on [0, 1] with the spectral integration matrix.

    ``Q[j, k]`` maps samples g(x_k) to the antiderivative int_0^{x_j} g.
    """

    x: np.ndarray
    w: np.ndarray
    Q: np.ndarray


@lru_cache(maxsize=8)
def panel_rule(n: int = PANEL_NODES) -> PanelRule:
    t, wt = legendre.leggauss(n)
    V = legendre.legvander(t, n - 1)
    W = np.empty_like(V)
    for m in range(n):
        e = np.zeros(n)
        e[m] = 1.0
        W[:, m] = legendre.legval(t, legendre.legint(e, lbnd=-1))
    Q = np.linalg.solve(V.T, W.T).T / 2.0
    return PanelRule((t + 1) / 2, wt / 2, np.ascontiguousarray(Q))


def _panel(letters, za: complex, zb: complex, order: int, rule: PanelRule) -> np.ndarray:
    dz = zb - za
    z = za + dz * rule.x
    F = np.empty((len(letters), rule.x.shape[0]), dtype=np.complex128)
    for i, w in enumerate(letters):
        F[i] = w.pullback(z, dz)
    return _kernels.panel_signature(F, rule.Q, rule.w, order)


def segment_signature(seg: Path, alphabet, order: int, tol: float = DEFAULT_TOL,
                      max_nodes: int = NODE_BUDGET) -> Signature:
    """Signature of one straight segment by adaptive panel quadrature.

    A panel is accepted when its own signature and the Chen composition of
    its two halves agree to ``tol`` (scaled by the signature size and by the
    panel's share of the segment); the composed halves are kept.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    letters = tuple(alphabet)
    labels = _labels_of(letters)
    if seg.n_segments != 1:
        raise ValueError("segment_signature expects a path with exactly two waypoints")
    za, zb = seg.waypoints
    if order == 0 or za == zb:
        return Signature.identity(labels, order)
    rule = panel_rule()
    n = rule.x.shape[0]
    dim = len(letters)
    used = [n]

    def chen(a, b):
        return _kernels.chen_product(a, b, dim, order)

    def refine(t0: float, t1: float, whole: np.ndarray) -> np.ndarray:
        tm = 0.5 * (t0 + t1)
        pa, pm, pb = za + t0 * (zb - za), za + tm * (zb - za), za + t1 * (zb - za)
        left = _panel(letters, pa, pm, order, rule)
        right = _panel(letters, pm, pb, order, rule)
        used[0] += 2 * n
        joined = chen(left, right)
        scale = max(1.0, float(np.max(np.abs(joined))))
        if np.max(np.abs(joined - whole)) <= tol * (t1 - t0) * scale:
            return joined
        if used[0] > max_nodes:
            raise QuadratureError(
                f"segment {za} -> {zb}: tolerance {tol:g} not met within {max_nodes} nodes")
        return chen(refine(t0, tm, left), refine(tm, t1, right))

    data = refine(0.0, 1.0, _panel(letters, za, zb, order, rule))
    return Signature(labels, order, data)


def path_signature(path: Path, alphabet, order: int, tol: float = DEFAULT_TOL,
                   max_nodes: int = NODE_BUDGET) -> Signature:
    letters = tuple(alphabet)
    sig = Signature.identity(letters, order)
    segs = path.segments()
    if not segs:
        return sig
    per = tol / len(segs)
    for a, b in segs:
        sig = sig.compose(segment_signature(Path((a, b), path.y_min), letters, order, per, max_nodes))
    return sig


# ---------------------------------------------------------------------------
# Loops based at z0


def _cache_root(cache_dir) -> FsPath | None:
    if cache_dir is not None:
        return FsPath(cache_dir)
    env = os.environ.get("GEOMOD_CACHE")
    return FsPath(env) if env else None


class LoopTable:
    """Signatures of lifted loops z0 -> g z0, built from the generator loops.

    The generator loops are integrated along straight segments once and may
    be persisted to ``cache_dir`` (or ``$GEOMOD_CACHE``).  A general element
    is handled through its reduced generator word: since every letter is
    invariant under the group, the loop of g1 g2 is the loop of g1 followed by
    the g1-translate of the loop of g2, so its signature is the Chen product.
    Inverse generators use the antipode.  For homotopy functionals this
    agrees with any other path z0 -> g z0.
    """

    def __init__(self, preset: GroupPreset, alphabet, order: int, z0: complex | None = None,
                 tol: float = DEFAULT_TOL, cache_dir=None):
        self.preset = preset
        self.letters = tuple(alphabet)
        self.labels = _labels_of(self.letters)
        self.order = int(order)
        self.z0 = complex(preset.basepoint if z0 is None else z0)
        self.tol = tol
        self.cache_dir = _cache_root(cache_dir)
        self._elements: dict[GroupElement, Signature] = {}
        self._straight: dict[GroupElement, Signature] = {}
        self.generator_signatures = self._load_or_build()

    # persistence ---------------------------------------------------------
    def cache_key(self) -> str:
        h = hashlib.sha1()
        h.update(json.dumps([self.preset.name, [self.z0.real, self.z0.imag], list(self.labels),
                             self.order, self.tol]).encode())
        for w in self.letters:
            coeffs = getattr(w, "coefficients", None)
            if coeffs is not None:
                h.update(np.ascontiguousarray(coeffs).tobytes())
        return h.hexdigest()[:20]

    def _cache_file(self) -> FsPath | None:
        if self.cache_dir is None:
            return None
        return self.cache_dir / f"loops-{self.preset.name}-{self.cache_key()}.npz"

    def _load_or_build(self) -> list[Signature]:
        path = self._cache_file()
        if path is not None and path.exists():
            try:
                with np.load(path) as data:
                    return [Signature(self.labels, self.order, row) for row in data["sigs"]]
            except (OSError, KeyError, ValueError):
                pass  # unreadable cache entry: rebuild
        sigs = [self.straight(g) for g in self.preset.generators]
        if path is not None:
            path.parent.mkdir(parents=True, exist_ok=True)
            tmp = path.with_suffix(".tmp.npz")
            np.savez(tmp, sigs=np.stack([s.data for s in sigs]))
            os.replace(tmp, path)
        return sigs

    # signatures ----------------------------------------------------------
    def straight(self, g: GroupElement) -> Signature:
        """Signature along the straight segment z0 -> g z0."""
        if g not in self._straight:
            path = Path((self.z0, g(self.z0)))
            self._straight[g] = path_signature(path, self.letters, self.order, self.tol)
        return self._straight[g]

    def generator(self, index: int) -> Signature:
        sig = self.generator_signatures[abs(index) - 1]
        return sig if index > 0 else sig.antipode()

    def word_signature(self, word: Sequence[int]) -> Signature:
        sig = Signature.identity(self.labels, self.order)
        for x in word:
            sig = sig.compose(self.generator(x))
        return sig

    def loop_signature(self, g: GroupElement, route: str = "word") -> Signature:
        if route == "straight":
            return self.straight(g)
        if route != "word":
            raise ValueError(f"unknown route {route!r}")
        if g.is_identity():
            return Signature.identity(self.labels, self.order)
        sig = self._elements.get(g)
        if sig is None:
            word = g.word if g.word is not None else self.preset.word_decompose(g)
            sig = self.word_signature(word)
            self._elements[g] = sig
        return sig

    def period(self, label: str, g: GroupElement) -> complex:
        """int_{z0}^{g z0} of a single letter."""
        return self.loop_signature(g)[(label,)]


def loop_signature(preset: GroupPreset, g: GroupElement, z0: complex, alphabet, order: int,
                   tol: float = DEFAULT_TOL) -> Signature:
    """Signature along the straight path z0 -> g z0."""
    return path_signature(Path((z0, g(z0))), tuple(alphabet), order, tol)


# ---------------------------------------------------------------------------
# Functionals

HOMOTOPY_STATUSES = ("guaranteed-pure-type", "numerically-checked", "unchecked")


class IteratedIntegralFunctional:
    """A finite combination sum_w c_w int w, the empty word carrying the constant term."""

    def __init__(self, alphabet, coefficients: Mapping[Sequence[str], complex],
                 declared_length: int | None = None, homotopy_status: str | None = None):
        self.letters = tuple(alphabet)
        self.alphabet = _labels_of(self.letters)
        if len(set(self.alphabet)) != len(self.alphabet):
            raise ValueError("duplicate letter labels in alphabet")
        known = set(self.alphabet)
        coeffs: dict[tuple[str, ...], complex] = {}
        for word, c in coefficients.items():
            word = (word,) if isinstance(word, str) else tuple(word)
            if not set(word) <= known:
                raise ValueError(f"word {word} uses letters outside the alphabet")
            c = complex(c)
            if c != 0:
                coeffs[word] = coeffs.get(word, 0) + c
        self.coefficients = {w: c for w, c in sorted(coeffs.items(), key=lambda kv: (len(kv[0]), kv[0])) if c != 0}
        longest = max((len(w) for w in self.coefficients), default=0)
        self.declared_length = longest if declared_length is None else int(declared_length)
        if self.declared_length < longest:
            raise ValueError("declared length shorter than the longest word")
        pure = self._pure_type()
        if homotopy_status is None:
            homotopy_status = "guaranteed-pure-type" if pure else "unchecked"
        if homotopy_status not in HOMOTOPY_STATUSES:
            raise ValueError(f"unknown homotopy status {homotopy_status!r}")
        if homotopy_status == "guaranteed-pure-type" and not pure:
            raise ValueError("pure-type status requires single-chirality words")
        self.homotopy_status = homotopy_status

    # constructors --------------------------------------------------------
    @classmethod
    def constant(cls, alphabet, c: complex = 1.0) -> IteratedIntegralFunctional:
        return cls(alphabet, {(): c})

    @classmethod
    def word(cls, alphabet, word: Sequence[str], c: complex = 1.0) -> IteratedIntegralFunctional:
        return cls(alphabet, {tuple(word): c})

    @classmethod
    def zero(cls, alphabet) -> IteratedIntegralFunctional:
        return cls(alphabet, {})

    # properties ----------------------------------------------------------
    def letter(self, label: str):
        return self.letters[self.alphabet.index(label)]

    def _pure_type(self) -> bool:
        for word in self.coefficients:
            ps = {self.letter(lab).hodge_p for lab in word}
            if None in ps or len(ps) > 1:
                return False
        return True

    @property
    def length(self) -> int:
        return max((len(w) for w in self.coefficients), default=0)

    @property
    def constant_term(self) -> complex:
        return self.coefficients.get((), 0j)

    @property
    def cuspidal(self) -> bool:
        """True when every letter used extends to the compactified curve."""
        return all(self.letter(lab).cuspidal for w in self.coefficients for lab in w)

    def is_zero(self) -> bool:
        return not self.coefficients

    def used_labels(self) -> tuple[str, ...]:
        used = {lab for w in self.coefficients for lab in w}
        return tuple(lab for lab in self.alphabet if lab in used)

    # algebra -------------------------------------------------------------
    def _like(self, coeffs, length=None, status=None) -> IteratedIntegralFunctional:
        return IteratedIntegralFunctional(self.letters, coeffs, length, status)

    def __add__(self, other: IteratedIntegralFunctional) -> IteratedIntegralFunctional:
        if self.alphabet != other.alphabet:
            raise ValueError("alphabet mismatch")
        coeffs = dict(self.coefficients)
        for w, c in other.coefficients.items():
            coeffs[w] = coeffs.get(w, 0) + c
        return self._like(coeffs, max(self.declared_length, other.declared_length))

    def __neg__(self) -> IteratedIntegralFunctional:
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c: complex) -> IteratedIntegralFunctional:
        return self._like({w: v * c for w, v in self.coefficients.items()}, self.declared_length,
                          self.homotopy_status)

    __rmul__ = __mul__

    def without_constant(self) -> IteratedIntegralFunctional:
        return self._like({w: c for w, c in self.coefficients.items() if w}, self.declared_length)

    def homogeneous(self, r: int) -> IteratedIntegralFunctional:
        return self._like({w: c for w, c in self.coefficients.items() if len(w) == r})

    # evaluation ----------------------------------------------------------
    def evaluate(self, sig: Signature) -> complex:
        if sig.order < self.length:
            raise ValueError(f"signature order {sig.order} below functional length {self.length}")
        total = 0j
        for w, c in self.coefficients.items():
            total += c * sig[w]
        return total

    __call__ = evaluate

    def evaluate_path(self, path: Path, tol: float = DEFAULT_TOL) -> complex:
        return self.evaluate(path_signature(path, self.letters, max(self.length, 0), tol))

    def with_status(self, status: str) -> IteratedIntegralFunctional:
        return self._like(self.coefficients, self.declared_length, status)

    # serialization -------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "alphabet": list(self.alphabet),
            "declared_length": self.declared_length,
            "homotopy_status": self.homotopy_status,
            "terms": [{"word": list(w), "coeff": [c.real, c.imag]} for w, c in self.coefficients.items()],
        }

    @classmethod
    def from_json(cls, record: dict, letters) -> IteratedIntegralFunctional:
        """Rebuild from JSON; ``letters`` supplies letter objects by label."""
        by_label = {w.label: w for w in letters}
        try:
            alphabet = [by_label[lab] for lab in record["alphabet"]]
        except KeyError as exc:
            raise ValueError(f"unknown letter {exc.args[0]!r}") from None
        coeffs = {}
        for term in record["terms"]:
            c = term["coeff"]
            coeffs[tuple(term["word"])] = complex(*c) if isinstance(c, list) else complex(c)
        status = record.get("homotopy_status")
        if status == "guaranteed-pure-type":
            status = None  # recomputed, never trusted from input
        return cls(alphabet, coeffs, record.get("declared_length"), status)

    def __eq__(self, other) -> bool:
        return (isinstance(other, IteratedIntegralFunctional) and self.alphabet == other.alphabet
                and self.coefficients == other.coefficients)

    def __repr__(self) -> str:
        if not self.coefficients:
            return "0"
        parts = []
        for w, c in self.coefficients.items():
            parts.append(f"({c:.6g})" + ("*" + "".join(f"[{x}]" for x in w) if w else ""))
        return " + ".join(parts)


def _check_same_alphabet(a: IteratedIntegralFunctional, b: IteratedIntegralFunctional) -> None:
    if a.alphabet != b.alphabet:
        raise ValueError("alphabet mismatch")


@lru_cache(maxsize=65536)
def shuffles(u: tuple, v: tuple) -> tuple[tuple, ...]:
    """All interleavings of u and v, with multiplicity."""
    if not u:
        return (v,)
    if not v:
        return (u,)
    return tuple((u[0],) + w for w in shuffles(u[1:], v)) + tuple((v[0],) + w for w in shuffles(u, v[1:]))


def shuffle_product(i1: IteratedIntegralFunctional, i2: IteratedIntegralFunctional) -> IteratedIntegralFunctional:
    _check_same_alphabet(i1, i2)
    coeffs: dict[tuple, complex] = {}
    for u, a in i1.coefficients.items():
        for v, b in i2.coefficients.items():
            for w in shuffles(u, v):
                coeffs[w] = coeffs.get(w, 0) + a * b
    out = IteratedIntegralFunctional(i1.letters, coeffs, i1.declared_length + i2.declared_length)
    # a product of homotopy functionals is one
    if out.homotopy_status == "unchecked" and "unchecked" not in (i1.homotopy_status, i2.homotopy_status):
        out = out.with_status("numerically-checked")
    return out


def deconcatenate(functional: IteratedIntegralFunctional) -> list[tuple[IteratedIntegralFunctional, IteratedIntegralFunctional]]:
    """Split every word at every position, grouped by the suffix.

    Returns pairs (I1, I2) with I2 a single suffix word v and I1 the sum of
    c_{uv} u over all words uv ending in v, so that on a concatenated path
    eval(I, P1 P2) = sum eval(I1, P1) eval(I2, P2).  The first pair is
    (I, 1); pairs are ordered by suffix length, then lexicographically.
    """
    groups: dict[tuple, dict[tuple, complex]] = {}
    for w, c in functional.coefficients.items():
        for i in range(len(w) + 1):
            prefix, suffix = w[:i], w[i:]
            bucket = groups.setdefault(suffix, {})
            bucket[prefix] = bucket.get(prefix, 0) + c
    letters = functional.letters
    out = []
    for suffix in sorted(groups, key=lambda v: (len(v), v)):
        first = IteratedIntegralFunctional(letters, groups[suffix])
        if first.is_zero():
            continue
        out.append((first, IteratedIntegralFunctional(letters, {suffix: 1.0})))
    return out


def pair(functional: IteratedIntegralFunctional, xi, table: LoopTable, route: str = "word") -> complex:
    """<I, xi> = sum_g a_g int_{z0}^{g z0} I for a group-ring element xi."""
    if table.labels != functional.alphabet:
        raise ValueError("loop table alphabet differs from the functional's")
    total = 0j
    for g, a in xi.items():
        total += a * functional.evaluate(table.loop_signature(g, route))
    return total


def period_product(labels: Sequence[str], elements: Sequence[GroupElement], table: LoopTable) -> complex:
    """prod_i int_{g_i} w_i."""
    out = 1 + 0j
    for lab, g in zip(labels, elements):
        out *= table.period(lab, g)
    return out


# ---------------------------------------------------------------------------
# Exact letters


@dataclass
class ExactLetterReport:
    position: str
    word: tuple[str, ...]
    lhs: complex
    rhs: complex

    @property
    def residual(self) -> float:
        return abs(self.lhs - self.rhs)

    def to_json(self) -> dict:
        return {"position": self.position, "word": list(self.word),
                "lhs": [self.lhs.real, self.lhs.imag], "rhs": [self.rhs.real, self.rhs.imag],
                "residual": self.residual}


def reduce_exact_letter(word: Sequence, index: int, potential: Callable, exact_letter, path: Path,
                        tol: float = DEFAULT_TOL) -> ExactLetterReport:
    """Check the length-reduction identity for an exact letter df in a word.

    ``word`` is the sequence of letters w1..ws without df; df (supplied as
    ``exact_letter`` with potential f) is inserted before position ``index``
    (0 = first, s = last).  Both sides are evaluated on ``path``:

        first:  int df w1..ws = int (f w1) w2..ws - f(start) int w1..ws
        middle: int ..w_{i-1} df w_i.. = int ..(f w_i).. - int ..(f w_{i-1}) w_i..
        last:   int w1..ws df = f(end) int w1..ws - int w1..(f ws)
    """
    from .formbank import FunctionLetter

    letters = list(word)
    s = len(letters)
    if not 0 <= index <= s:
        raise ValueError("index out of range")

    def scaled(w):
        return FunctionLetter(f"f*{w.label}", lambda z, w=w: potential(z) * w.pullback(z, 1.0),
                              hodge_p=getattr(w, "hodge_p", None))

    alphabet: list = []

    def add(letter):
        for a in alphabet:
            if a.label == letter.label:
                return a.label
        alphabet.append(letter)
        return letter.label

    base = [add(w) for w in letters]
    df = add(exact_letter)
    f_start = complex(np.atleast_1d(potential(np.array([path.start])))[0])
    f_end = complex(np.atleast_1d(potential(np.array([path.end])))[0])
    lhs_word = tuple(base[:index]) + (df,) + tuple(base[index:])
    rhs_terms: list[tuple[complex, tuple]] = []
    constant = 0j
    if s == 0:
        position = "alone"
        constant = f_end - f_start
    elif index == 0:
        position = "first"
        rhs_terms.append((1.0, (add(scaled(letters[0])),) + tuple(base[1:])))
        rhs_terms.append((-f_start, tuple(base)))
    elif index == s:
        position = "last"
        rhs_terms.append((f_end, tuple(base)))
        rhs_terms.append((-1.0, tuple(base[:-1]) + (add(scaled(letters[-1])),)))
    else:
        position = "middle"
        rhs_terms.append((1.0, tuple(base[:index]) + (add(scaled(letters[index])),) + tuple(base[index + 1:])))
        rhs_terms.append((-1.0, tuple(base[: index - 1]) + (add(scaled(letters[index - 1])),) + tuple(base[index:])))
    sig = path_signature(path, alphabet, s + 1, tol)
    lhs = sig[lhs_word]
    rhs = constant + sum(c * sig[w] for c, w in rhs_terms)
    return ExactLetterReport(position, lhs_word, lhs, rhs)
