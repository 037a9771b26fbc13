"""Arithmetic group machinery for torsion-free subgroups of PSL2(Z).

Elements are integer matrices modulo sign.  Two presets are provided:
``GAMMA2`` (the principal congruence subgroup of level 2, genus 0, three
cusps) and ``GAMMA0_11`` (Hecke subgroup of level 11, genus 1, two cusps).
Both are free groups, so every element has a unique freely reduced word in
the preset generators.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Iterable, Sequence

DEFAULT_MAX_WORD = 64


class NotInGroupError(ValueError):
    pass


def _normalize(a: int, b: int, c: int, d: int) -> tuple[int, int, int, int]:
    if c < 0 or (c == 0 and d < 0):
        return -a, -b, -c, -d
    return a, b, c, d


def free_reduce(word: Iterable[int]) -> tuple[int, ...]:
    out: list[int] = []
    for x in word:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def invert_word(word: Sequence[int]) -> tuple[int, ...]:
    return tuple(-x for x in reversed(word))


@dataclass(frozen=True)
class GroupElement:
    """A matrix in PSL2(Z), stored as its sign-normalized representative.

    ``word`` optionally records a generator word (signed 1-based indices)
    whose product is this element; it does not take part in equality.
    """

    a: int
    b: int
    c: int
    d: int
    word: tuple[int, ...] | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        a, b, c, d = (int(x) for x in (self.a, self.b, self.c, self.d))
        if a * d - b * c != 1:
            raise ValueError(f"determinant of [[{a},{b}],[{c},{d}]] is not 1")
        a, b, c, d = _normalize(a, b, c, d)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)
        if self.word is not None:
            object.__setattr__(self, "word", tuple(int(x) for x in self.word))

    @classmethod
    def from_rows(cls, rows, word=None) -> GroupElement:
        (a, b), (c, d) = rows
        return cls(a, b, c, d, word)

    @property
    def entries(self) -> tuple[int, int, int, int]:
        return self.a, self.b, self.c, self.d

    def __matmul__(self, other: GroupElement) -> GroupElement:
        a, b, c, d = self.entries
        e, f, g, h = other.entries
        word = None
        if self.word is not None and other.word is not None:
            word = free_reduce(self.word + other.word)
        return GroupElement(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h, word)

    def inverse(self) -> GroupElement:
        word = invert_word(self.word) if self.word is not None else None
        return GroupElement(self.d, -self.b, -self.c, self.a, word)

    def __pow__(self, n: int) -> GroupElement:
        base = self if n >= 0 else self.inverse()
        out = IDENTITY if base.word is None else GroupElement(1, 0, 0, 1, ())
        for _ in range(abs(n)):
            out = out @ base
        return out

    def is_identity(self) -> bool:
        return self.entries == (1, 0, 0, 1)

    def trace(self) -> int:
        return abs(self.a + self.d)

    def is_parabolic(self) -> bool:
        return self.trace() == 2 and not self.is_identity()

    def __call__(self, z: complex) -> complex:
        return apply_moebius(self, z)

    def __repr__(self) -> str:
        return f"GroupElement([[{self.a}, {self.b}], [{self.c}, {self.d}]])"


IDENTITY = GroupElement(1, 0, 0, 1)
S = GroupElement(0, -1, 1, 0)
T = GroupElement(1, 1, 0, 1)
U = S @ T  # order 3 in PSL2(Z)


def translation(h: int) -> GroupElement:
    return GroupElement(1, h, 0, 1)


def apply_moebius(g: GroupElement, z: complex) -> complex:
    """Return (a z + b) / (c z + d) for z in the upper half-plane."""
    z = complex(z)
    if not z.imag > 0:
        raise ValueError(f"point {z} is not in the upper half-plane")
    return (g.a * z + g.b) / (g.c * z + g.d)


def automorphy(g: GroupElement, z: complex) -> complex:
    """j(g, z) = c z + d for the sign-normalized representative."""
    z = complex(z)
    if not z.imag > 0:
        raise ValueError(f"point {z} is not in the upper half-plane")
    return g.c * z + g.d


def act_on_cusp(g: GroupElement, x: Fraction | None) -> Fraction | None:
    """Action on P^1(Q); ``None`` stands for the cusp at infinity."""
    if x is None:
        return None if g.c == 0 else Fraction(g.a, g.c)
    num = g.a * x + g.b
    den = g.c * x + g.d
    if den == 0:
        return None
    return Fraction(num) / Fraction(den)


def _ext_gcd(x: int, y: int) -> tuple[int, int, int]:
    if y == 0:
        return (abs(x), (1 if x >= 0 else -1), 0)
    g, s, t = _ext_gcd(y, x % y)
    return g, t, s - (x // y) * t


def complete_bottom_row(c: int, d: int) -> GroupElement:
    """Some matrix in SL2(Z) with bottom row (c, d); gcd(c, d) must be 1."""
    g, s, t = _ext_gcd(d, c)
    if g != 1:
        raise ValueError(f"({c}, {d}) is not a primitive row")
    # s*d + t*c = 1  ->  a = s, b = -t
    return GroupElement(s, -t, c, d)


# ---------------------------------------------------------------------------
# PSL2(Z) words in S and U, used for Reidemeister-Schreier rewriting.

def sl2z_letters(g: GroupElement) -> list[str]:
    """Word in the letters 'S', 'U' whose product is g in PSL2(Z)."""
    a, b, c, d = g.entries
    left: list[tuple[str, int]] = []  # g = prod of these, left to right
    while c != 0:
        n = round(Fraction(a, c))
        if n:
            left.append(("T", n))
            a, b = a - n * c, b - n * d
        left.append(("S", 1))
        a, b, c, d = -c, -d, a, b
    # remaining matrix is +-[[1, x], [0, 1]] with a = d = +-1
    n = a * b
    if n:
        left.append(("T", n))
    letters: list[str] = []
    for name, n in left:
        if name == "S":
            letters.append("S")
        elif n > 0:
            letters.extend(["S", "U"] * n)  # T = S U
        else:
            letters.extend(["U", "U", "S"] * (-n))  # T^-1 = U^2 S
    # cancel S S and U U U
    out: list[str] = []
    for x in letters:
        out.append(x)
        if len(out) >= 2 and out[-1] == "S" and out[-2] == "S":
            del out[-2:]
        elif len(out) >= 3 and out[-1] == out[-2] == out[-3] == "U":
            del out[-3:]
    return out


_LETTER = {"S": S, "U": U}


@dataclass
class SchreierData:
    """Coset graph of a torsion-free subgroup H of PSL2(Z) under S and U.

    ``reps[i]`` is a Schreier transversal (prefix closed in S, U), ``action``
    the right action of S and U on cosets, and ``edge_gen`` maps an S-edge
    ``(i, 'S')`` to the signed index of the free generator it carries.
    """

    reps: list[GroupElement]
    action: dict[tuple[int, str], int]
    edge_gen: dict[int, int]
    generators: list[GroupElement]

    def coset_of(self, g: GroupElement) -> int:
        i = 0
        for x in sl2z_letters(g):
            i = self.action[(i, x)]
        return i

    def rewrite(self, g: GroupElement) -> tuple[int, ...]:
        i = 0
        word: list[int] = []
        for x in sl2z_letters(g):
            if x == "S" and i in self.edge_gen:
                word.append(self.edge_gen[i])
            i = self.action[(i, x)]
        if i != 0:
            raise NotInGroupError(f"{g} is not in the subgroup")
        return free_reduce(word)


def reidemeister_schreier(contains: Callable[[GroupElement], bool]) -> SchreierData:
    """Free generators of a torsion-free finite-index subgroup of PSL2(Z).

    Cosets are discovered breadth-first on U-orbits joined by S-edges; each
    S-edge outside the spanning tree yields one free generator.
    """
    reps: list[GroupElement] = []

    def find(h: GroupElement) -> int | None:
        for i, r in enumerate(reps):
            if contains(h @ r.inverse()):
                return i
        return None

    def add_orbit(r: GroupElement) -> None:
        for x in (r, r @ U, r @ U @ U):
            if find(x) is not None:
                raise ValueError("U has a fixed coset: subgroup has elliptic elements")
            reps.append(x)

    add_orbit(IDENTITY)
    queue = 0
    while queue < len(reps):
        h = reps[queue] @ S
        if find(h) is None:
            if contains(h @ S @ h.inverse()):
                raise ValueError("S has a fixed coset: subgroup has elliptic elements")
            add_orbit(h)
        queue += 1
        if len(reps) > 10_000:
            raise ValueError("index too large")

    action: dict[tuple[int, str], int] = {}
    for i, r in enumerate(reps):
        for name, x in _LETTER.items():
            j = find(r @ x)
            assert j is not None
            action[(i, name)] = j

    edge_gen: dict[int, int] = {}
    generators: list[GroupElement] = []
    for i, r in enumerate(reps):
        if i in edge_gen:
            continue
        j = action[(i, "S")]
        h = r @ S @ reps[j].inverse()
        if h.is_identity():
            continue
        generators.append(h)
        k = len(generators)
        edge_gen[i] = k
        edge_gen[j] = -k
    return SchreierData(reps, action, edge_gen, generators)


# ---------------------------------------------------------------------------
# Cusps and presets

@dataclass(frozen=True)
class Cusp:
    """A cusp with scaling matrix sigma (sigma(inf) = cusp) and width h."""

    name: str
    representative: Fraction | None
    scaling: GroupElement
    width: int

    @property
    def stabilizer_generator(self) -> GroupElement:
        return self.scaling @ translation(self.width) @ self.scaling.inverse()

    def in_stabilizer(self, g: GroupElement) -> bool:
        h = self.scaling.inverse() @ g @ self.scaling
        return h.c == 0 and h.a == 1 and h.d == 1 and h.b % self.width == 0

    def local(self, g: GroupElement) -> GroupElement:
        """sigma^-1 g, whose bottom row indexes the coset of g."""
        return self.scaling.inverse() @ g


@dataclass
class GroupPreset:
    name: str
    level: int
    genus: int
    generators: tuple[GroupElement, ...]
    cusps: tuple[Cusp, ...]
    contains: Callable[[GroupElement], bool]
    basepoint: complex
    _decompose: Callable[["GroupPreset", GroupElement], tuple[int, ...]] = field(repr=False)
    max_word: int = DEFAULT_MAX_WORD

    @property
    def cusp_count(self) -> int:
        return len(self.cusps)

    def cusp(self, name: str) -> Cusp:
        for c in self.cusps:
            if c.name == name:
                return c
        raise KeyError(f"{self.name} has no cusp {name!r}")

    def generator(self, i: int) -> GroupElement:
        g = self.generators[abs(i) - 1]
        return g if i > 0 else g.inverse()

    def element(self, word: Sequence[int]) -> GroupElement:
        out = GroupElement(1, 0, 0, 1, ())
        for i in word:
            out = out @ self.generator(i)
        return out

    @cached_property
    def schreier(self) -> SchreierData:
        return reidemeister_schreier(self.contains)

    @property
    def index(self) -> int:
        return len(self.schreier.reps)

    def word_decompose(self, g: GroupElement) -> tuple[int, ...]:
        return word_decompose(self, g)


def word_decompose(preset: GroupPreset, g: GroupElement) -> tuple[int, ...]:
    """Freely reduced generator word w with product(w) = g in PSL2."""
    if not preset.contains(g):
        raise NotInGroupError(f"{g} is not in {preset.name}")
    word = free_reduce(preset._decompose(preset, g))
    if len(word) > preset.max_word:
        raise ValueError(f"word length {len(word)} exceeds cap {preset.max_word}")
    return word


def with_word(preset: GroupPreset, g: GroupElement) -> GroupElement:
    if g.word is not None:
        return g
    return GroupElement(*g.entries, word_decompose(preset, g))


def _gamma2_contains(g: GroupElement) -> bool:
    return g.b % 2 == 0 and g.c % 2 == 0


def _gamma2_decompose(preset: GroupPreset, g: GroupElement) -> tuple[int, ...]:
    # Euclidean reduction with A = [[1,2],[0,1]] (index 1) and B = [[1,0],[2,1]] (index 2).
    # In Gamma(2), a is odd and c even, so |a| != |c| and each step shrinks.
    a, b, c, d = g.entries
    left: list[int] = []
    while c != 0:
        if abs(a) > abs(c):
            n = round(Fraction(a, 2 * c))
            a, b = a - 2 * n * c, b - 2 * n * d
            left.extend([1 if n > 0 else -1] * abs(n))
        else:
            n = round(Fraction(c, 2 * a))
            c, d = c - 2 * n * a, d - 2 * n * b
            left.extend([2 if n > 0 else -2] * abs(n))
    n = (a * b) // 2
    left.extend([1 if n > 0 else -1] * abs(n))
    return free_reduce(left)


def _gamma0_contains(level: int) -> Callable[[GroupElement], bool]:
    return lambda g: g.c % level == 0


def _schreier_decompose(preset: GroupPreset, g: GroupElement) -> tuple[int, ...]:
    return preset.schreier.rewrite(g)


def _make_gamma2() -> GroupPreset:
    A = GroupElement(1, 2, 0, 1, (1,))
    B = GroupElement(1, 0, 2, 1, (2,))
    cusps = (
        Cusp("inf", None, IDENTITY, 2),
        Cusp("0", Fraction(0), S, 2),
        Cusp("1", Fraction(1), GroupElement(1, -1, 1, 0), 2),
    )
    return GroupPreset("gamma2", 2, 0, (A, B), cusps, _gamma2_contains, 1j, _gamma2_decompose)


# Free generators of Gamma0(11) produced by ``reidemeister_schreier`` with the
# breadth-first transversal above; tests re-derive them.
GAMMA0_11_GENERATORS = (
    (1, 1, 0, 1),
    (-3, -2, 11, 7),
    (-4, -3, 11, 8),
)


def _make_gamma0_11() -> GroupPreset:
    gens = tuple(GroupElement(*e, (i + 1,)) for i, e in enumerate(GAMMA0_11_GENERATORS))
    cusps = (
        Cusp("inf", None, IDENTITY, 1),
        Cusp("0", Fraction(0), S, 11),
    )
    # Both hyperbolic generators have isometric circles of radius 1/11 centred
    # at -7/11 and -8/11; this basepoint keeps z0 and every g z0 above Im 0.077.
    z0 = complex(-0.68, 0.078)
    return GroupPreset("gamma0_11", 11, 1, gens, cusps, _gamma0_contains(11), z0, _schreier_decompose)


GAMMA2 = _make_gamma2()
GAMMA0_11 = _make_gamma0_11()
PRESETS = {"gamma2": GAMMA2, "gamma0_11": GAMMA0_11}


def get_preset(name: str) -> GroupPreset:
    key = name.lower().replace("-", "_")
    if key not in PRESETS:
        raise KeyError(f"unknown group preset {name!r}; choose from {sorted(PRESETS)}")
    return PRESETS[key]


# ---------------------------------------------------------------------------
# Cosets of the cusp stabilizer

def coset_reps(preset: GroupPreset, cusp: Cusp, c_bound: int) -> list[GroupElement]:
    """One element of each coset in Gamma_a \\ Gamma inside the truncation box.

    A coset is identified by the bottom row (c, d) of sigma^-1 gamma (up to
    sign); the box keeps rows with max(|c|, |d|) <= c_bound.  Rows are
    returned in a fixed order (by c, then d).
    """
    if c_bound < 0:
        raise ValueError("c_bound must be non-negative")
    sigma = cusp.scaling
    out: list[GroupElement] = []
    for c in range(0, c_bound + 1):
        rows = [1] if c == 0 else range(-c_bound, c_bound + 1)
        for d in rows:
            if math.gcd(c, d) != 1:
                continue
            g = complete_bottom_row(c, d)
            for x in range(preset.level):
                gamma = sigma @ translation(x) @ g
                if preset.contains(gamma):
                    out.append(gamma)
                    break
    return out


def same_coset(cusp: Cusp, g1: GroupElement, g2: GroupElement) -> bool:
    return cusp.in_stabilizer(g1 @ g2.inverse())


def random_word(rng, n_gens: int, length: int) -> tuple[int, ...]:
    """A freely reduced word of exactly ``length`` letters."""
    word: list[int] = []
    while len(word) < length:
        x = int(rng.integers(1, n_gens + 1)) * (1 if rng.random() < 0.5 else -1)
        if word and word[-1] == -x:
            continue
        word.append(x)
    return tuple(word)


def near_isometric_circle(g: GroupElement, rng, count: int, spread: float = 0.3) -> list[complex]:
    """Sample points z such that z and g z have comparable height."""
    if g.c == 0:
        return [complex(rng.uniform(-0.5, 0.5), rng.uniform(0.5, 1.2)) for _ in range(count)]
    center = -g.d / g.c
    r = 1.0 / abs(g.c)
    pts = []
    for _ in range(count):
        t = rng.uniform(-spread, spread)
        pts.append(complex(center + r * t, r * math.sqrt(max(1.0 - t * t, 0.25))))
    return pts


def exp2pii(z: complex) -> complex:
    return cmath.exp(2j * math.pi * z)
