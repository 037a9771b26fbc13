"""Finite combinations of group elements, the augmentation ideal and slash actions."""
from __future__ import annotations

import re
from typing import Callable, Iterable, Iterator, Mapping, Sequence

import numpy as np

from .modgroup import IDENTITY, GroupElement, GroupPreset, automorphy


class GroupRingElement:
    """sum_g a_g [g] with complex coefficients; keys compare by matrix, not by word."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[GroupElement, complex] | Iterable[tuple[GroupElement, complex]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[GroupElement, complex] = {}
        for g, a in items:
            acc[g] = acc.get(g, 0) + a
        self.terms = {g: a for g, a in acc.items() if a != 0}

    @classmethod
    def of(cls, g: GroupElement, a: complex = 1) -> GroupRingElement:
        return cls({g: a})

    @classmethod
    def one(cls) -> GroupRingElement:
        return cls({IDENTITY: 1})

    def items(self) -> Iterator[tuple[GroupElement, complex]]:
        return iter(self.terms.items())

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def deg(self) -> complex:
        """Augmentation: the sum of the coefficients."""
        return sum(self.terms.values(), 0)

    def in_augmentation_ideal(self) -> bool:
        return self.deg() == 0

    def __add__(self, other: GroupRingElement) -> GroupRingElement:
        return GroupRingElement(list(self.terms.items()) + list(_coerce(other).terms.items()))

    def __neg__(self) -> GroupRingElement:
        return GroupRingElement({g: -a for g, a in self.terms.items()})

    def __sub__(self, other) -> GroupRingElement:
        return self + (-_coerce(other))

    def __rsub__(self, other) -> GroupRingElement:
        return _coerce(other) - self

    __radd__ = __add__

    def __mul__(self, other) -> GroupRingElement:
        if isinstance(other, (int, float, complex)):
            return GroupRingElement({g: a * other for g, a in self.terms.items()})
        return multiply(self, _coerce(other))

    def __rmul__(self, other) -> GroupRingElement:
        if isinstance(other, (int, float, complex)):
            return self * other
        return multiply(_coerce(other), self)

    def __eq__(self, other) -> bool:
        return isinstance(other, GroupRingElement) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"{a}*{g!r}" for g, a in self.terms.items())


def _coerce(x) -> GroupRingElement:
    if isinstance(x, GroupRingElement):
        return x
    if isinstance(x, GroupElement):
        return GroupRingElement.of(x)
    if isinstance(x, (int, float, complex)):
        return GroupRingElement({IDENTITY: x})
    raise TypeError(f"cannot use {type(x).__name__} as a group-ring element")


def multiply(xi: GroupRingElement, eta: GroupRingElement) -> GroupRingElement:
    out: dict[GroupElement, complex] = {}
    for g, a in xi.items():
        for h, b in eta.items():
            gh = g @ h
            out[gh] = out.get(gh, 0) + a * b
    return GroupRingElement(out)


def j_power_element(factors: Sequence[GroupElement]) -> GroupRingElement:
    """prod_i (g_i - 1), an element of J^s with s = len(factors)."""
    if not factors:
        raise ValueError("need at least one factor")
    out = GroupRingElement.one()
    for g in factors:
        out = multiply(out, GroupRingElement({g: 1, IDENTITY: -1}))
    return out


def slash(f: Callable[[complex], complex], k: int, xi: GroupRingElement) -> Callable[[complex], complex]:
    """z -> sum_g a_g j(g, z)^-k f(g z)."""
    if k % 2:
        raise ValueError("weight must be even")

    def sliced(z: complex) -> complex:
        total = 0j
        for g, a in xi.items():
            total += a * automorphy(g, z) ** (-k) * f(g(z))
        return total

    return sliced


_FACTOR = re.compile(r"\(\s*([^()]*?)\s*-\s*1\s*\)")
_GEN = re.compile(r"([gG])(\d+)(\^-1|\^\(-1\)|')?")


def _parse_word(text: str, preset: GroupPreset) -> GroupElement:
    text = text.replace(" ", "").replace("*", "")
    pos, word = 0, []
    while pos < len(text):
        m = _GEN.match(text, pos)
        if not m:
            raise ValueError(f"cannot parse generator word {text!r}")
        i = int(m.group(2))
        if not 1 <= i <= len(preset.generators):
            raise ValueError(f"generator g{i} not in preset {preset.name}")
        word.append(-i if m.group(3) else i)
        pos = m.end()
    return preset.element(word)


def parse_xi(text: str, preset: GroupPreset) -> GroupRingElement:
    """Parse products of factors like "(g1-1)(g2^-1-1)(g1g2-1)"; "1" is the unit."""
    s = text.strip()
    if s == "1":
        return GroupRingElement.one()
    factors = []
    pos = 0
    stripped = s.replace(" ", "")
    for m in _FACTOR.finditer(stripped):
        if stripped[pos: m.start()].strip("*"):
            raise ValueError(f"cannot parse {text!r}")
        factors.append(_parse_word(m.group(1), preset))
        pos = m.end()
    if not factors or stripped[pos:].strip("*"):
        raise ValueError(f"cannot parse {text!r}")
    return j_power_element(factors)


def random_j_element(preset: GroupPreset, rng: np.random.Generator, s: int, max_len: int = 3) -> tuple[GroupRingElement, list[GroupElement]]:
    """A random product of s factors (g - 1) with g a short random word."""
    from .modgroup import random_word

    factors = []
    for _ in range(s):
        length = int(rng.integers(1, max_len + 1))
        factors.append(preset.element(random_word(rng, len(preset.generators), length)))
    return j_power_element(factors), factors
