"""Hodge and weight filtration bookkeeping on words, functionals and primitive spaces.

A letter carries (p_i, l_i): p_i = 1 for forms with a dz, l_i = 1 for forms
with a log pole at a cusp.  A word w1..wr then has Hodge degree sum p_i and
weight r + sum l_i.

Primitive weight-k forms P(z, I), Pbar(z, I) and E(z, K) are filed by the
twist.  On the compact curve weight equals length, so a twist is recorded
as an atom (kind, r, q): twist length r, twist Hodge degree q, 0 <= q <= r.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

SERIES_KINDS = ("P", "Pbar", "E")


@dataclass(frozen=True, order=True)
class FiltrationDegree:
    hodge_p: int
    weight_l: int
    length_r: int

    def __post_init__(self):
        if not 0 <= self.hodge_p <= self.length_r:
            raise ValueError("need 0 <= p <= r")
        if not self.length_r <= self.weight_l <= 2 * self.length_r:
            raise ValueError("need r <= l <= 2r")

    def as_tuple(self) -> tuple[int, int, int]:
        return self.hodge_p, self.weight_l, self.length_r


def _letter_pl(letter) -> tuple[int, int]:
    p = getattr(letter, "hodge_p", None)
    if p is None:
        raise ValueError(f"letter {getattr(letter, 'label', letter)!r} has no Hodge degree")
    return int(p), int(getattr(letter, "log_weight_l", 0))


def word_degree(word: Sequence) -> FiltrationDegree:
    p = sum(_letter_pl(w)[0] for w in word)
    l = len(word) + sum(_letter_pl(w)[1] for w in word)
    return FiltrationDegree(p, l, len(word))


def functional_degree(functional) -> FiltrationDegree:
    """Smallest (F, W, length) filtration step containing the functional.

    p is the minimum Hodge degree over words, l the maximum weight and r the
    maximum length.  The zero functional gets (0, 0, 0).
    """
    degrees = [word_degree([functional.letter(lab) for lab in w]) for w in functional.coefficients]
    if not degrees:
        return FiltrationDegree(0, 0, 0)
    p = min(d.hodge_p for d in degrees)
    l = max(d.weight_l for d in degrees)
    r = max(d.length_r for d in degrees)
    return FiltrationDegree(p, l, r)


def in_F(functional, p: int) -> bool:
    return functional_degree(functional).hodge_p >= p


def in_W(functional, l: int) -> bool:
    return functional_degree(functional).weight_l <= l


# ---------------------------------------------------------------------------
# Primitive spaces

Atom = tuple  # (kind, r, q)


def twist_atoms(s: int) -> list[Atom]:
    return [(kind, r, q) for kind in SERIES_KINDS for r in range(s + 1) for q in range(r + 1)]


def _in_weight(atom: Atom, l: int, k: int) -> bool:
    kind, r, _ = atom
    if kind == "E":
        return r <= l - k
    return r <= l - (k - 1)


def _in_hodge(atom: Atom, p: int, k: int) -> bool:
    kind, _, q = atom
    if kind == "P":
        return q >= p - (k - 1)
    if kind == "Pbar":
        return q >= p
    return q >= p - k // 2


@dataclass
class PrimitiveTable:
    """W_l and F^p strata of the primitive weight-k space with twists of length <= s."""

    k: int
    s: int
    weight: dict[int, frozenset]
    hodge: dict[int, frozenset]

    @property
    def atoms(self) -> frozenset:
        return frozenset(twist_atoms(self.s))

    def weight_range(self) -> range:
        return range(0, max(self.weight) + 1)

    def hodge_range(self) -> range:
        return range(0, max(self.hodge) + 1)

    @staticmethod
    def summarize_weight(stratum: Iterable[Atom]) -> dict[str, str]:
        """Per kind, the largest twist space: "B<r>" = functionals of length <= r."""
        out = {}
        for kind in SERIES_KINDS:
            rs = [r for kd, r, _ in stratum if kd == kind]
            if rs:
                out[kind] = f"B{max(rs)}"
        return out

    def summarize_hodge(self, stratum: Iterable[Atom]) -> dict[str, str]:
        """Per kind, the smallest twist Hodge step: "all" or "F<q>"."""
        out = {}
        for kind in SERIES_KINDS:
            qs = [q for kd, _, q in stratum if kd == kind]
            if qs:
                q = min(qs)
                out[kind] = "all" if q == 0 else f"F{q}"
        return out

    def golden(self) -> dict[str, dict[str, str]]:
        table = {}
        for l in self.weight_range():
            table[f"W{l}"] = self.summarize_weight(self.weight[l])
        for p in self.hodge_range():
            table[f"F{p}"] = self.summarize_hodge(self.hodge[p])
        return table

    def to_json(self) -> dict:
        return {"k": self.k, "s": self.s, "strata": self.golden(),
                "atoms": {name: sorted([list(a) for a in stratum])
                          for name, stratum in self._named_strata()}}

    def _named_strata(self):
        for l in self.weight_range():
            yield f"W{l}", self.weight[l]
        for p in self.hodge_range():
            yield f"F{p}", self.hodge[p]

    def to_text(self) -> str:
        names = {"P": "P_{m,a}(z,I)", "Pbar": "Pbar_{m,a}(z,I)", "E": "E_a(z,I)"}
        lines = [f"primitive forms of weight {self.k}, twists of length <= {self.s}"]
        for name, summary in self.golden().items():
            if not summary:
                lines.append(f"{name:<4}= 0")
                continue
            parts = []
            for kind, bucket in summary.items():
                if bucket.startswith("B"):
                    parts.append(f"{names[kind]}, I in H0(B_{bucket[1:]})")
                elif bucket == "all":
                    parts.append(f"{names[kind]}, I in H0(B_{self.s})")
                else:
                    parts.append(f"{names[kind]}, I in F^{bucket[1:]} H0(B_{self.s})")
            lines.append(f"{name:<4}= span of " + "; ".join(parts))
        return "\n".join(lines)


def primitive_space_table(k: int, s: int, preset=None) -> PrimitiveTable:
    """Weight and Hodge strata of primitive forms (the preset does not change the bookkeeping)."""
    if k < 4 or k % 2:
        raise ValueError("k must be an even integer >= 4")
    if s < 0:
        raise ValueError("s must be non-negative")
    atoms = twist_atoms(s)
    top_w = s + k
    top_f = s + k
    weight = {l: frozenset(a for a in atoms if _in_weight(a, l, k)) for l in range(top_w + 1)}
    hodge = {p: frozenset(a for a in atoms if _in_hodge(a, p, k)) for p in range(top_f + 1)}
    return PrimitiveTable(k, s, weight, hodge)


# Filtration lists for k = 4, s = 2, entered by hand.
GOLDEN_K4_S2 = {
    "W0": {}, "W1": {}, "W2": {},
    "W3": {"P": "B0", "Pbar": "B0"},
    "W4": {"P": "B1", "Pbar": "B1", "E": "B0"},
    "W5": {"P": "B2", "Pbar": "B2", "E": "B1"},
    "W6": {"P": "B2", "Pbar": "B2", "E": "B2"},
    "F0": {"P": "all", "Pbar": "all", "E": "all"},
    "F1": {"P": "all", "Pbar": "F1", "E": "all"},
    "F2": {"P": "all", "Pbar": "F2", "E": "all"},
    "F3": {"P": "all", "E": "F1"},
    "F4": {"P": "F1", "E": "F2"},
    "F5": {"P": "F2"},
    "F6": {},
}


def golden_matches(table: PrimitiveTable, golden: dict = GOLDEN_K4_S2) -> list[str]:
    """Names of strata whose summary differs from ``golden`` (empty when all match)."""
    got = table.golden()
    bad = []
    for name, expected in golden.items():
        if got.get(name, {}) != expected:
            bad.append(name)
    return bad


def dumps_table(table: PrimitiveTable, fmt: str = "text") -> str:
    if fmt == "json":
        return json.dumps(table.to_json(), indent=2, sort_keys=True)
    if fmt == "text":
        return table.to_text()
    raise ValueError(f"unknown format {fmt!r}")
