import itertools
import math

import numpy as np
import pytest

from geomod.modgroup import (GAMMA0_11, GAMMA2, IDENTITY, S, T, GroupElement, NotInGroupError, coset_reps,
                             free_reduce, get_preset, random_word, reidemeister_schreier, same_coset,
                             translation, automorphy, apply_moebius, _gamma0_contains, GAMMA0_11_GENERATORS)


def random_sl2(rng, bound=9):
    while True:
        c, d = (int(x) for x in rng.integers(-bound, bound + 1, size=2))
        if math.gcd(c, d) != 1:
            continue
        # a d - b c = 1 via extended gcd
        from geomod.modgroup import complete_bottom_row
        g = complete_bottom_row(c, d)
        return g @ translation(int(rng.integers(-3, 4)))


def test_moebius_examples():
    assert IDENTITY(1j) == 1j
    assert abs(S(1j) - 1j) < 1e-15
    assert abs(GroupElement(1, 2, 0, 1)(0.3 + 0.7j) - (2.3 + 0.7j)) < 1e-15
    with pytest.raises(ValueError):
        apply_moebius(T, 0.3 - 0.1j)


def test_automorphy_examples():
    assert automorphy(T, 0.2 + 0.5j) == 1
    assert automorphy(S, 1j) == 1j


def test_determinant_and_normalization():
    with pytest.raises(ValueError):
        GroupElement(1, 1, 1, 1)
    g = GroupElement(-1, 0, -3, -1)
    assert g.c == 3 and g.d == 1
    assert GroupElement(*g.entries) == g
    assert GroupElement(-1, 0, 0, -1) == IDENTITY


def test_cocycle(rng):
    worst = 0.0
    for _ in range(100):
        g, h = random_sl2(rng), random_sl2(rng)
        z = complex(rng.uniform(-1, 1), rng.uniform(0.2, 2))
        lhs = automorphy(g @ h, z) ** 2
        rhs = (automorphy(g, h(z)) * automorphy(h, z)) ** 2
        worst = max(worst, abs(lhs - rhs) / max(1.0, abs(lhs)))
    assert worst < 1e-12


def test_associativity_exact(rng):
    for _ in range(1000):
        a, b, c = (random_sl2(rng, 5) for _ in range(3))
        assert ((a @ b) @ c) == (a @ (b @ c))


def test_preset_shape():
    assert (len(GAMMA2.cusps), GAMMA2.genus) == (3, 0)
    assert (len(GAMMA0_11.cusps), GAMMA0_11.genus) == (2, 1)
    with pytest.raises(KeyError):
        get_preset("gamma1_5")


@pytest.mark.parametrize("preset", [GAMMA2, GAMMA0_11], ids=lambda p: p.name)
def test_cusp_scaling(preset):
    for cusp in preset.cusps:
        conj = cusp.scaling.inverse() @ cusp.stabilizer_generator @ cusp.scaling
        assert conj == translation(cusp.width)
        assert preset.contains(cusp.stabilizer_generator)
        assert cusp.in_stabilizer(cusp.stabilizer_generator)


def test_cusps_inequivalent_by_width_and_orbit():
    # Gamma0(11): cusp 0 has width 11, cusp inf width 1, so they cannot be equivalent.
    assert {c.width for c in GAMMA0_11.cusps} == {1, 11}
    # Gamma(2): orbits of inf, 0, 1 under Gamma(2) are separated by (c mod 2, a mod 2) of the image column.
    cols = {"inf": (1, 0), "0": (0, 1), "1": (1, 1)}
    for c in GAMMA2.cusps:
        col = (c.scaling.a % 2, c.scaling.c % 2)
        assert col == cols[c.name]


def test_gamma2_free_up_to_length_8():
    letters = (1, -1, 2, -2)
    count = 0
    for r in range(1, 9):
        for w in itertools.product(letters, repeat=r):
            if free_reduce(w) != w:
                continue
            count += 1
            assert not GAMMA2.element(w).is_identity(), w
    assert count == sum(4 * 3 ** (r - 1) for r in range(1, 9))


@pytest.mark.parametrize("preset", [GAMMA2, GAMMA0_11], ids=lambda p: p.name)
def test_random_words_never_identity(preset, rng):
    for _ in range(300):
        w = random_word(rng, len(preset.generators), int(rng.integers(1, 7)))
        assert not preset.element(w).is_identity()


def test_gamma0_11_generators_rederived():
    data = reidemeister_schreier(_gamma0_contains(11))
    assert len(data.reps) == 12
    got = tuple(g.entries for g in data.generators)
    assert got == GAMMA0_11_GENERATORS


@pytest.mark.parametrize("preset", [GAMMA2, GAMMA0_11], ids=lambda p: p.name)
def test_word_decompose(preset, rng):
    assert preset.word_decompose(IDENTITY) == ()
    for i in range(1, len(preset.generators) + 1):
        assert preset.word_decompose(preset.generators[i - 1]) == (i,)
        assert preset.word_decompose(preset.generators[i - 1].inverse()) == (-i,)
    for _ in range(50):
        w = random_word(rng, len(preset.generators), 3)
        g = GroupElement(*preset.element(w).entries)
        assert preset.word_decompose(g) == w
        assert preset.element(preset.word_decompose(g)) == g
    with pytest.raises(NotInGroupError):
        preset.word_decompose(S)


def _exhaustive_coset_count(preset, cusp, bound):
    """Bottom rows (c, d) of sigma^-1 gamma, up to sign, realized by some gamma in the group."""
    rows = set()
    sigma = cusp.scaling
    for c in range(-bound, bound + 1):
        for d in range(-bound, bound + 1):
            if math.gcd(c, d) != 1:
                continue
            if (c, d) < (0, 0) and (-c, -d) in rows:
                continue
            # search the (a, b) completions modulo the level
            from geomod.modgroup import complete_bottom_row
            h = complete_bottom_row(c, d)
            if any(preset.contains(sigma @ translation(x) @ h) for x in range(preset.level * cusp.width + 1)):
                key = (c, d) if (c, d) > (0, 0) else (-c, -d)
                rows.add(key)
    return len(rows)


def test_coset_count_gamma2():
    inf = GAMMA2.cusp("inf")
    # congruence conditions for Gamma(2) at inf: c even, d odd, coprime; count (c, d) up to sign
    oracle = sum(1 for c in range(0, 5) for d in range(-4, 5)
                 if math.gcd(c, d) == 1 and c % 2 == 0 and d % 2 == 1 and (c > 0 or d > 0))
    assert oracle == 9
    assert len(coset_reps(GAMMA2, inf, 4)) == oracle
    assert _exhaustive_coset_count(GAMMA2, inf, 4) == oracle


@pytest.mark.parametrize("preset,cusp", [(GAMMA2, "inf"), (GAMMA2, "0"), (GAMMA2, "1"),
                                         (GAMMA0_11, "inf"), (GAMMA0_11, "0")])
def test_coset_reps_partition(preset, cusp):
    cusp = preset.cusp(cusp)
    reps = coset_reps(preset, cusp, 6)
    assert all(preset.contains(g) for g in reps)
    for g1, g2 in itertools.combinations(reps, 2):
        assert not same_coset(cusp, g1, g2)
    assert len(reps) == _exhaustive_coset_count(preset, cusp, 6)


def test_identity_coset_at_infinity():
    for preset in (GAMMA2, GAMMA0_11):
        cusp = preset.cusp("inf")
        assert [g.entries for g in coset_reps(preset, cusp, 0)] == [IDENTITY.entries]
        reps = coset_reps(preset, cusp, 5)
        assert sum(cusp.in_stabilizer(g) for g in reps) == 1
        # at another cusp the c = 0 row would need sigma itself in the group
        assert coset_reps(preset, preset.cusp("0"), 0) == []


def test_word_cap():
    g = GAMMA2.element([1, 2] * 40)
    with pytest.raises(ValueError):
        GAMMA2.word_decompose(GroupElement(*g.entries))
