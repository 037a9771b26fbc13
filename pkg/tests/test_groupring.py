import cmath
import math

import numpy as np
import pytest

from geomod.chen import IteratedIntegralFunctional, LoopTable, pair
from geomod.groupring import GroupRingElement, j_power_element, multiply, parse_xi, random_j_element, slash
from geomod.modgroup import GAMMA0_11, GAMMA2, IDENTITY


def E4(z):
    """Level-one weight-4 Eisenstein series, truncated at 60 terms."""
    q = cmath.exp(2j * math.pi * z)
    return 1 + 240 * sum(sum(d ** 3 for d in range(1, n + 1) if n % d == 0) * q ** n for n in range(1, 60))


def test_multiply_expansion():
    g, h = GAMMA2.generators
    prod = multiply(GroupRingElement({g: 1, IDENTITY: -1}), GroupRingElement({h: 1, IDENTITY: -1}))
    assert prod == GroupRingElement({g @ h: 1, g: -1, h: -1, IDENTITY: 1})
    assert prod * GroupRingElement.one() == prod
    assert GroupRingElement.one() * prod == prod


def test_deg_of_j_powers():
    g, h = GAMMA2.generators
    assert j_power_element([g]) == GroupRingElement({g: 1, IDENTITY: -1})
    assert j_power_element([g, h, g @ h]).deg() == 0
    with pytest.raises(ValueError):
        j_power_element([])


def test_keys_compare_by_matrix():
    g = GAMMA2.generators[0]
    w1 = GAMMA2.element([1, 2, -2])
    xi = GroupRingElement({g: 1}) + GroupRingElement({w1: 2})
    assert len(xi) == 1 and xi.terms[g] == 3


def test_exact_sequence(rng):
    for _ in range(100):
        xi, _ = random_j_element(GAMMA0_11, rng, int(rng.integers(1, 4)))
        assert xi.in_augmentation_ideal()
        eta = xi * (2 + 1j)
        assert abs(eta.deg()) == 0


def test_slash_identity_and_constants():
    f = lambda z: z * z + 1
    g = GAMMA2.generators[1]
    one = slash(f, 4, GroupRingElement.one())
    assert one(0.3 + 0.4j) == f(0.3 + 0.4j)
    const = slash(lambda z: 5.0, 0, j_power_element([g]))
    assert const(0.1 + 0.9j) == 0
    with pytest.raises(ValueError):
        slash(f, 3, GroupRingElement.one())


def test_slash_weight4_eisenstein(rng):
    # truncation tail at Im z >= 0.5 is below 1e-9, so modularity holds well under 1e-6
    for g in GAMMA2.generators:
        sl = slash(E4, 4, j_power_element([g]))
        for _ in range(10):
            z = complex(rng.uniform(-0.5, 0.5), rng.uniform(0.6, 1.2))
            if g(z).imag < 0.5:
                z = complex(z.real, 1.5)
            assert abs(sl(z)) < 1e-6


def test_parse_xi():
    g1, g2 = GAMMA2.generators
    assert parse_xi("(g1-1)(g2-1)", GAMMA2) == j_power_element([g1, g2])
    assert parse_xi("(g1^-1 - 1)", GAMMA2) == j_power_element([g1.inverse()])
    assert parse_xi("(g1g2'-1)", GAMMA2) == j_power_element([g1 @ g2.inverse()])
    assert parse_xi("1", GAMMA2) == GroupRingElement.one()
    for bad in ("(g3-1)", "g1-1", "(g1-1)x", ""):
        with pytest.raises(ValueError):
            parse_xi(bad, GAMMA2)


def test_products_of_ideal_powers_pair_to_zero(g11_letters, rng):
    table = LoopTable(GAMMA0_11, g11_letters[:1], 3)
    I = IteratedIntegralFunctional(g11_letters[:1], {("f",): 1.0, ("f", "f"): 0.5 - 1j, ("f", "f", "f"): 0.25})
    for s1, s2 in ((1, 2), (2, 2)):
        x1, _ = random_j_element(GAMMA0_11, rng, s1, 2)
        x2, _ = random_j_element(GAMMA0_11, rng, s2, 2)
        prod = x1 * x2
        assert prod.in_augmentation_ideal()
        low = IteratedIntegralFunctional(I.letters, {w: c for w, c in I.coefficients.items()
                                                     if len(w) < s1 + s2})
        assert abs(pair(low, prod, table)) < 1e-8
