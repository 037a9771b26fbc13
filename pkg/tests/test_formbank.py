import cmath
import math

import numpy as np
import pytest

from geomod.chen import Path
from geomod.formbank import (InsufficientPrecisionError, TWO_PI_I, builtin_letters, evaluate_form,
                             exact_lambda_letter, letter, load_letters, modular_lambda, pullback_integrand,
                             save_letters)
from geomod.modgroup import GAMMA0_11, GAMMA2, automorphy


def eta(z, terms=400):
    """Dedekind eta as the infinite product, truncated."""
    q = cmath.exp(2j * math.pi * z)
    prod = 1.0 + 0j
    qn = 1.0 + 0j
    for _ in range(terms):
        qn *= q
        prod *= 1 - qn
    return cmath.exp(2j * math.pi * z / 24) * prod


def theta(z, which, terms=60):
    x = cmath.exp(1j * math.pi * z)
    if which == 2:
        return sum(x ** ((n + 0.5) ** 2) for n in range(-terms, terms))
    return sum(x ** (n * n) for n in range(-terms, terms + 1))


def lambda_oracle(z):
    return (theta(z, 2) / theta(z, 3)) ** 4


def test_cusp_form_coefficients_brute_force(g11_letters):
    n = 12
    # q * prod (1 - q^k)^2 (1 - q^{11 k})^2 by repeated polynomial multiplication
    poly = np.zeros(n, dtype=np.int64)
    poly[1] = 1
    for k in range(1, n):
        for step in (k, k, 11 * k, 11 * k):
            if step < n:
                factor = np.zeros(n, dtype=np.int64)
                factor[0], factor[step] = 1, -1
                poly = np.convolve(poly, factor)[:n]
    f = g11_letters[0]
    assert f.label == "f"
    np.testing.assert_array_equal(f.coefficients[:n].real, poly)
    assert list(poly[1:6]) == [1, -2, -1, 2, 1]


def test_eta_product_value(g11_letters):
    z = 0.1 + 0.3j
    expected = eta(z) ** 2 * eta(11 * z) ** 2
    assert abs(evaluate_form(g11_letters[0], z, 1e-14) - expected) < 1e-10


def test_w0_is_dlog_lambda(g2_letters):
    w0, w1 = g2_letters
    for z in (0.1 + 0.6j, -0.3 + 0.45j, 0.25 + 1.1j):
        h = 1e-5
        dlog = (cmath.log(lambda_oracle(z + h)) - cmath.log(lambda_oracle(z - h))) / (2 * h)
        assert abs(TWO_PI_I * evaluate_form(w0, z) - dlog) < 1e-6 * max(1, abs(dlog))
        lam = lambda_oracle(z)
        dlam = (lambda_oracle(z + h) - lambda_oracle(z - h)) / (2 * h)
        assert abs(TWO_PI_I * evaluate_form(w1, z) - dlam / (lam - 1)) < 1e-6 * max(1, abs(dlam))


def test_w0_leading_coefficients(g2_letters):
    # lambda = 16 x - 128 x^2 + 704 x^3 - ..., x = exp(pi i z); dlog lambda / (2 pi i dz) = 1/2 - 8 x + 24 x^2 - ...
    lam = np.array([0, 16, -128, 704, -3072, 11488, -38400], dtype=float)
    series = lam[1:] / 16.0                     # lambda / (16 x)
    log = np.zeros(6)
    # log of a power series with constant 1: derivative identity L' = S'/S
    s = series
    ds = np.arange(1, 6) * s[1:]
    inv = np.zeros(6)
    inv[0] = 1.0
    for n in range(1, 6):
        inv[n] = -sum(s[k] * inv[n - k] for k in range(1, n + 1))
    dlog = np.convolve(ds, inv)[:5]            # d/dx log(lambda / 16 x)
    # 1/(2 pi i) d/dz = (x/2) d/dx, plus 1/2 from log x
    expected = np.concatenate([[0.5], 0.5 * dlog[:4]])
    np.testing.assert_allclose(g2_letters[0].coefficients[:5].real, expected, atol=1e-12)


def test_modular_lambda_matches_theta():
    for z in (0.2 + 0.5j, -0.4 + 0.9j):
        assert abs(modular_lambda(z)[0] - lambda_oracle(z)) < 1e-12


def test_conjugate_letter(g11_letters):
    f, fbar, _ = g11_letters
    np.testing.assert_array_equal(fbar.coefficients, np.conj(f.coefficients))
    assert f.conjugate().kind == "antiholomorphic-cusp"
    z = 0.13 + 0.4j
    assert abs(evaluate_form(fbar, z) - np.conj(evaluate_form(f, z))) < 1e-14


def test_filtration_degrees(g11_letters, g2_letters):
    f, fbar, E = g11_letters
    assert (f.hodge_p, f.log_weight_l) == (1, 0)
    assert (fbar.hodge_p, fbar.log_weight_l) == (0, 0)
    assert (E.hodge_p, E.log_weight_l) == (1, 1)
    assert all(w.kind == "eisenstein" for w in g2_letters)


def test_cusp_decay_and_periodicity(g11_letters, g2_letters):
    f = g11_letters[0]
    assert abs(evaluate_form(f, 0.3 + 6j)) < 1e-8
    for w in g11_letters + g2_letters:
        h = GAMMA0_11.cusp("inf").width if w.group == "gamma0_11" else 2
        for z in (0.1 + 0.2j, -0.37 + 0.05j):
            assert abs(evaluate_form(w, z) - evaluate_form(w, z + h)) < 1e-10 * max(1, abs(evaluate_form(w, z)))


def test_decay_at_other_cusp(g11_letters):
    f, _, E = g11_letters
    # at the cusp 0 use S z = -1/z: f|S decays, E|S tends to a nonzero constant
    for y in (3.0, 5.0):
        w = 1j * y
        fs = evaluate_form(f, -1 / w) * w ** -2
        es = evaluate_form(E, -1 / w) * w ** -2
        assert abs(fs) < 10 * math.exp(-2 * math.pi * y / 11)
        assert abs(es) > 1e-3


def test_insufficient_precision(g11_letters):
    f = g11_letters[0]
    small = f.__class__(f.label, f.kind, f.group, f.coefficients[:20])
    with pytest.raises(InsufficientPrecisionError) as info:
        evaluate_form(small, 0.1 + 0.03j, 1e-12)
    assert info.value.required > 20
    with pytest.raises(ValueError):
        evaluate_form(f, 0.1 + 0.01j)


@pytest.mark.parametrize("preset", [GAMMA0_11, GAMMA2], ids=lambda p: p.name)
def test_weight_two_modularity(preset, rng):
    tol = 1e-12
    for w in builtin_letters(preset):
        for g in preset.generators:
            worst = 0.0
            count = 0
            while count < 20:
                z = complex(rng.uniform(-1, 1), rng.uniform(0.05, 1.0))
                gz = g(z)
                if gz.imag < 0.05:
                    continue
                count += 1
                j = automorphy(g, z) if w.holomorphic else np.conj(automorphy(g, z))
                lhs = evaluate_form(w, gz, tol) * j ** -2
                rhs = evaluate_form(w, z, tol)
                worst = max(worst, abs(lhs - rhs) / max(1.0, abs(rhs)))
            assert worst < 10 * tol, (w.label, worst)


def test_pullback_integrand_chain_rule(g11_letters):
    f = g11_letters[0]
    path = Path((0.1 + 0.2j, 0.1 + 0.9j))
    val = pullback_integrand(f, path, 1.0)
    assert abs(val - TWO_PI_I * evaluate_form(f, 0.1 + 0.9j, 1e-16) * 0.7j) < 1e-13 * abs(val)
    back = path.reverse()
    for t in (0.0, 0.3, 0.8):
        assert abs(pullback_integrand(f, back, t) + pullback_integrand(f, path, 1 - t)) < 1e-14


def test_save_load_roundtrip(tmp_path, g11_letters):
    p = tmp_path / "letters.json"
    save_letters(g11_letters, p)
    back = load_letters(p)
    assert [w.label for w in back] == ["f", "fbar", "E"]
    for a, b in zip(g11_letters, back):
        np.testing.assert_array_equal(a.coefficients, b.coefficients)
        assert a.kind == b.kind and a.step == b.step
    assert letter("w0").group == "gamma2"


def test_exact_lambda_letter(g2_letters):
    dlam = exact_lambda_letter(g2_letters[0])
    z = 0.05 + 0.7j
    h = 1e-5
    fd = (lambda_oracle(z + h) - lambda_oracle(z - h)) / (2 * h)
    assert abs(dlam.pullback(np.array([z]), 1.0)[0] - fd) < 1e-6
