import numpy as np
import pytest

from geomod import _kernels
from geomod.chen import panel_rule

pytestmark = pytest.mark.skipif(_kernels.compiled is None, reason="compiled core not built")


def rand_c(rng, *shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


@pytest.mark.parametrize("dim,order", [(1, 4), (2, 3), (3, 3), (5, 2)])
def test_chen_product_backends_agree(dim, order, rng):
    n = _kernels.level_offsets(dim, order)[-1]
    a, b = rand_c(rng, n), rand_c(rng, n)
    np.testing.assert_allclose(_kernels.compiled.chen_product(a, b, dim, order),
                               _kernels.fallback.chen_product(a, b, dim, order), rtol=1e-13, atol=1e-13)


@pytest.mark.parametrize("dim,order", [(1, 3), (3, 3), (2, 4)])
def test_panel_signature_backends_agree(dim, order, rng):
    rule = panel_rule()
    F = rand_c(rng, dim, rule.x.shape[0])
    np.testing.assert_allclose(_kernels.compiled.panel_signature(F, rule.Q, rule.w, order),
                               _kernels.fallback.panel_signature(F, rule.Q, rule.w, order), rtol=1e-12, atol=1e-12)


def test_qseries_backends_agree(rng):
    coeffs = rand_c(rng, 300)
    q = 0.9 * np.exp(2j * np.pi * rng.uniform(size=50)) * rng.uniform(size=50)
    np.testing.assert_allclose(_kernels.compiled.qseries(coeffs, q), _kernels.fallback.qseries(coeffs, q),
                               rtol=1e-12, atol=1e-12)


def test_panel_rule_integrates_polynomials():
    rule = panel_rule()
    x = rule.x
    # nodes on [0, 1]: the weights integrate x^j exactly and Q gives the antiderivative at the nodes
    for j in range(10):
        assert abs(rule.w @ x ** j - 1 / (j + 1)) < 1e-14
        np.testing.assert_allclose(rule.Q @ x ** j, x ** (j + 1) / (j + 1), atol=1e-14)
