"""Pure numpy versions of the hot kernels.

Signatures are stored flat: level r occupies ``dim**r`` consecutive slots
after all shorter levels, words indexed most-significant letter first.
"""
import numpy as np


def level_offsets(dim, order):
    offs = [0]
    for r in range(order + 1):
        offs.append(offs[-1] + dim**r)
    return offs


def qseries(coeffs, q):
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    q = np.asarray(q, dtype=np.complex128)
    n = coeffs.shape[0]
    if n == 0:
        return np.zeros_like(q)
    powers = np.empty((q.shape[0], n), dtype=np.complex128)
    powers[:, 0] = 1.0
    if n > 1:
        powers[:, 1:] = q[:, None]
        np.cumprod(powers[:, 1:], axis=1, out=powers[:, 1:])
    return powers @ coeffs


def chen_product(a, b, dim, order):
    offs = level_offsets(dim, order)
    out = np.zeros(offs[-1], dtype=np.complex128)
    for r in range(order + 1):
        acc = out[offs[r]:offs[r + 1]]
        for i in range(r + 1):
            left = a[offs[i]:offs[i + 1]]
            right = b[offs[r - i]:offs[r - i + 1]]
            acc += np.outer(left, right).ravel()
    return out


def panel_signature(F, Q, w, order):
    """Iterated integrals of the sampled integrands F (dim x n) on one panel.

    Q maps node values to values of the antiderivative (from the panel start)
    at the nodes, w are the quadrature weights of the whole panel.
    """
    F = np.asarray(F, dtype=np.complex128)
    dim, n = F.shape
    parts = [np.ones(1, dtype=np.complex128)]
    running = np.ones((1, n), dtype=np.complex128)
    for r in range(1, order + 1):
        integrand = (running[:, None, :] * F[None, :, :]).reshape(-1, n)
        parts.append(integrand @ w)
        if r < order:
            running = integrand @ Q.T
    return np.concatenate(parts)
