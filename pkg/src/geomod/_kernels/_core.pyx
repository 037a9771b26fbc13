# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels; same contracts as ``_fallback``."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef Py_ssize_t _total(Py_ssize_t dim, int order):
    cdef Py_ssize_t tot = 0, p = 1
    cdef int r
    for r in range(order + 1):
        tot += p
        p *= dim
    return tot


def qseries(const double complex[:] coeffs, const double complex[:] q):
    cdef Py_ssize_t n = coeffs.shape[0], m = q.shape[0], i, k
    out = np.zeros(m, dtype=np.complex128)
    cdef double complex[:] res = out
    cdef double complex acc, qi
    if n == 0:
        return out
    for i in range(m):
        qi = q[i]
        acc = coeffs[n - 1]
        for k in range(n - 2, -1, -1):
            acc = acc * qi + coeffs[k]
        res[i] = acc
    return out


def chen_product(const double complex[:] a, const double complex[:] b, Py_ssize_t dim, int order):
    cdef Py_ssize_t tot = _total(dim, order)
    out = np.zeros(tot, dtype=np.complex128)
    cdef double complex[:] res = out
    cdef Py_ssize_t offs[64]
    cdef Py_ssize_t sizes[64]
    cdef int r, i
    cdef Py_ssize_t u, v, base, nl, nr, ol, orr
    cdef double complex x
    if order >= 63:
        raise ValueError("order too large")
    offs[0] = 0
    sizes[0] = 1
    for r in range(1, order + 1):
        sizes[r] = sizes[r - 1] * dim
        offs[r] = offs[r - 1] + sizes[r - 1]
    for r in range(order + 1):
        base = offs[r]
        for i in range(r + 1):
            nl = sizes[i]
            nr = sizes[r - i]
            ol = offs[i]
            orr = offs[r - i]
            for u in range(nl):
                x = a[ol + u]
                if x == 0:
                    continue
                for v in range(nr):
                    res[base + u * nr + v] += x * b[orr + v]
    return out


def panel_signature(const double complex[:, :] F, const double[:, :] Q, const double[:] w, int order):
    cdef Py_ssize_t dim = F.shape[0], n = F.shape[1]
    cdef Py_ssize_t tot = _total(dim, order)
    out = np.zeros(tot, dtype=np.complex128)
    cdef double complex[:] res = out
    # running antiderivatives of the current level, at the nodes
    run = np.ones((1, n), dtype=np.complex128)
    cdef double complex[:, :] cur = run
    cdef double complex[:, :] nxt
    cdef double complex[:] tmp = np.empty(n, dtype=np.complex128)
    cdef Py_ssize_t width = 1, off = 1, r, u, a, j, k, row
    cdef double complex acc
    res[0] = 1.0
    for r in range(1, order + 1):
        nxt_arr = np.empty((width * dim, n), dtype=np.complex128) if r < order else None
        if nxt_arr is not None:
            nxt = nxt_arr
        for u in range(width):
            for a in range(dim):
                row = u * dim + a
                acc = 0
                for j in range(n):
                    tmp[j] = cur[u, j] * F[a, j]
                    acc = acc + tmp[j] * w[j]
                res[off + row] = acc
                if r < order:
                    for j in range(n):
                        acc = 0
                        for k in range(n):
                            acc = acc + Q[j, k] * tmp[k]
                        nxt[row, j] = acc
        off += width * dim
        width *= dim
        if r < order:
            cur = nxt
    return out
