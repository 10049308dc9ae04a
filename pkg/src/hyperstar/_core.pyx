# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels. Signatures and results are identical to ``_fallback``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport cbrt, fabs, pow, sqrt

cnp.import_array()

ctypedef cnp.uint64_t u64
ctypedef cnp.int64_t i64


def unrank_colex(const u64[::1] ranks, const u64[:, ::1] table, int k):
    """Colex unranking of many indices using a precomputed C(c, i) table."""
    cdef Py_ssize_t m = ranks.shape[0]
    cdef Py_ssize_t n = table.shape[1]
    out_arr = np.empty((m, k), dtype=np.int64)
    cdef i64[:, ::1] out = out_arr
    cdef double[64] fact
    cdef Py_ssize_t j, lo, hi, mid, c, steps
    cdef int i
    cdef u64 r
    fact[0] = 1.0
    for i in range(1, 64):
        fact[i] = fact[i - 1] * i
    for j in range(m):
        r = ranks[j]
        hi = n - 1
        for i in range(k, 0, -1):
            # largest c in [i-1, hi] with C(c, i) <= r
            lo = i - 1
            if i == 1:
                c = <Py_ssize_t>r
            elif i == 2:
                # C(c, 2) = c(c-1)/2 stays below 2**63 whenever the table exists
                c = <Py_ssize_t>((1.0 + sqrt(1.0 + 8.0 * <double>r)) * 0.5)
                if c > hi:
                    c = hi
                while c > lo and (<u64>c * <u64>(c - 1)) // 2 > r:
                    c -= 1
                while c < hi and (<u64>(c + 1) * <u64>c) // 2 <= r:
                    c += 1
            else:
                # C(c, i) ~ (c - (i-1)/2)^i / i!, then walk to the exact digit
                if i == 3:
                    c = <Py_ssize_t>(cbrt(6.0 * <double>r) + 1.0)
                elif i < 64:
                    c = <Py_ssize_t>(pow(<double>r * fact[i], 1.0 / i) + 0.5 * (i - 1))
                else:
                    c = lo
                if c < lo:
                    c = lo
                if c > hi:
                    c = hi
                steps = 0
                while c < hi and table[i, c + 1] <= r and steps < 16:
                    c += 1
                    steps += 1
                while c > lo and table[i, c] > r and steps < 16:
                    c -= 1
                    steps += 1
                if steps == 16:
                    while lo < hi:
                        mid = (lo + hi + 1) >> 1
                        if table[i, mid] <= r:
                            lo = mid
                        else:
                            hi = mid - 1
                    c = lo
            r -= table[i, c]
            out[j, i - 1] = c
            hi = c - 1
    return out_arr


def build_stars(const i64[:, ::1] edges, Py_ssize_t n):
    """Counting sort of incidences into CSR form; edge ids come out ascending."""
    cdef Py_ssize_t m = edges.shape[0]
    cdef Py_ssize_t k = edges.shape[1]
    indptr_arr = np.zeros(n + 1, dtype=np.int64)
    indices_arr = np.empty(m * k, dtype=np.int64)
    cdef i64[::1] indptr = indptr_arr
    cdef i64[::1] indices = indices_arr
    cdef Py_ssize_t e, j, v
    for e in range(m):
        for j in range(k):
            indptr[edges[e, j] + 1] += 1
    for v in range(n):
        indptr[v + 1] += indptr[v]
    fill_arr = indptr_arr[:n].copy()
    cdef i64[::1] fill = fill_arr
    for e in range(m):
        for j in range(k):
            v = edges[e, j]
            indices[fill[v]] = e
            fill[v] += 1
    return indptr_arr, indices_arr


cdef inline bint _same_star(const i64[::1] indptr, const i64[::1] indices,
                            Py_ssize_t a, Py_ssize_t b) nogil:
    cdef Py_ssize_t da = indptr[a + 1] - indptr[a]
    cdef Py_ssize_t t
    if da != indptr[b + 1] - indptr[b]:
        return False
    for t in range(da):
        if indices[indptr[a] + t] != indices[indptr[b] + t]:
            return False
    return True


def unit_representatives(const i64[:, ::1] edges, const i64[::1] indptr,
                         const i64[::1] indices):
    """Smallest vertex sharing each vertex's star; -1 for isolated vertices.

    Two vertices with the same non-empty star both lie in its first edge, so
    candidates are only compared inside that edge, then confirmed entry by entry.
    """
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t m = edges.shape[0]
    cdef Py_ssize_t k = edges.shape[1]
    rep_arr = np.full(n, -1, dtype=np.int64)
    cdef i64[::1] rep = rep_arr
    cdef Py_ssize_t v, e, a, b, ia, ib
    for v in range(n):
        if indptr[v + 1] > indptr[v]:
            rep[v] = v
    for e in range(m):
        for ib in range(1, k):
            b = edges[e, ib]
            if indices[indptr[b]] != e or rep[b] != b:
                continue
            for ia in range(ib):
                a = edges[e, ia]
                if indices[indptr[a]] != e or rep[a] != a:
                    continue
                if _same_star(indptr, indices, a, b):
                    rep[b] = a
                    break
    return rep_arr


def jacobi_eigenvalues(double[:, ::1] a, double tol, int max_sweeps):
    """Cyclic Jacobi on a symmetric matrix, in place.

    Stops once the off-diagonal Frobenius norm is <= tol * ||A||_F.
    Returns (eigenvalues in diagonal order, sweeps used, converged flag).
    """
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t p, q, r
    cdef double norm2 = 0.0, off2, apq, app, aqq, theta, t, c, s, tau, arp, arq
    cdef int sweep
    for p in range(n):
        for q in range(n):
            norm2 += a[p, q] * a[p, q]
    cdef double thresh = tol * tol * norm2
    cdef bint converged = False
    for sweep in range(max_sweeps + 1):
        off2 = 0.0
        for p in range(n):
            for q in range(p + 1, n):
                off2 += 2.0 * a[p, q] * a[p, q]
        if off2 <= thresh:
            converged = True
            break
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                app = a[p, p]
                aqq = a[q, q]
                theta = (aqq - app) / (2.0 * apq)
                if fabs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = 1.0 / (fabs(theta) + sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / sqrt(t * t + 1.0)
                s = t * c
                tau = s / (1.0 + c)
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                for r in range(n):
                    if r == p or r == q:
                        continue
                    arp = a[r, p]
                    arq = a[r, q]
                    a[r, p] = arp - s * (arq + tau * arp)
                    a[r, q] = arq + s * (arp - tau * arq)
                    a[p, r] = a[r, p]
                    a[q, r] = a[r, q]
    eigs = np.empty(n, dtype=np.float64)
    for p in range(n):
        eigs[p] = a[p, p]
    return eigs, sweep, converged
