"""Pure numpy versions of the compiled kernels in ``_core.pyx``."""

import numpy as np


def unrank_colex(ranks, table, k):
    ranks = np.asarray(ranks, dtype=np.uint64).copy()
    out = np.empty((ranks.shape[0], k), dtype=np.int64)
    for i in range(k, 0, -1):
        # each row of the table is nondecreasing, so this is the greedy digit
        c = np.searchsorted(table[i], ranks, side="right") - 1
        out[:, i - 1] = c
        ranks -= table[i][c]
    return out


def build_stars(edges, n):
    m, k = edges.shape
    flat = edges.ravel()
    order = np.argsort(flat, kind="stable")
    indices = (order // k).astype(np.int64)
    counts = np.bincount(flat, minlength=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return indptr, indices


def unit_representatives(edges, indptr, indices):
    n = indptr.shape[0] - 1
    deg = np.diff(indptr)
    rep = np.full(n, -1, dtype=np.int64)
    live = np.flatnonzero(deg > 0)
    rep[live] = live
    if live.size < 2:
        return rep
    first = indices[indptr[live]]
    order = np.lexsort((live, deg[live], first))
    key_first = first[order]
    key_deg = deg[live][order]
    same = (key_first[1:] == key_first[:-1]) & (key_deg[1:] == key_deg[:-1])
    if not same.any():
        return rep
    # runs of equal (first edge, degree) are candidate groups
    starts = np.flatnonzero(np.concatenate(([True], ~same)))
    ends = np.append(starts[1:], order.size)
    for s, e in zip(starts, ends):
        if e - s < 2:
            continue
        group = live[order[s:e]]
        seen = []
        for v in group:
            star_v = indices[indptr[v]:indptr[v + 1]]
            for r in seen:
                if np.array_equal(star_v, indices[indptr[r]:indptr[r + 1]]):
                    rep[v] = r
                    break
            else:
                seen.append(v)
    return rep


def jacobi_eigenvalues(a, tol, max_sweeps):
    a = np.array(a, dtype=np.float64)
    n = a.shape[0]
    thresh = tol * tol * float(np.sum(a * a))
    converged = False
    sweep = 0
    for sweep in range(max_sweeps + 1):
        off = a.copy()
        np.fill_diagonal(off, 0.0)
        off2 = float(np.sum(off * off))
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
                app, aqq = a[p, p], a[q, q]
                theta = (aqq - app) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                tau = s / (1.0 + c)
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                new_p = col_p - s * (col_q + tau * col_p)
                new_q = col_q + s * (col_p - tau * col_q)
                a[:, p] = new_p
                a[:, q] = new_q
                a[p, :] = new_p
                a[q, :] = new_q
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
    return np.diag(a).copy(), sweep, converged
