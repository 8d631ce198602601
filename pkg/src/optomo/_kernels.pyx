# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: all-pairs hop distances and modular rank.

Signatures and results are identical to :mod:`optomo._pykernels`.
"""

import numpy as np
cimport numpy as cnp

ctypedef cnp.int64_t i64

cdef i64 UNREACHABLE = 1 << 40


def floyd_warshall(adj):
    """Hop-count Floyd-Warshall on a 0/1 adjacency matrix.

    Returns ``(dist, pred)`` where ``pred[u, v]`` is the penultimate vertex on
    the chosen shortest ``u -> v`` path (-1 when ``u == v`` or unreachable).
    Intermediate vertices are scanned in ascending index order and only strict
    improvements replace a path, so ties keep the earliest intermediate.
    """
    cdef i64[:, ::1] a = np.ascontiguousarray(adj, dtype=np.int64)
    cdef Py_ssize_t n = a.shape[0]
    dist_arr = np.full((n, n), UNREACHABLE, dtype=np.int64)
    pred_arr = np.full((n, n), -1, dtype=np.int64)
    cdef i64[:, ::1] d = dist_arr
    cdef i64[:, ::1] p = pred_arr
    cdef Py_ssize_t i, j, k
    cdef i64 dik, cand
    for i in range(n):
        d[i, i] = 0
        for j in range(n):
            if i != j and a[i, j]:
                d[i, j] = 1
                p[i, j] = i
    for k in range(n):
        for i in range(n):
            dik = d[i, k]
            if dik >= UNREACHABLE:
                continue
            for j in range(n):
                cand = dik + d[k, j]
                if cand < d[i, j]:
                    d[i, j] = cand
                    p[i, j] = p[k, j]
    return dist_arr, pred_arr


def rank_mod_p(mat, i64 modulus):
    """Rank of an integer matrix over GF(modulus); modulus must be < 2**31."""
    cdef i64[:, ::1] m = np.mod(np.asarray(mat, dtype=np.int64), modulus).copy(order="C")
    cdef Py_ssize_t rows = m.shape[0], cols = m.shape[1]
    cdef Py_ssize_t r = 0, c, i, j, piv
    cdef i64 inv, f, tmp, base, e
    for c in range(cols):
        if r == rows:
            break
        piv = -1
        for i in range(r, rows):
            if m[i, c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(cols):
                tmp = m[r, j]
                m[r, j] = m[piv, j]
                m[piv, j] = tmp
        # modular inverse by Fermat
        inv = 1
        base = m[r, c]
        e = modulus - 2
        while e > 0:
            if e & 1:
                inv = (inv * base) % modulus
            base = (base * base) % modulus
            e >>= 1
        for i in range(r + 1, rows):
            if m[i, c] == 0:
                continue
            f = (m[i, c] * inv) % modulus
            for j in range(c, cols):
                m[i, j] = (m[i, j] - f * m[r, j]) % modulus
                if m[i, j] < 0:
                    m[i, j] += modulus
        r += 1
    return r
