"""Pure-Python versions of the compiled kernels in ``_kernels.pyx``."""

import numpy as np

UNREACHABLE = 1 << 40


def floyd_warshall(adj):
    a = np.asarray(adj, dtype=np.int64).tolist()
    n = len(a)
    d = [[UNREACHABLE] * n for _ in range(n)]
    p = [[-1] * n for _ in range(n)]
    for i in range(n):
        d[i][i] = 0
        for j in range(n):
            if i != j and a[i][j]:
                d[i][j] = 1
                p[i][j] = i
    for k in range(n):
        dk = d[k]
        pk = p[k]
        for i in range(n):
            dik = d[i][k]
            if dik >= UNREACHABLE:
                continue
            di = d[i]
            pi = p[i]
            for j in range(n):
                cand = dik + dk[j]
                if cand < di[j]:
                    di[j] = cand
                    pi[j] = pk[j]
    return np.array(d, dtype=np.int64).reshape(n, n), np.array(p, dtype=np.int64).reshape(n, n)


def rank_mod_p(mat, modulus):
    m = [[int(x) % modulus for x in row] for row in np.asarray(mat, dtype=np.int64).tolist()]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    r = 0
    for c in range(cols):
        if r == rows:
            break
        piv = next((i for i in range(r, rows) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = pow(m[r][c], modulus - 2, modulus)
        for i in range(r + 1, rows):
            if m[i][c]:
                f = m[i][c] * inv % modulus
                m[i] = [(x - f * y) % modulus for x, y in zip(m[i], m[r])]
        r += 1
    return r
