"""Exact integer linear algebra for measurement matrices.

Identifiability is a structural yes/no question, so ranks and determinants
here are computed over the rationals, never with floating-point thresholds.
"""

from fractions import Fraction

import numpy as np

from . import kernels

# Mersenne prime 2**31 - 1: products of residues fit in int64.
MODULUS = 2147483647


def _as_int_rows(mat):
    arr = np.asarray(mat)
    if arr.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    return [[int(x) for x in row] for row in arr.tolist()], arr.shape


def bareiss_rank(mat):
    """Exact rank by fraction-free (Bareiss) elimination on Python ints."""
    m, (rows, cols) = _as_int_rows(mat)
    rank = 0
    prev = 1
    for c in range(cols):
        if rank == rows:
            break
        piv = next((i for i in range(rank, rows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        p = m[rank][c]
        for i in range(rank + 1, rows):
            for j in range(c + 1, cols):
                m[i][j] = (p * m[i][j] - m[i][c] * m[rank][j]) // prev
            m[i][c] = 0
        prev = p
        rank += 1
    return rank


def exact_rank(mat):
    """Exact rank over Q.

    Full rank modulo a prime certifies full rank over Q (a minor that is
    nonzero mod p is nonzero over Z), so the compiled modular kernel answers
    the common case and Bareiss settles the rest.
    """
    arr = np.asarray(mat, dtype=np.int64)
    if arr.size == 0:
        return 0
    full = min(arr.shape)
    if kernels.rank_mod_p(arr, MODULUS) == full:
        return full
    return bareiss_rank(arr)


def exact_det(mat):
    """Exact integer determinant of a square integer matrix."""
    m, (rows, cols) = _as_int_rows(mat)
    if rows != cols:
        raise ValueError("determinant needs a square matrix")
    n = rows
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            piv = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if piv is None:
                return 0
            m[k], m[piv] = m[piv], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[k][k] * m[i][j] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1] if n else 1


def exact_inverse(mat):
    """Inverse of a nonsingular integer matrix as nested lists of Fractions."""
    m, (rows, cols) = _as_int_rows(mat)
    if rows != cols:
        raise ValueError("inverse needs a square matrix")
    n = rows
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for c in range(n):
        piv = next((i for i in range(c, n) if aug[i][c] != 0), None)
        if piv is None:
            raise ZeroDivisionError("matrix is singular")
        aug[c], aug[piv] = aug[piv], aug[c]
        p = aug[c][c]
        aug[c] = [x / p for x in aug[c]]
        for i in range(n):
            if i != c and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[c])]
    return [row[n:] for row in aug]
