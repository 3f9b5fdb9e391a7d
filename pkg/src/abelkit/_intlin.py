"""Exact integer linear algebra helpers (Smith form, saturation, completion).

Thin wrappers around sympy's normal-form routines, returning plain Python
ints / numpy integer arrays.  All arithmetic is exact.
"""

from fractions import Fraction

import numpy as np
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_decomp


def as_int_matrix(a) -> np.ndarray:
    """Validate and convert to an integer numpy array (exact)."""
    arr = np.asarray(a)
    if arr.size and not np.issubdtype(arr.dtype, np.integer):
        rounded = np.rint(arr)
        if not np.array_equal(arr, rounded):
            raise ValueError("matrix entries must be integers")
        arr = rounded
    return arr.astype(np.int64, copy=True) if arr.size else arr.astype(np.int64)


def smith_decomposition(a: np.ndarray):
    """Return (s, u, v) with u @ a @ v = s, u and v unimodular, s diagonal.

    Entries are Python ints (arbitrary precision), shapes preserved.
    """
    m, n = a.shape
    s_m, u_m, v_m = smith_normal_decomp(Matrix(a.tolist()), domain=ZZ)
    s = [[int(s_m[i, j]) for j in range(n)] for i in range(m)]
    u = [[int(u_m[i, j]) for j in range(m)] for i in range(m)]
    v = [[int(v_m[i, j]) for j in range(n)] for i in range(n)]
    return s, u, v


def invariant_factors(a: np.ndarray) -> list[int]:
    """Nonzero diagonal of the Smith normal form (divisibility chain)."""
    s, _, _ = smith_decomposition(a)
    out = []
    for i in range(min(len(s), len(s[0]) if s else 0)):
        if s[i][i] != 0:
            out.append(abs(s[i][i]))
    return out


def det_int(a) -> int:
    """Exact determinant of a square integer matrix (Bareiss)."""
    m = [[int(x) for x in row] for row in np.asarray(a).tolist()]
    n = len(m)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def inverse_unimodular(u) -> list[list[int]]:
    """Exact inverse of a unimodular integer matrix, as int rows."""
    inv = Matrix(np.asarray(u).tolist()).inv()
    n = inv.rows
    out = [[inv[i, j] for j in range(n)] for i in range(n)]
    for row in out:
        for x in row:
            if x != int(x):
                raise ValueError("matrix is not unimodular")
    return [[int(x) for x in row] for row in out]


def saturation_witness(a: np.ndarray):
    """Return None if the column span of ``a`` is saturated in Z^m.

    Otherwise return a witness: an integer vector in the rational span of the
    columns but outside their integer span.
    """
    m, n = a.shape
    if n == 0:
        return None
    s, u, _ = smith_decomposition(a)
    u_inv = inverse_unimodular(u)
    for i in range(n):
        if abs(s[i][i]) > 1:
            return np.array([u_inv[r][i] for r in range(m)], dtype=np.int64)
        if s[i][i] == 0:
            raise ValueError("columns are not linearly independent")
    return None


def complete_to_basis(a: np.ndarray) -> np.ndarray:
    """Columns extending a saturated sublattice basis to a basis of Z^m.

    ``a`` is m x n with independent, saturated columns.  Returns an
    m x (m - n) integer matrix c such that [a | c] is unimodular.
    """
    m, n = a.shape
    if n == 0:
        return np.eye(m, dtype=np.int64)
    s, u, _ = smith_decomposition(a)
    for i in range(n):
        if abs(s[i][i]) != 1:
            raise ValueError("sublattice is not saturated")
    u_inv = inverse_unimodular(u)
    cols = [[u_inv[r][i] for r in range(m)] for i in range(n, m)]
    return np.array(cols, dtype=np.int64).T.reshape(m, m - n)


def solve_rational(a: np.ndarray, b: np.ndarray):
    """Solve a @ x = b exactly over the rationals; None if inconsistent.

    ``a`` has full column rank.  Returns a list of Fractions.
    """
    m, n = a.shape
    rows = [[Fraction(int(a[i, j])) for j in range(n)] + [Fraction(int(b[i]))]
            for i in range(m)]
    piv_cols = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pv = rows[r][c]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(m):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        piv_cols.append(c)
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if rows[i][n] != 0:
            return None
    x = [Fraction(0)] * n
    for i, c in enumerate(piv_cols):
        x[c] = rows[i][n]
    return x
