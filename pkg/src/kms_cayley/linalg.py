"""Deterministic dense kernels: pivoted elimination, rank, nullspace.

Everything here is plain Gauss elimination with partial pivoting and a
relative threshold, so rank decisions depend only on the input matrix and
the tolerance, never on LAPACK dispatch.
"""

from __future__ import annotations

import numpy as np


def row_echelon(mat: np.ndarray, tol: float):
    """Reduced row echelon form of `mat` and its pivot columns.

    Entries are treated as zero when at most tol * max|mat|.
    """
    a = np.array(mat, dtype=float)
    if a.ndim != 2:
        raise ValueError("expected a 2-d array")
    m, n = a.shape
    scale = max(1.0, float(np.max(np.abs(a))) if a.size else 0.0)
    thresh = tol * scale
    pivots = []
    row = 0
    for col in range(n):
        if row >= m:
            break
        piv = row + int(np.argmax(np.abs(a[row:, col])))
        if abs(a[piv, col]) <= thresh:
            continue
        if piv != row:
            a[[row, piv]] = a[[piv, row]]
        a[row] = a[row] / a[row, col]
        for r in range(m):
            if r != row and a[r, col] != 0.0:
                a[r] = a[r] - a[r, col] * a[row]
        pivots.append(col)
        row += 1
    return a, pivots


def matrix_rank(mat: np.ndarray, tol: float) -> int:
    if np.asarray(mat).size == 0:
        return 0
    _, pivots = row_echelon(mat, tol)
    return len(pivots)


def nullspace(mat: np.ndarray, tol: float) -> np.ndarray:
    """Orthonormal basis (rows) of the kernel of `mat`, deterministic.

    An empty constraint matrix has the full space as kernel.
    """
    a = np.asarray(mat, dtype=float)
    if a.ndim != 2:
        raise ValueError("expected a 2-d array")
    m, n = a.shape
    if m == 0 or a.size == 0:
        basis = np.eye(n)
        return basis
    rref, pivots = row_echelon(a, tol)
    free = [c for c in range(n) if c not in pivots]
    if not free:
        return np.zeros((0, n))
    vecs = []
    for fc in free:
        v = np.zeros(n)
        v[fc] = 1.0
        for r, pc in enumerate(pivots):
            v[pc] = -rref[r, fc]
        vecs.append(v)
    basis = np.array(vecs)
    # Gram-Schmidt; free-column construction already gives independence.
    ortho = []
    for v in basis:
        for u in ortho:
            v = v - np.dot(v, u) * u
        nv = np.linalg.norm(v)
        if nv > 0:
            ortho.append(v / nv)
    return np.array(ortho)
