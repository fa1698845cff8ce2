"""Smith normal form over the integers.

Small dense matrices only (a few dozen rows); entries are Python ints so
nothing overflows.
"""

from __future__ import annotations

import numpy as np

__all__ = ["smith_normal_form", "invariant_factors", "cokernel", "integer_rank"]


def _eye(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith_normal_form(matrix):
    """Return ``(D, U, V)`` with ``U @ A @ V == D``.

    ``U`` and ``V`` are unimodular, ``D`` is diagonal with non-negative
    entries and each diagonal entry divides the next.
    """
    a = [[int(x) for x in row] for row in np.asarray(matrix, dtype=object).tolist()]
    m = len(a)
    n = len(a[0]) if m else 0
    u = _eye(m)
    v = _eye(n)

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, k):  # row_dst += k * row_src
        a[dst] = [x + k * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x + k * y for x, y in zip(u[dst], u[src])]

    def add_col(src, dst, k):
        for row in a:
            row[dst] += k * row[src]
        for row in v:
            row[dst] += k * row[src]

    t = 0
    while t < min(m, n):
        nonzero = [(abs(a[i][j]), i, j) for i in range(t, m) for j in range(t, n) if a[i][j]]
        if not nonzero:
            break
        _, i, j = min(nonzero)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            done = True
            for i in range(t + 1, m):
                if a[i][t]:
                    add_row(t, i, -(a[i][t] // a[t][t]))
                    if a[i][t]:
                        done = False
            for j in range(t + 1, n):
                if a[t][j]:
                    add_col(t, j, -(a[t][j] // a[t][t]))
                    if a[t][j]:
                        done = False
            if done:
                # pivot must divide the remaining block
                bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                            if a[i][j] % a[t][t]), None)
                if bad is None:
                    break
                add_row(bad[0], t, 1)
                continue
            nonzero = [(abs(a[i][j]), i, j) for i in range(t, m) for j in range(t, n)
                       if a[i][j] and (i == t or j == t)]
            _, i, j = min(nonzero)
            swap_rows(t, i)
            swap_cols(t, j)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    return (np.array(a, dtype=object).reshape(m, n),
            np.array(u, dtype=object).reshape(m, m),
            np.array(v, dtype=object).reshape(n, n))


def invariant_factors(matrix) -> list[int]:
    """Non-zero diagonal entries of the Smith normal form."""
    d, _, _ = smith_normal_form(matrix)
    return [int(d[i, i]) for i in range(min(d.shape)) if d[i, i]]


def integer_rank(matrix) -> int:
    arr = np.asarray(matrix, dtype=object)
    if arr.size == 0:
        return 0
    return len(invariant_factors(arr))


def cokernel(matrix) -> tuple[int, list[int]]:
    """Cokernel of ``Z^n -> Z^m`` given by an ``m x n`` matrix.

    Returns ``(free_rank, torsion)`` with the torsion orders ascending.
    """
    arr = np.asarray(matrix, dtype=object)
    m = arr.shape[0]
    if arr.size == 0:
        return m, []
    factors = invariant_factors(arr)
    return m - len(factors), [d for d in factors if d > 1]
