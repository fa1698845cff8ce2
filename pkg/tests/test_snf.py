from itertools import combinations
from math import gcd

import numpy as np
import pytest
import sympy
from hypothesis import given, strategies as st

from magk.snf import cokernel, integer_rank, invariant_factors, smith_normal_form


@st.composite
def int_matrices(draw):
    m, n = draw(st.integers(1, 4)), draw(st.integers(1, 4))
    rows = draw(st.lists(st.lists(st.integers(-6, 6), min_size=n, max_size=n), min_size=m, max_size=m))
    return np.array(rows, dtype=object)


def determinantal_factors(a):
    """Invariant factors as ratios of gcds of k x k minors (independent oracle)."""
    M = sympy.Matrix(a.tolist())
    m, n = M.shape
    divisors = [1]
    for k in range(1, min(m, n) + 1):
        g = 0
        for rows in combinations(range(m), k):
            for cols in combinations(range(n), k):
                g = gcd(g, int(M.extract(list(rows), list(cols)).det()))
        if g == 0:
            break
        divisors.append(g)
    return [divisors[i] // divisors[i - 1] for i in range(1, len(divisors))]


@given(int_matrices())
def test_normal_form_certificate(a):
    d, u, v = smith_normal_form(a)
    assert (u.dot(a).dot(v) == d).all()
    assert abs(int(sympy.Matrix(u.tolist()).det())) == 1
    assert abs(int(sympy.Matrix(v.tolist()).det())) == 1
    diag = [int(d[i, i]) for i in range(min(d.shape))]
    off = d.copy()
    for i in range(min(d.shape)):
        off[i, i] = 0
    assert not off.any()
    nonzero = [x for x in diag if x]
    assert all(x > 0 for x in nonzero)
    assert diag[:len(nonzero)] == nonzero
    assert all(b % a_ == 0 for a_, b in zip(nonzero, nonzero[1:]))


@given(int_matrices())
def test_matches_determinantal_divisors(a):
    assert invariant_factors(a) == determinantal_factors(a)
    assert integer_rank(a) == sympy.Matrix(a.tolist()).rank()


@pytest.mark.parametrize("matrix, expected", [
    ([[2, 0], [0, 3]], (0, [6])),
    ([[2]], (0, [2])),
    ([[1], [1]], (1, [])),
    ([[0, 0], [0, 0]], (2, [])),
    ([[2, 4, 4], [-6, 6, 12], [10, -4, -16]], (0, [2, 6, 12])),
])
def test_cokernel_examples(matrix, expected):
    assert cokernel(np.array(matrix, dtype=object)) == expected
