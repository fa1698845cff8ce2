import cmath
from itertools import product

import numpy as np
import pytest
from hypothesis import given, strategies as st

from magk.catalog import load_group
from magk.chars import (character_table, decompose, frobenius_schur, inner_product,
                        irrep_matrices, regular_character, restrict_character)
from magk.errors import GroupMismatch, NotASubgroup
from magk.groups import FiniteGroup, build_semidirect, semidirect_table

CATALOG = ["kr", "z4", "z2xz2", "z8", "c4t-sz", "c4t-sz-ext", "d4-h", "q8", "s3", "dic3",
           "d8", "qd16", "m16", "z6"]


def tables():
    return [character_table(load_group(name).group) for name in CATALOG]


@pytest.fixture(scope="module", params=CATALOG)
def table(request):
    return character_table(load_group(request.param).group)


def test_z2():
    t = character_table(build_semidirect(2, 1, 1, "on_n"))
    assert [[int(v.to_fraction()) for v in r.values] for r in t.rows] == [[1, 1], [1, -1]]
    assert inner_product(t.rows[0], t.rows[1]) == 0


def test_abelian_tables_match_explicit_characters():
    # Z_m x Z_k characters are (i, j) -> w_m^(s i) w_k^(t j)
    for m, k in [(4, 2), (3, 1), (6, 1), (2, 2)]:
        G = FiniteGroup(semidirect_table(m, k, 1))
        t = character_table(G)
        got = {tuple(np.round(r.to_complex()[[G.classes.class_of[g] for g in range(G.n)]], 9))
               for r in t.rows}
        want = set()
        for s, u in product(range(m), range(k)):
            vals = [cmath.exp(2j * cmath.pi * (s * (g % m) / m + u * (g // m) / k)) for g in range(G.n)]
            want.add(tuple(np.round(vals, 9)))
        assert got == want


def test_dihedral_table(d4):
    t = character_table(d4)
    assert t.dims == (1, 1, 1, 1, 2)
    rot = t.classes.class_of[1]
    assert t.rows[4].values[rot] == 0


def test_trivial_character_first(table):
    assert all(v == 1 for v in table.rows[0].values)


def test_row_orthonormality_exact(table):
    rows = table.rows
    for i, a in enumerate(rows):
        for j, b in enumerate(rows):
            assert inner_product(a, b) == (1 if i == j else 0)


def test_column_orthogonality(table):
    x = table.to_complex()
    sizes = np.array(table.class_sizes)
    gram = x.conj().T @ x
    assert np.allclose(gram, np.diag(table.group.n / sizes))


def test_dimensions_divide_order(table):
    n = table.group.n
    assert sum(d * d for d in table.dims) == n
    assert all(n % d == 0 for d in table.dims)
    assert all(v.is_algebraic_integer() for r in table.rows for v in r.values)


def test_regular_character_decomposes_by_degree(d4):
    t = character_table(d4)
    assert decompose(t, regular_character(d4)) == list(t.dims)


@given(st.lists(st.integers(0, 3), min_size=5, max_size=5))
def test_decomposition_round_trip(mults):
    t = character_table(build_semidirect(4, 2, 3, "on_h"))
    f = 0 * t.rows[0]
    for m, chi in zip(mults, t.rows):
        f = f + m * chi
    assert decompose(t, f) == mults


def test_restriction_examples(d4):
    t = character_table(d4)
    rot, emb = d4.subgroup([0, 1, 2, 3])
    st4 = character_table(rot)
    assert restrict_character(d4, rot, emb, t.rows[0]) == st4.rows[0]
    res = restrict_character(d4, rot, emb, t.rows[4])
    parts = decompose(st4, res)
    ones = [i for i, m in enumerate(parts) if m == 1]
    assert len(ones) == 2
    values = sorted(complex(st4.rows[i](1)).imag for i in ones)
    assert values == pytest.approx([-1, 1])
    triv = FiniteGroup(np.array([[0]]))
    assert restrict_character(d4, triv, [0], t.rows[4]).values[0] == 2


def test_restriction_errors(d4):
    t = character_table(d4)
    z2 = build_semidirect(2, 1, 1, "on_n")
    with pytest.raises(NotASubgroup):
        restrict_character(d4, z2, [1, 1], t.rows[0])
    with pytest.raises(NotASubgroup):
        restrict_character(d4, z2, [0, 1], t.rows[0])
    with pytest.raises(GroupMismatch):
        t.rows[0] + character_table(z2).rows[0]


def test_frobenius_schur():
    q8 = load_group("q8").group
    assert [frobenius_schur(r) for r in character_table(q8).rows] == [1, 1, 1, 1, -1]
    d4 = build_semidirect(4, 2, 3, "on_h")
    assert {frobenius_schur(r) for r in character_table(d4).rows} == {1}
    z3 = build_semidirect(3, 2, 1, "on_h").kernel[0]
    assert sorted(frobenius_schur(r) for r in character_table(z3).rows) == [0, 0, 1]


@pytest.mark.parametrize("name", ["d4-h", "q8", "s3", "dic3"])
def test_irrep_matrices(name):
    G = load_group(name).group
    t = character_table(G)
    for index, d in enumerate(t.dims):
        rho = irrep_matrices(t, index)
        assert rho.shape == (G.n, d, d)
        assert np.allclose(rho[G.mul], np.einsum("gab,hbc->ghac", rho, rho))
        assert np.allclose(np.einsum("gab,gcb->gac", rho, rho.conj()), np.eye(d))
