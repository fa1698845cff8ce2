import numpy as np
import pytest

from magk.clifford import clifford_group, ko_from_clifford, real_module_characters, restriction_map
from magk.kcoeff import KO_TABLE


@pytest.mark.parametrize("j", range(1, 6))
def test_generators_square_to_minus_one_and_anticommute(j):
    G = clifford_group(j)
    m = 2 ** j
    minus = m  # the element -1
    gens = [1 << i for i in range(j)]
    for x in gens:
        assert G.mul[x, x] == minus
    for x in gens:
        for y in gens:
            if x != y:
                assert G.mul[x, y] == G.mul[G.mul[y, x], minus]


@pytest.mark.parametrize("j", range(0, 6))
def test_module_characters_are_real(j):
    chars = real_module_characters(j)
    assert np.isrealobj(chars) or np.allclose(np.imag(chars), 0)


@pytest.mark.parametrize("k", range(8))
def test_counting_oracle_reproduces_table(k):
    assert ko_from_clifford(k) == KO_TABLE[k]


def test_oracle_range():
    with pytest.raises(ValueError):
        ko_from_clifford(8)


def test_restriction_map_is_integral():
    for j in range(1, 6):
        M = restriction_map(j)
        assert M.dtype.kind in "iuO"
        assert (np.asarray(M) >= 0).all()
