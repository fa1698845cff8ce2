from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, strategies as st

from magk.catalog import load_action_spec, load_group
from magk.errors import NotAnAction, NotNormalizing, SchemaError
from magk.groups import FiniteGroup, build_semidirect, builtin_c4t_sz, semidirect_table
from magk.torus import (C4T_MAP, AffineMap, AffineTorusAction, builtin_c4t_action,
                        delocalized_rank, fixed_set, involution_rank,
                        magnetic_invariant_rank_spinsplit, mayer_vietoris_c2, spin_sectors)

HALF = F(1, 2)
MINUS = AffineMap(((-1, 0), (0, -1)))


def cyclic(n):
    return FiniteGroup(semidirect_table(n, 1, 1))


def trivial_group():
    return FiniteGroup(np.array([[0]]))


def c2_action():
    return AffineTorusAction.from_generators(cyclic(2), {1: MINUS})


def test_affine_map_basics():
    m = AffineMap(((0, 1), (-1, 0)), (HALF, 0))
    assert m.det == 1 and m.trace == 0
    assert m((F(1, 4), 0)) == (F(1, 2), F(3, 4))
    assert m.compose(m.inverse()) == AffineMap.identity()
    assert AffineMap.from_json(m.to_json()) == m
    with pytest.raises(SchemaError) as err:
        AffineMap.from_json({"A": [[1, 0]], "v": [0, 0]}, "/maps/1")
    assert err.value.detail["pointer"].startswith("/maps/1")


def test_validate_examples():
    c2_action()
    G, ext = builtin_c4t_sz()
    assert builtin_c4t_action(ext).maps[1].A == C4T_MAP.A
    with pytest.raises(NotAnAction):
        AffineTorusAction.from_generators(cyclic(2), {1: AffineMap(((2, 0), (0, 1)))})
    with pytest.raises(NotAnAction):
        # order-4 map cannot represent an element of order 2
        AffineTorusAction.from_generators(cyclic(2), {1: C4T_MAP})


def test_fixed_set_examples():
    z2 = cyclic(2)
    ident = AffineTorusAction.from_generators(z2, {1: AffineMap.identity()})
    assert fixed_set(ident, 0).kind == "whole-torus"
    fs = fixed_set(c2_action(), 1)
    assert fs.kind == "points"
    assert set(fs.points) == {(0, 0), (HALF, 0), (0, HALF), (HALF, HALF)}
    rot = AffineTorusAction.from_generators(cyclic(4), {1: C4T_MAP})
    assert len(fixed_set(rot, 1).points) == 2
    assert len(fixed_set(rot, 2).points) == 4


def test_reflections_and_glides():
    z2 = cyclic(2)
    mirror = AffineTorusAction.from_generators(z2, {1: AffineMap(((1, 0), (0, -1)))})
    fs = fixed_set(mirror, 1)
    assert fs.kind == "circles" and len(fs.points) == 2
    assert fs.component_of((F(1, 3), 0)) != fs.component_of((F(1, 3), HALF))
    glide = AffineTorusAction.from_generators(z2, {1: AffineMap(((1, 0), (0, -1)), (HALF, 0))})
    assert fixed_set(glide, 1).count == 0
    shift = AffineTorusAction.from_generators(z2, {1: AffineMap(((1, 0), (0, 1)), (HALF, 0))})
    assert fixed_set(shift, 1).count == 0


@pytest.mark.parametrize("group, gens, expect", [
    (trivial_group(), {}, (2, 2)),
    (cyclic(2), {1: MINUS}, (6, 0)),
    (cyclic(2), {1: AffineMap.identity()}, (4, 4)),
    (cyclic(4), {1: C4T_MAP}, (9, 0)),
    (cyclic(2), {1: AffineMap(((1, 0), (0, -1)))}, (3, 3)),
    (cyclic(2), {1: AffineMap(((0, 1), (1, 0)))}, (2, 2)),
    (cyclic(2), {1: AffineMap(((1, 0), (0, -1)), (HALF, 0))}, (1, 1)),
])
def test_delocalized_ranks(group, gens, expect):
    action = AffineTorusAction.from_generators(group, gens)
    r = delocalized_rank(group, action)
    assert (r.rank_even, r.rank_odd) == expect


def test_c2_sector_breakdown():
    r = delocalized_rank(cyclic(2), c2_action())
    assert [(e, o) for _, e, o in r.sectors] == [(2, 0), (4, 0)]


def test_mayer_vietoris_matches_sector_sum():
    mv = mayer_vietoris_c2()
    assert mv["ker_alpha0"] == 5 and mv["coker_alpha1"]["free_rank"] == 1
    r = delocalized_rank(cyclic(2), c2_action())
    assert (mv["rank_even"], mv["rank_odd"]) == (r.rank_even, r.rank_odd) == (6, 0)


def test_euler_characteristic_is_fixed_point_average():
    # rank_even - rank_odd equals the orbifold Euler number for finite actions
    for n, A in ((2, MINUS.A), (4, C4T_MAP.A), (3, ((0, -1), (1, -1))), (6, ((1, -1), (1, 0)))):
        G = cyclic(n)
        action = AffineTorusAction.from_generators(G, {1: AffineMap(A)})
        r = delocalized_rank(G, action)
        total = sum(_euler(action, g, h, G)
                    for g in range(n) for h in range(n))
        assert r.rank_even - r.rank_odd == total // n


def _euler(action, g, h, G):
    # commuting pairs with a common fixed point counted by Lefschetz
    if G.mul[g, h] != G.mul[h, g]:
        return 0
    fs = fixed_set(action, g)
    if fs.kind == "whole-torus":
        m = action.maps[h]
        return 1 + m.det - m.trace
    if fs.kind == "points":
        return sum(action.maps[h](p) == p for p in fs.points)
    raise AssertionError("circles are not expected for rotations")


@given(st.permutations(list(range(1, 4))))
def test_rank_is_label_independent(rest):
    G = cyclic(4)
    action = AffineTorusAction.from_generators(G, {1: C4T_MAP})
    perm = np.array([0] + list(rest))
    H = G.relabel(perm)
    moved = action.relabel(perm)
    r1, r2 = delocalized_rank(G, action), delocalized_rank(H, moved)
    assert (r1.rank_even, r1.rank_odd) == (r2.rank_even, r2.rank_odd)


def test_involution_rank_examples():
    triv = trivial_group()
    action = AffineTorusAction.from_generators(triv, {})
    assert involution_rank(triv, action, AffineMap.identity()).rank_even == 1
    assert involution_rank(triv, action, C4T_MAP).rank_even == 1
    r = involution_rank(cyclic(2), c2_action(), C4T_MAP)
    assert r.involutive and (r.rank_even, r.rank_odd) == (4, 0)
    assert involution_rank(cyclic(2), c2_action(), C4T_MAP, "direct").involutive


def test_involution_must_normalize():
    mirror = AffineTorusAction.from_generators(cyclic(2), {1: AffineMap(((1, 0), (0, -1)))})
    with pytest.raises(NotNormalizing):
        involution_rank(cyclic(2), mirror, C4T_MAP)


def test_spin_split_chain():
    report = spin_sectors()
    assert report.sector_sizes == (2, 2)
    assert report.involution_swaps
    assert report.quotient_order == 2
    assert (report.sector.rank_even, report.sector.rank_odd) == (6, 0)
    assert report.two_sector_total == (12, 0)
    inv = magnetic_invariant_rank_spinsplit()
    assert (inv.rank_even, inv.rank_odd) == (6, 0)


def test_catalog_actions_load():
    z2 = load_group("z2").group
    assert delocalized_rank(z2, AffineTorusAction.from_json(z2, load_action_spec("c2"))).rank_even == 6
    G, ext = builtin_c4t_sz()
    lifted = AffineTorusAction.from_json(load_group("c4t-sz").group, load_action_spec("c4t"))
    assert lifted.maps[1].A == C4T_MAP.A
