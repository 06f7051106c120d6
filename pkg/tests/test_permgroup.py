import itertools

import pytest
from hypothesis import given, settings, strategies as st

from ggvol import permgroup as pg
from ggvol.errors import InvalidMarkingError, ResourceError

perms4 = st.permutations(range(4)).map(tuple)


@given(perms4, perms4, perms4)
def test_perm_mul_associative(x, y, z):
    assert pg.perm_mul(pg.perm_mul(x, y), z) == pg.perm_mul(x, pg.perm_mul(y, z))


@given(perms4)
def test_perm_inverse(x):
    e = pg.identity_perm(4)
    assert pg.perm_mul(x, pg.perm_inv(x)) == e
    assert pg.perm_from_cycles(pg.perm_to_cycles(x), 4) == x


def test_right_action():
    x = pg.perm_from_cycles("(0 1)", 3)
    y = pg.perm_from_cycles("(1 2)", 3)
    # x first, then y: 0 -> 1 -> 2
    assert pg.perm_mul(x, y)[0] == 2


def test_orders():
    assert pg.symmetric_group(4).order == 24
    assert pg.cyclic_group(7).order == 7
    assert pg.trivial_group().is_trivial
    assert pg.perm_order(pg.perm_from_cycles("(0 1)(2 3 4)")) == 6


def test_element_cap():
    with pytest.raises(ResourceError) as info:
        pg.FiniteGroup(5, pg.symmetric_group(5).generators, cap=50)
    assert info.value.cap_name == "element_cap"


@settings(max_examples=30)
@given(st.lists(perms4, min_size=1, max_size=3))
def test_cosets_partition(gens):
    G = pg.symmetric_group(4)
    S = pg.subgroup_generated(G, gens)
    cosets = pg.coset_space(G, S)
    assert len(cosets) * S.order == G.order
    seen = set()
    for c in cosets:
        members = {G.mul(c.representative, h) for h in S.sorted_members()}
        assert c.representative == min(members)
        assert not (members & seen)
        seen |= members
    assert len(seen) == G.order


def test_lagrange_over_all_cyclic_subgroups():
    G = pg.symmetric_group(4)
    for g in G.elements:
        S = pg.subgroup_generated(G, [g])
        assert G.order % S.order == 0
        assert S.order == pg.perm_order(g)


def test_hom_table_and_kernel():
    S3 = pg.symmetric_group(3)
    Z2 = pg.cyclic_group(2)
    sign = [Z2.generators[0] if sum(1 for i, j in itertools.combinations(range(3), 2)
                                    if g[i] > g[j]) % 2 else Z2.identity
            for g in S3.generators]
    rk = pg.restricted_kernel(S3, sign, Z2)
    assert rk.kernel.order == 3
    assert rk.image_order == 2
    with pytest.raises(InvalidMarkingError):
        pg.hom_table(pg.cyclic_group(3), [Z2.generators[0]], Z2)


def test_min_generators():
    assert pg.min_generators(pg.cyclic_group(6)) == 1
    assert pg.min_generators(pg.symmetric_group(3)) == 2
    assert pg.min_generators(pg.trivial_group()) == 0
    klein = pg.FiniteGroup(4, [pg.perm_from_cycles("(0 1)(2 3)", 4),
                               pg.perm_from_cycles("(0 2)(1 3)", 4)])
    assert pg.min_generators(klein) == 2


def test_direct_product_orders():
    Z2, Z3 = pg.cyclic_group(2), pg.cyclic_group(3)
    P, gens = pg.direct_product([Z2, Z3], [[Z2.generators[0], Z3.generators[0]]])
    assert P.order == 6
    P2, _ = pg.direct_product([Z2, Z2], [[Z2.generators[0], Z2.generators[0]]])
    assert P2.order == 2
