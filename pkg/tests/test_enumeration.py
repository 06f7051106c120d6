import itertools
from math import gcd

import pytest

from ggvol import constructions as C
from ggvol.enumeration import (SubgroupCatalog, cyclic_quotients, descending_chain, enumerate_homs,
                               is_torsion_free_kernel, kernel_key, kernels_equal,
                               make_quotient, normal_subgroups, quotient_sort_key)
from ggvol.errors import ResourceError
from ggvol.permgroup import (FiniteGroup, cyclic_group, pair_closure, perm_from_cycles,
                             perm_mul, symmetric_group)
from ggvol.presentation import Presentation

F2 = Presentation.parse(["a", "b"])


def _small_groups(n):
    """Groups of order n <= 6 up to isomorphism, as permutation groups."""
    out = [cyclic_group(n)]
    if n == 4:
        out.append(FiniteGroup(4, [perm_from_cycles("(0 1)(2 3)", 4),
                                   perm_from_cycles("(0 2)(1 3)", 4)]))
    if n == 6:
        out.append(symmetric_group(3))
    return out


def _automorphism_count(G):
    """Brute force: generator tuples of G that satisfy the same relations as G's own."""
    gens = G.generators
    # an automorphism is determined by images of gens; it must be a bijective hom
    count = 0
    elements = G.elements
    for imgs in itertools.product(elements, repeat=len(gens)):
        table = {G.identity: G.identity}
        frontier = [G.identity]
        ok = True
        while frontier and ok:
            x = frontier.pop()
            for g, h in zip(gens, imgs):
                y, z = G.mul(x, g), G.mul(table[x], h)
                if y in table:
                    ok = table[y] == z
                    if not ok:
                        break
                else:
                    table[y] = z
                    frontier.append(y)
        if ok and len(set(table.values())) == G.order:
            count += 1
    return count


def _normal_count_oracle(n):
    total = 0
    for Q in _small_groups(n):
        epis = sum(1 for a, b in itertools.product(Q.elements, repeat=2)
                   if FiniteGroup(Q.degree, [a, b]).order == Q.order)
        aut = _automorphism_count(Q)
        assert epis % aut == 0
        total += epis // aut
    return total


def test_free_group_counts_against_oracle():
    c = normal_subgroups(F2, 6)
    by_index = {}
    for q in c:
        by_index[q.index] = by_index.get(q.index, 0) + 1
    for n in range(1, 7):
        assert by_index[n] == _normal_count_oracle(n)


def test_free_group_counts_to_twelve():
    c = normal_subgroups(F2, 12)
    counts = [sum(1 for q in c if q.index == n) for n in range(1, 13)]
    assert counts == [1, 3, 4, 7, 6, 15, 8, 19, 13, 21, 12, 41]


def _jordan2(k):
    return sum(1 for a in range(k) for b in range(k) if gcd(gcd(a, b), k) == 1)


def _euler_phi(k):
    return sum(1 for a in range(1, k + 1) if gcd(a, k) == 1)


def test_cyclic_quotient_counts():
    c = cyclic_quotients(F2, 12)
    for k in range(1, 13):
        assert sum(1 for q in c if q.index == k) == _jordan2(k) // _euler_phi(k)


def test_modular_catalog_to_24():
    Y = C.modular()
    c = normal_subgroups(Y.ambient, 24)
    assert [q.index for q in sorted(c, key=quotient_sort_key)] == [1, 2, 3, 6, 6, 12, 18, 24, 24]
    keys = {kernel_key(q) for q in c}
    assert len(keys) == len(c)


def test_modular_catalog_is_complete_for_s4_images():
    Y = C.modular()
    c = normal_subgroups(Y.ambient, 24)
    S4 = symmetric_group(4)
    for m in enumerate_homs(Y.ambient, S4):
        q = make_quotient(Y.ambient, 4, m.images, "x")
        assert any(kernels_equal(q, r) for r in c)


def test_infinite_dihedral_catalog():
    c = normal_subgroups(C.infinite_dihedral().ambient, 12)
    counts = {n: sum(1 for q in c if q.index == n) for n in range(1, 13)}
    assert counts[2] == 3
    assert all(counts[n] == 1 for n in (4, 6, 8, 10, 12))
    assert all(counts[n] == 0 for n in (3, 5, 7, 9, 11))


def test_surface_group_index_two_and_three():
    c = normal_subgroups(C.surface_amalgam(2).ambient, 3)
    assert sum(1 for q in c if q.index == 2) == 15
    assert sum(1 for q in c if q.index == 3) == 40


def test_node_cap():
    with pytest.raises(ResourceError) as info:
        normal_subgroups(F2, 12, node_cap=50)
    assert info.value.cap_name


def test_candidate_cap():
    with pytest.raises(ResourceError):
        enumerate_homs(F2, symmetric_group(4), cap=10)


def test_torsion_free_detection():
    Y = C.modular()
    c = normal_subgroups(Y.ambient, 6)
    flags = {q.id: is_torsion_free_kernel(Y, q) for q in c}
    assert flags == {"N1.1": False, "N2.1": False, "N3.1": False, "N6.1": True, "N6.2": True}


def test_chain_is_descending():
    Y = C.infinite_dihedral()
    c = normal_subgroups(Y.ambient, 8)
    steps = descending_chain(c)
    indices = [s.quotient.index for s in steps]
    assert indices == sorted(indices)
    # each step's kernel lies in every catalog kernel of index <= n, so the
    # joint image of (step, q) is no bigger than the step's image
    for s in steps:
        for q in c:
            if q.index <= s.n:
                closure = pair_closure(s.quotient.images, q.images, perm_mul, perm_mul,
                                       s.quotient.image.identity, q.image.identity)
                assert len(closure) == s.quotient.index


def test_chain_product_cap():
    c = normal_subgroups(F2, 4)
    with pytest.raises(ResourceError):
        descending_chain(c, product_cap=10)
    assert len(descending_chain(c, product_cap=10, truncate=True)) < 4


def test_hom_counts():
    assert len(enumerate_homs(F2, cyclic_group(2))) == 4
    Z2 = Presentation.parse(["a"], ["a^2"])
    assert len(enumerate_homs(Z2, cyclic_group(3))) == 1
    assert len(enumerate_homs(C.modular().ambient, symmetric_group(3))) == 12


def test_kernels_equal_examples():
    Z2 = cyclic_group(2)
    x, e = Z2.generators[0], Z2.identity
    q1 = make_quotient(F2, 2, [x, e], "p")
    q2 = make_quotient(F2, 2, [e, x], "q")
    q3 = make_quotient(F2, 3, [cyclic_group(3).generators[0], cyclic_group(3).identity], "r")
    assert kernels_equal(q1, q1)
    assert not kernels_equal(q1, q2)
    assert not kernels_equal(q1, q3)


def test_infinite_cyclic_catalog_and_chain():
    Z = Presentation.parse(["t"])
    c = normal_subgroups(Z, 4)
    assert [q.index for q in c] == [1, 2, 3, 4]
    assert [s.quotient.index for s in descending_chain(c)] == [1, 2, 6, 12]
    assert [q.index for q in normal_subgroups(Z, 1)] == [1]


def test_chain_of_single_entry():
    Y = C.modular()
    q = normal_subgroups(Y.ambient, 6).get("N6.1")
    steps = descending_chain(SubgroupCatalog((q,), 6))
    assert [s.quotient.index for s in steps] == [1, 1, 1, 1, 1, 6]


def test_dihedral_index_two():
    c = normal_subgroups(C.infinite_dihedral().ambient, 2)
    assert sorted(q.index for q in c) == [1, 2, 2, 2]
