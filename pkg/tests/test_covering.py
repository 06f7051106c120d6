import random
from dataclasses import replace
from fractions import Fraction

import pytest

from ggvol import constructions as C
from ggvol import covering as cov
from ggvol import gog
from ggvol.enumeration import (cyclic_quotients, is_torsion_free_kernel, make_quotient,
                               normal_subgroups, trivial_quotient)
from ggvol.errors import InvalidMarkingError, PreconditionError
from ggvol.permgroup import FiniteGroup, cyclic_group
from ggvol.presentation import Presentation
from ggvol.randomcorpus import random_quotient, random_splitting


def _image_order(q, words):
    """|q(<words>)| by closing the images directly."""
    imgs = [q.map(w) for w in words]
    return FiniteGroup(q.image.degree, imgs).order


def test_modular_index_six():
    Y = C.modular()
    q = normal_subgroups(Y.ambient, 6).get("N6.1")
    s = cov.induce(Y, q)
    assert len(s.vertices_over("v1")) == 3
    assert len(s.vertices_over("v2")) == 2
    assert len(s.edges) == 6
    # torsion-free kernel of index 6 is free of rank 1 - 6 * (-1/6) = 2
    assert s.rank == 2
    assert all(v.degenerate for v in s.vertices)


@pytest.mark.parametrize("name, max_index", [
    ("modular", 24), ("infinite_dihedral", 12), ("wedge2", 6), ("sl2z", 12),
    ("surface_amalgam2", 3)])
def test_orbit_sizes_match_oracle(shipped, name, max_index):
    Y = shipped[name]
    for q in normal_subgroups(Y.ambient, max_index):
        s = cov.induce(Y, q)
        for u in Y.vertices:
            assert len(s.vertices_over(u.id)) == q.index // _image_order(q, u.marking)
        for e in Y.edges:
            assert len(s.edges_over(e.id)) == q.index // _image_order(q, e.marking)
        assert cov.coset_count_check(s)
        assert cov.degeneracy_count_check(s)


@pytest.mark.parametrize("name, max_index", [
    ("modular", 24), ("infinite_dihedral", 12), ("sl2z", 24)])
def test_euler_identity_against_direct_count(shipped, name, max_index):
    Y = shipped[name]
    for q in normal_subgroups(Y.ambient, max_index):
        s = cov.induce(Y, q)
        if not is_torsion_free_kernel(Y, q):
            continue
        n = q.index
        lhs = s.rank + len(gog.nondegenerate_vertices(s.graph)) - 1
        rhs = (sum(Fraction(n, e.descriptor.order) for e in Y.edges)
               - sum(Fraction(n, v.descriptor.order) for v in Y.vertices))
        assert lhs == rhs
        assert cov.euler_consistency_check(s)


def test_surface_cyclic_cover_by_hand():
    g = 2
    Y = C.surface_amalgam(g)
    for k in range(2, 7):
        Z = cyclic_group(k)
        shift = Z.generators[0]
        q = make_quotient(Y.ambient, k, [shift] + [Z.identity] * (2 * g - 1), f"k{k}")
        s = cov.induce(Y, q)
        # one vertex over T (rank 1 + k), k copies of S, k copies of the edge
        assert [v.descriptor for v in s.vertices_over("T")] == [gog.FreeRank(1 + k)]
        assert len(s.vertices_over("S")) == k
        assert len(s.edges) == k
        assert s.rank == 0
        assert s.weighted_complexity() == 1 + k + k * (2 * g - 2)


def test_surface_marking_sound_in_every_cyclic_quotient():
    Y = C.surface_amalgam(2)
    for q in cyclic_quotients(Y.ambient, 5):
        cov.induce(Y, q)


def test_bad_marking_is_reported():
    Y = C.modular()
    v1 = Y.vertex("v1")
    bad = replace(Y, vertices=(replace(v1, marking=((2,),)), Y.vertex("v2")))
    q = normal_subgroups(Y.ambient, 6).get("N6.1")
    with pytest.raises(InvalidMarkingError):
        cov.induce(bad, q)


def test_wrong_presentation():
    q = trivial_quotient(Presentation.parse(["a"]))
    with pytest.raises(PreconditionError):
        cov.induce(C.modular(), q)


def test_edge_terms_modular():
    Y = C.modular()
    q = normal_subgroups(Y.ambient, 6).get("N6.1")
    (term,) = cov.edge_terms(Y, q)
    assert term.value == Fraction(1, 6)
    assert term.preimages == ("v1", "v2")


def test_edge_terms_vanish_only_in_equality_case():
    Y = C.infinite_dihedral()
    q = normal_subgroups(Y.ambient, 4).get("N4.1")
    (term,) = cov.edge_terms(Y, q)
    assert term.value == 0
    assert term.equality_explained
    assert cov.edge_terms_check(Y, q)


def test_edge_terms_need_reduced():
    Y = C.wedge(2)
    with pytest.raises(PreconditionError):
        cov.edge_terms(Y, trivial_quotient(Y.ambient))


def test_random_induced_splittings_are_consistent():
    rng = random.Random(11)
    for _ in range(150):
        Y = random_splitting(rng)
        q = random_quotient(rng, Y)
        s = cov.induce(Y, q)
        assert cov.coset_count_check(s)
        assert cov.degeneracy_count_check(s)
        assert sum(len(s.vertices_over(u.id)) for u in Y.vertices) == len(s.vertices)
        R = gog.reduce(Y)
        assert cov.edge_terms_check(R, q)


def test_trivial_quotient_reproduces_base():
    for Y in (C.modular(), C.surface_amalgam(2), C.wedge(2), C.sl2z()):
        s = cov.induce(Y, trivial_quotient(Y.ambient))
        assert len(s.vertices) == len(Y.vertices) and len(s.edges) == len(Y.edges)
        assert s.complexity == gog.complexity(Y)


def test_phi_is_multiplicative_on_induced_vertices():
    rng = random.Random(2)
    for _ in range(100):
        Y = random_splitting(rng)
        q = random_quotient(rng, Y)
        s = cov.induce(Y, q)
        for v in s.vertices:
            base = Y.vertex(v.base_vertex)
            # [G_v : G_v n H] = |q(G_v)| = stabilizer_index
            assert v.phi == v.stabilizer_index * gog.VFIN_PHI.of_vertex(base)
