import random
from dataclasses import replace
from fractions import Fraction

import pytest

from ggvol import constructions as C
from ggvol import covering as cov
from ggvol import gog
from ggvol import volumes as V
from ggvol.enumeration import SubgroupCatalog, cyclic_quotients, make_quotient, normal_subgroups
from ggvol.errors import Inapplicable, PreconditionError, UnsupportedConfigurationError
from ggvol.gog import FreeRank, GraphOfGroups, SurfaceGenus, Vertex
from ggvol.randomcorpus import random_quotient, random_splitting


@pytest.mark.parametrize("make, value", [
    (C.modular, Fraction(1, 6)),
    (C.sl2z, Fraction(1, 12)),
    (C.infinite_dihedral, Fraction(0)),
    (lambda: C.wedge(2), Fraction(1)),
    (lambda: C.wedge(4), Fraction(3)),
    (lambda: C.rose(2), Fraction(1)),
    (lambda: C.free_product_finite_cyclics(2, 2, 3), Fraction(2, 3)),
    (lambda: C.amalgam_finite_cyclics(6, 4, 2), Fraction(1, 2) - Fraction(1, 6) - Fraction(1, 4)),
])
def test_closed_forms(make, value):
    assert V.closed_form_vfin(make()).value == value


def test_closed_form_preconditions():
    with pytest.raises(Inapplicable):
        V.closed_form_vfin(C.surface_amalgam(2))
    with pytest.raises(Inapplicable):
        V.closed_form_vfin(GraphOfGroups((Vertex("v", FreeRank(2)),)))
    with pytest.raises(Inapplicable):
        V.closed_form_vfin(C.amalgam_finite_cyclics(2, 4, 2))


def test_amalgam_formulas_are_additive():
    # Z/4 *_{Z/2} Z/6 from its parts
    a, b = V.finite_group_volume(4).value, V.finite_group_volume(6).value
    whole = V.closed_form_amalgam(-a, -b, 2).value
    assert whole == V.closed_form_vfin(C.amalgam_finite_cyclics(4, 6, 2)).value
    assert V.closed_form_amalgam(Fraction(1), None, 3, hnn=True).value == Fraction(4, 3)
    with pytest.raises(PreconditionError):
        V.closed_form_amalgam(1, None, 2)


def test_cmax_oracle():
    assert V.cmax_oracle(C.modular()) == 2
    assert V.cmax_oracle(C.wedge(3)) == 3
    assert V.cmax_oracle(C.rose(2)) == 2
    assert V.cmax_oracle(FreeRank(5)) == 5
    assert V.cmax_oracle(SurfaceGenus(2)) == 1
    with pytest.raises(UnsupportedConfigurationError):
        V.cmax_oracle(C.surface_amalgam(2))


def test_plain_estimate_wedge():
    Y = C.wedge(2)
    est = V.estimate_volume(Y, cyclic_quotients(Y.ambient, 6), chain=False)
    for r in est.rows:
        assert r.ratio == 1 + Fraction(1, r.index)
        assert r.residual == Fraction(1, r.index)


def test_weighted_estimate_surface():
    Y = C.surface_amalgam(2)
    est = V.estimate_volume(Y, cyclic_quotients(Y.ambient, 3), "weighted", gog.VFIN_PHI,
                            chain=False)
    assert est.closed_form is None
    assert min(r.ratio for r in est.rows) >= 2


def test_skipped_rows_are_reported():
    Y = C.sl2z()
    est = V.estimate_volume(Y, normal_subgroups(Y.ambient, 2), chain=False)
    assert {q for q, _ in est.skipped} == {"N1.1", "N2.1"}


def test_unknown_mode():
    Y = C.modular()
    with pytest.raises(PreconditionError):
        V.quotient_complexity(Y, normal_subgroups(Y.ambient, 1).get("N1.1"), "bogus", gog.ZERO_PHI)


def test_weidmann_surface():
    res = V.check_weidmann(C.surface_amalgam(2))
    assert res.satisfied
    assert res.rhs == Fraction(11, 5)
    with pytest.raises(Inapplicable):
        V.check_weidmann(C.modular())


def test_acylindrical_checks_on_surface_covers():
    Y = C.surface_amalgam(2)
    for q in normal_subgroups(Y.ambient, 3):
        s = cov.induce(Y, q)
        assert V.check_acyl_accessibility(s).satisfied
        assert V.check_rank_sum_bound(s).satisfied


def test_vfinm_bound():
    Y = C.modular()
    est = V.estimate_volume(Y, normal_subgroups(Y.ambient, 12))
    res = V.check_vfinm_bound(est, V.max_finite_edge_order(Y), V.generator_upper_bound(Y))
    assert res.satisfied and res.rhs == 3


def test_multiplicativity_modular():
    Y = C.modular()
    for q in normal_subgroups(Y.ambient, 12):
        res = V.check_multiplicativity(Y, q)
        assert res.satisfied and res.lhs == Fraction(q.index, 6)


def test_weighted_lower_bound_surface():
    Y = C.surface_amalgam(2)
    cat = cyclic_quotients(Y.ambient, 3)
    res = V.weighted_lower_bound_check(Y, cat, gog.VFIN_PHI, "S")
    assert res.satisfied and res.rhs == 1


def test_random_checks_hold():
    rng = random.Random(5)
    for _ in range(120):
        Y = random_splitting(rng)
        q = random_quotient(rng, Y)
        s = cov.induce(Y, q)
        for check in (lambda: V.check_weidmann(Y), lambda: V.check_acyl_accessibility(s),
                      lambda: V.check_rank_sum_bound(s), lambda: V.check_multiplicativity(Y, q)):
            try:
                assert check().satisfied
            except (Inapplicable, PreconditionError):
                pass


def test_estimate_single_catalog():
    Y = C.modular()
    cat = SubgroupCatalog((normal_subgroups(Y.ambient, 6).get("N6.2"),), 6)
    est = V.estimate_volume(Y, cat)
    assert est.rows[0].ratio == Fraction(1, 3)
    assert est.estimate == est.chain[-1].ratio


def test_amalgam_formula_values():
    assert V.closed_form_amalgam(1, 1, 1).value == 3
    assert V.closed_form_amalgam(0, None, 2, hnn=True).value == Fraction(1, 2)
    assert V.closed_form_amalgam(Fraction(1, 6), Fraction(1, 6), 6).value == Fraction(1, 2)
    assert [V.finite_group_volume(n).value for n in (1, 2, 6)] == [1, Fraction(1, 2), Fraction(1, 6)]


def test_cmax_small_classes():
    assert V.cmax_oracle(FreeRank(2)) == 2
    assert V.cmax_oracle(gog.CyclicZ()) == 1
    assert V.cmax_oracle(C.free_product_finite_cyclics(3, 3)) == 2


def test_surface_cover_of_degree_three():
    Y = C.surface_amalgam(2)
    k = 3
    shift = tuple((i + 1) % k for i in range(k))
    q = make_quotient(Y.ambient, k, [shift] + [tuple(range(k))] * 3, "k3")
    s = cov.induce(Y, q)
    assert s.weighted_complexity() == 10
    acc = V.check_acyl_accessibility(s)
    assert (acc.lhs, acc.rhs) == (4, 37)
    rs = V.check_rank_sum_bound(s)
    assert (rs.lhs, rs.rhs) == (10, 14) and rs.satisfied
    ident = cov.induce(Y, normal_subgroups(Y.ambient, 1).get("N1.1"))
    assert (V.check_acyl_accessibility(ident).rhs, V.check_rank_sum_bound(ident).rhs) == (13, 8)


def test_weidmann_needs_nontrivial_edges():
    with pytest.raises(PreconditionError):
        V.check_weidmann(replace(C.modular(), acylindricity_k=0))


def test_rank_sum_inapplicable_without_edges():
    Y = replace(C.surface_amalgam(2), acylindricity_k=2)
    q = normal_subgroups(Y.ambient, 1).get("N1.1")
    s = cov.induce(Y, q)
    lone = replace(s, base=GraphOfGroups((Vertex("v", FreeRank(2)),), acylindricity_k=2))
    with pytest.raises(Inapplicable):
        V.check_rank_sum_bound(lone, r_upper=2)


def test_vfinm_bound_on_free_group_table():
    Y = C.wedge(2)
    est = V.estimate_volume(Y, cyclic_quotients(Y.ambient, 6), chain=False)
    res = V.check_vfinm_bound(est, 1, V.generator_upper_bound(Y))
    assert res.satisfied and res.rhs == 3
    empty = V.VolumeEstimate("plain", "zero", (), (), None, (), None)
    assert V.check_vfinm_bound(empty, 1, 2).satisfied


def test_multiplicativity_dihedral_index_two():
    Y = C.infinite_dihedral()
    for q in normal_subgroups(Y.ambient, 2):
        res = V.check_multiplicativity(Y, q)
        assert res.satisfied and res.lhs == 0
