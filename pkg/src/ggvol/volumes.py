"""Closed-form volumes and the ratio estimator over finite quotients.

The inequality checks run by ``ggvol verify`` live here as well.

All arithmetic is exact (``fractions.Fraction``).
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional

from . import gog
from .covering import InducedSplitting, induce
from .enumeration import (DEFAULT_PRODUCT_CAP, quotient_sort_key, FiniteQuotient, SubgroupCatalog,
                          chain_is_truncated, descending_chain,
                          is_torsion_free_kernel)
from .errors import Inapplicable, PreconditionError, UnsupportedConfigurationError
from .gog import (CyclicZ, Finite, FreeAbelianRank, FreeRank, GraphOfGroups, Opaque,
                  SurfaceGenus)


@dataclass(frozen=True)
class ClosedForm:
    value: Fraction
    formula: str


def finite_group_volume(order: int) -> ClosedForm:
    if order < 1:
        raise PreconditionError("group order must be positive")
    return ClosedForm(Fraction(1, order), "finite: 1/|G|")


def closed_form_amalgam(vA, vB, h_order: int, hnn: bool = False) -> ClosedForm:
    if h_order < 1:
        raise PreconditionError("edge group order must be positive")
    if hnn:
        return ClosedForm(Fraction(vA) + Fraction(1, h_order), "hnn: V(A) + 1/|H|")
    if vB is None:
        raise PreconditionError("an amalgam needs both vertex values")
    return ClosedForm(Fraction(vA) + Fraction(vB) + Fraction(1, h_order),
                      "amalgam: V(A) + V(B) + 1/|H|")


def _one_ended(d) -> bool:
    return (isinstance(d, SurfaceGenus)
            or (isinstance(d, FreeAbelianRank) and d.rank >= 2)
            or (isinstance(d, Opaque) and d.one_ended))


def closed_form_vfin(Y: GraphOfGroups) -> ClosedForm:
    """sum 1/|G_e| - sum 1/|G_v| over finite vertices, plus r-1 per free vertex.

    Free and infinite cyclic vertex groups are handled through the additivity
    of the volume over amalgams along finite groups.  Raises Inapplicable
    when the splitting has no edges or is elliptic.  It also raises when an
    edge group is infinite or a vertex group has no known contribution.
    """
    if not Y.edges:
        raise Inapplicable("closed form needs at least one edge")
    if gog.is_elliptic(Y):
        raise Inapplicable("the splitting is elliptic")
    total = Fraction(0)
    for e in Y.edges:
        if not isinstance(e.descriptor, Finite):
            raise Inapplicable(f"edge {e.id} has an infinite edge group")
        total += Fraction(1, e.descriptor.order)
    for v in Y.vertices:
        d = v.descriptor
        if isinstance(d, Finite):
            total -= Fraction(1, d.order)
        elif isinstance(d, FreeRank):
            total += d.rank - 1
        elif isinstance(d, CyclicZ) or _one_ended(d) or (
                isinstance(d, FreeAbelianRank) and d.rank == 1):
            pass
        else:
            raise Inapplicable(f"vertex {v.id} ({d}) has no closed-form contribution")
    return ClosedForm(total, "edges: sum 1/|G_e| - sum 1/|G_v|")


# ---------------------------------------------------------------------------
# maximal complexity for free products


@dataclass(frozen=True)
class FreeProduct:
    """Free product of freely indecomposable non-cyclic factors and a free group."""

    factors: tuple = ()
    free_rank: int = 0


def grushko_description(Y: GraphOfGroups) -> FreeProduct:
    """Read off the free decomposition of pi_1 of a splitting with trivial edge groups."""
    for e in Y.edges:
        if not (isinstance(e.descriptor, Finite) and e.descriptor.is_trivial):
            raise UnsupportedConfigurationError(
                f"edge {e.id} has a nontrivial edge group; free decomposition unknown")
    factors = []
    s = gog.graph_rank(Y)
    for v in Y.vertices:
        d = v.descriptor
        if isinstance(d, Finite):
            if not d.is_trivial:
                factors.append(d)
        elif isinstance(d, FreeRank):
            s += d.rank
        elif gog.is_cyclic_like(d):
            s += 1
        elif _one_ended(d):
            factors.append(d)
        else:
            raise UnsupportedConfigurationError(f"vertex {v.id}: free factors of {d} unknown")
    return FreeProduct(tuple(factors), s)


def cmax_oracle(d) -> int:
    """Number of Grushko factors (at least 1) for the supported classes."""
    if isinstance(d, GraphOfGroups):
        d = grushko_description(d)
    if isinstance(d, InducedSplitting):
        d = grushko_description(d.graph)
    if isinstance(d, FreeProduct):
        return max(1, len(d.factors) + d.free_rank)
    if isinstance(d, FreeRank):
        return d.rank
    if gog.is_cyclic_like(d):
        return 1
    if isinstance(d, Finite) or _one_ended(d):
        return 1
    raise UnsupportedConfigurationError(f"no maximal-complexity rule for {d}")


# ---------------------------------------------------------------------------
# estimator


@dataclass(frozen=True)
class VolumeRow:
    quotient_id: str
    index: int
    complexity: Fraction
    torsion_free: Optional[bool]
    residual: Optional[Fraction] = None

    @property
    def ratio(self) -> Fraction:
        return self.complexity / self.index


@dataclass(frozen=True)
class VolumeEstimate:
    mode: str
    phi: str
    rows: tuple[VolumeRow, ...]
    chain: tuple[VolumeRow, ...]
    closed_form: Optional[ClosedForm]
    skipped: tuple[tuple[str, str], ...] = ()
    chain_truncated: Optional[str] = None

    @property
    def estimate(self) -> Optional[Fraction]:
        """Ratio at the deepest chain step computed (not a claim about the limit)."""
        return self.chain[-1].ratio if self.chain else None


def quotient_complexity(Y: GraphOfGroups, q: FiniteQuotient, mode: str,
                        phi: gog.PhiTable) -> Fraction:
    s = induce(Y, q, phi)
    if mode == "plain":
        return Fraction(cmax_oracle(s.graph))
    if mode == "weighted":
        return gog.weighted_complexity(gog.reduce(s.graph), phi)
    raise PreconditionError(f"unknown mode {mode!r}")


def _row(Y, q, mode, phi, cf) -> VolumeRow:
    c = quotient_complexity(Y, q, mode, phi)
    try:
        tf = is_torsion_free_kernel(Y, q)
    except UnsupportedConfigurationError:
        tf = None
    residual = c / q.index - cf.value if cf is not None else None
    return VolumeRow(q.id, q.index, c, tf, residual)


def estimate_volume(Y: GraphOfGroups, catalog: SubgroupCatalog, mode: str = "plain",
                    phi: gog.PhiTable = gog.ZERO_PHI, chain: bool = True,
                    product_cap: int = DEFAULT_PRODUCT_CAP) -> VolumeEstimate:
    """Ratios complexity/index over the catalog and along its descending chain.

    In plain mode the complexity is the maximal complexity of the kernel read
    from its induced splitting; quotients whose kernel falls outside the
    supported classes are skipped and listed.  In weighted mode it is the
    weighted complexity of the reduced induced splitting.
    """
    cf = None
    if mode == "plain":
        try:
            cf = closed_form_vfin(Y)
        except Inapplicable:
            cf = None
    rows, skipped = [], []
    for q in sorted(catalog.entries, key=quotient_sort_key):
        try:
            rows.append(_row(Y, q, mode, phi, cf))
        except UnsupportedConfigurationError as exc:
            skipped.append((q.id, str(exc)))
    chain_rows = []
    truncated = None
    if chain:
        steps = descending_chain(catalog, product_cap, truncate=True)
        if chain_is_truncated(catalog, steps):
            truncated = (f"chain stops at n={len(steps)}: the next product exceeds "
                         f"the product cap {product_cap}")
        previous = None
        for st in steps:
            if previous is not None and previous[0] == st.factors:
                # same kernel as the step before
                row = previous[1]
                chain_rows.append(replace(row, quotient_id=st.quotient.id))
                continue
            try:
                row = _row(Y, st.quotient, mode, phi, cf)
            except UnsupportedConfigurationError as exc:
                skipped.append((st.quotient.id, str(exc)))
                previous = None
                continue
            chain_rows.append(row)
            previous = (st.factors, row)
    return VolumeEstimate(mode, phi.name, tuple(rows), tuple(chain_rows), cf,
                          tuple(skipped), truncated)


# ---------------------------------------------------------------------------
# inequality checks


@dataclass(frozen=True)
class CheckResult:
    name: str
    satisfied: bool
    lhs: Fraction
    rhs: Fraction
    detail: str = ""


def generator_upper_bound(Y: GraphOfGroups) -> int:
    if Y.ambient is None:
        raise PreconditionError("generator bound needs an ambient presentation")
    return Y.ambient.rank


def kernel_rank_upper(Y: GraphOfGroups, index: int) -> int:
    """Schreier bound index*(genUpper - 1) + 1 on the rank of an index-`index` subgroup."""
    return index * (generator_upper_bound(Y) - 1) + 1


def _require_k(Y: GraphOfGroups) -> int:
    if Y.acylindricity_k is None:
        raise Inapplicable("no acylindricity constant declared")
    return Y.acylindricity_k


def check_weidmann(Y: GraphOfGroups) -> CheckResult:
    """Generator count against the rank lower bound for k-acylindrical splittings."""
    k = _require_k(Y)
    for e in Y.edges:
        if isinstance(e.descriptor, Finite) and e.descriptor.is_trivial:
            raise PreconditionError(f"edge {e.id} has trivial edge group")
    total = (sum(gog.group_rank(v.descriptor) for v in Y.vertices)
             - sum(gog.group_rank(e.descriptor) for e in Y.edges)
             + 2 * len(Y.edges) + gog.graph_rank(Y) + 1 + 3 * k - k // 2)
    rhs = Fraction(total, 2 * k + 1)
    gen = generator_upper_bound(Y)
    return CheckResult("weidmann rank bound", gen >= rhs, Fraction(gen), rhs,
                       "generator count >= (sum r(G_v) - sum r(G_e) + 2|E| + r(Y) + 1 + 3k - floor(k/2))/(2k+1)")


def check_acyl_accessibility(s: InducedSplitting, r_upper: Optional[int] = None) -> CheckResult:
    k = _require_k(s.base)
    if k < 1:
        raise Inapplicable("accessibility bound needs k >= 1")
    r_upper = r_upper if r_upper is not None else kernel_rank_upper(s.base, s.index)
    bound = 2 * k * (r_upper - 1) + 1
    nv = len(s.graph.vertices)
    return CheckResult("acylindrical accessibility", nv <= bound, Fraction(nv), Fraction(bound),
                       f"|V| <= 2k(r-1)+1 with r <= {r_upper}")


def check_rank_sum_bound(s: InducedSplitting, r_upper: Optional[int] = None) -> CheckResult:
    Y = s.base
    k = _require_k(Y)
    if k < 1:
        raise Inapplicable("rank-sum bound needs k >= 1")
    if not Y.edges:
        raise Inapplicable("no edges")
    for e in Y.edges:
        if not isinstance(e.descriptor, (CyclicZ, FreeAbelianRank)):
            raise Inapplicable(f"edge {e.id} is not free abelian")
    n = Y.edge_rank_bound_n
    r_upper = r_upper if r_upper is not None else kernel_rank_upper(Y, s.index)
    total = sum(gog.group_rank(v.descriptor) for v in s.graph.vertices)
    bound = (2 * k + n) * r_upper + (n - 2) * 2 * k * (r_upper - 1)
    return CheckResult("vertex rank sum", total <= bound, Fraction(total), Fraction(bound),
                       f"sum r(H_v) <= (2k+n)r + (n-2)2k(r-1) with r <= {r_upper}")


def check_vfinm_bound(est: VolumeEstimate, m: int, gen_upper: int) -> CheckResult:
    bound = Fraction(m * gen_upper + 1)
    worst = max((r.ratio for r in est.rows + est.chain), default=Fraction(0))
    return CheckResult("finite-edge volume bound", worst <= bound, worst, bound,
                       f"every ratio <= m*genUpper + 1 with m={m}")


def max_finite_edge_order(Y: GraphOfGroups) -> int:
    orders = [e.descriptor.order for e in Y.edges if isinstance(e.descriptor, Finite)]
    if len(orders) != len(Y.edges):
        raise Inapplicable("an edge group is infinite")
    return max(orders, default=1)


def check_multiplicativity(Y: GraphOfGroups, q: FiniteQuotient) -> CheckResult:
    base = closed_form_vfin(Y)
    s = induce(Y, q)
    up = closed_form_vfin(s.graph)
    want = base.value * q.index
    return CheckResult("closed-form multiplicativity", up.value == want, up.value, want,
                       f"index {q.index}")


def weighted_lower_bound_check(Y: GraphOfGroups, catalog: SubgroupCatalog,
                               phi: gog.PhiTable, vertex_id: str) -> CheckResult:
    """Every weighted ratio over the catalog is at least phi(G_v)."""
    if not gog.is_reduced(Y):
        raise PreconditionError("splitting must be reduced")
    target = phi.of_vertex(Y.vertex(vertex_id))
    if target <= 0:
        raise Inapplicable(f"phi of {vertex_id} is not positive")
    worst = None
    for q in catalog.entries:
        r = quotient_complexity(Y, q, "weighted", phi) / q.index
        if worst is None or r < worst:
            worst = r
    worst = worst if worst is not None else target
    return CheckResult("weighted lower bound", worst >= target, worst, target,
                       f"min ratio >= phi({vertex_id})")
