"""Splittings of finite-index normal subgroups induced through finite quotients.

For a marked splitting Y of G and a quotient q: G -> Q with kernel H, the
quotient of the Bass-Serre tree by H has one vertex per coset of q(G_u) in
Q for each base vertex u, and one edge per coset of q(G_e) for each base
edge e.  The edge over ``x q(G_e)`` leaves ``x q(G_s)`` and enters
``x q(t_e) q(G_t)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import gog
from . import presentation as pres
from .enumeration import FiniteQuotient, is_torsion_free_kernel
from .errors import (Inapplicable, InvalidMarkingError, PreconditionError,
                     StructuralError, UnsupportedConfigurationError)
from .gog import (CyclicInclusion, CyclicZ, Edge, Finite, FiniteInclusion, FreeAbelianRank,
                  FreeRank, GraphOfGroups, InfiniteIndex, Opaque, SurfaceGenus, Vertex)
from .permgroup import (Perm, SubgroupRef, coset_lookup, coset_space,
                        hom_table, perm_mul, restricted_kernel, subgroup_generated)


@dataclass(frozen=True)
class InducedVertex:
    id: str
    base_vertex: str
    coset_rep: Perm
    stabilizer_index: int
    descriptor: object
    degenerate: bool
    phi: Fraction


@dataclass(frozen=True)
class InducedEdge:
    id: str
    base_edge: str
    coset_rep: Perm
    stabilizer_index: int
    source: str
    target: str


@dataclass(frozen=True)
class InducedSplitting:
    base: GraphOfGroups
    quotient: FiniteQuotient
    graph: GraphOfGroups
    vertices: tuple[InducedVertex, ...]
    edges: tuple[InducedEdge, ...]
    phi_table: gog.PhiTable

    @property
    def index(self) -> int:
        return self.quotient.index

    @property
    def rank(self) -> int:
        return gog.graph_rank(self.graph)

    @property
    def complexity(self) -> int:
        return gog.complexity(self.graph)

    def weighted_complexity(self, phi: Optional[gog.PhiTable] = None) -> Fraction:
        return gog.weighted_complexity(self.graph, phi or self.phi_table)

    def vertices_over(self, base_vertex: str) -> list[InducedVertex]:
        return [v for v in self.vertices if v.base_vertex == base_vertex]

    def edges_over(self, base_edge: str) -> list[InducedEdge]:
        return [e for e in self.edges if e.base_edge == base_edge]


def _induced_descriptor(d, d_index: int, kernel: Optional[SubgroupRef]):
    if isinstance(d, Finite):
        return Finite(kernel.as_group())
    if isinstance(d, FreeRank):
        return FreeRank(1 + d_index * (d.rank - 1))
    if isinstance(d, (CyclicZ, FreeAbelianRank)):
        return d
    if isinstance(d, SurfaceGenus):
        return SurfaceGenus(1 + d_index * (d.genus - 1))
    if isinstance(d, Opaque):
        return Opaque(d_index * (d.rank_upper - 1) + 1, d.phi * d_index, d.one_ended)
    raise UnsupportedConfigurationError(f"no cover rule for {d}")


def _check_relators(Q, where: str, desc, names, images):
    for r in gog.abstract_relators(desc):
        if pres.evaluate_images(Q, images, r) != Q.identity:
            raise InvalidMarkingError(
                f"{where}: relator {pres.format_word(r, names)!r} does not die in the quotient")


def induce(Y: GraphOfGroups, q: FiniteQuotient, phi: gog.PhiTable = gog.VFIN_PHI) -> InducedSplitting:
    """Build the induced splitting of ker(q) from the marked splitting Y."""
    if Y.ambient is None:
        raise PreconditionError("induce needs a marked splitting with an ambient presentation")
    if q.source != Y.ambient:
        raise PreconditionError("quotient is defined on a different presentation")
    Q = q.image

    # vertex data
    vdata = {}
    for u in Y.vertices:
        imgs = [q.map(w) for w in u.marking]
        where = f"vertex {u.id}"
        _check_relators(Q, where, u.descriptor, u.local_names, imgs)
        kernel = None
        if isinstance(u.descriptor, Finite):
            try:
                rk = restricted_kernel(u.descriptor.group, imgs, Q)
            except InvalidMarkingError as exc:
                raise InvalidMarkingError(f"{where}: {exc}") from exc
            kernel = rk.kernel
        image = subgroup_generated(Q, imgs)
        cosets = coset_space(Q, image)
        vdata[u.id] = (imgs, image, kernel, cosets, coset_lookup(cosets))

    # edge data and marking soundness for inclusions
    edata = {}
    for e in Y.edges:
        imgs = [q.map(w) for w in e.marking]
        t = q.map(e.stable_letter)
        t_inv = Q.inv(t)
        where = f"edge {e.id}"
        _check_relators(Q, where, e.descriptor, [f"x{i+1}" for i in range(e.descriptor.ngens)], imgs)
        for side in gog.SIDES:
            vimgs = vdata[e.end(side)][0]
            for i, w in enumerate(e.words(side)):
                got = pres.evaluate_images(Q, vimgs, w)
                want = imgs[i] if side == "source" else perm_mul(perm_mul(t_inv, imgs[i]), t)
                if got != want:
                    raise InvalidMarkingError(
                        f"{where}: {side} inclusion of generator {i + 1} disagrees with the edge marking")
        kernel = None
        if isinstance(e.descriptor, Finite):
            kernel = restricted_kernel(e.descriptor.group, imgs, Q).kernel
        image = subgroup_generated(Q, imgs)
        edata[e.id] = (imgs, image, kernel, t, coset_space(Q, image))

    vertices = []
    vrecords = []
    vid_of = {}
    for u in Y.vertices:
        imgs, image, kernel, cosets, _ = vdata[u.id]
        d = image.order
        desc = _induced_descriptor(u.descriptor, d, kernel)
        base_phi = u.phi if u.phi is not None else None
        for i, c in enumerate(cosets):
            vid = f"{u.id}.{i}"
            vid_of[(u.id, i)] = vid
            vertices.append(Vertex(vid, desc, phi=None if base_phi is None else base_phi * d))

    edges = []
    erecords = []
    for e in Y.edges:
        imgs, image, kernel, t, cosets = edata[e.id]
        d_e = image.order
        desc = Finite(kernel.as_group()) if isinstance(e.descriptor, Finite) else e.descriptor
        incs = {}
        for side in gog.SIDES:
            u = Y.vertex(e.end(side))
            incs[side] = _lift_inclusion(e, side, u, desc, d_e, vdata[u.id])
        for i, c in enumerate(cosets):
            x = c.representative
            s_idx = vdata[e.source][4][x]
            t_idx = vdata[e.target][4][perm_mul(x, t)]
            eid = f"{e.id}.{i}"
            src, tgt = vid_of[(e.source, s_idx)], vid_of[(e.target, t_idx)]
            edges.append(Edge(eid, src, tgt, desc, inc_source=incs["source"],
                              inc_target=incs["target"]))
            erecords.append(InducedEdge(eid, e.id, x, d_e, src, tgt))
    try:
        graph = GraphOfGroups(tuple(vertices), tuple(edges), None, Y.acylindricity_k,
                              Y.edge_rank_bound_n, name=f"{Y.name}/{q.id}")
    except StructuralError as exc:
        if "not connected" in str(exc):
            raise InvalidMarkingError(
                "the vertex and stable-letter markings do not generate the group") from exc
        raise
    for u in Y.vertices:
        d = vdata[u.id][1].order
        for i, c in enumerate(vdata[u.id][3]):
            v = graph.vertex(vid_of[(u.id, i)])
            vrecords.append(InducedVertex(v.id, u.id, c.representative, d, v.descriptor,
                                          graph.degenerate_map[v.id], phi.of_vertex(v)))
    return InducedSplitting(Y, q, graph, tuple(vrecords), tuple(erecords), phi)


def _lift_inclusion(e: Edge, side: str, u: Vertex, edesc, d_e: int, vd):
    """Inclusion of the edge stabilizer into the vertex stabilizer upstairs."""
    inc = e.inclusion(side)
    _, v_image, v_kernel, _, _ = vd
    if isinstance(inc, InfiniteIndex):
        return InfiniteIndex()
    if isinstance(inc, CyclicInclusion):
        m = inc.index * d_e
        if m % v_image.order:
            raise StructuralError(f"edge {e.id}: inconsistent cyclic indices")
        return CyclicInclusion(m // v_image.order)
    # finite edge into finite vertex
    table = hom_table(e.descriptor.group, inc.images, u.descriptor.group)
    images = tuple(table[g] for g in edesc.group.generators)
    for g in images:
        if g not in v_kernel.members:
            raise InvalidMarkingError(f"edge {e.id}: edge kernel does not land in vertex kernel")
    sub = Finite(v_kernel.as_group())
    # express images in the kernel group's own element set (same permutations)
    if not all(sub.group.contains(g) for g in images):
        raise StructuralError(f"edge {e.id}: lifted inclusion leaves the vertex stabilizer")
    return FiniteInclusion(images)


# ---------------------------------------------------------------------------
# checks


def coset_count_check(s: InducedSplitting) -> bool:
    """Orbit sizes are [G:H]/|q(G_u)| over vertices and [G:H]/|q(G_e)| over edges."""
    n = s.index
    for u in s.base.vertices:
        over = s.vertices_over(u.id)
        if not over or len(over) * over[0].stabilizer_index != n:
            return False
    for e in s.base.edges:
        over = s.edges_over(e.id)
        if not over or len(over) * over[0].stabilizer_index != n:
            return False
    return True


def degeneracy_count_check(s: InducedSplitting) -> bool:
    for u in s.base.vertices:
        flags = {v.degenerate for v in s.vertices_over(u.id)}
        if len(flags) > 1:
            return False
    return True


def euler_consistency_check(s: InducedSplitting) -> bool:
    """``r + |V_ndeg| - 1`` against the orbit-count formula for torsion-free kernels.

    Only torsion-free kernels of splittings with finite edge groups qualify;
    anything else raises Inapplicable.
    """
    Y = s.base
    if not Y.edges:
        raise Inapplicable("no edges")
    if not all(isinstance(e.descriptor, Finite) for e in Y.edges):
        raise Inapplicable("an edge group is infinite")
    try:
        tf = is_torsion_free_kernel(Y, s.quotient)
    except UnsupportedConfigurationError as exc:
        raise Inapplicable(str(exc)) from exc
    if not tf:
        raise Inapplicable("kernel has torsion")
    n = s.index
    lhs = gog.raw_complexity(s.graph) - 1
    rhs = sum(Fraction(n, e.descriptor.order) for e in Y.edges)
    rhs -= sum(Fraction(n, v.descriptor.order) for v in Y.vertices
               if isinstance(v.descriptor, Finite))
    return lhs == rhs


@dataclass(frozen=True)
class EdgeTerm:
    edge: str
    value: Fraction
    preimages: tuple[str, ...]
    equality_explained: bool


def degeneracy_assignment(s: InducedSplitting) -> dict:
    """psi: each H-degenerate base vertex -> least witnessing incident base edge."""
    psi = {}
    g = s.graph
    for u in s.base.vertices:
        over = s.vertices_over(u.id)
        if not over[0].degenerate:
            continue
        rep = over[0].id
        witnesses = sorted({s_edge.base_edge for s_edge in s.edges
                            for side in gog.SIDES
                            if getattr(s_edge, side) == rep
                            and g.end_surjective(g.edge(s_edge.id), side)})
        if not witnesses:
            raise StructuralError(f"degenerate vertex {rep} has no witnessing edge")
        psi[u.id] = witnesses[0]
    return psi


def edge_terms(Y: GraphOfGroups, q: FiniteQuotient,
               s: Optional[InducedSplitting] = None) -> list[EdgeTerm]:
    """A_e = 1/|q(G_e)| - sum over psi^-1(e) of 1/|q(G_u)| for each base edge."""
    if not gog.is_reduced(Y):
        raise PreconditionError("edge terms need a reduced splitting")
    s = s or induce(Y, q)
    psi = degeneracy_assignment(s)
    stab_v = {v.base_vertex: v.stabilizer_index for v in s.vertices}
    stab_e = {e.base_edge: e.stabilizer_index for e in s.edges}
    out = []
    for e in Y.edges:
        pre = tuple(sorted(u for u, x in psi.items() if x == e.id))
        value = Fraction(1, stab_e[e.id]) - sum(Fraction(1, stab_v[u]) for u in pre)
        explained = True
        if value == 0:
            explained = _equality_case(Y, e, pre)
        out.append(EdgeTerm(e.id, value, pre, explained))
    return out


def _equality_case(Y: GraphOfGroups, e: Edge, pre) -> bool:
    if e.is_loop:
        return len(pre) == 1 and Y.degenerate_map[e.source]
    if len(pre) != 2:
        return False
    for side in gog.SIDES:
        u = Y.vertex(e.end(side))
        if gog.inclusion_index(u.descriptor, e.descriptor, e.inclusion(side)) != 2:
            return False
    return True


def edge_terms_check(Y: GraphOfGroups, q: FiniteQuotient) -> bool:
    """Every A_e is non-negative, and vanishing terms match the equality cases."""
    return all(t.value >= 0 and t.equality_explained for t in edge_terms(Y, q))
