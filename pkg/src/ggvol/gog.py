"""Marked graphs of groups, their complexity and their reduction by collapses.

Each edge end carries a resolved :class:`Inclusion` describing how the edge
group sits in the vertex group.  Splittings read from documents also keep
the words they were built from (markings into the ambient group, stable
letters, inclusion words in the vertex's local generators); graphs derived
from covers have no words and ``ambient is None``.

Conventions for a marked edge ``e`` from ``s`` to ``t`` with stable letter
``t_e``: the marked copy of ``G_e`` lies in the copy of ``G_s``, and
``t_e^-1 G_e t_e`` lies in the copy of ``G_t``.  Edges whose stable letter is
the empty word form a spanning tree.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import cached_property
from typing import Callable, Optional, Sequence, Union

from . import presentation as pres
from .errors import (ConfigurationError, InvalidMarkingError, PreconditionError,
                     StructuralError, UnsupportedConfigurationError)
from .permgroup import (FiniteGroup, Perm, hom_table, min_generators, perm_inv,
                        perm_mul, subgroup_generated, trivial_group)
from .presentation import Presentation, Word

# ---------------------------------------------------------------------------
# descriptors


@dataclass(frozen=True)
class Finite:
    group: FiniteGroup
    relators: tuple[Word, ...] = ()

    kind = "finite"

    def __post_init__(self):
        object.__setattr__(self, "relators", tuple(tuple(r) for r in self.relators))
        for r in self.relators:
            x = pres.evaluate_images(self.group, self.group.generators, r)
            if x != self.group.identity:
                raise StructuralError(f"relator {r} does not hold in the finite group")

    @property
    def ngens(self) -> int:
        return len(self.group.generators)

    @property
    def order(self) -> int:
        return self.group.order

    @property
    def is_trivial(self) -> bool:
        return self.group.order == 1

    @property
    def label(self) -> str:
        return "trivial" if self.is_trivial and not self.group.generators else "finite"

    def __str__(self):
        return "1" if self.is_trivial else f"Finite({self.order})"


@dataclass(frozen=True)
class FreeRank:
    rank: int
    kind = "free"

    def __post_init__(self):
        if self.rank < 1:
            raise StructuralError("free rank must be positive")

    @property
    def ngens(self):
        return self.rank

    def __str__(self):
        return f"F{self.rank}"


@dataclass(frozen=True)
class CyclicZ:
    kind = "cyclic"
    ngens = 1

    def __str__(self):
        return "Z"


@dataclass(frozen=True)
class FreeAbelianRank:
    rank: int
    kind = "free_abelian"

    def __post_init__(self):
        if self.rank < 1:
            raise StructuralError("free abelian rank must be positive")

    @property
    def ngens(self):
        return self.rank

    def __str__(self):
        return f"Z^{self.rank}"


@dataclass(frozen=True)
class SurfaceGenus:
    genus: int
    kind = "surface"

    def __post_init__(self):
        if self.genus < 2:
            raise StructuralError("surface genus must be at least 2")

    @property
    def ngens(self):
        return 2 * self.genus

    def __str__(self):
        return f"S{self.genus}"


@dataclass(frozen=True)
class Opaque:
    """A vertex group known only through a generator bound and a phi value.

    Opaque groups are taken to be infinite and never equal to an incident
    edge group.
    """

    rank_upper: int
    phi: Fraction
    one_ended: bool = False
    kind = "opaque"

    def __post_init__(self):
        object.__setattr__(self, "phi", Fraction(self.phi))
        if self.rank_upper < 1:
            raise StructuralError("opaque rank bound must be positive")
        if self.phi < 0:
            raise StructuralError("opaque phi must be non-negative")

    @property
    def ngens(self):
        return self.rank_upper

    def __str__(self):
        return f"Opaque(r<={self.rank_upper}, phi={self.phi})"


Descriptor = Union[Finite, FreeRank, CyclicZ, FreeAbelianRank, SurfaceGenus, Opaque]
VERTEX_KINDS = (Finite, FreeRank, CyclicZ, FreeAbelianRank, SurfaceGenus, Opaque)
EDGE_KINDS = (Finite, CyclicZ, FreeAbelianRank)


def trivial() -> Finite:
    return Finite(trivial_group())


def is_cyclic_like(d) -> bool:
    return isinstance(d, CyclicZ) or (isinstance(d, (FreeRank, FreeAbelianRank)) and d.rank == 1)


def abstract_relators(d) -> tuple[Word, ...]:
    """Relators of the abstract vertex group, in its local generators."""
    if isinstance(d, Finite):
        return d.relators
    if isinstance(d, FreeAbelianRank):
        return tuple((i, j, -i, -j) for i in range(1, d.rank + 1)
                     for j in range(i + 1, d.rank + 1))
    if isinstance(d, SurfaceGenus):
        w: list[int] = []
        for i in range(d.genus):
            a, b = 2 * i + 1, 2 * i + 2
            w += [a, b, -a, -b]
        return (tuple(w),)
    return ()


def group_rank(d) -> int:
    """Minimal number of generators; Opaque reports its declared bound."""
    if isinstance(d, Finite):
        return min_generators(d.group)
    if isinstance(d, CyclicZ):
        return 1
    if isinstance(d, (FreeRank, FreeAbelianRank)):
        return d.rank
    if isinstance(d, SurfaceGenus):
        return 2 * d.genus
    if isinstance(d, Opaque):
        return d.rank_upper
    raise UnsupportedConfigurationError(f"no rank rule for {d}")


# ---------------------------------------------------------------------------
# inclusions


@dataclass(frozen=True)
class FiniteInclusion:
    """Images of the edge group's generators in a finite vertex group."""
    images: tuple[Perm, ...]


@dataclass(frozen=True)
class CyclicInclusion:
    """Infinite cyclic edge group onto the index-``index`` subgroup of a cyclic vertex."""
    index: int


@dataclass(frozen=True)
class InfiniteIndex:
    pass


Inclusion = Union[FiniteInclusion, CyclicInclusion, InfiniteIndex]


def resolve_inclusion(vdesc, edesc, words: Sequence[Word], where: str = "") -> Inclusion:
    """Decide the inclusion type of ``edesc`` into ``vdesc`` from inclusion words."""
    where = f" ({where})" if where else ""
    if isinstance(edesc, Finite):
        if isinstance(vdesc, Finite):
            images = tuple(pres.evaluate_images(vdesc.group, vdesc.group.generators, w)
                           for w in words)
            try:
                table = hom_table(edesc.group, images, vdesc.group)
            except InvalidMarkingError as exc:
                raise StructuralError(f"edge inclusion is not a homomorphism{where}") from exc
            if len(set(table.values())) != len(table):
                raise StructuralError(f"edge inclusion is not injective{where}")
            return FiniteInclusion(images)
        if isinstance(vdesc, Opaque):
            return InfiniteIndex()
        if not edesc.is_trivial:
            raise StructuralError(
                f"nontrivial finite edge group inside torsion-free vertex group {vdesc}{where}")
        return InfiniteIndex()
    if isinstance(vdesc, Finite):
        raise StructuralError(f"infinite edge group {edesc} inside finite vertex group{where}")
    erank = 1 if isinstance(edesc, CyclicZ) else edesc.rank
    if isinstance(vdesc, Opaque):
        return InfiniteIndex()
    if erank == 1:
        w = pres.free_reduce(words[0]) if words is not None else None
        if is_cyclic_like(vdesc):
            if words is None:
                raise UnsupportedConfigurationError(
                    f"cyclic inclusion into {vdesc} needs an inclusion word{where}")
            m = pres.exponent_sum(w, 1)
            if m == 0:
                raise StructuralError(f"cyclic edge maps trivially into {vdesc}{where}")
            return CyclicInclusion(abs(m))
        if words is not None and not w:
            raise StructuralError(f"cyclic edge generator maps to the identity{where}")
        if isinstance(vdesc, FreeAbelianRank) and words is not None:
            if all(pres.exponent_sum(w, i) == 0 for i in range(1, vdesc.rank + 1)):
                raise StructuralError(f"cyclic edge generator maps to the identity{where}")
        return InfiniteIndex()
    # free abelian edge group of rank >= 2
    if isinstance(vdesc, FreeAbelianRank):
        if erank < vdesc.rank:
            return InfiniteIndex()
        if erank == vdesc.rank:
            raise UnsupportedConfigurationError(
                f"equal-rank abelian inclusion Z^{erank} -> {vdesc}{where}")
    raise StructuralError(f"{edesc} cannot embed in {vdesc}{where}")


def inclusion_surjective(vdesc, inc: Inclusion) -> bool:
    if isinstance(inc, InfiniteIndex):
        return False
    if isinstance(inc, CyclicInclusion):
        return inc.index == 1
    if isinstance(inc, FiniteInclusion):
        if not isinstance(vdesc, Finite):
            raise UnsupportedConfigurationError(f"finite inclusion into {vdesc}")
        return subgroup_generated(vdesc.group, inc.images).order == vdesc.order
    raise UnsupportedConfigurationError(f"unknown inclusion {inc!r}")


def inclusion_index(vdesc, edesc, inc: Inclusion) -> Optional[int]:
    """[G_v : G_e] for finite-index inclusions, None when infinite."""
    if isinstance(inc, InfiniteIndex):
        return None
    if isinstance(inc, CyclicInclusion):
        return inc.index
    return vdesc.order // edesc.order


# ---------------------------------------------------------------------------
# graph


@dataclass(frozen=True)
class Vertex:
    id: str
    descriptor: Descriptor
    names: Optional[tuple[str, ...]] = None
    marking: Optional[tuple[Word, ...]] = None
    phi: Optional[Fraction] = None

    def __post_init__(self):
        if not isinstance(self.descriptor, VERTEX_KINDS):
            raise StructuralError(f"vertex {self.id}: unknown descriptor {self.descriptor!r}")
        if self.names is not None:
            object.__setattr__(self, "names", tuple(self.names))
        if self.marking is not None:
            object.__setattr__(self, "marking", tuple(tuple(w) for w in self.marking))
        if self.phi is not None:
            object.__setattr__(self, "phi", Fraction(self.phi))
            if self.phi < 0:
                raise StructuralError(f"vertex {self.id}: phi must be non-negative")

    @property
    def local_names(self) -> tuple[str, ...]:
        if self.names is not None:
            return self.names
        return tuple(f"x{i + 1}" for i in range(self.descriptor.ngens))


@dataclass(frozen=True)
class Edge:
    id: str
    source: str
    target: str
    descriptor: Descriptor
    inc_source: Optional[Inclusion] = None
    inc_target: Optional[Inclusion] = None
    marking: Optional[tuple[Word, ...]] = None
    stable_letter: Optional[Word] = None
    words_source: Optional[tuple[Word, ...]] = None
    words_target: Optional[tuple[Word, ...]] = None

    def __post_init__(self):
        if not isinstance(self.descriptor, EDGE_KINDS):
            raise StructuralError(f"edge {self.id}: unsupported edge kind {self.descriptor!r}")
        for name in ("marking", "words_source", "words_target"):
            val = getattr(self, name)
            if val is not None:
                object.__setattr__(self, name, tuple(tuple(w) for w in val))
        if self.stable_letter is not None:
            object.__setattr__(self, "stable_letter", tuple(self.stable_letter))

    @property
    def is_loop(self) -> bool:
        return self.source == self.target

    def end(self, side: str) -> str:
        return self.source if side == "source" else self.target

    def inclusion(self, side: str) -> Inclusion:
        return self.inc_source if side == "source" else self.inc_target

    def words(self, side: str):
        return self.words_source if side == "source" else self.words_target


SIDES = ("source", "target")


@dataclass(frozen=True)
class GraphOfGroups:
    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...] = ()
    ambient: Optional[Presentation] = None
    acylindricity_k: Optional[int] = None
    edge_rank_bound_n: int = 1
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        vmap = {}
        for v in self.vertices:
            if v.id in vmap:
                raise StructuralError(f"duplicate vertex id {v.id!r}")
            vmap[v.id] = v
        if not vmap:
            raise StructuralError("graph of groups has no vertices")
        resolved = []
        seen = set()
        for e in self.edges:
            if e.id in seen:
                raise StructuralError(f"duplicate edge id {e.id!r}")
            seen.add(e.id)
            for side in SIDES:
                if e.end(side) not in vmap:
                    raise StructuralError(f"edge {e.id}: unknown {side} vertex {e.end(side)!r}")
            resolved.append(self._resolve_edge(e, vmap))
        object.__setattr__(self, "edges", tuple(resolved))
        if self.acylindricity_k is not None and self.acylindricity_k < 0:
            raise StructuralError("acylindricity_k must be non-negative")
        if self.edge_rank_bound_n < 1:
            raise StructuralError("edge_rank_bound_n must be positive")
        for e in self.edges:
            if isinstance(e.descriptor, FreeAbelianRank) and e.descriptor.rank > self.edge_rank_bound_n:
                raise StructuralError(
                    f"edge {e.id}: rank {e.descriptor.rank} exceeds bound n={self.edge_rank_bound_n}")
        if not self._connected():
            raise StructuralError("underlying graph is not connected")
        if self.ambient is not None:
            self._check_marked()

    # -- construction helpers
    def _resolve_edge(self, e: Edge, vmap) -> Edge:
        updates = {}
        for side in SIDES:
            v = vmap[e.end(side)]
            if e.inclusion(side) is None:
                words = e.words(side)
                if words is None and not (isinstance(e.descriptor, Finite) and e.descriptor.is_trivial):
                    if isinstance(e.descriptor, Finite):
                        raise StructuralError(f"edge {e.id}: {side} inclusion missing")
                words = words if words is not None else ()
                if words and len(words) != e.descriptor.ngens:
                    raise StructuralError(
                        f"edge {e.id}: {side} inclusion needs {e.descriptor.ngens} words")
                for w in words:
                    for x in w:
                        if x == 0 or abs(x) > v.descriptor.ngens:
                            raise StructuralError(
                                f"edge {e.id}: {side} inclusion word uses an unknown generator")
                if isinstance(e.descriptor, Finite) and len(words) != e.descriptor.ngens:
                    raise StructuralError(f"edge {e.id}: {side} inclusion needs {e.descriptor.ngens} words")
                inc = resolve_inclusion(v.descriptor, e.descriptor,
                                        words if e.descriptor.ngens else (),
                                        where=f"edge {e.id} at {side} {v.id}")
                updates["inc_source" if side == "source" else "inc_target"] = inc
        return replace(e, **updates) if updates else e

    def _connected(self) -> bool:
        adj = self.adjacency
        start = self.vertices[0].id
        seen = {start}
        queue = deque([start])
        while queue:
            x = queue.popleft()
            for _, y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return len(seen) == len(self.vertices)

    def _check_marked(self):
        amb = self.ambient
        for v in self.vertices:
            if v.marking is None or len(v.marking) != v.descriptor.ngens:
                raise StructuralError(f"vertex {v.id}: needs {v.descriptor.ngens} marking words")
            for w in v.marking:
                amb.check_word(w)
        tree = []
        for e in self.edges:
            if e.marking is None or len(e.marking) != e.descriptor.ngens:
                raise StructuralError(f"edge {e.id}: needs {e.descriptor.ngens} marking words")
            if e.stable_letter is None:
                raise StructuralError(f"edge {e.id}: stable letter missing")
            for w in e.marking + (e.stable_letter,):
                amb.check_word(w)
            if not pres.free_reduce(e.stable_letter):
                if e.is_loop:
                    raise StructuralError(f"edge {e.id}: a loop needs a non-identity stable letter")
                tree.append(e)
        if len(tree) != len(self.vertices) - 1 or not _spans(self.vertices, tree):
            raise StructuralError(
                "edges with identity stable letter must form a spanning tree")

    # -- lookups
    @cached_property
    def vertex_map(self) -> dict:
        return {v.id: v for v in self.vertices}

    @cached_property
    def edge_map(self) -> dict:
        return {e.id: e for e in self.edges}

    @cached_property
    def adjacency(self) -> dict:
        adj = {v.id: [] for v in self.vertices}
        for e in self.edges:
            adj[e.source].append((e.id, e.target))
            if not e.is_loop:
                adj[e.target].append((e.id, e.source))
        return adj

    @cached_property
    def incident_ends(self) -> dict:
        """vertex id -> list of (edge, side) ends attached there."""
        ends = {v.id: [] for v in self.vertices}
        for e in self.edges:
            for side in SIDES:
                ends[e.end(side)].append((e, side))
        return ends

    def vertex(self, vid: str) -> Vertex:
        try:
            return self.vertex_map[vid]
        except KeyError:
            raise StructuralError(f"no vertex {vid!r}") from None

    def edge(self, eid: str) -> Edge:
        try:
            return self.edge_map[eid]
        except KeyError:
            raise StructuralError(f"no edge {eid!r}") from None

    def end_surjective(self, e: Edge, side: str) -> bool:
        return _end_surjective_cached(self, e.id, side)

    @cached_property
    def _surjective_cache(self) -> dict:
        return {}

    @cached_property
    def degenerate_map(self) -> dict:
        return {v.id: any(self.end_surjective(e, s) for e, s in self.incident_ends[v.id])
                for v in self.vertices}

    def with_name(self, name: str) -> "GraphOfGroups":
        return replace(self, name=name)


def _end_surjective_cached(Y: GraphOfGroups, eid: str, side: str) -> bool:
    cache = Y._surjective_cache
    key = (eid, side)
    if key not in cache:
        e = Y.edge_map[eid]
        v = Y.vertex_map[e.end(side)]
        cache[key] = inclusion_surjective(v.descriptor, e.inclusion(side))
    return cache[key]


def _spans(vertices, tree_edges) -> bool:
    parent = {v.id: v.id for v in vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in tree_edges:
        a, b = find(e.source), find(e.target)
        if a == b:
            return False
        parent[a] = b
    return len({find(v.id) for v in vertices}) == 1


# ---------------------------------------------------------------------------
# complexity


def graph_rank(Y: GraphOfGroups) -> int:
    """Rank of the free group pi_1 of the underlying graph."""
    if not Y._connected():
        raise StructuralError("underlying graph is not connected")
    return len(Y.edges) - len(Y.vertices) + 1


def is_degenerate(Y: GraphOfGroups, vid: str) -> bool:
    Y.vertex(vid)
    return Y.degenerate_map[vid]


def nondegenerate_vertices(Y: GraphOfGroups) -> list[Vertex]:
    return [v for v in Y.vertices if not Y.degenerate_map[v.id]]


def is_elliptic(Y: GraphOfGroups) -> bool:
    """True when the fundamental group fixes a vertex of the Bass-Serre tree.

    That happens exactly when the graph is a tree admitting a root towards
    which every edge is surjective at its far end.
    """
    if graph_rank(Y) > 0:
        return False
    if len(nondegenerate_vertices(Y)) > 1:
        return False
    root = Y.vertices[0].id
    # bad[e] for orientation "towards root": far end must be surjective
    order = [root]
    parent_edge = {root: None}
    far_ok = {}
    queue = deque([root])
    while queue:
        x = queue.popleft()
        for eid, y in Y.adjacency[x]:
            if y in parent_edge:
                continue
            e = Y.edge_map[eid]
            side_y = "target" if e.target == y else "source"
            side_x = "source" if side_y == "target" else "target"
            far_ok[eid] = (Y.end_surjective(e, side_y), Y.end_surjective(e, side_x))
            parent_edge[y] = (eid, x)
            order.append(y)
            queue.append(y)
    bad = sum(1 for ok_child, _ in far_ok.values() if not ok_child)
    bad_at = {root: bad}
    for y in order[1:]:
        eid, x = parent_edge[y]
        ok_child, ok_parent = far_ok[eid]
        # re-rooting at y flips which end of this edge is far
        bad_at[y] = bad_at[x] - (0 if ok_child else 1) + (0 if ok_parent else 1)
    return any(b == 0 for b in bad_at.values())


def raw_complexity(Y: GraphOfGroups) -> int:
    """``r(Y) + |V_ndeg|`` without the elliptic convention."""
    return graph_rank(Y) + len(nondegenerate_vertices(Y))


def complexity(Y: GraphOfGroups) -> int:
    if is_elliptic(Y):
        return 1
    return raw_complexity(Y)


class PhiTable:
    """Generalised Euler characteristic on vertex groups, one rule per kind.

    Every rule is multiplicative along the descriptor transforms used by
    covers: a finite-index subgroup of index d gets exactly d times the
    value.
    """

    def __init__(self, name: str, rules: dict[str, Callable], use_overrides: bool = True):
        self.name = name
        self.rules = dict(rules)
        self.use_overrides = use_overrides

    def __repr__(self):
        return f"PhiTable({self.name!r})"

    def of_descriptor(self, d) -> Fraction:
        rule = self.rules.get(d.kind)
        if rule is None:
            raise ConfigurationError(f"phi table {self.name!r} has no rule for kind {d.kind!r}")
        value = Fraction(rule(d))
        if value < 0:
            raise ConfigurationError(f"phi table {self.name!r} gives a negative value for {d}")
        return value

    def of_vertex(self, v: Vertex) -> Fraction:
        if self.use_overrides and v.phi is not None:
            return v.phi
        return self.of_descriptor(v.descriptor)


ZERO_PHI = PhiTable("zero", {k.kind: (lambda d: 0) for k in VERTEX_KINDS}, use_overrides=False)

VFIN_PHI = PhiTable("vfin", {
    "finite": lambda d: Fraction(1, d.order),
    "free": lambda d: d.rank - 1,
    "cyclic": lambda d: 0,
    "free_abelian": lambda d: 0,
    "surface": lambda d: 0,
    "opaque": lambda d: d.phi,
})

PHI_TABLES = {"zero": ZERO_PHI, "vfin": VFIN_PHI}


def phi_table(name: str) -> PhiTable:
    try:
        return PHI_TABLES[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown phi table {name!r}; choose from {sorted(PHI_TABLES)}") from None


def weighted_complexity(Y: GraphOfGroups, phi: PhiTable) -> Fraction:
    if is_elliptic(Y):
        return Fraction(1)
    total = Fraction(graph_rank(Y))
    for v in nondegenerate_vertices(Y):
        total += 1 + phi.of_vertex(v)
    return total


# ---------------------------------------------------------------------------
# collapse and reduction


@dataclass(frozen=True)
class CollapseStep:
    edge: str
    absorbed: str
    into: str
    complexity_before: int
    complexity_after: int


def collapsible_side(Y: GraphOfGroups, e: Edge) -> Optional[str]:
    """The side whose vertex group equals the edge group, preferring the source."""
    if e.is_loop:
        return None
    for side in SIDES:
        if Y.end_surjective(e, side):
            return side
    return None


def eligible_edges(Y: GraphOfGroups) -> list[str]:
    return sorted(e.id for e in Y.edges if collapsible_side(Y, e) is not None)


def is_reduced(Y: GraphOfGroups) -> bool:
    return not eligible_edges(Y)


def _words_for(gens: Sequence[Perm], identity: Perm) -> dict:
    """Shortest word (in ``gens``) for every element of the generated group."""
    words = {identity: ()}
    queue = deque([identity])
    while queue:
        x = queue.popleft()
        for i, g in enumerate(gens):
            for letter, h in ((i + 1, g), (-(i + 1), perm_inv(g))):
                y = perm_mul(x, h)
                if y not in words:
                    words[y] = words[x] + (letter,)
                    queue.append(y)
    return words


def _compose_inclusion(inc: Inclusion, u: Vertex, v: Vertex, e: Edge,
                       side_u: str, chi_cache: dict) -> Inclusion:
    """Push an inclusion into G_u forward along G_u = G_e -> G_v."""
    ud, vd = u.descriptor, v.descriptor
    inc_v = e.inclusion("target" if side_u == "source" else "source")
    if isinstance(inc, InfiniteIndex):
        return InfiniteIndex()
    if isinstance(ud, Finite):
        if not isinstance(vd, Finite):
            # u is trivial here, so every inclusion into it is trivial
            return InfiniteIndex()
        if "chi" not in chi_cache:
            inc_u = e.inclusion(side_u)
            tu = hom_table(e.descriptor.group, inc_u.images, ud.group)
            tv = hom_table(e.descriptor.group, inc_v.images, vd.group)
            chi_cache["chi"] = {tu[x]: tv[x] for x in tu}
        chi = chi_cache["chi"]
        return FiniteInclusion(tuple(chi[x] for x in inc.images))
    if isinstance(inc, CyclicInclusion):
        if isinstance(inc_v, CyclicInclusion):
            return CyclicInclusion(inc.index * inc_v.index)
        return InfiniteIndex()
    raise UnsupportedConfigurationError(f"cannot compose {inc!r} through {ud}")


def _expr_u_in_v(Y: GraphOfGroups, e: Edge, side_u: str) -> list[Word]:
    """Each local generator of the absorbed vertex as a word in the survivor's."""
    u = Y.vertex(e.end(side_u))
    side_v = "target" if side_u == "source" else "source"
    words_u, words_v = e.words(side_u), e.words(side_v)
    ud = u.descriptor
    if isinstance(ud, Finite):
        if ud.ngens == 0:
            return []
        inc_u = e.inclusion(side_u)
        table = _words_for(inc_u.images, ud.group.identity)
        out = []
        for g in ud.group.generators:
            w_edge = table[g]
            out.append(pres.substitute(w_edge, words_v))
        return out
    if is_cyclic_like(ud):
        eps = pres.exponent_sum(words_u[0], 1)
        return [pres.power(words_v[0], eps)]
    raise UnsupportedConfigurationError(f"cannot absorb vertex of kind {ud}")


def _tree_path(Y: GraphOfGroups, a: str, b: str) -> list[Edge]:
    tree_adj = {v.id: [] for v in Y.vertices}
    for e in Y.edges:
        if not pres.free_reduce(e.stable_letter):
            tree_adj[e.source].append((e, e.target))
            tree_adj[e.target].append((e, e.source))
    prev = {a: None}
    queue = deque([a])
    while queue:
        x = queue.popleft()
        for e, y in tree_adj[x]:
            if y not in prev:
                prev[y] = (e, x)
                queue.append(y)
    path = []
    x = b
    while prev[x] is not None:
        e, x0 = prev[x]
        path.append(e)
        x = x0
    return path[::-1]


def _make_tree_edge(Y: GraphOfGroups, eid: str) -> GraphOfGroups:
    """Re-mark Y so that non-tree edge ``eid`` carries the identity stable letter."""
    e = Y.edge(eid)
    tau = e.stable_letter
    path = _tree_path(Y, e.source, e.target)
    f = path[-1]
    # component of the tree minus f that contains e.target
    tree_adj = {v.id: [] for v in Y.vertices}
    for x in Y.edges:
        if x.id != f.id and not pres.free_reduce(x.stable_letter):
            tree_adj[x.source].append(x.target)
            tree_adj[x.target].append(x.source)
    comp = {e.target}
    queue = deque([e.target])
    while queue:
        x = queue.popleft()
        for y in tree_adj[x]:
            if y not in comp:
                comp.add(y)
                queue.append(y)
    inv_tau = pres.inverse(tau)
    vertices = []
    for v in Y.vertices:
        if v.id in comp:
            v = replace(v, marking=tuple(pres.conjugate(w, tau) for w in v.marking))
        vertices.append(v)
    edges = []
    for x in Y.edges:
        s_in, t_in = x.source in comp, x.target in comp
        t = x.stable_letter
        marking = x.marking
        if s_in and t_in:
            marking = tuple(pres.conjugate(w, tau) for w in marking)
            t = pres.concat(tau, t, inv_tau)
        elif t_in:
            t = pres.concat(t, inv_tau)
        elif s_in:
            marking = tuple(pres.conjugate(w, tau) for w in marking)
            t = pres.concat(tau, t)
        edges.append(replace(x, marking=marking, stable_letter=pres.free_reduce(t)))
    return replace(Y, vertices=tuple(vertices), edges=tuple(edges))


def collapse_edge(Y: GraphOfGroups, edge_id: str) -> GraphOfGroups:
    """Collapse a non-loop edge whose group equals one endpoint's group.

    The merged vertex is the other endpoint's record, unchanged.
    """
    e = Y.edge(edge_id)
    if e.is_loop:
        raise PreconditionError(f"edge {edge_id} is a loop")
    side_u = collapsible_side(Y, e)
    if side_u is None:
        raise PreconditionError(f"edge {edge_id} is not degenerate at either endpoint")
    marked = Y.ambient is not None and all(x.words_source is not None for x in Y.edges)
    if marked and pres.free_reduce(e.stable_letter):
        Y = _make_tree_edge(Y, edge_id)
        e = Y.edge(edge_id)
    side_v = "target" if side_u == "source" else "source"
    u_id, v_id = e.end(side_u), e.end(side_v)
    u, v = Y.vertex(u_id), Y.vertex(v_id)
    u_expr = _expr_u_in_v(Y, e, side_u) if marked else None
    chi_cache: dict = {}
    edges = []
    for x in Y.edges:
        if x.id == edge_id:
            continue
        upd = {}
        for side in SIDES:
            if x.end(side) != u_id:
                continue
            upd[side] = v_id
            key = "inc_source" if side == "source" else "inc_target"
            upd[key] = _compose_inclusion(x.inclusion(side), u, v, e, side_u, chi_cache)
            if marked:
                wkey = "words_source" if side == "source" else "words_target"
                upd[wkey] = tuple(pres.substitute(w, u_expr) for w in x.words(side))
        if upd:
            x = replace(x, **upd)
        edges.append(x)
    vertices = tuple(w for w in Y.vertices if w.id != u_id)
    if not marked:
        edges = [replace(x, words_source=None, words_target=None) for x in edges]
    return replace(Y, vertices=vertices, edges=tuple(edges),
                   ambient=Y.ambient if marked else None)


def reduce_with_trace(Y: GraphOfGroups) -> tuple[GraphOfGroups, list[CollapseStep]]:
    """Collapse eligible edges in lexicographic id order until none remain."""
    trace = []
    current = Y
    while True:
        eligible = eligible_edges(current)
        if not eligible:
            return current, trace
        eid = eligible[0]
        e = current.edge(eid)
        side_u = collapsible_side(current, e)
        before = complexity(current)
        nxt = collapse_edge(current, eid)
        trace.append(CollapseStep(eid, e.end(side_u),
                                  e.end("target" if side_u == "source" else "source"),
                                  before, complexity(nxt)))
        current = nxt


def reduce(Y: GraphOfGroups) -> GraphOfGroups:
    return reduce_with_trace(Y)[0]
