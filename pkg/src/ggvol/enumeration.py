"""Finite quotients and catalogs of normal subgroups of bounded index.

Normal subgroups are found as kernels of regular actions: an index-n normal
subgroup N is the kernel of G acting on G/N by right multiplication, and
that action is a Cayley table on n points.  The search below builds such
tables entry by entry, always naming a fresh point with the next unused
integer, so every table is produced in standard form and every normal
subgroup of index at most ``max_index`` appears exactly once.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

from .errors import ResourceError, StructuralError, UnsupportedConfigurationError
from .permgroup import (DEFAULT_ELEMENT_CAP, FiniteGroup, Perm, direct_product,
                        pair_closure, perm_inv, perm_mul, restricted_kernel)
from .presentation import GroupMap, Presentation, verify_hom

DEFAULT_CANDIDATE_CAP = 10**6
DEFAULT_NODE_CAP = 5 * 10**6
DEFAULT_PRODUCT_CAP = 100_000


@dataclass(frozen=True)
class FiniteQuotient:
    """A surjection from the presented group onto a permutation group."""

    id: str
    map: GroupMap

    def __post_init__(self):
        img = self.map.target
        if not isinstance(img, FiniteGroup):
            raise StructuralError("quotient target must be a FiniteGroup")
        if (self.map.images != img.generators
                and FiniteGroup(img.degree, self.map.images).order != img.order):
            raise StructuralError(f"quotient {self.id} is not onto its target")

    @property
    def image(self) -> FiniteGroup:
        return self.map.target

    @property
    def index(self) -> int:
        return self.map.target.order

    image_order = index

    @property
    def images(self) -> tuple[Perm, ...]:
        return self.map.images

    @property
    def source(self) -> Presentation:
        return self.map.source


def make_quotient(p: Presentation, degree: int, images: Sequence[Perm], qid: str,
                  cap: int = DEFAULT_ELEMENT_CAP) -> FiniteQuotient:
    """Quotient onto the subgroup generated by ``images`` (relators are verified)."""
    images = tuple(tuple(x) for x in images)
    img = FiniteGroup(degree, images, cap)
    return FiniteQuotient(qid, GroupMap(p, img, images))


def quotient_from_map(m: GroupMap, qid: str) -> FiniteQuotient:
    degree = m.target.degree
    return make_quotient(m.source, degree, m.images, qid)


def trivial_quotient(p: Presentation, qid: str = "N1.1") -> FiniteQuotient:
    return make_quotient(p, 1, [(0,)] * p.rank, qid)


@dataclass(frozen=True)
class SubgroupCatalog:
    entries: tuple[FiniteQuotient, ...]
    max_index: int
    family: str = "normal"

    def __post_init__(self):
        for q in self.entries:
            if q.index > self.max_index:
                raise StructuralError(f"{q.id} has index {q.index} > {self.max_index}")

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def get(self, qid: str) -> FiniteQuotient:
        for q in self.entries:
            if q.id == qid:
                return q
        raise StructuralError(f"no quotient with id {qid!r} in the catalog")


# ---------------------------------------------------------------------------
# brute force homomorphisms


def enumerate_homs(p: Presentation, Q: FiniteGroup,
                   cap: int = DEFAULT_CANDIDATE_CAP) -> list[GroupMap]:
    """All homomorphisms into Q, by testing every tuple of generator images."""
    count = Q.order ** p.rank
    if count > cap:
        raise ResourceError(f"{count} candidate image tuples exceed the candidate cap {cap}",
                            cap_name="candidate_cap", cap_value=cap)
    out = []
    for images in itertools.product(Q.elements, repeat=p.rank):
        if verify_hom(p, Q, images):
            out.append(GroupMap(p, Q, images))
    return out


def kernels_equal(q1: FiniteQuotient, q2: FiniteQuotient) -> bool:
    """Kernels agree iff q1(g) -> q2(g) extends to an isomorphism of images."""
    if q1.source != q2.source:
        raise StructuralError("quotients of different presentations")
    if q1.index != q2.index:
        return False
    pairs = pair_closure(q1.images, q2.images, perm_mul, perm_mul,
                         q1.image.identity, q2.image.identity,
                         cap=q1.index * q2.index)
    return len(pairs) == q1.index


def kernel_key(q: FiniteQuotient) -> tuple:
    """Standardised right-regular action table; equal keys iff equal kernels."""
    img = q.image
    gens = list(q.images)
    cols = [g for x in gens for g in (x, perm_inv(x))]
    number = {img.identity: 0}
    order = [img.identity]
    rows = []
    i = 0
    while i < len(order):
        x = order[i]
        row = []
        for g in cols:
            y = perm_mul(x, g)
            if y not in number:
                number[y] = len(order)
                order.append(y)
            row.append(number[y])
        rows.append(tuple(row))
        i += 1
    return tuple(rows)


# ---------------------------------------------------------------------------
# regular coset-table search


class _RegularSearch:
    """Backtracking over partial Cayley tables of the presented group."""

    def __init__(self, p: Presentation, max_index: int, node_cap: int):
        self.k = p.rank
        self.ncols = 2 * self.k
        self.max_index = max_index
        self.node_cap = node_cap
        self.nodes = 0
        self.rels = [tuple(2 * (abs(x) - 1) + (0 if x > 0 else 1) for x in r)
                     for r in p.relators if r]
        self.table = [[-1] * self.ncols for _ in range(max_index)]
        self.m = 1
        self.trail: list[tuple[int, int]] = []

    # each definition sets an entry and its inverse
    def _define(self, a: int, c: int, b: int) -> bool:
        T = self.table
        ci = c ^ 1
        if T[a][c] != -1:
            return T[a][c] == b
        if T[b][ci] != -1 and T[b][ci] != a:
            return False
        T[a][c] = b
        self.trail.append((a, c))
        if T[b][ci] == -1:
            T[b][ci] = a
            self.trail.append((b, ci))
        return True

    def _undo(self, mark: int):
        T = self.table
        while len(self.trail) > mark:
            a, c = self.trail.pop()
            T[a][c] = -1

    def _scan(self, p: int, r) -> Optional[bool]:
        """Scan relator r at point p: False on conflict, True if it deduced."""
        T = self.table
        L = len(r)
        f, i = p, 0
        while i < L and T[f][r[i]] >= 0:
            f = T[f][r[i]]
            i += 1
        if i == L:
            return None if f == p else False
        b, j = p, L - 1
        while j >= i and T[b][r[j] ^ 1] >= 0:
            b = T[b][r[j] ^ 1]
            j -= 1
        if j < i:
            return None if f == b else False
        if j == i:
            return True if self._define(f, r[i], b) else False
        return None

    def _regular(self, p: int) -> Optional[bool]:
        """Extend the partial isomorphism 0 -> p; False on conflict, True if it deduced."""
        T = self.table
        phi = {0: p}
        psi = {p: 0}
        queue = deque([0])
        while queue:
            a = queue.popleft()
            fa = phi[a]
            for c in range(self.ncols):
                b, d = T[a][c], T[fa][c]
                if b >= 0 and d >= 0:
                    if b in phi:
                        if phi[b] != d:
                            return False
                    else:
                        if d in psi:
                            return False
                        phi[b] = d
                        psi[d] = b
                        queue.append(b)
                elif b >= 0:
                    if b in phi:
                        return True if self._define(fa, c, phi[b]) else False
                elif d >= 0:
                    if d in psi:
                        return True if self._define(a, c, psi[d]) else False
        return None

    def _propagate(self) -> bool:
        while True:
            changed = False
            for p in range(self.m):
                for r in self.rels:
                    res = self._scan(p, r)
                    if res is False:
                        return False
                    changed |= bool(res)
            for p in range(1, self.m):
                res = self._regular(p)
                if res is False:
                    return False
                changed |= bool(res)
            if not changed:
                return True

    def _first_gap(self):
        for a in range(self.m):
            row = self.table[a]
            for c in range(self.ncols):
                if row[c] < 0:
                    return a, c
        return None

    def run(self) -> Iterator[list[list[int]]]:
        if not self._propagate():
            return
        yield from self._search()

    def _search(self):
        self.nodes += 1
        if self.nodes > self.node_cap:
            raise ResourceError(
                f"normal subgroup search exceeded the node cap {self.node_cap}",
                cap_name="node_cap", cap_value=self.node_cap)
        gap = self._first_gap()
        if gap is None:
            yield [row[:] for row in self.table[:self.m]]
            return
        a, c = gap
        choices = [b for b in range(self.m) if self.table[b][c ^ 1] < 0]
        if self.m < self.max_index:
            choices.append(self.m)
        for b in choices:
            mark = len(self.trail)
            old_m = self.m
            if b == self.m:
                self.m += 1
            if self._define(a, c, b) and self._propagate():
                yield from self._search()
            self._undo(mark)
            self.m = old_m


def regular_tables(p: Presentation, max_index: int,
                   node_cap: int = DEFAULT_NODE_CAP) -> list[tuple[Perm, ...]]:
    """Generator permutations of every regular quotient action on <= max_index points."""
    if max_index < 1:
        raise StructuralError("max_index must be at least 1")
    search = _RegularSearch(p, max_index, node_cap)
    out = []
    for table in search.run():
        n = len(table)
        perms = tuple(tuple(table[x][2 * i] for x in range(n)) for i in range(p.rank))
        out.append(perms)
    return out


def normal_subgroups(p: Presentation, max_index: int,
                     node_cap: int = DEFAULT_NODE_CAP) -> SubgroupCatalog:
    """Every normal subgroup of index <= max_index, once each, as a quotient."""
    found = []
    for perms in regular_tables(p, max_index, node_cap):
        n = len(perms[0]) if perms else 1
        images = perms if perms else ()
        img = FiniteGroup(n, images)
        if img.order != n:
            raise StructuralError("search produced a non-regular action")
        found.append((n, images))
    found.sort()
    entries = []
    count: dict[int, int] = {}
    for n, images in found:
        count[n] = count.get(n, 0) + 1
        entries.append(make_quotient(p, n, images, f"N{n}.{count[n]}"))
    return SubgroupCatalog(tuple(entries), max_index, "normal")


def cyclic_quotients(p: Presentation, max_k: int) -> SubgroupCatalog:
    """Kernels of surjections onto Z/k for k <= max_k, deduplicated."""
    entries = []
    for k in range(1, max_k + 1):
        if k == 1:
            entries.append(make_quotient(p, 1, [(0,)] * p.rank, "C1.1"))
            continue
        shift = [tuple((i + s) % k for i in range(k)) for s in range(k)]
        seen = set()
        j = 0
        for exps in itertools.product(range(k), repeat=p.rank):
            images = [shift[e] for e in exps]
            if not verify_hom(p, _CyclicShim(k), images):
                continue
            img = FiniteGroup(k, images)
            if img.order != k:
                continue
            q = make_quotient(p, k, images, "")
            key = kernel_key(q)
            if key in seen:
                continue
            seen.add(key)
            j += 1
            entries.append(FiniteQuotient(f"C{k}.{j}", q.map))
    return SubgroupCatalog(tuple(entries), max_k, "cyclic")


class _CyclicShim:
    """Just enough group interface for relator checks in Z/k as shifts."""

    def __init__(self, k):
        self.identity = tuple(range(k))

    def mul(self, x, y):
        return perm_mul(x, y)

    def inv(self, x):
        return perm_inv(x)


def quotient_sort_key(q: FiniteQuotient) -> tuple:
    """Order by index, then by the numeric suffix of ids like ``N12.3``."""
    head, _, tail = q.id.rpartition(".")
    return (q.index, head, int(tail) if tail.isdigit() else 0, q.id)


@dataclass(frozen=True)
class ChainStep:
    n: int
    quotient: FiniteQuotient
    factors: tuple[str, ...]


def descending_chain(c: SubgroupCatalog, product_cap: int = DEFAULT_PRODUCT_CAP,
                     truncate: bool = False) -> list[ChainStep]:
    """For n = 1..max_index, the intersection of the catalog kernels of index <= n.

    Each step maps diagonally into the product of the images it needs; a
    catalog quotient that already factors through the running product is
    skipped.  When the product would exceed ``product_cap`` a ResourceError
    is raised, or with ``truncate=True`` the steps built so far are returned
    (see :func:`chain_is_truncated`).
    """
    if not c.entries:
        raise StructuralError("empty catalog")
    p = c.entries[0].source
    group = FiniteGroup(1, [(0,)] * p.rank)
    images: list[Perm] = [(0,)] * p.rank
    factors: list[str] = []
    steps = []
    by_index = sorted(c.entries, key=quotient_sort_key)
    pos = 0
    for n in range(1, c.max_index + 1):
        while pos < len(by_index) and by_index[pos].index <= n:
            q = by_index[pos]
            pos += 1
            pairs = pair_closure(images, q.images, perm_mul, perm_mul,
                                 group.identity, q.image.identity,
                                 cap=group.order * q.index)
            if len(pairs) == group.order:
                continue
            if len(pairs) > product_cap:
                if truncate:
                    return steps
                raise ResourceError(
                    f"chain quotient at n={n} has order {len(pairs)} > product cap {product_cap}",
                    cap_name="product_cap", cap_value=product_cap)
            group, images = direct_product([group, q.image],
                                           [[a, b] for a, b in zip(images, q.images)],
                                           cap=product_cap)
            factors.append(q.id)
        quotient = FiniteQuotient(f"H{n}", GroupMap(p, group, tuple(images)))
        steps.append(ChainStep(n, quotient, tuple(factors)))
    return steps


def chain_is_truncated(c: SubgroupCatalog, steps: Sequence[ChainStep]) -> bool:
    return len(steps) < c.max_index


def is_torsion_free_kernel(Y, q: FiniteQuotient) -> bool:
    """True iff q is injective on every finite vertex group of Y."""
    from .gog import Finite, Opaque

    for v in Y.vertices:
        d = v.descriptor
        if isinstance(d, Opaque):
            raise UnsupportedConfigurationError(
                f"torsion of opaque vertex {v.id} is unknown")
        if isinstance(d, Finite):
            if v.marking is None:
                raise StructuralError(f"vertex {v.id} has no marking")
            imgs = [q.map(w) for w in v.marking]
            rk = restricted_kernel(d.group, imgs, q.image)
            if rk.kernel.order != 1:
                return False
    return True
