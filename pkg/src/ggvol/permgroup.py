"""Finite permutation groups by explicit element enumeration.

Permutations are tuples ``p`` on points ``0..d-1`` and act on the right:
``mul(x, y)`` applies ``x`` first, so ``mul(x, y)[i] == y[x[i]]``.  Groups
keep every element, sorted lexicographically; that order fixes coset
representatives and every other canonical choice downstream.
"""
from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .errors import InvalidMarkingError, ResourceError, StructuralError

Perm = tuple[int, ...]

DEFAULT_ELEMENT_CAP = 10**6


def identity_perm(degree: int) -> Perm:
    return tuple(range(degree))


def perm_mul(x: Perm, y: Perm) -> Perm:
    return tuple(map(y.__getitem__, x))


def perm_inv(x: Perm) -> Perm:
    out = [0] * len(x)
    for i, j in enumerate(x):
        out[j] = i
    return tuple(out)


def is_perm(x: Sequence[int], degree: int) -> bool:
    return len(x) == degree and sorted(x) == list(range(degree))


def perm_from_cycles(text: str, degree: int | None = None) -> Perm:
    """Parse cycle notation such as ``"(0 1 2)(3 4)"``; ``"()"`` is the identity."""
    text = text.strip()
    if not re.fullmatch(r"(\(\s*(\d+(\s*,?\s*\d+)*)?\s*\)\s*)+", text):
        raise StructuralError(f"bad cycle notation {text!r}")
    cycles = [[int(t) for t in re.split(r"[\s,]+", c.strip()) if t]
              for c in re.findall(r"\(([^)]*)\)", text)]
    pts = [p for c in cycles for p in c]
    if len(pts) != len(set(pts)):
        raise StructuralError(f"cycles in {text!r} are not disjoint")
    need = max(pts) + 1 if pts else 0
    if degree is None:
        degree = need
    elif need > degree:
        raise StructuralError(f"{text!r} moves a point outside degree {degree}")
    img = list(range(degree))
    for c in cycles:
        for a, b in zip(c, c[1:] + c[:1]):
            img[a] = b
    return tuple(img)


def perm_to_cycles(x: Perm) -> str:
    seen = set()
    parts = []
    for start in range(len(x)):
        if start in seen or x[start] == start:
            continue
        cyc = [start]
        seen.add(start)
        j = x[start]
        while j != start:
            cyc.append(j)
            seen.add(j)
            j = x[j]
        parts.append("(" + " ".join(map(str, cyc)) + ")")
    return "".join(parts) or "()"


def perm_order(x: Perm) -> int:
    from math import lcm
    seen = set()
    n = 1
    for start in range(len(x)):
        if start in seen:
            continue
        length = 0
        j = start
        while j not in seen:
            seen.add(j)
            j = x[j]
            length += 1
        n = lcm(n, length)
    return n


def _bfs_closure(identity, gens, mul, cap, what):
    seen = {identity}
    queue = deque([identity])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = mul(x, g)
            if y not in seen:
                seen.add(y)
                if len(seen) > cap:
                    raise ResourceError(
                        f"{what} exceeds the element cap {cap}",
                        cap_name="element_cap", cap_value=cap)
                queue.append(y)
    return seen


class FiniteGroup:
    """A permutation group with all of its elements listed."""

    def __init__(self, degree: int, generators: Iterable[Perm] = (),
                 cap: int = DEFAULT_ELEMENT_CAP):
        gens = tuple(tuple(g) for g in generators)
        for g in gens:
            if not is_perm(g, degree):
                raise StructuralError(f"{g} is not a permutation of degree {degree}")
        self.degree = degree
        self.generators = gens
        self.identity = identity_perm(degree)
        elems = _bfs_closure(self.identity, gens, perm_mul, cap,
                             f"closure of {len(gens)} generators on {degree} points")
        self.elements: tuple[Perm, ...] = tuple(sorted(elems))
        self._index = {x: i for i, x in enumerate(self.elements)}

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self):
        return len(self.elements)

    def __repr__(self):
        gens = ", ".join(perm_to_cycles(g) for g in self.generators)
        return f"FiniteGroup(order={self.order}, gens=[{gens}])"

    def __eq__(self, other):
        return (isinstance(other, FiniteGroup) and self.degree == other.degree
                and self.elements == other.elements)

    def __hash__(self):
        return hash((self.degree, self.elements))

    def mul(self, x: Perm, y: Perm) -> Perm:
        return perm_mul(x, y)

    def inv(self, x: Perm) -> Perm:
        return perm_inv(x)

    def contains(self, x) -> bool:
        return x in self._index

    def index_of(self, x: Perm) -> int:
        return self._index[x]

    def is_trivial(self) -> bool:
        return self.order == 1


def close(degree: int, generators: Iterable[Perm], cap: int = DEFAULT_ELEMENT_CAP) -> FiniteGroup:
    return FiniteGroup(degree, generators, cap)


def cyclic_group(n: int) -> FiniteGroup:
    """Z/n as the group generated by one n-cycle (trivial group for n == 1)."""
    if n < 1:
        raise StructuralError("cyclic group order must be positive")
    if n == 1:
        return FiniteGroup(1, ())
    return FiniteGroup(n, [tuple(list(range(1, n)) + [0])])


def symmetric_group(n: int) -> FiniteGroup:
    if n <= 1:
        return FiniteGroup(max(n, 1), ())
    gens = [tuple([1, 0] + list(range(2, n))), tuple(list(range(1, n)) + [0])]
    return FiniteGroup(n, gens)


def trivial_group() -> FiniteGroup:
    return FiniteGroup(1, ())


@dataclass(frozen=True)
class SubgroupRef:
    parent: FiniteGroup
    members: frozenset

    def __post_init__(self):
        if self.parent.order % len(self.members):
            raise StructuralError("subgroup order does not divide the group order")

    @property
    def order(self) -> int:
        return len(self.members)

    @property
    def index(self) -> int:
        return self.parent.order // self.order

    def sorted_members(self) -> tuple[Perm, ...]:
        return tuple(sorted(self.members))

    def as_group(self) -> FiniteGroup:
        """The subgroup as a FiniteGroup of its own, with a small generating set."""
        return FiniteGroup(self.parent.degree, small_generating_set(self.sorted_members()))


def small_generating_set(elements: Sequence[Perm]) -> list[Perm]:
    """Greedy generating set: walk the sorted elements, keep those not yet reached."""
    if not elements:
        return []
    degree = len(elements[0])
    gens: list[Perm] = []
    reached = {identity_perm(degree)}
    for x in sorted(elements):
        if x not in reached:
            gens.append(x)
            reached = _bfs_closure(identity_perm(degree), gens, perm_mul,
                                   DEFAULT_ELEMENT_CAP, "subgroup")
    return gens


def subgroup_generated(G: FiniteGroup, elems: Iterable[Perm]) -> SubgroupRef:
    elems = [tuple(e) for e in elems]
    for e in elems:
        if not G.contains(e):
            raise StructuralError(f"{perm_to_cycles(e)} is not an element of the group")
    members = _bfs_closure(G.identity, elems, perm_mul, G.order, "subgroup")
    return SubgroupRef(G, frozenset(members))


def whole_group(G: FiniteGroup) -> SubgroupRef:
    return SubgroupRef(G, frozenset(G.elements))


@dataclass(frozen=True)
class Coset:
    representative: Perm
    members: tuple[Perm, ...]


def coset_space(G: FiniteGroup, S: SubgroupRef) -> list[Coset]:
    """Left cosets ``xS`` in canonical order; each representative is the least member."""
    if S.parent is not G and S.parent != G:
        raise StructuralError("subgroup belongs to a different group")
    if S.order == 1:
        return [Coset(x, (x,)) for x in G.elements]
    assigned = set()
    cosets = []
    subs = S.sorted_members()
    for x in G.elements:
        if x in assigned:
            continue
        members = tuple(sorted(perm_mul(x, s) for s in subs))
        assigned.update(members)
        cosets.append(Coset(x, members))
    return cosets


def coset_lookup(cosets: Sequence[Coset]) -> dict:
    """Map every element to the position of its coset."""
    return {m: i for i, c in enumerate(cosets) for m in c.members}


def pair_closure(gens_a: Sequence, gens_b: Sequence, mul_a, mul_b, id_a, id_b,
                 cap: int = DEFAULT_ELEMENT_CAP) -> set:
    """Subgroup of A x B generated by the pairs ``(gens_a[i], gens_b[i])``."""
    pairs = list(zip(gens_a, gens_b))
    return _bfs_closure((id_a, id_b), pairs,
                        lambda x, g: (mul_a(x[0], g[0]), mul_b(x[1], g[1])),
                        cap, "pair closure")


def hom_table(source: FiniteGroup, images: Sequence, target) -> dict:
    """Extend ``source.generators[i] -> images[i]`` to a homomorphism table.

    Raises InvalidMarkingError when the assignment is not a homomorphism.
    """
    if len(images) != len(source.generators):
        raise StructuralError("one image per generator required")
    pairs = pair_closure(source.generators, images, perm_mul, target.mul,
                         source.identity, target.identity,
                         cap=source.order * max(1, getattr(target, "order", source.order)))
    table = {}
    for a, b in pairs:
        if table.setdefault(a, b) != b:
            raise InvalidMarkingError(
                "generator assignment does not extend to a homomorphism "
                f"(element {perm_to_cycles(a)} has two images)")
    return table


@dataclass(frozen=True)
class RestrictedMap:
    kernel: SubgroupRef
    image_members: frozenset

    @property
    def image_order(self) -> int:
        return len(self.image_members)


def restricted_kernel(V: FiniteGroup, images: Sequence, Q) -> RestrictedMap:
    """Kernel and image of the composite ``V -> Q`` given on V's generators."""
    table = hom_table(V, images, Q)
    kernel = frozenset(x for x, y in table.items() if y == Q.identity)
    return RestrictedMap(SubgroupRef(V, kernel), frozenset(table.values()))


def min_generators(G: FiniteGroup, max_size: int = 4) -> int:
    """Least number of elements generating G, searching subsets up to ``max_size``."""
    if G.order == 1:
        return 0
    elems = [x for x in G.elements if x != G.identity]
    for k in range(1, max_size + 1):
        for combo in combinations(elems, k):
            if len(_bfs_closure(G.identity, combo, perm_mul, G.order, "group")) == G.order:
                return k
    raise ResourceError(f"no generating set of size <= {max_size} found",
                        cap_name="min_generators_size", cap_value=max_size)


def direct_product(groups: Sequence[FiniteGroup], tuples: Sequence[Sequence[Perm]],
                   cap: int = DEFAULT_ELEMENT_CAP) -> tuple[FiniteGroup, list[Perm]]:
    """Diagonal embedding of generator tuples on the disjoint union of points.

    ``tuples[j][i]`` is the j-th generator's component in ``groups[i]``.
    Returns the generated group and the combined generators.
    """
    offsets = []
    total = 0
    for g in groups:
        offsets.append(total)
        total += g.degree
    combined = []
    for comps in tuples:
        img = []
        for off, p in zip(offsets, comps):
            img.extend(off + v for v in p)
        combined.append(tuple(img))
    return FiniteGroup(total, combined, cap), combined
