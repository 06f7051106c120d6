"""Random marked splittings and random finite quotients for property checks.

Every generator takes a ``random.Random`` so runs are reproducible from a
seed.
"""
from __future__ import annotations

import random
from math import gcd

from . import presentation as pres
from .constructions import assemble, finite_cyclic, surface_amalgam
from .enumeration import FiniteQuotient, make_quotient
from .gog import CyclicZ, FreeRank, GraphOfGroups, trivial
from .permgroup import FiniteGroup, cyclic_group, symmetric_group

FAMILIES = ("finite_tree", "cyclic_tree", "mixed", "malnormal_amalgam", "free_hnn",
            "finite_amalgam", "surface")


def is_proper_power(w) -> bool:
    """Whether a freely reduced word is a proper power in the free group."""
    w = list(pres.free_reduce(w))
    while len(w) >= 2 and w[0] == -w[-1]:
        w = w[1:-1]
    n = len(w)
    if n == 0:
        return False
    for d in range(1, n):
        if n % d == 0 and w == w[:d] * (n // d):
            return True
    return False


def random_free_word(rng: random.Random, rank: int, length: int) -> tuple:
    while True:
        w = pres.free_reduce(tuple(rng.choice([1, -1]) * rng.randint(1, rank)
                                   for _ in range(length)))
        if w:
            return w


def random_primitive_free_word(rng, rank, length) -> tuple:
    """A nontrivial word that is not a proper power (so generates a malnormal subgroup)."""
    if rank == 1:
        return (rng.choice([1, -1]),)
    while True:
        w = random_free_word(rng, rank, length)
        if not is_proper_power(w):
            return w


def _divisors(n):
    return [d for d in range(1, n + 1) if n % d == 0]


def _finite_vertex(rng, vid):
    n = rng.choice([1, 1, 2, 2, 3, 4, 6])
    if n == 1:
        return (vid, trivial(), ()), n
    return (vid, finite_cyclic(n), ("x",)), n


def _finite_edge_words(rng, n_s, n_t):
    c = rng.choice(_divisors(gcd(n_s, n_t)))
    if c == 1:
        return trivial(), (), ()
    units = [u for u in range(1, c) if gcd(u, c) == 1]
    ws = ((1,) * ((n_s // c) * rng.choice(units)),)
    wt = ((1,) * (n_t // c),)
    return finite_cyclic(c), ws, wt


def random_finite_tree(rng: random.Random) -> GraphOfGroups:
    """Tree of finite cyclic groups (often equal to an edge group) plus extra edges."""
    nv = rng.randint(1, 4)
    verts, orders = [], {}
    for i in range(nv):
        vspec, n = _finite_vertex(rng, f"v{i + 1}")
        verts.append(vspec)
        orders[vspec[0]] = n
    edges = []
    for i in range(1, nv):
        s, t = f"v{rng.randint(1, i)}", f"v{i + 1}"
        if rng.random() < 0.5:
            s, t = t, s
        desc, ws, wt = _finite_edge_words(rng, orders[s], orders[t])
        edges.append((f"e{i}", s, t, desc, ws, wt, True))
    for j in range(rng.choice([0, 0, 1, 2])):
        s, t = f"v{rng.randint(1, nv)}", f"v{rng.randint(1, nv)}"
        desc, ws, wt = _finite_edge_words(rng, orders[s], orders[t])
        edges.append((f"f{j + 1}", s, t, desc, ws, wt, False))
    if nv == 1 and not edges:
        edges.append(("f1", "v1", "v1", trivial(), (), (), False))
    return assemble(verts, edges, name="random finite tree")


def _cyclic_word(rng):
    return ((1,) * rng.choice([1, 1, 2, 3]) if rng.random() < 0.7 else (-1,) * rng.choice([1, 2]))


def random_cyclic_tree(rng: random.Random) -> GraphOfGroups:
    """Infinite cyclic and free vertices joined by infinite cyclic edges."""
    nv = rng.randint(2, 4)
    verts = []
    for i in range(nv):
        if rng.random() < 0.7:
            verts.append((f"z{i + 1}", CyclicZ(), ("x",)))
        else:
            verts.append((f"z{i + 1}", FreeRank(2), ("x", "y")))
    kinds = {v[0]: v[1] for v in verts}

    def word(vid):
        if isinstance(kinds[vid], CyclicZ):
            return _cyclic_word(rng)
        return random_primitive_free_word(rng, 2, rng.randint(1, 4))

    edges = []
    for i in range(1, nv):
        s, t = f"z{rng.randint(1, i)}", f"z{i + 1}"
        if rng.random() < 0.5:
            s, t = t, s
        edges.append((f"e{i}", s, t, CyclicZ(), (word(s),), (word(t),), True))
    if rng.random() < 0.3:
        s, t = f"z{rng.randint(1, nv)}", f"z{rng.randint(1, nv)}"
        edges.append(("f1", s, t, trivial(), (), (), False))
    return assemble(verts, edges, name="random cyclic tree")


def random_mixed(rng: random.Random) -> GraphOfGroups:
    """Finite and infinite cyclic vertices joined by trivial edges."""
    nv = rng.randint(2, 5)
    verts = []
    for i in range(nv):
        r = rng.random()
        if r < 0.5:
            verts.append(_finite_vertex(rng, f"m{i + 1}")[0])
        elif r < 0.8:
            verts.append((f"m{i + 1}", CyclicZ(), ("x",)))
        else:
            verts.append((f"m{i + 1}", FreeRank(2), ("x", "y")))
    edges = []
    for i in range(1, nv):
        s, t = f"m{rng.randint(1, i)}", f"m{i + 1}"
        edges.append((f"e{i}", s, t, trivial(), (), (), True))
    if rng.random() < 0.3:
        s = f"m{rng.randint(1, nv)}"
        edges.append(("f1", s, s, trivial(), (), (), False))
    return assemble(verts, edges, name="random mixed")


def random_malnormal_amalgam(rng: random.Random) -> GraphOfGroups:
    """F_r *_Z F_s along words that are not proper powers; declared 2-acylindrical."""
    r, s = rng.randint(2, 3), rng.randint(2, 3)
    na = tuple(f"x{i + 1}" for i in range(r))
    nb = tuple(f"y{i + 1}" for i in range(s))
    w1 = random_primitive_free_word(rng, r, rng.randint(2, 6))
    w2 = random_primitive_free_word(rng, s, rng.randint(2, 6))
    return assemble([("A", FreeRank(r), na), ("B", FreeRank(s), nb)],
                    [("e", "A", "B", CyclicZ(), (w1,), (w2,), True)],
                    acylindricity_k=2, edge_rank_bound_n=1, name="random malnormal amalgam")


def random_free_hnn(rng: random.Random) -> GraphOfGroups:
    r = rng.randint(1, 3)
    names = tuple(f"x{i + 1}" for i in range(r))
    w1 = random_primitive_free_word(rng, r, rng.randint(1, 4))
    w2 = random_primitive_free_word(rng, r, rng.randint(1, 4))
    desc = CyclicZ() if r == 1 else FreeRank(r)
    return assemble([("A", desc, names)],
                    [("e", "A", "A", CyclicZ(), (w1,), (w2,), False)], name="random free HNN")


def random_finite_amalgam(rng: random.Random) -> GraphOfGroups:
    m, n = rng.choice([2, 3, 4, 6]), rng.choice([2, 3, 4, 6])
    desc, ws, wt = _finite_edge_words(rng, m, n)
    return assemble([("A", finite_cyclic(m), ("x",)), ("B", finite_cyclic(n), ("y",))],
                    [("e", "A", "B", desc, ws, wt, True)], name="random finite amalgam")


def random_splitting(rng: random.Random, family: str | None = None) -> GraphOfGroups:
    family = family or rng.choice(FAMILIES)
    if family == "finite_tree":
        return random_finite_tree(rng)
    if family == "cyclic_tree":
        return random_cyclic_tree(rng)
    if family == "mixed":
        return random_mixed(rng)
    if family == "malnormal_amalgam":
        return random_malnormal_amalgam(rng)
    if family == "free_hnn":
        return random_free_hnn(rng)
    if family == "finite_amalgam":
        return random_finite_amalgam(rng)
    if family == "surface":
        return surface_amalgam(rng.choice([2, 3]))
    raise ValueError(f"unknown family {family!r}")


TARGETS = (("Z2", lambda: cyclic_group(2)), ("Z3", lambda: cyclic_group(3)),
           ("Z4", lambda: cyclic_group(4)), ("Z6", lambda: cyclic_group(6)),
           ("S3", lambda: symmetric_group(3)))


def random_quotient(rng: random.Random, Y: GraphOfGroups, tries: int = 200) -> FiniteQuotient:
    """A random homomorphism onto its image in a small group; trivial if none is hit."""
    p = Y.ambient
    name, make = rng.choice(TARGETS)
    Q: FiniteGroup = make()
    for attempt in range(tries):
        images = [rng.choice(Q.elements) for _ in range(p.rank)]
        if pres.verify_hom(p, Q, images):
            return make_quotient(p, Q.degree, images, f"R{name}.{attempt}")
    return make_quotient(p, 1, [(0,)] * p.rank, "R1")
