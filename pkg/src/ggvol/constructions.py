"""Built-in marked splittings used by the CLI, the fixtures and the tests."""
from __future__ import annotations

from string import ascii_lowercase
from typing import Callable, Sequence

from . import presentation as pres
from .errors import ConfigurationError
from .gog import (CyclicZ, Edge, Finite, FreeRank, GraphOfGroups,
                  Vertex, trivial)
from .permgroup import cyclic_group
from .presentation import Presentation


def _gen_names(n: int) -> list[str]:
    if n <= len(ascii_lowercase):
        return list(ascii_lowercase[:n])
    return [f"g{i + 1}" for i in range(n)]


def finite_cyclic(n: int) -> Finite:
    """Z/n on one local generator x with relator x^n."""
    return Finite(cyclic_group(n), ((1,) * n,))


def free_product_finite_cyclics(*orders: int) -> GraphOfGroups:
    """Z/n1 * ... * Z/nk as a path of finite cyclic vertices joined by trivial edges."""
    if not orders:
        raise ConfigurationError("at least one order required")
    if any(n < 2 for n in orders):
        raise ConfigurationError("orders must be at least 2")
    names = _gen_names(len(orders))
    amb = Presentation(tuple(names), tuple((i + 1,) * n for i, n in enumerate(orders)))
    vertices = [Vertex(f"v{i + 1}", finite_cyclic(n), ("x",), ((i + 1,),))
                for i, n in enumerate(orders)]
    edges = [Edge(f"e{i + 1}", f"v{i + 1}", f"v{i + 2}", trivial(), marking=(),
                  stable_letter=(), words_source=(), words_target=())
             for i in range(len(orders) - 1)]
    label = "*".join(f"Z/{n}" for n in orders)
    return GraphOfGroups(tuple(vertices), tuple(edges), amb, name=label)


def modular() -> GraphOfGroups:
    return free_product_finite_cyclics(2, 3).with_name("modular")


def infinite_dihedral() -> GraphOfGroups:
    return free_product_finite_cyclics(2, 2).with_name("infinite_dihedral")


def amalgam_finite_cyclics(m: int, n: int, c: int) -> GraphOfGroups:
    """Z/m *_{Z/c} Z/n, the subgroup Z/c generated by a^(m/c) and b^(n/c)."""
    if c < 1 or m % c or n % c or min(m, n) < 2:
        raise ConfigurationError("need c | m, c | n and m, n >= 2")
    p, r = m // c, n // c
    amb = Presentation(("a", "b"), ((1,) * m, (2,) * n, (1,) * p + (-2,) * r))
    A = Vertex("A", finite_cyclic(m), ("x",), ((1,),))
    B = Vertex("B", finite_cyclic(n), ("y",), ((2,),))
    if c == 1:
        e = Edge("e", "A", "B", trivial(), marking=(), stable_letter=(),
                 words_source=(), words_target=())
    else:
        e = Edge("e", "A", "B", finite_cyclic(c), marking=((1,) * p,), stable_letter=(),
                 words_source=((1,) * p,), words_target=((1,) * r,))
    return GraphOfGroups((A, B), (e,), amb, name=f"Z/{m}*_Z/{c} Z/{n}")


def sl2z() -> GraphOfGroups:
    return amalgam_finite_cyclics(4, 6, 2).with_name("sl2z")


def wedge(n: int) -> GraphOfGroups:
    """F_n: a trivial vertex joined by trivial edges to n infinite cyclic vertices."""
    if n < 1:
        raise ConfigurationError("wedge needs n >= 1")
    names = _gen_names(n)
    amb = Presentation(tuple(names), ())
    vertices = [Vertex("o", trivial(), (), ())]
    edges = []
    for i in range(n):
        vertices.append(Vertex(f"c{i + 1}", CyclicZ(), ("x",), ((i + 1,),)))
        edges.append(Edge(f"e{i + 1}", "o", f"c{i + 1}", trivial(), marking=(),
                          stable_letter=(), words_source=(), words_target=()))
    return GraphOfGroups(tuple(vertices), tuple(edges), amb, name=f"wedge({n})")


def rose(n: int) -> GraphOfGroups:
    """F_n as one trivial vertex with n loops."""
    if n < 1:
        raise ConfigurationError("rose needs n >= 1")
    names = _gen_names(n)
    amb = Presentation(tuple(names), ())
    edges = [Edge(f"e{i + 1}", "o", "o", trivial(), marking=(), stable_letter=(i + 1,),
                  words_source=(), words_target=()) for i in range(n)]
    return GraphOfGroups((Vertex("o", trivial(), (), ()),), tuple(edges), amb, name=f"rose({n})")


def _commutator(a: int, b: int) -> tuple[int, ...]:
    return (a, b, -a, -b)


def surface_amalgam(g: int) -> GraphOfGroups:
    """Closed genus-g surface group cut along a separating curve.

    One side is a one-holed torus (free of rank 2), the other a one-holed
    surface of genus g-1 (free of rank 2g-2); the edge group is the curve.
    """
    if g < 2:
        raise ConfigurationError("surface_amalgam needs g >= 2")
    names = []
    for i in range(1, g + 1):
        names += [f"a{i}", f"b{i}"]
    relator = tuple(x for i in range(g) for x in _commutator(2 * i + 1, 2 * i + 2))
    amb = Presentation(tuple(names), (relator,))
    T = Vertex("T", FreeRank(2), ("x", "y"), ((1,), (2,)))
    snames = []
    for i in range(1, g):
        snames += [f"x{i}", f"y{i}"]
    S = Vertex("S", FreeRank(2 * (g - 1)), tuple(snames),
               tuple((j,) for j in range(3, 2 * g + 1)))
    boundary_s = tuple(x for i in range(g - 1) for x in _commutator(2 * i + 1, 2 * i + 2))
    e = Edge("c", "T", "S", CyclicZ(), marking=(_commutator(1, 2),), stable_letter=(),
             words_source=(_commutator(1, 2),), words_target=(pres.inverse(boundary_s),))
    return GraphOfGroups((T, S), (e,), amb, acylindricity_k=2, edge_rank_bound_n=1,
                         name=f"surface_amalgam({g})")


def _ints(params: Sequence[str]) -> list[int]:
    try:
        return [int(x) for x in params]
    except ValueError:
        raise ConfigurationError(f"integer parameters expected, got {list(params)}") from None


BUILTINS: dict[str, Callable] = {
    "free_product_finite_cyclics": lambda ps: free_product_finite_cyclics(*_ints(ps)),
    "amalgam_finite_cyclics": lambda ps: amalgam_finite_cyclics(*_ints(ps)),
    "wedge": lambda ps: wedge(*_ints(ps)),
    "rose": lambda ps: rose(*_ints(ps)),
    "surface_amalgam": lambda ps: surface_amalgam(*_ints(ps)),
    "modular": lambda ps: modular(),
    "infinite_dihedral": lambda ps: infinite_dihedral(),
    "sl2z": lambda ps: sl2z(),
}


def builtin(name: str, params: Sequence[str] = ()) -> tuple[Presentation, GraphOfGroups]:
    try:
        make = BUILTINS[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown builtin {name!r}; choose from {sorted(BUILTINS)}") from None
    try:
        Y = make(list(params))
    except TypeError as exc:
        raise ConfigurationError(f"bad parameters for {name}: {exc}") from None
    return Y.ambient, Y


def assemble(vertices: Sequence[tuple], edges: Sequence[tuple], acylindricity_k=None,
             edge_rank_bound_n: int = 1, name: str = "") -> GraphOfGroups:
    """Marked splitting with the standard presentation of its fundamental group.

    ``vertices`` holds ``(id, descriptor, local_names)``; ``edges`` holds
    ``(id, source, target, descriptor, words_source, words_target, is_tree)``
    with words in the endpoints' local names.  Ambient generators are
    ``<vertex>_<local name>`` plus ``t_<edge>`` for every non-tree edge, and
    the relators are the vertex relators together with one relation per
    edge generator.
    """
    from .gog import abstract_relators

    gen_names: list[str] = []
    offset = {}
    for vid, desc, names in vertices:
        offset[vid] = len(gen_names)
        gen_names += [f"{vid}_{n}" for n in names]
    stable_index = {}
    for eid, _, _, _, _, _, tree in edges:
        if not tree:
            gen_names.append(f"t_{eid}")
            stable_index[eid] = len(gen_names)

    def lift(vid, w):
        return tuple(x + offset[vid] if x > 0 else x - offset[vid] for x in w)

    relators = []
    vlist = []
    for vid, desc, names in vertices:
        for r in abstract_relators(desc):
            relators.append(lift(vid, r))
        marking = tuple((offset[vid] + i + 1,) for i in range(len(names)))
        vlist.append(Vertex(vid, desc, tuple(names), marking))
    elist = []
    for eid, src, tgt, desc, ws, wt, tree in edges:
        ws = tuple(tuple(w) for w in ws)
        wt = tuple(tuple(w) for w in wt)
        marking = tuple(lift(src, w) for w in ws)
        t = (stable_index[eid],) if not tree else ()
        for a, b in zip(ws, wt):
            left = pres.conjugate(lift(src, a), pres.inverse(t)) if t else lift(src, a)
            rel = pres.concat(left, pres.inverse(lift(tgt, b)))
            if rel:
                relators.append(rel)
        elist.append(Edge(eid, src, tgt, desc, marking=marking, stable_letter=t,
                          words_source=ws, words_target=wt))
    amb = Presentation(tuple(gen_names), tuple(relators))
    return GraphOfGroups(tuple(vlist), tuple(elist), amb, acylindricity_k,
                         edge_rank_bound_n, name)
