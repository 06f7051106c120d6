"""Declarative TOML documents for marked splittings.

Layout::

    [meta]                      # optional
    name = "modular"
    acylindricity_k = 2         # optional
    edge_rank_bound_n = 1

    [group]
    generators = ["a", "b"]
    relators = ["a^2", "b^3"]

    [[vertices]]
    id = "v1"
    kind = "finite"             # trivial | finite | free | cyclic | free_abelian | surface | opaque
    generators = ["x"]          # local names used by inclusion words
    degree = 2                  # finite only
    perms = ["(0 1)"]           # finite only, one per local generator
    relators = ["x^2"]          # finite only
    marking = ["a"]             # one ambient word per local generator
    phi = "1/2"                 # optional override

    [[edges]]
    id = "e1"
    source = "v1"
    target = "v2"
    kind = "trivial"            # trivial | finite | cyclic | free_abelian
    marking = []
    stable_letter = ""          # "" marks a spanning-tree edge
    inclusion_source = []       # words in the source vertex's local names
    inclusion_target = []

Serialization is deterministic, so ``dump(load(dump(Y))) == dump(Y)``.
"""
from __future__ import annotations

import sys
from fractions import Fraction
from typing import Any

import tomli_w

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from . import presentation as pres
from .errors import GGVolError, ParseError, PreconditionError
from .gog import (CyclicZ, Edge, Finite, FreeAbelianRank, FreeRank, GraphOfGroups, Opaque,
                  SurfaceGenus, Vertex)
from .permgroup import FiniteGroup, perm_from_cycles, perm_to_cycles, trivial_group
from .presentation import Presentation

VERTEX_KIND_NAMES = ("trivial", "finite", "free", "cyclic", "free_abelian", "surface", "opaque")
EDGE_KIND_NAMES = ("trivial", "finite", "cyclic", "free_abelian")


def _fraction(value, where) -> Fraction:
    try:
        return Fraction(str(value)) if not isinstance(value, int) else Fraction(value)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"not a rational number: {value!r}", where) from None


def _format_fraction(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _get(table: dict, key: str, where: str, kind=None, default: Any = ...):
    if key not in table:
        if default is ...:
            raise ParseError(f"missing key {key!r}", where)
        return default
    value = table[key]
    if kind is not None and not isinstance(value, kind):
        raise ParseError(f"key {key!r} has the wrong type", where)
    return value


def _words(texts, names, where) -> tuple:
    if not isinstance(texts, list) or not all(isinstance(t, str) for t in texts):
        raise ParseError("expected a list of word strings", where)
    try:
        return tuple(pres.parse_word(t, names) for t in texts)
    except GGVolError as exc:
        raise ParseError(str(exc), where) from None


def _finite_group(table, where, ngens) -> FiniteGroup:
    perms_text = _get(table, "perms", where, list)
    if len(perms_text) != ngens:
        raise ParseError(f"expected {ngens} permutations", where)
    try:
        parsed = [perm_from_cycles(t) for t in perms_text]
        degree = _get(table, "degree", where, int, max([len(x) for x in parsed] + [1]))
        perms = [perm_from_cycles(t, degree) for t in perms_text]
        return FiniteGroup(degree, perms)
    except GGVolError as exc:
        raise ParseError(str(exc), where) from None


def _vertex(table: dict, i: int, ambient: Presentation) -> Vertex:
    where = f"vertices[{i}]"
    vid = _get(table, "id", where, str)
    where = f"vertex {vid!r}"
    kind = _get(table, "kind", where, str)
    if kind not in VERTEX_KIND_NAMES:
        raise ParseError(f"unknown vertex kind {kind!r}", where)
    names = tuple(_get(table, "generators", where, list, []))
    try:
        if kind == "trivial":
            desc = Finite(trivial_group())
        elif kind == "finite":
            group = _finite_group(table, where, len(names))
            rels = _words(_get(table, "relators", where, list), names, where + ".relators")
            desc = Finite(group, rels)
        elif kind == "free":
            desc = FreeRank(_get(table, "rank", where, int))
        elif kind == "cyclic":
            desc = CyclicZ()
        elif kind == "free_abelian":
            desc = FreeAbelianRank(_get(table, "rank", where, int))
        elif kind == "surface":
            desc = SurfaceGenus(_get(table, "genus", where, int))
        else:
            desc = Opaque(_get(table, "rank_upper", where, int),
                          _fraction(_get(table, "phi", where), where),
                          _get(table, "one_ended", where, bool, False))
    except ParseError:
        raise
    except GGVolError as exc:
        raise ParseError(str(exc), where) from None
    if len(names) != desc.ngens:
        raise ParseError(f"expected {desc.ngens} local generator names", where)
    marking = _words(_get(table, "marking", where, list), ambient.generator_names,
                     where + ".marking")
    phi = None
    if kind != "opaque" and "phi" in table:
        phi = _fraction(table["phi"], where + ".phi")
    return Vertex(vid, desc, names, marking, phi)


def _edge(table: dict, i: int, ambient: Presentation, vertices: dict) -> Edge:
    where = f"edges[{i}]"
    eid = _get(table, "id", where, str)
    where = f"edge {eid!r}"
    kind = _get(table, "kind", where, str)
    if kind not in EDGE_KIND_NAMES:
        raise ParseError(f"unknown edge kind {kind!r}", where)
    src = _get(table, "source", where, str)
    tgt = _get(table, "target", where, str)
    for end in (src, tgt):
        if end not in vertices:
            raise ParseError(f"unknown endpoint {end!r}", where)
    marking_text = _get(table, "marking", where, list)
    try:
        if kind == "trivial":
            desc = Finite(trivial_group())
        elif kind == "finite":
            desc = Finite(_finite_group(table, where, len(marking_text)))
        elif kind == "cyclic":
            desc = CyclicZ()
        else:
            desc = FreeAbelianRank(_get(table, "rank", where, int))
    except ParseError:
        raise
    except GGVolError as exc:
        raise ParseError(str(exc), where) from None
    marking = _words(marking_text, ambient.generator_names, where + ".marking")
    if len(marking) != desc.ngens:
        raise ParseError(f"expected {desc.ngens} marking words", where)
    if "stable_letter" not in table:
        raise ParseError("missing key 'stable_letter' (use \"\" for spanning-tree edges)", where)
    stable = _words([_get(table, "stable_letter", where, str)], ambient.generator_names,
                    where + ".stable_letter")[0]
    ws = _words(_get(table, "inclusion_source", where, list), vertices[src].local_names,
                where + ".inclusion_source")
    wt = _words(_get(table, "inclusion_target", where, list), vertices[tgt].local_names,
                where + ".inclusion_target")
    return Edge(eid, src, tgt, desc, marking=marking, stable_letter=stable,
                words_source=ws, words_target=wt)


def loads(text: str) -> tuple[Presentation, GraphOfGroups]:
    """Parse a document into the ambient presentation and its marked splitting."""
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ParseError(f"TOML syntax error: {exc}") from None
    group = _get(doc, "group", "document", dict)
    gens = _get(group, "generators", "[group]", list)
    try:
        ambient = Presentation.parse(gens, _get(group, "relators", "[group]", list, []))
    except GGVolError as exc:
        raise ParseError(str(exc), "[group]") from None
    meta = _get(doc, "meta", "document", dict, {})
    vertices = [_vertex(t, i, ambient) for i, t in enumerate(_get(doc, "vertices", "document", list))]
    vmap = {}
    for v in vertices:
        if v.id in vmap:
            raise ParseError(f"duplicate vertex id {v.id!r}", "vertices")
        vmap[v.id] = v
    edges = [_edge(t, i, ambient, vmap) for i, t in enumerate(_get(doc, "edges", "document", list, []))]
    try:
        Y = GraphOfGroups(tuple(vertices), tuple(edges), ambient,
                          _get(meta, "acylindricity_k", "[meta]", int, None),
                          _get(meta, "edge_rank_bound_n", "[meta]", int, 1),
                          _get(meta, "name", "[meta]", str, ""))
    except ParseError:
        raise
    except GGVolError as exc:
        raise ParseError(str(exc), "graph") from None
    return ambient, Y


def load(path) -> tuple[Presentation, GraphOfGroups]:
    with open(path, "r", encoding="utf-8") as fh:
        return loads(fh.read())


def _vertex_table(v: Vertex, ambient: Presentation) -> dict:
    d = v.descriptor
    t: dict[str, Any] = {"id": v.id}
    names = list(v.local_names)
    if isinstance(d, Finite) and d.is_trivial and not names:
        t["kind"] = "trivial"
    else:
        t["kind"] = d.kind
    t["generators"] = names
    if isinstance(d, Finite) and t["kind"] == "finite":
        t["degree"] = d.group.degree
        t["perms"] = [perm_to_cycles(g) for g in d.group.generators]
        t["relators"] = [pres.format_word(r, names) for r in d.relators]
    elif isinstance(d, (FreeRank, FreeAbelianRank)):
        t["rank"] = d.rank
    elif isinstance(d, SurfaceGenus):
        t["genus"] = d.genus
    elif isinstance(d, Opaque):
        t["rank_upper"] = d.rank_upper
        t["phi"] = _format_fraction(d.phi)
        t["one_ended"] = d.one_ended
    t["marking"] = [ambient.format(w) for w in v.marking]
    if v.phi is not None and not isinstance(d, Opaque):
        t["phi"] = _format_fraction(v.phi)
    return t


def _edge_table(e: Edge, Y: GraphOfGroups) -> dict:
    d = e.descriptor
    amb = Y.ambient
    t: dict[str, Any] = {"id": e.id, "source": e.source, "target": e.target}
    if isinstance(d, Finite):
        t["kind"] = "trivial" if d.is_trivial and not d.group.generators else "finite"
        if t["kind"] == "finite":
            t["degree"] = d.group.degree
            t["perms"] = [perm_to_cycles(g) for g in d.group.generators]
    else:
        t["kind"] = d.kind
        if isinstance(d, FreeAbelianRank):
            t["rank"] = d.rank
    t["marking"] = [amb.format(w) for w in e.marking]
    t["stable_letter"] = amb.format(e.stable_letter)
    src, tgt = Y.vertex(e.source), Y.vertex(e.target)
    t["inclusion_source"] = [pres.format_word(w, src.local_names) for w in e.words_source]
    t["inclusion_target"] = [pres.format_word(w, tgt.local_names) for w in e.words_target]
    return t


def dumps(Y: GraphOfGroups) -> str:
    if Y.ambient is None or any(e.words_source is None for e in Y.edges):
        raise PreconditionError("only marked splittings with inclusion words can be written")
    meta: dict[str, Any] = {}
    if Y.name:
        meta["name"] = Y.name
    if Y.acylindricity_k is not None:
        meta["acylindricity_k"] = Y.acylindricity_k
    meta["edge_rank_bound_n"] = Y.edge_rank_bound_n
    doc = {
        "meta": meta,
        "group": {"generators": list(Y.ambient.generator_names),
                  "relators": [Y.ambient.format(r) for r in Y.ambient.relators]},
        "vertices": [_vertex_table(v, Y.ambient) for v in Y.vertices],
    }
    if Y.edges:
        doc["edges"] = [_edge_table(e, Y) for e in Y.edges]
    return tomli_w.dumps(doc)


def dump(Y: GraphOfGroups, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(Y))
