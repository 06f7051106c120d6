"""Complexity of graph-of-groups splittings and exact rational volume estimates
over finite-index normal subgroups."""
from importlib import resources

from .constructions import builtin
from .docformat import dump, dumps, load, loads
from .gog import GraphOfGroups, complexity, reduce, weighted_complexity

__version__ = "0.1.0"

FIXTURE_NAMES = ("modular", "infinite_dihedral", "wedge2", "sl2z", "surface_amalgam2")


def fixture_path(name: str):
    """Path of a shipped TOML fixture by short name (see ``FIXTURE_NAMES``)."""
    return resources.files(__name__).joinpath("fixtures", f"{name}.toml")


__all__ = ["GraphOfGroups", "builtin", "complexity", "dump", "dumps", "fixture_path",
           "load", "loads", "reduce", "weighted_complexity", "FIXTURE_NAMES"]
