"""Words, finite presentations and homomorphisms into finite groups.

A word is a tuple of signed 1-based generator indices: ``3`` is the third
generator and ``-3`` its inverse.  Nothing beyond free reduction is ever
normalised; questions about equality in G are answered inside finite
quotients only.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

from .errors import ParseError, StructuralError

Word = tuple[int, ...]

_TOKEN = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)(?:\^(-?\d+))?$")


def free_reduce(w: Sequence[int]) -> Word:
    out: list[int] = []
    for x in w:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def inverse(w: Sequence[int]) -> Word:
    return tuple(-x for x in reversed(w))


def concat(*words: Sequence[int]) -> Word:
    return free_reduce(tuple(x for w in words for x in w))


def conjugate(w: Sequence[int], t: Sequence[int]) -> Word:
    """Return ``t w t^-1``."""
    return concat(t, w, inverse(t))


def power(w: Sequence[int], n: int) -> Word:
    if n < 0:
        return power(inverse(w), -n)
    return free_reduce(tuple(w) * n)


def substitute(w: Sequence[int], images: Sequence[Sequence[int]]) -> Word:
    """Replace generator ``i`` by ``images[i-1]`` (inverses inverted)."""
    out: list[int] = []
    for x in w:
        img = images[abs(x) - 1]
        out.extend(img if x > 0 else inverse(img))
    return free_reduce(out)


def exponent_sum(w: Sequence[int], gen: int) -> int:
    return sum(1 if x == gen else -1 for x in w if abs(x) == gen)


def parse_word(text: str, names: Sequence[str]) -> Word:
    """Parse ``"a b^-1 a^3"``; the empty string and ``"1"`` are the identity."""
    index = {n: i + 1 for i, n in enumerate(names)}
    letters: list[int] = []
    text = text.strip()
    if text in ("", "1"):
        return ()
    for tok in text.split():
        m = _TOKEN.match(tok)
        if not m:
            raise ParseError(f"bad word token {tok!r} in {text!r}")
        name, exp = m.group(1), m.group(2)
        if name not in index:
            raise ParseError(f"unknown generator {name!r} in {text!r}")
        e = int(exp) if exp is not None else 1
        g = index[name]
        letters.extend([g if e > 0 else -g] * abs(e))
    return tuple(letters)


def format_word(w: Sequence[int], names: Sequence[str]) -> str:
    """Inverse of :func:`parse_word`; runs of a letter are written as powers."""
    if not w:
        return ""
    parts = []
    i = 0
    while i < len(w):
        j = i
        while j < len(w) and w[j] == w[i]:
            j += 1
        n = j - i
        name = names[abs(w[i]) - 1]
        e = n if w[i] > 0 else -n
        parts.append(name if e == 1 else f"{name}^{e}")
        i = j
    return " ".join(parts)


@dataclass(frozen=True)
class Presentation:
    generator_names: tuple[str, ...]
    relators: tuple[Word, ...] = ()

    def __post_init__(self):
        names = tuple(self.generator_names)
        object.__setattr__(self, "generator_names", names)
        object.__setattr__(self, "relators", tuple(tuple(r) for r in self.relators))
        if len(set(names)) != len(names):
            raise StructuralError(f"duplicate generator names in {names}")
        for n in names:
            if not n or not re.match(r"^[A-Za-z_][A-Za-z0-9_]*$", n):
                raise StructuralError(f"invalid generator name {n!r}")
        for r in self.relators:
            self.check_word(r)

    @property
    def rank(self) -> int:
        return len(self.generator_names)

    def check_word(self, w: Sequence[int]) -> None:
        for x in w:
            if x == 0 or abs(x) > self.rank:
                raise StructuralError(
                    f"generator index {x} outside alphabet of size {self.rank}")

    def word(self, text: str) -> Word:
        return parse_word(text, self.generator_names)

    def format(self, w: Sequence[int]) -> str:
        return format_word(w, self.generator_names)

    @classmethod
    def parse(cls, generators: Sequence[str], relators: Sequence[str] = ()) -> "Presentation":
        gens = tuple(generators)
        return cls(gens, tuple(parse_word(r, gens) for r in relators))


def evaluate_images(group, images: Sequence, w: Sequence[int]):
    """Product of ``images`` along ``w`` in ``group`` (anything with mul/inv/identity)."""
    x = group.identity
    for letter in w:
        i = abs(letter) - 1
        if letter == 0 or i >= len(images):
            raise StructuralError(f"generator index {letter} has no image")
        g = images[i]
        x = group.mul(x, g if letter > 0 else group.inv(g))
    return x


def verify_hom(p: Presentation, group, images: Sequence) -> bool:
    if len(images) != p.rank:
        raise StructuralError(f"expected {p.rank} images, got {len(images)}")
    return all(evaluate_images(group, images, r) == group.identity for r in p.relators)


def failing_relator(p: Presentation, group, images: Sequence):
    for r in p.relators:
        if evaluate_images(group, images, r) != group.identity:
            return r
    return None


@dataclass(frozen=True)
class GroupMap:
    """A homomorphism from the group presented by ``source`` into ``target``.

    The relators are checked at construction.
    """

    source: Presentation
    target: object
    images: tuple

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(self.images))
        for g in self.images:
            if not self.target.contains(g):
                raise StructuralError(f"image {g} is not an element of the target")
        bad = failing_relator(self.source, self.target, self.images)
        if bad is not None:
            raise StructuralError(
                f"relator {self.source.format(bad)!r} does not map to the identity")

    def __call__(self, w: Sequence[int]):
        return evaluate(self, w)


def evaluate(m: GroupMap, w: Sequence[int]):
    m.source.check_word(w)
    return evaluate_images(m.target, m.images, w)
