import pytest
from hypothesis import given, strategies as st

from ggvol import presentation as pres
from ggvol.errors import ParseError, StructuralError
from ggvol.permgroup import cyclic_group, symmetric_group

letters = st.integers(min_value=1, max_value=3).flatmap(
    lambda g: st.sampled_from([g, -g]))
words = st.lists(letters, max_size=12).map(tuple)


@given(words)
def test_free_reduce_idempotent(w):
    r = pres.free_reduce(w)
    assert pres.free_reduce(r) == r
    assert all(r[i] != -r[i + 1] for i in range(len(r) - 1))


@given(words, words)
def test_inverse_of_concat(u, v):
    assert pres.inverse(pres.concat(u, v)) == pres.concat(pres.inverse(v), pres.inverse(u))
    assert pres.concat(u, pres.inverse(u)) == ()


@given(words)
def test_parse_format_roundtrip(w):
    names = ("a", "b", "c")
    w = pres.free_reduce(w)
    assert pres.parse_word(pres.format_word(w, names), names) == w


@given(words, st.integers(min_value=-4, max_value=4))
def test_exponent_sum_of_power(w, n):
    for g in (1, 2, 3):
        assert pres.exponent_sum(pres.power(w, n), g) == n * pres.exponent_sum(w, g)


def test_conjugate_convention():
    assert pres.conjugate((1,), (2,)) == (2, 1, -2)


def test_substitute():
    assert pres.substitute((1, -2), [(2, 2), (1,)]) == (2, 2, -1)


def test_parse_errors():
    with pytest.raises(ParseError):
        pres.parse_word("a z", ("a", "b"))
    with pytest.raises(ParseError):
        pres.parse_word("a^x", ("a",))
    assert pres.parse_word("1", ("a",)) == ()
    assert pres.parse_word("a^-2 b", ("a", "b")) == (-1, -1, 2)


def test_presentation_validation():
    with pytest.raises(StructuralError):
        pres.Presentation(("a", "a"))
    with pytest.raises(StructuralError):
        pres.Presentation(("a",), ((2,),))


def test_group_map_checks_relators():
    p = pres.Presentation.parse(["a", "b"], ["a^2", "b^3"])
    S3 = symmetric_group(3)
    t = (1, 0, 2)
    c = (1, 2, 0)
    m = pres.GroupMap(p, S3, (t, c))
    assert m((1, 1)) == S3.identity
    assert m((1, 2)) == S3.mul(t, c)
    with pytest.raises(StructuralError):
        pres.GroupMap(p, S3, (c, t))


def test_evaluation_is_left_to_right():
    Z = cyclic_group(5)
    g = Z.generators[0]
    assert pres.evaluate_images(Z, [g], (1, 1, -1, 1)) == Z.mul(g, g)
    p = pres.Presentation.parse(["a"], ["a^5"])
    assert pres.verify_hom(p, Z, [g])
    assert pres.failing_relator(pres.Presentation.parse(["a"], ["a^3"]), Z, [g]) == (1, 1, 1)
