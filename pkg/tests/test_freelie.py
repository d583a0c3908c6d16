import json
from fractions import Fraction

import pytest

from liebraid.freealg import Alphabet, Series, series_exp
from liebraid.freelie import (
    Bracket,
    LieElement,
    bracket_expand,
    is_grouplike,
    is_lyndon,
    is_primitive,
    lie_dimension,
    lie_from_json,
    lie_to_json,
    lyndon_basis,
    lyndon_words,
    mobius,
    series_to_lie,
    shuffle_violations,
    standard_bracketing,
)

A = Alphabet.free(2)


def test_lyndon_basis_examples():
    assert lyndon_basis(2, 1) == [1, 2]
    assert lyndon_basis(2, 2) == [Bracket(1, 2)]
    assert lyndon_basis(2, 3) == [Bracket(1, Bracket(1, 2)), Bracket(Bracket(1, 2), 2)]


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_lyndon_count_matches_witt(m):
    for k in range(1, 9 if m < 4 else 7):
        assert len(lyndon_basis(m, k)) == lie_dimension(m, k)


def test_lyndon_words_are_lyndon_and_sorted():
    words = lyndon_words((1, 2, 3), 4)
    assert all(is_lyndon(w) for w in words)
    assert not is_lyndon((2, 1)) and not is_lyndon((1, 1)) and is_lyndon((1, 1, 2))


def test_standard_bracketing_uses_longest_lyndon_suffix():
    assert standard_bracketing((1, 1, 2, 2)) == Bracket(1, Bracket(Bracket(1, 2), 2))
    assert standard_bracketing((1, 2, 2)) == Bracket(Bracket(1, 2), 2)


def test_bracket_expand_examples():
    e = LieElement(A, {Bracket(1, 2): 1})
    assert bracket_expand(e, 2) == Series(A, 2, {(1, 2): 1, (2, 1): -1})
    assert bracket_expand(LieElement.generator(A, 1), 2) == Series.letter(A, 2, 1)
    e = LieElement(A, {Bracket(1, Bracket(1, 2)): 1})
    assert bracket_expand(e, 3) == Series(A, 3, {(1, 1, 2): 1, (1, 2, 1): -2, (2, 1, 1): 1})


def test_non_standard_bracketing_rejected():
    with pytest.raises(ValueError):
        LieElement(A, {Bracket(2, 1): 1})


def test_is_primitive_examples():
    x = LieElement(A, {1: 1, Bracket(1, 2): 1}).expand(3)
    assert is_primitive(x)
    assert not is_primitive(Series.word(A, 3, (1, 2)))
    assert not is_primitive(Series.one(A, 3))


def test_is_grouplike_examples():
    assert is_grouplike(series_exp(Series.letter(A, 6, 1)))
    g = Series(A, 2, {(): 1, (1,): 1, (2,): 1})
    assert not is_grouplike(g)
    bad = shuffle_violations(g)
    assert {"v": (1,), "w": (2,), "lhs": Fraction(1), "rhs": Fraction(0)} in bad
    x = LieElement(A, {1: 1, Bracket(1, 2): 1}).expand(4)
    assert is_grouplike(series_exp(x))


def test_is_grouplike_needs_constant_one():
    assert not is_grouplike(series_exp(Series.letter(A, 3, 1)).scale(2))


def test_series_to_lie_roundtrip():
    e = LieElement(A, {1: 3, Bracket(1, 2): Fraction(-1, 2), Bracket(Bracket(1, 2), 2): 5})
    assert series_to_lie(e.expand(3)) == e


def test_series_to_lie_rejects_non_primitive():
    with pytest.raises(ValueError):
        series_to_lie(Series.word(A, 2, (1, 2)))


def test_lie_dimension_examples():
    assert [lie_dimension(2, k) for k in (1, 2, 3)] == [2, 1, 2]
    assert [mobius(d) for d in range(1, 11)] == [1, -1, -1, 0, -1, 1, -1, 0, 0, 1]


def test_lie_json_roundtrip():
    K = Alphabet.kohno(3)
    e = LieElement(K, {(1, 2): 2, Bracket((1, 2), (1, 3)): Fraction(1, 3)})
    doc = lie_to_json(e)
    assert doc["terms"][1]["lyndon"] == [[1, 2], [1, 3]]
    assert lie_from_json(json.dumps(doc)) == e


def test_lie_json_diagnostics():
    with pytest.raises(ValueError, match="alphabet"):
        lie_from_json({"terms": []})
