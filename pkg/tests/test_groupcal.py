import json
import warnings
from fractions import Fraction

import pytest

from liebraid.freealg import Alphabet, Series, series_exp, series_log
from liebraid.freelie import Bracket, LieElement, is_grouplike
from liebraid.groupcal import (
    GroupElement,
    PiecewisePath,
    bch,
    group_inverse,
    grouplike_test,
    lie_exp,
    ordered_exp,
    ordered_exp_factorize,
    path_from_json,
    path_to_json,
)
from liebraid.kohno import KohnoAlgebra, factorize, kohno_mul, normal_form

A = Alphabet.free(2)


def gen(i, N):
    return Series.letter(A, N, i)


def test_bch_degree_two():
    expected = gen(1, 2) + gen(2, 2) + (Series.word(A, 2, (1, 2)) - Series.word(A, 2, (2, 1))).scale(Fraction(1, 2))
    assert bch(gen(1, 2), gen(2, 2), 2) == expected


def test_bch_degree_three_terms():
    x, y = LieElement.generator(A, 1), LieElement.generator(A, 2)
    # [w2,[w2,w1]] = [[w1,w2],w2] in the Lyndon basis
    expected = LieElement(
        A, {1: 1, 2: 1, Bracket(1, 2): Fraction(1, 2), Bracket(1, Bracket(1, 2)): Fraction(1, 12),
            Bracket(Bracket(1, 2), 2): Fraction(1, 12)}
    )
    assert bch(x, y, 3) == expected.expand(3)


def test_bch_inverse_pair_vanishes():
    x = LieElement(A, {1: Fraction(2, 3), Bracket(1, 2): -1, Bracket(Bracket(1, 2), 2): 5})
    assert bch(x, x.scale(-1), 4).is_zero()


def test_bch_matches_exp_product():
    x = gen(1, 5) + gen(2, 5).scale(3)
    y = gen(2, 5) - (Series.word(A, 5, (1, 2)) - Series.word(A, 5, (2, 1)))
    assert series_exp(bch(x, y, 5)) == series_exp(x) * series_exp(y)


def test_group_element_requires_constant_one():
    with pytest.raises(ValueError):
        GroupElement(gen(1, 3))
    assert GroupElement.checked(series_exp(gen(1, 3))).verified


def test_group_inverse_examples():
    g = series_exp(gen(1, 4))
    assert group_inverse(g).series == series_exp(-gen(1, 4))
    assert group_inverse(Series.one(A, 4)).series == Series.one(A, 4)
    K = KohnoAlgebra(3)
    g = kohno_mul(series_exp(K.r(1, 2, 4)), series_exp(K.r(2, 3, 4)))
    inv = group_inverse(g)
    assert inv.verified
    assert kohno_mul(g, inv.series) == K.one(4)


def test_group_inverse_warns_off_group():
    s = Series(A, 2, {(): 1, (1,): 1, (2,): 1})
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        inv = group_inverse(s)
    assert not inv.verified
    assert any(issubclass(w.category, RuntimeWarning) for w in caught)
    assert (s * inv.series) == Series.one(A, 2)


def test_grouplike_test_kohno_uses_factors():
    K = KohnoAlgebra(3)
    g = kohno_mul(series_exp(K.r(2, 3, 3)), series_exp(K.r(1, 2, 3)))
    assert grouplike_test(g)
    assert not grouplike_test(g + K.r(1, 2, 3).scale(Fraction(1, 1000)))


def test_ordered_exp_constant_path():
    x = gen(1, 4) + gen(2, 4).scale(2)
    assert ordered_exp(PiecewisePath.constant(x), 4).series == series_exp(x)


def test_ordered_exp_two_constant_pieces():
    x, y = gen(1, 4), gen(2, 4)
    path = PiecewisePath.constant(x).then(PiecewisePath.constant(y))
    assert ordered_exp(path, 4).series == series_exp(x) * series_exp(y)


def test_ordered_exp_abelian_polynomial_path():
    # gamma(t) = (1 + 3 t^2) w1 on [0, 2]: integral is 2 + 8 = 10
    seg = PiecewisePath.segment(A, 2, [(gen(1, 5), [1, 0, 3])])
    path = PiecewisePath(A, [seg])
    assert ordered_exp(path, 5).series == series_exp(gen(1, 5).scale(10))


def test_ordered_exp_is_grouplike_for_time_dependent_path():
    seg = PiecewisePath.segment(A, Fraction(3, 2), [(gen(1, 4), [0, 1]), (gen(2, 4), [1, 0, -2])])
    E = ordered_exp(PiecewisePath(A, [seg]), 4)
    assert is_grouplike(E.series)


def test_concatenation_and_reversal():
    s1 = PiecewisePath.segment(A, 1, [(gen(1, 5), [0, 2]), (gen(2, 5), [1])])
    s2 = PiecewisePath.segment(A, Fraction(1, 2), [(gen(2, 5), [0, 0, 1]), (gen(1, 5), [-1])])
    p1, p2 = PiecewisePath(A, [s1]), PiecewisePath(A, [s2])
    assert ordered_exp(p1.then(p2), 5).series == ordered_exp(p1, 5).series * ordered_exp(p2, 5).series
    path = p1.then(p2)
    assert (ordered_exp(path, 5).series * ordered_exp(path.reversed(), 5).series) == Series.one(A, 5)


def test_ordered_exp_factorize_single_block():
    K = KohnoAlgebra(3)
    path = PiecewisePath.constant(K.r(1, 2, 4) + K.r(1, 3, 4).scale(2))
    U1, U2 = ordered_exp_factorize(path, 4)
    assert U1.series == K.one(4)
    assert U2.series == normal_form(series_exp(K.r(1, 2, 4) + K.r(1, 3, 4).scale(2), kohno_mul))
    path = PiecewisePath.constant(K.r(2, 3, 4))
    U1, U2 = ordered_exp_factorize(path, 4)
    assert U1.series == series_exp(K.r(2, 3, 4)) and U2.series == K.one(4)


def test_ordered_exp_factorize_reassembles():
    K = KohnoAlgebra(3)
    path = PiecewisePath.constant(K.r(1, 2, 4) + K.r(2, 3, 4))
    U1, U2 = ordered_exp_factorize(path, 4)
    E = ordered_exp(path, 4).series
    assert kohno_mul(U2.series, U1.series) == E
    assert factorize(E) == [U2.series, U1.series]


def test_lie_exp_and_log_roundtrip():
    x = LieElement(A, {1: 1, Bracket(1, 2): Fraction(1, 3)})
    g = lie_exp(x, 4)
    assert series_log(g) == x.expand(4)


def test_path_json_roundtrip():
    K = Alphabet.kohno(3)
    seg = PiecewisePath.segment(K, Fraction(1, 2), [(Series.letter(K, 3, (1, 2)), [1, Fraction(-1, 3)])])
    path = PiecewisePath(K, [seg])
    doc = path_to_json(path)
    back = path_from_json(json.dumps(doc))
    assert ordered_exp(back, 3).series == ordered_exp(path, 3).series


def test_path_degree_above_truncation_rejected():
    path = PiecewisePath.constant(Series.word(A, 3, (1, 2, 1)))
    with pytest.raises(ValueError):
        ordered_exp(path, 2)
