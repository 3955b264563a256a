"""
Tests for exact rationals, truncated hbar series and Koszul signs
"""

import random

import pytest
from sympy.polys.domains import QQ

from algebra.errors import ConfigMismatch, DomainError, NotInvertible
from algebra.series import (
    KoszulContext,
    ScalarSeries,
    exp_series,
    format_rational,
    koszul_sign,
    parse_rational,
    series_add,
    series_invert,
    series_mul,
    sort_with_sign,
    to_rational,
)


def random_series(rng, order, constant=None):
    terms = {n: QQ(rng.randint(-5, 5), rng.randint(1, 4)) for n in range(order + 1)}
    if constant is not None:
        terms[0] = QQ(constant)
    return ScalarSeries.from_terms(terms, order)


def test_rational_literals():
    assert parse_rational("3/6") == QQ(1, 2)
    assert parse_rational("-4") == QQ(-4)
    assert format_rational(QQ(6, 4)) == "3/2"
    assert format_rational(QQ(-7)) == "-7"
    assert to_rational(5) == QQ(5)
    with pytest.raises(DomainError):
        parse_rational("1/0")
    with pytest.raises(DomainError):
        parse_rational("0.5")
    with pytest.raises(DomainError):
        to_rational(0.5)
    print("✓ Rational literals parse and format exactly")


def test_series_product_truncates():
    # (1 + hbar)^2 at N = 1
    s = ScalarSeries.from_terms({0: 1, 1: 1}, 1)
    assert (s * s).coefficients == (QQ(1), QQ(2))
    # hbar^N * hbar = 0 at N = 3
    top = ScalarSeries.monomial(1, 3, 3)
    assert (top * ScalarSeries.monomial(1, 1, 3)).is_zero()
    print("✓ Products truncate at hbar^(N+1)")


def test_series_inverse():
    one_minus = ScalarSeries.from_terms({0: 1, 1: -1}, 3)
    assert one_minus.invert().coefficients == (QQ(1),) * 4
    rng = random.Random(7)
    for _ in range(20):
        s = random_series(rng, 4, constant=rng.choice([1, 2, -3]))
        assert s * s.invert() == ScalarSeries.one(4)
    with pytest.raises(NotInvertible):
        ScalarSeries.monomial(1, 1, 3).invert()
    print("✓ Series inverses are exact")


def test_series_ring_axioms():
    rng = random.Random(11)
    for _ in range(30):
        a, b, c = (random_series(rng, 4) for _ in range(3))
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a * b == b * a
        assert a - a == ScalarSeries.zero(4)
    print("✓ Ring axioms hold on random series")


def test_order_mismatch():
    with pytest.raises(ConfigMismatch):
        ScalarSeries.one(2) + ScalarSeries.one(3)
    print("✓ Mixed truncation orders are rejected")


def test_exp_series():
    assert exp_series(1, 3).coefficients == (QQ(1), QQ(1), QQ(1, 2), QQ(1, 6))
    assert exp_series(2, 2) * exp_series(-2, 2) == ScalarSeries.one(2)
    print("✓ exp(a hbar) coefficients")


def test_valuation_and_records():
    s = ScalarSeries.from_terms({2: "1/3", 4: -1}, 4)
    assert s.valuation == 2
    assert s.to_records() == [[2, "1/3"], [4, "-1"]]
    assert ScalarSeries.zero(4).valuation == 5
    print("✓ Valuation and records")


def test_koszul_signs():
    # swapping two odd factors
    assert koszul_sign((1, 0), KoszulContext.of([1, 1])) == -1
    # an even factor commutes with anything
    assert koszul_sign((1, 0), KoszulContext.of([0, 1])) == 1
    # cyclic move of three odd factors is even
    assert koszul_sign((1, 2, 0), KoszulContext.of([1, 1, 1])) == 1
    with pytest.raises(DomainError):
        koszul_sign((0, 0), KoszulContext.of([1, 1]))
    with pytest.raises(ConfigMismatch):
        koszul_sign((0, 1), KoszulContext.of([1]))
    print("✓ Koszul signs")


def test_sort_with_sign():
    assert sort_with_sign((2, 0, 1), [1, 1, 1]) == ((0, 1, 2), 1)
    assert sort_with_sign((1, 0), [1, 1]) == ((0, 1), -1)
    assert sort_with_sign((1, 1), [1, 1])[1] == 0
    # repeated even factors survive
    assert sort_with_sign((1, 1), [0, 0]) == ((1, 1), 1)
    print("✓ Sorting graded factors")


def test_series_functions():
    a = ScalarSeries.from_terms({0: 1, 1: 1}, 3)
    b = ScalarSeries.from_terms({1: 2}, 3)
    assert series_add(a, b) == ScalarSeries.from_terms({0: 1, 1: 3}, 3)
    # (1 + hbar)(1 - hbar) = 1 - hbar^2
    assert series_mul(a, ScalarSeries.from_terms({0: 1, 1: -1}, 3)) == ScalarSeries.from_terms({0: 1, 2: -1}, 3)
    inverse = series_invert(ScalarSeries.from_terms({0: 2, 1: 3}, 3))
    assert inverse.coefficients[:2] == (QQ(1, 2), QQ(-3, 4))
    assert series_mul(inverse, ScalarSeries.from_terms({0: 2, 1: 3}, 3)) == ScalarSeries.one(3)
    with pytest.raises(ConfigMismatch):
        series_mul(a, ScalarSeries.one(2))
    print("✓ series_add, series_mul and series_invert")
