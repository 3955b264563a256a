"""
Tests for the H_poly DGLA: insertion product, bracket, differential and braces
"""

import random

import pytest

from algebra.enveloping import EnvelopingAlgebra
from algebra.errors import AlgebraMismatch, DomainError
from algebra.lie import abelian_algebra, ax_plus_b_algebra, sl2_algebra
from twist.hpoly import (
    HPoly,
    associator,
    braces,
    bullet,
    gerstenhaber_bracket,
    hochschild_differential,
    random_element,
)

ORDER = 4
SAMPLES = 100


def sign(exponent):
    return -1 if exponent % 2 else 1


def make_hpoly(lie):
    return HPoly(EnvelopingAlgebra(lie, ORDER))


def sample(hpoly, rng, degree):
    return random_element(hpoly, rng, degree, max_degree=2, max_power=2)


def test_differential_on_degree_zero():
    hpoly = make_hpoly(abelian_algebra(2))
    U = hpoly.algebra
    e1 = hpoly.element(U.generator(0).as_word())
    assert hochschild_differential(e1).is_zero()
    one = hpoly.element(U.unit_word(1))
    assert hochschild_differential(one) == hpoly.unit()
    e1e2 = hpoly.element(U.element({(1, 1): 1}).as_word())
    expected = hpoly.element(U.word({((1, 0), (0, 1)): -1, ((0, 1), (1, 0)): -1}, 2))
    assert hochschild_differential(e1e2) == expected
    print("✓ d(u) = u (x) 1 + 1 (x) u - D(u)")


def test_differential_squares_to_zero():
    rng = random.Random(10)
    for lie in (ax_plus_b_algebra(), sl2_algebra()):
        hpoly = make_hpoly(lie)
        for _ in range(SAMPLES):
            p = sample(hpoly, rng, rng.randint(-1, 2))
            assert hochschild_differential(hochschild_differential(p)).is_zero()
    print("✓ d^2 = 0")


def test_bracket_is_graded_lie():
    rng = random.Random(11)
    hpoly = make_hpoly(ax_plus_b_algebra())
    for _ in range(SAMPLES):
        degrees = [rng.randint(0, 2) for _ in range(3)]
        p, q, r = (sample(hpoly, rng, d) for d in degrees)
        dp, dq, _ = degrees
        assert gerstenhaber_bracket(p, q) == -gerstenhaber_bracket(q, p).scale(sign(dp * dq))
        lhs = gerstenhaber_bracket(p, gerstenhaber_bracket(q, r))
        rhs = (gerstenhaber_bracket(gerstenhaber_bracket(p, q), r)
               + gerstenhaber_bracket(q, gerstenhaber_bracket(p, r)).scale(sign(dp * dq)))
        assert lhs == rhs
    print("✓ Bracket is graded antisymmetric and satisfies Jacobi")


def test_differential_is_a_derivation():
    rng = random.Random(12)
    hpoly = make_hpoly(sl2_algebra())
    d = hochschild_differential
    for _ in range(SAMPLES):
        dp = rng.randint(0, 2)
        p = sample(hpoly, rng, dp)
        q = sample(hpoly, rng, rng.randint(0, 2))
        lhs = d(gerstenhaber_bracket(p, q))
        rhs = gerstenhaber_bracket(d(p), q) + gerstenhaber_bracket(p, d(q)).scale(sign(dp))
        assert lhs == rhs
    print("✓ d is a derivation of the bracket")


def test_pre_lie_and_brace_relation():
    rng = random.Random(13)
    for lie in (abelian_algebra(2), ax_plus_b_algebra()):
        hpoly = make_hpoly(lie)
        for _ in range(SAMPLES):
            degrees = [rng.randint(0, 2) for _ in range(3)]
            a, b, c = (random_element(hpoly, rng, d) for d in degrees)
            _, db, dc = degrees
            assert associator(a, b, c) == associator(a, c, b).scale(sign(db * dc))
            lhs = bullet(bullet(a, b), c) - bullet(a, bullet(b, c))
            rhs = braces(a, [b, c]).scale(sign(db * dc)) + braces(a, [c, b])
            assert lhs == rhs
            assert braces(a, [b]) == bullet(a, b)
    print("✓ Pre-Lie identity and the two-element brace relation")


def test_brace_errors():
    hpoly = make_hpoly(ax_plus_b_algebra())
    other = make_hpoly(ax_plus_b_algebra())
    with pytest.raises(DomainError):
        braces(hpoly.unit(), [])
    with pytest.raises(AlgebraMismatch):
        bullet(hpoly.unit(), other.unit())
    print("✓ Brace argument checks")
