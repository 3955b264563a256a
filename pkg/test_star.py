"""
Tests for twist star products: Moyal and Jordanian examples, associativity,
classical limit and the Maurer-Cartan consistency check
"""

import random

import pytest

from algebra.enveloping import EnvelopingAlgebra, TensorWord, random_element
from algebra.errors import AlgebraMismatch, DomainError
from algebra.lie import MultiVector, RMatrix, abelian_algebra, ax_plus_b_algebra
from algebra.series import ScalarSeries
from quantize.hochschild import deformation_symmetry_from_action
from quantize.polynomials import LieAction, PolynomialAlgebra, PolyVectorField, induced_poisson
from quantize.star import (
    HopfAction,
    StarProduct,
    associativity_report,
    classical_limit_check,
    hopf_action,
    mc_to_star_consistency,
    module_algebra_check,
    monomial_triples,
    star_product,
    star_table,
    twisted_module_check,
    unit_check,
)
from twist.solver import TwistSolver
from twist.twists import FormalTwist, abelian_twist, jordanian_twist, trivial_twist

ORDER = 3


def moyal_setup(order=ORDER):
    lie = abelian_algebra(2)
    U = EnvelopingAlgebra(lie, order)
    algebra = PolynomialAlgebra(["x", "y"], order)
    action = LieAction(lie, algebra, {
        0: PolyVectorField.coordinate(algebra, (0,)),
        1: PolyVectorField.coordinate(algebra, (1,)),
    })
    r = RMatrix(MultiVector.basis(lie, (0, 1), order))
    return U, algebra, action, r, abelian_twist(U, r)


def jordanian_setup(order=ORDER):
    lie = ax_plus_b_algebra()
    U = EnvelopingAlgebra(lie, order)
    algebra = PolynomialAlgebra(["x", "y"], order)
    x, y = algebra.generators
    action = LieAction(lie, algebra, {
        0: PolyVectorField(algebra, {(0,): -x, (1,): -y}),
        1: PolyVectorField.coordinate(algebra, (0,)),
    })
    r = RMatrix(MultiVector.basis(lie, (0, 1), order))
    return U, algebra, action, r, jordanian_twist(U, 0, 1)


def test_moyal_values():
    _, algebra, action, _, twist = moyal_setup()
    star = StarProduct(twist, action)
    x, y = algebra.generators
    hbar = algebra.hbar
    assert star(x, y) == x * y + hbar
    assert star(y, x) == x * y
    assert star(x ** 2, y ** 2) == x ** 2 * y ** 2 + 4 * hbar * x * y + 2 * hbar ** 2
    assert star.commutator(x, y) == hbar
    assert star(x + y, y) == star(x, y) + star(y, y)
    assert star_product(twist, action, x, y) == star(x, y)
    print("✓ x * y = xy + hbar, y * x = xy")


def test_moyal_is_certified():
    _, algebra, action, r, twist = moyal_setup()
    star = StarProduct(twist, action)
    triples = monomial_triples(algebra, 3)
    report = associativity_report(star, triples)
    assert report.associative and report.first_failure_order is None
    assert report.triples_checked == len(triples)
    assert unit_check(star, algebra.monomials(2))
    pi = induced_poisson(r, action)
    assert pi == PolyVectorField.coordinate(algebra, (0, 1))
    pairs = [(f, g) for f, g, _ in triples]
    assert classical_limit_check(star, pi, pairs)
    assert not classical_limit_check(star, pi.scale(2), pairs)
    print("✓ Moyal star product is associative, unital and quantizes dx ^ dy")


def solver_setup(order=ORDER):
    U, algebra, action, r, _ = jordanian_setup(order)
    return U, algebra, action, r, TwistSolver(U).solve(r)


def test_star_products_at_order_four():
    for setup in (moyal_setup, jordanian_setup, solver_setup):
        _, algebra, action, r, twist = setup(order=4)
        star = StarProduct(twist, action)
        triples = monomial_triples(algebra, 5)
        report = associativity_report(star, triples)
        assert report.associative, setup.__name__
        assert report.triples_checked == len(triples)
        pi = induced_poisson(r, action)
        assert classical_limit_check(star, pi, [(f, g) for f, g, _ in triples]), setup.__name__
    print("✓ Moyal, Jordanian and solved star products are associative with the right classical limit")


def test_mc_consistency():
    U, algebra, action, r, twist = moyal_setup()
    symmetry = deformation_symmetry_from_action(action, U)
    pi = induced_poisson(r, action)
    triples = monomial_triples(algebra, 2)
    report = mc_to_star_consistency(twist, symmetry, pi=pi, triples=triples)
    assert report.consistent
    assert report.mc_orders == []
    assert report.first_order_matches_poisson is True

    # hbar^2 e1^2 (x) 1 breaks the cocycle identity at second order
    broken = twist.J + TensorWord(U, 2, {((2, 0), (0, 0)): ScalarSeries.monomial(1, 2, ORDER)})
    corrupted = FormalTwist(broken, validate=False)
    report = mc_to_star_consistency(corrupted, symmetry, pi=pi, triples=triples)
    assert report.consistent
    assert report.mc_orders[0] == 2
    assert not report.associativity.associative
    assert report.associativity.first_failure_order == 2
    summary = report.to_dict(algebra)
    assert summary["associativity"]["first_failure_order"] == 2
    assert "2" in summary["associativity"]["witnesses"]
    print("✓ Hochschild MC residual and star associativity fail at the same orders")


def test_jordanian_star_product():
    U, algebra, action, r, twist = jordanian_setup()
    star = StarProduct(twist, action)
    x, y = algebra.generators
    hbar = algebra.hbar
    assert star(x, y) == x * y + hbar * y
    assert star(y, x) == x * y
    assert associativity_report(star, monomial_triples(algebra, 3)).associative
    assert unit_check(star, algebra.monomials(2))
    pi = induced_poisson(r, action)
    assert classical_limit_check(star, pi, [(x, y), (x ** 2, y), (y, x * y)])

    rng = random.Random(41)
    samples = []
    for _ in range(4):
        u = random_element(U, rng, max_degree=2, terms=2, max_power=1)
        f, g = rng.choice(algebra.monomials(2)), rng.choice(algebra.monomials(2))
        samples.append((u, f, g))
    assert twisted_module_check(star, samples)
    print("✓ Jordanian star product on the half plane")


def test_hopf_action():
    U, algebra, action, _, _ = jordanian_setup()
    x, y = algebra.generators
    assert hopf_action(action, U.named("E"), x ** 2) == 2 * x
    assert hopf_action(action, U.named("H"), x * y) == -2 * x * y
    # E H acts as E after H
    assert hopf_action(action, U.named("E") * U.named("H"), x ** 2) == -4 * x
    hopf = HopfAction(action)
    rng = random.Random(42)
    for _ in range(5):
        u = random_element(U, rng, max_degree=2, terms=2, max_power=1)
        assert module_algebra_check(hopf, u, x ** 2 + y, x * y)
    with pytest.raises(DomainError):
        hopf.word(U.unit_word(2), (x,))
    print("✓ U(g) acts on polynomials as a module algebra")


def test_trivial_and_table():
    U, algebra, action, _, twist = moyal_setup(order=2)
    x, y = algebra.generators
    plain = StarProduct(trivial_twist(U), action)
    assert plain(x, y) == x * y and plain(y, x ** 2) == x ** 2 * y

    table = star_table(StarProduct(twist, action), 1)
    entry = [e for e in table if e["f"] == [1, 0] and e["g"] == [0, 1] and e["order"] == 1]
    assert entry == [{"f": [1, 0], "g": [0, 1], "order": 1, "value": [[[0, 0], "1"]]}]
    assert not [e for e in table if e["f"] == [0, 1] and e["g"] == [1, 0] and e["order"] == 1]

    other = PolynomialAlgebra(["x", "y"], 3)
    mismatched = LieAction(action.lie, other, {0: PolyVectorField.coordinate(other, (0,))})
    with pytest.raises(AlgebraMismatch):
        StarProduct(twist, mismatched)
    print("✓ Trivial star product and the coefficient table")
