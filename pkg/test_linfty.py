"""
Tests for the L-infinity engine: coderivations, morphisms, Maurer-Cartan
elements and twisting, on the concrete graded Lie hosts
"""

import pytest

from algebra.enveloping import EnvelopingAlgebra
from algebra.errors import BoundExceeded, DegreeError, DomainError, NotFiltered
from algebra.lie import MultiVector, ax_plus_b_algebra, sl2_algebra
from algebra.series import ScalarSeries
from linfty.engine import (
    GradedElement,
    TaylorMorphism,
    WedgeSum,
    coalgebra_morphism_check,
    coderivation_apply,
    coderivation_leibniz_check,
    coderivation_square_check,
    compose,
    dgla_coderivation,
    exp_element,
    group_like_check,
    intertwining_check,
    mc_equation,
    morphism_apply,
    pushforward_mc,
    sample_words,
    symmetric_component,
    twist_coderivation,
    twist_morphism,
    twisted_apply,
    twisted_morphism_apply,
)
from linfty.hosts import (
    AbelianHost,
    HochschildHost,
    HPolyHost,
    PolyVectorHost,
    SchoutenHost,
    action_morphism,
    deformation_morphism,
)
from quantize.hochschild import deformation_symmetry_from_action
from quantize.polynomials import LieAction, PolynomialAlgebra, PolyVectorField
from twist.hpoly import HPoly

ORDER = 3


def hbar_multiple(host, value, power=1):
    """hbar^power * value as an element of L[1]"""
    element = GradedElement.from_value(host, value)
    return element.scale(ScalarSeries.monomial(1, power, host.order))


def ax_plus_b_action(order):
    lie = ax_plus_b_algebra()
    algebra = PolynomialAlgebra(["x", "y"], order)
    x, y = algebra.generators
    action = LieAction(lie, algebra, {
        0: PolyVectorField(algebra, {(0,): -x, (1,): -y}),
        1: PolyVectorField.coordinate(algebra, (0,)),
    })
    return lie, algebra, action


def test_schouten_coderivation():
    host = SchoutenHost(sl2_algebra(), ORDER)
    Q = dgla_coderivation(host)
    words = sample_words(host, 4, 16, seed=3)
    assert coderivation_square_check(Q, 4, words)
    for w in words:
        assert coderivation_leibniz_check(Q, w)
    with pytest.raises(BoundExceeded):
        coderivation_apply(Q, WedgeSum.word(host, [(0,), (1,), (2,)]), bound=2)
    print("✓ Schouten coderivation squares to zero and is a coderivation")


def test_hpoly_and_hochschild_coderivations():
    _, algebra, action = ax_plus_b_action(2)
    hpoly_host = HPolyHost(HPoly(EnvelopingAlgebra(action.lie, 2)), max_legs=2)
    Q = dgla_coderivation(hpoly_host)
    assert coderivation_square_check(Q, 2, sample_words(hpoly_host, 2, 30, seed=5))
    hochschild_host = HochschildHost(algebra)
    Q_hoch = dgla_coderivation(hochschild_host)
    assert coderivation_square_check(Q_hoch, 2, sample_words(hochschild_host, 2, 30, seed=6))
    print("✓ H_poly and Hochschild coderivations square to zero")


def test_mc_equation_on_r_matrices():
    sl2 = sl2_algebra()
    host = SchoutenHost(sl2, ORDER)
    Q = dgla_coderivation(host)
    triangular = hbar_multiple(host, MultiVector.basis(sl2, (0, 1), ORDER))
    report = mc_equation(triangular, Q)
    assert report.is_mc and report.paths_agree and report.orders == []

    broken = hbar_multiple(host, MultiVector.basis(sl2, (1, 2), ORDER))
    report = mc_equation(broken, Q)
    assert not report.is_mc
    assert report.orders == [2]
    assert report.paths_agree
    # 1/2 [hbar E^F, hbar E^F] = hbar^2 H^E^F
    assert report.residual == GradedElement(host, {(0, 1, 2): ScalarSeries.monomial(1, 2, ORDER)})
    assert report.to_dict() == {"is_maurer_cartan": False, "residual_orders": [2], "paths_agree": True}
    print("✓ hbar r is Maurer-Cartan exactly when [r, r] = 0")


def test_exp_and_group_like():
    host = AbelianHost({"a": 1, "b": 2}, ORDER, differential={"a": {"b": 1}})
    pi = GradedElement(host, host.element({"a": 1}, power=1))
    e = exp_element(pi)
    assert group_like_check(e)
    assert not group_like_check(WedgeSum.unit(host) + pi.as_word())
    assert e.part(2) == WedgeSum.word(host, ["a", "a"], ScalarSeries.monomial("1/2", 2, ORDER))
    report = mc_equation(pi, dgla_coderivation(host))
    assert report.orders == [1] and report.paths_agree
    with pytest.raises(NotFiltered):
        exp_element(GradedElement(host, host.element({"a": 1})))
    with pytest.raises(DegreeError):
        exp_element(GradedElement(host, host.element({"b": 1}, power=1)))
    with pytest.raises(DomainError):
        AbelianHost({"a": 1, "b": 1}, ORDER, differential={"a": {"b": 1}})
    print("✓ exp(pi) is group-like; curvature of a non-closed element")


def test_twisted_coderivation():
    sl2 = sl2_algebra()
    host = SchoutenHost(sl2, ORDER)
    Q = dgla_coderivation(host)
    pi = hbar_multiple(host, MultiVector.basis(sl2, (0, 1), ORDER))
    Q_pi = twist_coderivation(Q, pi)
    words = sample_words(host, 3, 20, seed=8)
    assert coderivation_square_check(Q_pi, 3, words)
    for w in words:
        assert twisted_apply(Q, pi, w) == coderivation_apply(Q_pi, w)
    print("✓ Twisting by an MC element: exp(-pi) Q(exp(pi) w) = Q^pi(w)")


def test_action_morphism():
    lie, algebra, action = ax_plus_b_action(ORDER)
    source = SchoutenHost(lie, ORDER, max_wedge=2)
    target = PolyVectorHost(algebra)
    F = action_morphism(action, source, target)
    Q, Q_target = dgla_coderivation(source), dgla_coderivation(target)
    for w in sample_words(source, 2, 30, seed=9):
        assert intertwining_check(F, Q, Q_target, w)
        assert coalgebra_morphism_check(F, w)
    r = hbar_multiple(source, MultiVector.basis(lie, (0, 1), ORDER))
    pi = PolyVectorField.coordinate(algebra, (0, 1), algebra.generators[1])
    assert pushforward_mc(F, r) == hbar_multiple(target, pi)
    print("✓ wedge(phi) is a strict L-infinity morphism sending hbar r to hbar pi")


def test_twisted_action_morphism():
    lie, algebra, action = ax_plus_b_action(ORDER)
    source = SchoutenHost(lie, ORDER, max_wedge=2)
    target = PolyVectorHost(algebra)
    F = action_morphism(action, source, target)
    Q, Q_target = dgla_coderivation(source), dgla_coderivation(target)
    pi = hbar_multiple(source, MultiVector.basis(lie, (0, 1), ORDER))
    pi_F = pushforward_mc(F, pi)
    assert mc_equation(pi_F, Q_target).is_mc
    F_pi = twist_morphism(F, pi)
    Q_pi, Q_target_pi = twist_coderivation(Q, pi), twist_coderivation(Q_target, pi_F)
    for w in sample_words(source, 2, 30, seed=11):
        assert intertwining_check(F_pi, Q_pi, Q_target_pi, w)
        assert twisted_morphism_apply(F, pi, w) == morphism_apply(F_pi, w)
    print("✓ F^pi intertwines Q^pi with the target twisted by pi_F")


def test_deformation_morphism():
    _, algebra, action = ax_plus_b_action(2)
    symmetry = deformation_symmetry_from_action(action)
    source = HPolyHost(HPoly(symmetry.enveloping), max_legs=2)
    target = HochschildHost(algebra)
    F = deformation_morphism(symmetry, source, target)
    Q, Q_target = dgla_coderivation(source), dgla_coderivation(target)
    for w in sample_words(source, 2, 30, seed=10):
        assert intertwining_check(F, Q, Q_target, w)
    print("✓ Phi intertwines the H_poly and Hochschild coderivations")


def test_nonlinear_morphisms():
    source = AbelianHost({"a": 1, "b": 1}, ORDER)
    middle = AbelianHost({"c": 1, "s": 1}, ORDER)
    target = AbelianHost({"t": 1}, ORDER)
    one = ScalarSeries.one(ORDER)
    F = TaylorMorphism(source, middle, {
        1: symmetric_component(source, {("a",): {"c": one}, ("b",): {"c": one}}),
        2: symmetric_component(source, {("a", "b"): {"s": one}, ("a", "a"): {"s": one.scale(2)}}),
    }, "F")
    G = TaylorMorphism(middle, target, {
        1: symmetric_component(middle, {("c",): {"t": one}}),
        2: symmetric_component(middle, {("c", "c"): {"t": one}}),
    }, "G")
    words = [
        WedgeSum.word(source, ["a", "b"]),
        WedgeSum.word(source, ["a", "a", "b"]),
        WedgeSum.word(source, ["b"], ScalarSeries.monomial(1, 1, ORDER)),
    ]
    for w in words:
        assert coalgebra_morphism_check(F, w)
        assert compose(G, F)(w) == morphism_apply(G, morphism_apply(F, w))
    pi = GradedElement(source, source.element({"a": 1, "b": 1}, power=1))
    F_pi = twist_morphism(F, pi)
    for w in words:
        assert twisted_morphism_apply(F, pi, w) == morphism_apply(F_pi, w)
    assert F_pi(WedgeSum.unit(source)) == WedgeSum.unit(middle)
    # F_1(pi) = 2 hbar c and F_2(pi ^ pi) / 2 = 2 hbar^2 s
    expected = {"c": ScalarSeries.monomial(2, 1, ORDER), "s": ScalarSeries.monomial(2, 2, ORDER)}
    assert pushforward_mc(F, pi) == GradedElement(middle, expected)
    print("✓ Composition and twisting of non-linear morphisms")


def test_pushforward_through_composition():
    source = AbelianHost({"a": 1, "b": 1}, ORDER)
    middle = AbelianHost({"c": 1, "s": 1}, ORDER)
    target = AbelianHost({"t": 1, "u": 1}, ORDER)
    one = ScalarSeries.one(ORDER)
    F = TaylorMorphism(source, middle, {
        1: symmetric_component(source, {("a",): {"c": one}, ("b",): {"s": one.scale(-1)}}),
        2: symmetric_component(source, {("a", "b"): {"s": one}, ("b", "b"): {"c": one.scale(3)}}),
    }, "F")
    G = TaylorMorphism(middle, target, {
        1: symmetric_component(middle, {("c",): {"t": one}, ("s",): {"u": one}}),
        2: symmetric_component(middle, {("c", "s"): {"t": one.scale(2)}, ("s", "s"): {"u": one}}),
    }, "G")
    GF = compose(G, F)
    for w in sample_words(source, 4, 15, seed=13):
        assert coalgebra_morphism_check(F, w)
        assert coalgebra_morphism_check(GF, w)
        assert GF(w) == morphism_apply(G, morphism_apply(F, w))
    for pi in (
        GradedElement(source, source.element({"a": 1, "b": 1}, power=1)),
        GradedElement(source, source.element({"a": 2}, power=1)) + GradedElement(source, source.element({"b": -1}, power=2)),
    ):
        assert pushforward_mc(G, pushforward_mc(F, pi)) == pushforward_mc(GF, pi)
    print("✓ Pushing an MC element through F then G equals pushing it through G o F")
