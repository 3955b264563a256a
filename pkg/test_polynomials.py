"""
Tests for polynomial algebras, polyvector fields, actions and induced Poisson brackets
"""

import pytest

from algebra.errors import AlgebraMismatch, DegreeError, DomainError, NotAction, NotTriangular
from algebra.lie import MultiVector, RMatrix, ax_plus_b_algebra, sl2_algebra
from algebra.series import ScalarSeries
from quantize.polynomials import (
    LieAction,
    PolynomialAlgebra,
    PolyVectorField,
    check_action,
    check_poisson_action,
    induced_poisson,
    is_poisson,
    pairing,
    schouten_vf,
)

ORDER = 3


def plane():
    algebra = PolynomialAlgebra(["x", "y"], ORDER)
    x, y = algebra.generators
    return algebra, x, y


def ax_plus_b_action(algebra, x, y):
    lie = ax_plus_b_algebra()
    fields = {
        0: PolyVectorField(algebra, {(0,): -x, (1,): -y}),
        1: PolyVectorField.coordinate(algebra, (0,)),
    }
    return LieAction(lie, algebra, fields)


def sl2_linear_action(algebra, x, y):
    lie = sl2_algebra()
    fields = {
        0: PolyVectorField(algebra, {(0,): x, (1,): -y}),
        1: PolyVectorField.coordinate(algebra, (1,), x),
        2: PolyVectorField.coordinate(algebra, (0,), y),
    }
    return LieAction(lie, algebra, fields)


def test_polynomial_algebra():
    algebra, x, y = plane()
    hbar = algebra.hbar
    assert not algebra.mul(hbar ** ORDER, hbar)
    p = algebra.from_records([[[1, 0], "1/2"], [[0, 2], 1, "-3"]])
    assert p == algebra.monomial((1, 0), "1/2") - 3 * y ** 2 * hbar
    assert algebra.to_records(p) == [[[0, 2], 1, "-3"], [[1, 0], 0, "1/2"]]
    assert algebra.hbar_part(p, 1) == -3 * y ** 2
    assert algebra.nonzero_orders(p) == [0, 1]
    assert algebra.exponents(x * y ** 2) == (1, 2)
    assert algebra.from_series(ScalarSeries.monomial(2, 1, ORDER)) == 2 * hbar
    assert algebra.monomials(1) == [algebra.one, x, y]
    assert len(algebra.monomials(2)) == 6
    assert algebra.partial(x ** 2 * y, (1, 1)) == 2 * x
    with pytest.raises(DomainError):
        algebra.exponents(x + y)
    with pytest.raises(DomainError):
        PolynomialAlgebra(["x", "hbar"], ORDER)
    with pytest.raises(DomainError):
        algebra.from_records([[[1, 0]]])
    print("✓ Polynomial algebra with a truncated hbar")


def test_schouten_on_vector_fields():
    algebra, x, y = plane()
    e_field = PolyVectorField.coordinate(algebra, (1,), x)
    f_field = PolyVectorField.coordinate(algebra, (0,), y)
    h_field = PolyVectorField(algebra, {(0,): x, (1,): -y})
    assert schouten_vf(e_field, f_field) == h_field
    assert schouten_vf(e_field, PolyVectorField.function(algebra, y)) == PolyVectorField.function(algebra, x)
    assert e_field.apply(y ** 2) == 2 * x * y
    bivector = PolyVectorField.coordinate(algebra, (1, 0), x)
    assert bivector.terms == {(0, 1): -x}
    assert bivector.degree == 1
    with pytest.raises(DegreeError):
        bivector.apply(x)
    with pytest.raises(DegreeError):
        (bivector + e_field).degree
    with pytest.raises(AlgebraMismatch):
        e_field + PolyVectorField.coordinate(PolynomialAlgebra(["x", "y"], ORDER), (0,))
    print("✓ Schouten bracket of vector fields is the commutator")


def test_schouten_graded_antisymmetry():
    algebra, x, y = plane()
    pi = PolyVectorField.coordinate(algebra, (0, 1), y)
    field = PolyVectorField(algebra, {(0,): x * y, (1,): x ** 2})
    assert schouten_vf(pi, field) == -schouten_vf(field, pi)
    assert schouten_vf(field, pi).degree == 1
    print("✓ [pi, X] = -[X, pi] for a bivector and a vector field")


def test_actions():
    algebra, x, y = plane()
    phi = ax_plus_b_action(algebra, x, y)
    assert check_action(phi.lie, phi)
    assert phi.morphism_witness() is None
    linear = sl2_linear_action(algebra, x, y)
    assert check_action(linear.lie, linear)

    broken = LieAction(ax_plus_b_algebra(), algebra, {
        0: PolyVectorField.coordinate(algebra, (0,), x),
        1: PolyVectorField.coordinate(algebra, (0,)),
    })
    assert not check_action(broken.lie, broken)
    with pytest.raises(NotAction) as excinfo:
        broken.require()
    assert excinfo.value.witness == (0, 1)
    with pytest.raises(DegreeError):
        LieAction(ax_plus_b_algebra(), algebra, {0: PolyVectorField.coordinate(algebra, (0, 1))})
    print("✓ Actions are checked on every basis pair")


def test_induced_poisson():
    algebra, x, y = plane()
    phi = ax_plus_b_action(algebra, x, y)
    r = RMatrix(MultiVector.basis(phi.lie, (0, 1), ORDER))
    pi = induced_poisson(r, phi)
    assert pi == PolyVectorField.coordinate(algebra, (0, 1), y)
    assert is_poisson(pi)
    assert pairing(pi, x, y) == y
    assert pairing(pi, y, x) == -y
    assert check_poisson_action(r, phi, pi)
    assert not check_poisson_action(r, phi, pi.scale(2))

    linear = sl2_linear_action(algebra, x, y)
    r_sl2 = RMatrix(MultiVector.basis(linear.lie, (0, 1), ORDER))
    assert induced_poisson(r_sl2, linear) == PolyVectorField.coordinate(algebra, (0, 1), x ** 2)
    assert check_poisson_action(r_sl2, linear)
    with pytest.raises(NotTriangular):
        induced_poisson(MultiVector.basis(linear.lie, (1, 2), ORDER), linear)
    print("✓ r = H ^ E induces y dx ^ dy on ax+b and x^2 dx ^ dy on sl(2)")


def test_is_poisson_detects_jacobi_failure():
    algebra = PolynomialAlgebra(["x", "y", "z"], ORDER)
    x, y, _ = algebra.generators
    pi = PolyVectorField(algebra, {(0, 1): y, (1, 2): algebra.one})
    assert not is_poisson(pi)
    assert is_poisson(PolyVectorField(algebra, {(0, 1): algebra.one, (1, 2): x}))
    with pytest.raises(DegreeError):
        pairing(PolyVectorField.coordinate(algebra, (0,)), x, y)
    print("✓ Jacobi failure of a bivector is detected")
