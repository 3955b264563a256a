"""
Tests for polydifferential Hochschild cochains and the deformation symmetry
"""

import random

import pytest

from algebra.enveloping import EnvelopingAlgebra
from algebra.errors import AlgebraMismatch, DegreeError, DomainError, NotAction
from algebra.lie import sl2_algebra, ax_plus_b_algebra
from quantize.hochschild import (
    DeformationSymmetry,
    PolyDiffOperator,
    associator,
    brace,
    deformation_symmetry_from_action,
    gerstenhaber_hochschild,
    hochschild_differential,
    hochschild_mc_residual,
    insert,
    multiplication,
    poisson_bidifferential,
)
from quantize.polynomials import LieAction, PolynomialAlgebra, PolyVectorField
from twist.hpoly import HPoly, random_element

ORDER = 2
DX, DY, ID = (1, 0), (0, 1), (0, 0)


def plane():
    algebra = PolynomialAlgebra(["x", "y"], ORDER)
    x, y = algebra.generators
    return algebra, x, y


def random_cochain(algebra, rng, arity, terms=2):
    indices = [(0, 0), (1, 0), (0, 1), (1, 1), (2, 0)]
    chosen = {}
    for _ in range(terms):
        slots = tuple(rng.choice(indices) for _ in range(arity))
        exponents = (rng.randint(0, 2), rng.randint(0, 2))
        coefficient = algebra.monomial(exponents, rng.choice([-2, -1, 1, 3]), rng.randint(0, 1))
        chosen[slots] = chosen.get(slots, algebra.zero) + coefficient
    return PolyDiffOperator(algebra, chosen)


def pre_lie_associator(a, b, c):
    return insert(insert(a, b), c) - insert(a, insert(b, c))


def sl2_symmetry():
    algebra, x, y = plane()
    action = LieAction(sl2_algebra(), algebra, {
        0: PolyVectorField(algebra, {(0,): x, (1,): -y}),
        1: PolyVectorField.coordinate(algebra, (1,), x),
        2: PolyVectorField.coordinate(algebra, (0,), y),
    })
    return deformation_symmetry_from_action(action)


def test_operators_apply():
    algebra, x, y = plane()
    op = PolyDiffOperator(algebra, {(DX, DY): y, (ID, (0, 2)): algebra.one})
    assert op(x ** 2, y ** 2) == 4 * x * y ** 2 + 2 * x ** 2
    assert op.degree == 1
    assert op.swap()(y ** 2, x ** 2) == op(x ** 2, y ** 2)
    assert multiplication(algebra)(x, y) == x * y
    with pytest.raises(DegreeError):
        op(x)
    with pytest.raises(DomainError):
        PolyDiffOperator(algebra, {((1,),): algebra.one})
    print("✓ Polydifferential operators evaluate on polynomials")


def test_associativity_of_m():
    algebra, x, y = plane()
    m = multiplication(algebra)
    assert associator(m).is_zero()
    assert gerstenhaber_hochschild(m, m).is_zero()
    print("✓ m{m} = 0")


def test_brace_signs():
    algebra, x, y = plane()
    m = multiplication(algebra)
    derivation = PolyDiffOperator(algebra, {(DX,): y})
    # D inserted into m: D(f) g + f D(g)
    assert insert(m, derivation) == PolyDiffOperator(algebra, {(DX, ID): y, (ID, DX): y})
    # a derivation is a Hochschild cocycle
    assert hochschild_differential(derivation).is_zero()
    bidiff = PolyDiffOperator(algebra, {(DX, DY): algebra.one})
    inserted = insert(m, bidiff)
    f, g, h = x, y, x * y
    assert inserted(f, g, h) == bidiff(f, g) * h - f * bidiff(g, h)
    assert brace(m, [derivation, derivation])(x, x) == y ** 2
    with pytest.raises(DomainError):
        brace(m, [])
    with pytest.raises(AlgebraMismatch):
        insert(m, multiplication(PolynomialAlgebra(["x", "y"], ORDER)))
    print("✓ Brace insertion carries the slot signs")


def test_insertion_is_pre_lie():
    algebra, x, y = plane()
    rng = random.Random(30)
    for _ in range(100):
        arities = [rng.randint(1, 3) for _ in range(3)]
        a, b, c = (random_cochain(algebra, rng, n) for n in arities)
        _, db, dc = (n - 1 for n in arities)
        sign = -1 if (db * dc) % 2 else 1
        assert pre_lie_associator(a, b, c) == pre_lie_associator(a, c, b).scale(sign)
    print("✓ Gerstenhaber insertion is graded right-symmetric pre-Lie")


def test_hochschild_differential():
    algebra, x, y = plane()
    pi = PolyVectorField.coordinate(algebra, (0, 1), x * y)
    assert hochschild_differential(poisson_bidifferential(pi)).is_zero()
    non_cocycle = PolyDiffOperator(algebra, {((2, 0), ID): algebra.one})
    d = hochschild_differential(non_cocycle)
    f, g, h = x ** 2, x, y
    # c(f, g) h - f c(g, h) + c(fg, h) - c(f, gh) with c(f, g) = f_xx g
    assert d(f, g, h) == 2 * x * y + 2 * 2 * x * y
    for op in (non_cocycle, PolyDiffOperator(algebra, {(DY,): x ** 2}), poisson_bidifferential(pi)):
        assert hochschild_differential(hochschild_differential(op)).is_zero()
    print("✓ Hochschild differential squares to zero and kills biderivations")


def test_mc_residual_detects_non_associativity():
    algebra, x, y = plane()
    hbar = algebra.hbar
    moyal_first = PolyDiffOperator(algebra, {(DX, DY): hbar})
    moyal = moyal_first + PolyDiffOperator(algebra, {((2, 0), (0, 2)): algebra.monomial(ID, "1/2", 2)})
    assert hochschild_mc_residual(moyal).is_zero()
    corrupted = moyal + PolyDiffOperator(algebra, {((2, 0), ID): hbar ** 2})
    residual = hochschild_mc_residual(corrupted)
    assert residual.nonzero_orders()[0] == 2
    deformed = multiplication(algebra) + corrupted
    f, g, h = x, x, algebra.one
    associator_value = deformed(deformed(f, g), h) - deformed(f, deformed(g, h))
    assert residual(f, g, h) == algebra.truncate(associator_value)
    print("✓ MC residual of m + B is the associator")


def test_deformation_symmetry_laws():
    symmetry = sl2_symmetry()
    U = symmetry.enveloping
    hpoly = HPoly(U)
    assert symmetry.unit_image() == multiplication(symmetry.algebra)
    # H acts as x d/dx - y d/dy
    assert symmetry.operator((1, 0, 0)) == {DX: symmetry.algebra.generators[0], DY: -symmetry.algebra.generators[1]}
    rng = random.Random(31)
    for _ in range(5):
        p = random_element(hpoly, rng, rng.randint(0, 1))
        q = random_element(hpoly, rng, rng.randint(0, 1))
        s = random_element(hpoly, rng, 0)
        assert symmetry.bullet_law(hpoly, p, q)
        assert symmetry.bracket_law(hpoly, p, q)
        assert symmetry.differential_law(hpoly, p)
        assert symmetry.brace_law(hpoly, p, [q, s])
    print("✓ Phi preserves bullet, braces, bracket and differential")


def test_deformation_symmetry_rejects_mismatches():
    algebra, x, y = plane()
    broken = LieAction(ax_plus_b_algebra(), algebra, {
        0: PolyVectorField.coordinate(algebra, (0,), x),
        1: PolyVectorField.coordinate(algebra, (0,)),
    })
    with pytest.raises(NotAction):
        deformation_symmetry_from_action(broken)
    symmetry = sl2_symmetry()
    with pytest.raises(AlgebraMismatch):
        DeformationSymmetry(symmetry.action, EnvelopingAlgebra(sl2_algebra(), ORDER))
    with pytest.raises(AlgebraMismatch):
        DeformationSymmetry(symmetry.action, EnvelopingAlgebra(symmetry.action.lie, ORDER + 1))
    print("✓ Deformation symmetry checks its inputs")
