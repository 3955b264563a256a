"""
Polydifferential operators on a polynomial algebra: Hochschild cochains,
braces, the Gerstenhaber bracket and the deformation symmetry induced by
a Lie algebra action
"""

import itertools
import logging
from typing import Dict, List, Optional, Sequence, Tuple

from sympy.ntheory.multinomial import multinomial_coefficients
from sympy.polys.domains import QQ
from sympy.polys.rings import PolyElement

from algebra.enveloping import EnvelopingAlgebra, Monomial, TensorWord
from algebra.errors import AlgebraMismatch, DegreeError, DomainError
from algebra.series import ScalarSeries, parity_sign, to_rational
from quantize.polynomials import PolynomialAlgebra, LieAction, PolyVectorField
from twist.hpoly import HPoly, HPolyElement

logger = logging.getLogger(__name__)

MultiIndex = Tuple[int, ...]
Slots = Tuple[MultiIndex, ...]


class PolyDiffOperator:
    """sum c_S(x, hbar) d^(S_0) (x) ... (x) d^(S_(n-1)) acting on n arguments.

    Keys are tuples of multi-indices, one per slot; the arity of a term is
    the key length and its Hochschild degree is arity - 1. Terms of different
    arity may coexist. The empty key holds a function (arity 0).
    """

    def __init__(self, algebra: PolynomialAlgebra, terms: Dict[Slots, PolyElement]):
        self.algebra = algebra
        self.terms: Dict[Slots, PolyElement] = {}
        for slots, coefficient in terms.items():
            if any(len(index) != algebra.dim for index in slots):
                raise DomainError(f"Multi-index in {slots} does not match {algebra.dim} variables")
            coefficient = algebra.truncate(coefficient)
            if coefficient:
                self.terms[slots] = coefficient

    @classmethod
    def zero(cls, algebra: PolynomialAlgebra) -> "PolyDiffOperator":
        return cls(algebra, {})

    @classmethod
    def function(cls, algebra: PolynomialAlgebra, f: PolyElement) -> "PolyDiffOperator":
        return cls(algebra, {(): f})

    def _check(self, other: "PolyDiffOperator"):
        if self.algebra is not other.algebra:
            raise AlgebraMismatch("Operators over different polynomial algebras")

    def arities(self) -> List[int]:
        return sorted({len(slots) for slots in self.terms})

    @property
    def degree(self) -> int:
        arities = self.arities()
        if len(arities) != 1:
            raise DegreeError(f"Operator is not homogeneous (arities {arities})")
        return arities[0] - 1

    def part(self, arity: int) -> "PolyDiffOperator":
        return PolyDiffOperator(self.algebra, {k: v for k, v in self.terms.items() if len(k) == arity})

    def hbar_part(self, n: int) -> "PolyDiffOperator":
        return PolyDiffOperator(self.algebra, {
            k: self.algebra.hbar_part(v, n) for k, v in self.terms.items()
        })

    def nonzero_orders(self) -> List[int]:
        orders = set()
        for coefficient in self.terms.values():
            orders.update(self.algebra.nonzero_orders(coefficient))
        return sorted(orders)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyDiffOperator):
            return NotImplemented
        return self.algebra is other.algebra and self.terms == other.terms

    def __add__(self, other: "PolyDiffOperator") -> "PolyDiffOperator":
        self._check(other)
        merged = dict(self.terms)
        for slots, coefficient in other.terms.items():
            merged[slots] = merged.get(slots, self.algebra.zero) + coefficient
        return PolyDiffOperator(self.algebra, merged)

    def __neg__(self) -> "PolyDiffOperator":
        return PolyDiffOperator(self.algebra, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "PolyDiffOperator") -> "PolyDiffOperator":
        return self + (-other)

    def scale(self, factor) -> "PolyDiffOperator":
        if isinstance(factor, ScalarSeries):
            factor = self.algebra.from_series(factor)
        elif not isinstance(factor, PolyElement):
            factor = self.algebra.ring(to_rational(factor))
        return PolyDiffOperator(self.algebra, {k: v * factor for k, v in self.terms.items()})

    __mul__ = scale
    __rmul__ = scale

    def swap(self) -> "PolyDiffOperator":
        """Exchange the two arguments of a bidifferential operator"""
        if self.arities() not in ([2], []):
            raise DegreeError("swap is defined on bidifferential operators")
        return PolyDiffOperator(self.algebra, {(b, a): v for (a, b), v in self.terms.items()})

    def __call__(self, *arguments: PolyElement) -> PolyElement:
        algebra = self.algebra
        result = algebra.zero
        derivatives: Dict[Tuple[int, MultiIndex], PolyElement] = {}
        for slots, coefficient in self.terms.items():
            if len(slots) != len(arguments):
                raise DegreeError(f"Term of arity {len(slots)} applied to {len(arguments)} arguments")
            value = coefficient
            for position, index in enumerate(slots):
                key = (position, index)
                if key not in derivatives:
                    derivatives[key] = algebra.partial(arguments[position], index)
                value = algebra.mul(value, derivatives[key])
                if not value:
                    break
            result += value
        return algebra.truncate(result)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for slots in sorted(self.terms):
            legs = " (x) ".join(_index_text(index, self.algebra.variables) for index in slots)
            parts.append(f"({self.algebra.format(self.terms[slots])})*[{legs}]")
        return " + ".join(parts)

    __repr__ = __str__


def _index_text(index: MultiIndex, names: Sequence[str]) -> str:
    factors = []
    for name, times in zip(names, index):
        if times == 1:
            factors.append(f"d{name}")
        elif times:
            factors.append(f"d{name}^{times}")
    return "*".join(factors) or "1"


def multiplication(algebra: PolynomialAlgebra) -> PolyDiffOperator:
    """m(f, g) = fg"""
    zero = (0,) * algebra.dim
    return PolyDiffOperator(algebra, {(zero, zero): algebra.one})


def _leibniz(alpha: MultiIndex, factors: int) -> List[Tuple[Tuple[MultiIndex, ...], int]]:
    """Distribute d^alpha over a product of `factors` functions with multinomial weights"""
    per_variable = [
        list(multinomial_coefficients(factors, a).items()) if a else [((0,) * factors, 1)]
        for a in alpha
    ]
    result = []
    for choice in itertools.product(*per_variable):
        weight = 1
        for _, c in choice:
            weight *= c
        distribution = tuple(tuple(split[f] for split, _ in choice) for f in range(factors))
        result.append((distribution, weight))
    return result


def brace(a: PolyDiffOperator, bs: Sequence[PolyDiffOperator]) -> PolyDiffOperator:
    """A{B_1, ..., B_r}: insert the B_j into increasing slots of A.

    The term inserting B_j at slot i_j carries (-1)^(sum_j i_j |B_j|).
    """
    if not bs:
        raise DomainError("brace needs at least one inserted operator")
    for b in bs:
        a._check(b)
    algebra = a.algebra
    result: Dict[Slots, PolyElement] = {}
    for a_slots, a_coefficient in a.terms.items():
        for choice in itertools.product(*[list(b.terms.items()) for b in bs]):
            for positions in itertools.combinations(range(len(a_slots)), len(bs)):
                exponent = sum(p * (len(slots) - 1) for p, (slots, _) in zip(positions, choice))
                inserted = dict(zip(positions, choice))
                partial: List[Tuple[Slots, PolyElement]] = [((), a_coefficient)]
                for slot, alpha in enumerate(a_slots):
                    if slot not in inserted:
                        partial = [(slots + (alpha,), c) for slots, c in partial]
                        continue
                    b_slots, b_coefficient = inserted[slot]
                    following = []
                    for distribution, weight in _leibniz(alpha, len(b_slots) + 1):
                        moved = algebra.partial(b_coefficient, distribution[0])
                        if not moved:
                            continue
                        new_slots = tuple(
                            tuple(x + y for x, y in zip(beta, gamma))
                            for beta, gamma in zip(b_slots, distribution[1:])
                        )
                        for slots, c in partial:
                            following.append((slots + new_slots, algebra.mul(c, moved) * weight))
                    partial = following
                sign = parity_sign(exponent)
                for slots, c in partial:
                    result[slots] = result.get(slots, algebra.zero) + (c if sign > 0 else -c)
    return PolyDiffOperator(algebra, result)


def insert(a: PolyDiffOperator, b: PolyDiffOperator) -> PolyDiffOperator:
    """Gerstenhaber insertion A{B}"""
    return brace(a, [b])


def _graded_parts(a: PolyDiffOperator) -> Dict[int, PolyDiffOperator]:
    return {arity - 1: a.part(arity) for arity in a.arities()}


def gerstenhaber_hochschild(a: PolyDiffOperator, b: PolyDiffOperator) -> PolyDiffOperator:
    """[A, B]_G = A{B} - (-1)^(|A||B|) B{A}, extended over homogeneous parts"""
    a._check(b)
    result = PolyDiffOperator.zero(a.algebra)
    for p, left in _graded_parts(a).items():
        for q, right in _graded_parts(b).items():
            forward = insert(left, right)
            backward = insert(right, left)
            result = result + (forward - backward if parity_sign(p * q) > 0 else forward + backward)
    return result


def hochschild_differential(b: PolyDiffOperator) -> PolyDiffOperator:
    """[m, B]_G"""
    return gerstenhaber_hochschild(multiplication(b.algebra), b)


def hochschild_mc_residual(b: PolyDiffOperator) -> PolyDiffOperator:
    """[m, B]_G + 1/2 [B, B]_G; vanishes iff m + B is associative"""
    return hochschild_differential(b) + gerstenhaber_hochschild(b, b).scale(QQ(1, 2))


def associator(product: PolyDiffOperator) -> PolyDiffOperator:
    """P{P}, which is (f, g, h) -> P(P(f, g), h) - P(f, P(g, h)) for arity-2 P"""
    return insert(product, product)


def poisson_bidifferential(pi: PolyVectorField) -> PolyDiffOperator:
    """Bivector pi as the operator (f, g) -> pi(df, dg)"""
    algebra = pi.algebra
    terms: Dict[Slots, PolyElement] = {}
    unit = [0] * algebra.dim
    for indices, coefficient in pi.terms.items():
        if len(indices) != 2:
            raise DegreeError("Only bivector fields define a bidifferential operator")
        a, b = indices
        da, db = list(unit), list(unit)
        da[a] += 1
        db[b] += 1
        da, db = tuple(da), tuple(db)
        terms[(da, db)] = terms.get((da, db), algebra.zero) + coefficient
        terms[(db, da)] = terms.get((db, da), algebra.zero) - coefficient
    return PolyDiffOperator(algebra, terms)


class DeformationSymmetry:
    """Phi: H_poly -> Hochschild cochains induced by a Lie algebra action.

    h_0 (x) ... (x) h_k is sent to (f_0, ..., f_k) -> prod_s (h_s acting on f_s).

    Args:
        action: Action of the Lie algebra by vector fields.
        enveloping: Enveloping algebra of the same Lie algebra and order.
    """

    def __init__(self, action: LieAction, enveloping: EnvelopingAlgebra):
        if enveloping.lie is not action.lie:
            raise AlgebraMismatch("Enveloping algebra of a different Lie algebra")
        if enveloping.order != action.algebra.order:
            raise AlgebraMismatch("Enveloping and polynomial algebras have different truncation orders")
        self.action = action
        self.enveloping = enveloping
        self.algebra = action.algebra
        self._operators: Dict[Monomial, Dict[MultiIndex, PolyElement]] = {}

    def operator(self, mono: Monomial) -> Dict[MultiIndex, PolyElement]:
        """Differential operator of a PBW monomial, as {multi-index: coefficient}"""
        cached = self._operators.get(mono)
        if cached is not None:
            return cached
        algebra = self.algebra
        current: Dict[MultiIndex, PolyElement] = {(0,) * algebra.dim: algebra.one}
        # the leftmost PBW factor acts last
        for g in reversed(range(len(mono))):
            field = self.action.field(g)
            for _ in range(mono[g]):
                current = _compose_vector_field(algebra, field, current)
        self._operators[mono] = current
        return current

    def word(self, word: TensorWord) -> PolyDiffOperator:
        if word.parent is not self.enveloping:
            raise AlgebraMismatch("Word over a different enveloping algebra")
        algebra = self.algebra
        result: Dict[Slots, PolyElement] = {}
        for key, series in word.terms.items():
            scalar = algebra.from_series(series)
            per_slot = [list(self.operator(mono).items()) for mono in key]
            for choice in itertools.product(*per_slot):
                coefficient = scalar
                for _, c in choice:
                    coefficient = algebra.mul(coefficient, c)
                slots = tuple(index for index, _ in choice)
                result[slots] = result.get(slots, algebra.zero) + coefficient
        return PolyDiffOperator(algebra, result)

    def __call__(self, element: HPolyElement) -> PolyDiffOperator:
        result = PolyDiffOperator.zero(self.algebra)
        for word in element.parts.values():
            result = result + self.word(word)
        return result

    def unit_image(self) -> PolyDiffOperator:
        """Phi(1 (x) 1), which is m"""
        return self.word(self.enveloping.unit_word(2))

    def bullet_law(self, hpoly: HPoly, p: HPolyElement, q: HPolyElement) -> bool:
        """Phi(P . Q) = Phi(P){Phi(Q)}"""
        return self(hpoly.bullet(p, q)) == insert(self(p), self(q))

    def brace_law(self, hpoly: HPoly, p: HPolyElement, qs: Sequence[HPolyElement]) -> bool:
        """Phi(P<Q_1, ..., Q_r>) = Phi(P){Phi(Q_1), ..., Phi(Q_r)}"""
        return self(hpoly.braces(p, qs)) == brace(self(p), [self(q) for q in qs])

    def bracket_law(self, hpoly: HPoly, p: HPolyElement, q: HPolyElement) -> bool:
        return self(hpoly.bracket(p, q)) == gerstenhaber_hochschild(self(p), self(q))

    def differential_law(self, hpoly: HPoly, p: HPolyElement) -> bool:
        return self(hpoly.differential(p)) == hochschild_differential(self(p))


def _compose_vector_field(algebra: PolynomialAlgebra, field: PolyVectorField,
                          operator: Dict[MultiIndex, PolyElement]) -> Dict[MultiIndex, PolyElement]:
    """X o D for X = sum h_a d_a and D = sum c_beta d^beta"""
    result: Dict[MultiIndex, PolyElement] = {}
    for (a,), h in field.terms.items():
        for beta, c in operator.items():
            moved = algebra.mul(h, algebra.derivative(c, a))
            if moved:
                result[beta] = result.get(beta, algebra.zero) + moved
            raised = list(beta)
            raised[a] += 1
            raised = tuple(raised)
            result[raised] = result.get(raised, algebra.zero) + algebra.mul(h, c)
    return {k: v for k, v in result.items() if v}


def deformation_symmetry_from_action(phi: LieAction, enveloping: Optional[EnvelopingAlgebra] = None
                                     ) -> DeformationSymmetry:
    """Deformation symmetry of U(g) induced by phi.

    Raises:
        NotAction: when phi is not a Lie algebra morphism.
    """
    phi.require()
    enveloping = enveloping or EnvelopingAlgebra(phi.lie, phi.algebra.order)
    return DeformationSymmetry(phi, enveloping)
