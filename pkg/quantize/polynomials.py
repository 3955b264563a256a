"""
Polynomial function algebras with hbar, polyvector fields with the
Schouten bracket, Lie algebra actions by vector fields and the Poisson
structure induced by an r-matrix
"""

import itertools
import logging
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from sympy.polys.domains import QQ
from sympy.polys.orderings import lex
from sympy.polys.ring_series import rs_trunc
from sympy.polys.rings import PolyElement, ring

from algebra.errors import AlgebraMismatch, DegreeError, DomainError, NotAction
from algebra.lie import LieAlgebra, MultiVector, RMatrix, cobracket
from algebra.series import RationalLike, ScalarSeries, format_rational, parity_sign, sort_with_sign, to_rational
from config.constants import HBAR_SYMBOL

logger = logging.getLogger(__name__)

Exponents = Tuple[int, ...]


class PolynomialAlgebra:
    """QQ[x_1, ..., x_d][hbar] / (hbar^(N+1)) backed by a sympy sparse ring.

    The last ring generator is hbar; every product is truncated in it.

    Args:
        variables: Names of the coordinate functions.
        order: Truncation order N.
    """

    def __init__(self, variables: Sequence[str], order: int):
        if not variables:
            raise DomainError("A polynomial algebra needs at least one variable")
        if HBAR_SYMBOL in variables:
            raise DomainError(f"'{HBAR_SYMBOL}' is reserved for the deformation parameter")
        if len(set(variables)) != len(variables):
            raise DomainError(f"Duplicate variable names in {list(variables)}")
        self.variables = tuple(variables)
        self.dim = len(variables)
        self.order = order
        self.ring, *gens = ring(list(variables) + [HBAR_SYMBOL], QQ, lex)
        self.generators = tuple(gens[:-1])
        self.hbar = gens[-1]

    @property
    def zero(self) -> PolyElement:
        return self.ring.zero

    @property
    def one(self) -> PolyElement:
        return self.ring.one

    def truncate(self, p: PolyElement) -> PolyElement:
        return rs_trunc(p, self.hbar, self.order + 1)

    def mul(self, a: PolyElement, b: PolyElement) -> PolyElement:
        return self.truncate(a * b)

    def monomial(self, exponents: Sequence[int], coefficient: RationalLike = 1, power: int = 0) -> PolyElement:
        if len(exponents) != self.dim:
            raise DomainError(f"Monomial {tuple(exponents)} needs {self.dim} exponents")
        if power > self.order:
            return self.zero
        return self.ring.from_dict({tuple(exponents) + (power,): to_rational(coefficient)})

    def from_records(self, records: Iterable[Sequence]) -> PolyElement:
        """Sparse records ``[[exponents, "p/q"], ...]`` or ``[[exponents, power, "p/q"], ...]``"""
        result = self.zero
        for record in records:
            if len(record) == 2:
                exponents, value = record
                power = 0
            elif len(record) == 3:
                exponents, power, value = record
            else:
                raise DomainError(f"Malformed monomial record {record!r}")
            result += self.monomial(exponents, value, power)
        return result

    def to_records(self, p: PolyElement) -> List[List]:
        """Inverse of from_records, hbar power included, sorted"""
        return [
            [list(monom[:-1]), monom[-1], format_rational(coefficient)]
            for monom, coefficient in sorted(p.items())
        ]

    def from_series(self, series: ScalarSeries) -> PolyElement:
        if series.order != self.order:
            raise AlgebraMismatch(f"Series of order {series.order} in an order {self.order} algebra")
        result = self.zero
        for power, value in enumerate(series.coefficients):
            if value:
                result += self.ring.from_dict({(0,) * self.dim + (power,): value})
        return result

    def split_hbar(self, p: PolyElement) -> Dict[Exponents, ScalarSeries]:
        """{x-exponents: hbar-series coefficient}"""
        grouped: Dict[Exponents, Dict[int, object]] = {}
        for monom, coefficient in p.items():
            grouped.setdefault(monom[:-1], {})[monom[-1]] = coefficient
        return {key: ScalarSeries.from_terms(terms, self.order) for key, terms in grouped.items()}

    def hbar_part(self, p: PolyElement, n: int) -> PolyElement:
        """Coefficient of hbar^n, as an hbar-free polynomial"""
        return self.ring.from_dict({
            monom[:-1] + (0,): coefficient for monom, coefficient in p.items() if monom[-1] == n
        })

    def nonzero_orders(self, p: PolyElement) -> List[int]:
        return sorted({monom[-1] for monom in p})

    def derivative(self, p: PolyElement, variable: int, times: int = 1) -> PolyElement:
        generator = self.generators[variable]
        for _ in range(times):
            if not p:
                break
            p = p.diff(generator)
        return p

    def partial(self, p: PolyElement, multi_index: Sequence[int]) -> PolyElement:
        """d^alpha p"""
        for variable, times in enumerate(multi_index):
            if times:
                p = self.derivative(p, variable, times)
        return p

    def monomials(self, max_degree: int) -> List[PolyElement]:
        """All coefficient-one monomials of total degree <= max_degree, in degree-lex order"""
        exponents = [
            e for e in itertools.product(range(max_degree + 1), repeat=self.dim) if sum(e) <= max_degree
        ]
        exponents.sort(key=lambda e: (sum(e), tuple(-a for a in e)))
        return [self.monomial(e) for e in exponents]

    def exponents(self, p: PolyElement) -> Exponents:
        """x-exponents of a single-term polynomial"""
        if len(p) != 1:
            raise DomainError(f"Expected a monomial, got {self.format(p)}")
        return next(iter(p.keys()))[:-1]

    def format(self, p: PolyElement) -> str:
        return str(p.as_expr()) if p else "0"

    def __repr__(self) -> str:
        return f"PolynomialAlgebra({list(self.variables)}, order={self.order})"


class PolyVectorField:
    """sum_I f_I d_I with strictly increasing derivative indices I.

    The empty index tuple holds functions (wedge degree 0, graded degree -1).
    """

    def __init__(self, algebra: PolynomialAlgebra, terms: Dict[Tuple[int, ...], PolyElement]):
        self.algebra = algebra
        self.terms: Dict[Tuple[int, ...], PolyElement] = {}
        for indices, coefficient in terms.items():
            if any(not 0 <= i < algebra.dim for i in indices):
                raise DomainError(f"Derivative index outside {algebra.dim} variables: {indices}")
            canonical, sign = sort_with_sign(indices, [1] * len(indices))
            if not sign or not coefficient:
                continue
            total = self.terms.get(canonical, algebra.zero) + (coefficient if sign > 0 else -coefficient)
            total = algebra.truncate(total)
            if total:
                self.terms[canonical] = total
            else:
                self.terms.pop(canonical, None)

    @classmethod
    def zero(cls, algebra: PolynomialAlgebra) -> "PolyVectorField":
        return cls(algebra, {})

    @classmethod
    def function(cls, algebra: PolynomialAlgebra, f: PolyElement) -> "PolyVectorField":
        return cls(algebra, {(): f})

    @classmethod
    def coordinate(cls, algebra: PolynomialAlgebra, indices: Sequence[int],
                   coefficient: Optional[PolyElement] = None) -> "PolyVectorField":
        """coefficient * d_{i1} ^ ... ^ d_{ik}"""
        return cls(algebra, {tuple(indices): algebra.one if coefficient is None else coefficient})

    def _check(self, other: "PolyVectorField"):
        if self.algebra is not other.algebra:
            raise AlgebraMismatch("Polyvector fields over different polynomial algebras")

    def wedge_degrees(self) -> List[int]:
        return sorted({len(indices) for indices in self.terms})

    @property
    def degree(self) -> int:
        degrees = self.wedge_degrees()
        if len(degrees) != 1:
            raise DegreeError(f"Polyvector field is not homogeneous (wedge degrees {degrees})")
        return degrees[0] - 1

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyVectorField):
            return NotImplemented
        return self.algebra is other.algebra and self.terms == other.terms

    def __add__(self, other: "PolyVectorField") -> "PolyVectorField":
        self._check(other)
        merged = dict(self.terms)
        for indices, coefficient in other.terms.items():
            merged[indices] = merged.get(indices, self.algebra.zero) + coefficient
        return PolyVectorField(self.algebra, merged)

    def __neg__(self) -> "PolyVectorField":
        return PolyVectorField(self.algebra, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "PolyVectorField") -> "PolyVectorField":
        return self + (-other)

    def scale(self, factor) -> "PolyVectorField":
        """Multiply by a polynomial, a ScalarSeries or a rational"""
        if isinstance(factor, ScalarSeries):
            factor = self.algebra.from_series(factor)
        elif not isinstance(factor, PolyElement):
            factor = self.algebra.ring(to_rational(factor))
        return PolyVectorField(self.algebra, {k: self.algebra.mul(v, factor) for k, v in self.terms.items()})

    __mul__ = scale
    __rmul__ = scale

    def wedge(self, other: "PolyVectorField") -> "PolyVectorField":
        self._check(other)
        result: Dict[Tuple[int, ...], PolyElement] = {}
        for left, a in self.terms.items():
            for right, b in other.terms.items():
                _accumulate(result, left + right, a * b, self.algebra)
        return PolyVectorField(self.algebra, result)

    def apply(self, f: PolyElement) -> PolyElement:
        """X(f) for a vector field X"""
        if any(len(indices) != 1 for indices in self.terms):
            raise DegreeError("Only vector fields act on functions")
        result = self.algebra.zero
        for (a,), coefficient in self.terms.items():
            result += coefficient * self.algebra.derivative(f, a)
        return self.algebra.truncate(result)

    def hbar_part(self, n: int) -> "PolyVectorField":
        return PolyVectorField(self.algebra, {k: self.algebra.hbar_part(v, n) for k, v in self.terms.items()})

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        names = self.algebra.variables
        parts = []
        for indices in sorted(self.terms):
            word = "^".join(f"d{names[i]}" for i in indices) or "1"
            parts.append(f"({self.algebra.format(self.terms[indices])})*{word}")
        return " + ".join(parts)

    __repr__ = __str__


def _accumulate(result: Dict, indices: Tuple[int, ...], value: PolyElement, algebra: PolynomialAlgebra):
    if not value:
        return
    canonical, sign = sort_with_sign(indices, [1] * len(indices))
    if not sign:
        return
    total = result.get(canonical, algebra.zero) + (value if sign > 0 else -value)
    total = algebra.truncate(total)
    if total:
        result[canonical] = total
    else:
        result.pop(canonical, None)


def _lie_derivative(algebra: PolynomialAlgebra, h: PolyElement, a: int, g: PolyElement,
                    indices: Tuple[int, ...]) -> Dict[Tuple[int, ...], PolyElement]:
    """L_X (g d_J) for X = h d_a"""
    result: Dict[Tuple[int, ...], PolyElement] = {}
    _accumulate(result, indices, h * algebra.derivative(g, a), algebra)
    for m, j in enumerate(indices):
        replaced = indices[:m] + (a,) + indices[m + 1:]
        _accumulate(result, replaced, -(g * algebra.derivative(h, j)), algebra)
    return result


def _schouten_terms(algebra: PolynomialAlgebra, f: PolyElement, left: Tuple[int, ...],
                    g: PolyElement, right: Tuple[int, ...]) -> Dict[Tuple[int, ...], PolyElement]:
    k, l = len(left) - 1, len(right) - 1
    result: Dict[Tuple[int, ...], PolyElement] = {}
    if not left:
        if not right:
            return result
        # [f, Y] = -(-1)^l [Y, f]
        for indices, value in _schouten_terms(algebra, g, right, f, left).items():
            _accumulate(result, indices, value if l % 2 else -value, algebra)
        return result
    for j in range(len(left)):
        sign = parity_sign(k * l + j)
        # X_0 = f d_{left[0]}, X_j = d_{left[j]} otherwise
        if j == 0:
            factor, rest, carrier = f, left[1:], algebra.one
        else:
            factor, rest, carrier = algebra.one, left[:j] + left[j + 1:], f
        for indices, value in _lie_derivative(algebra, factor, left[j], g, right).items():
            _accumulate(result, indices + rest, value * carrier * sign, algebra)
    return result


def schouten_vf(a: PolyVectorField, b: PolyVectorField) -> PolyVectorField:
    """Schouten bracket of polyvector fields.

    Extends [X, Y] = L_X Y and [X, f] = X(f) by the graded Leibniz rule.
    """
    a._check(b)
    algebra = a.algebra
    result: Dict[Tuple[int, ...], PolyElement] = {}
    for left, f in a.terms.items():
        for right, g in b.terms.items():
            for indices, value in _schouten_terms(algebra, f, left, g, right).items():
                _accumulate(result, indices, value, algebra)
    return PolyVectorField(algebra, result)


class LieAction:
    """Basis element of g -> vector field on the polynomial algebra.

    Args:
        lie: The acting Lie algebra.
        algebra: Functions being acted on.
        fields: Vector field for every basis index (missing ones act by zero).
    """

    def __init__(self, lie: LieAlgebra, algebra: PolynomialAlgebra, fields: Dict[int, PolyVectorField]):
        self.lie = lie
        self.algebra = algebra
        self.fields: Dict[int, PolyVectorField] = {}
        for index in range(lie.dim):
            field = fields.get(index, PolyVectorField.zero(algebra))
            if field.algebra is not algebra:
                raise AlgebraMismatch("Vector field over a different polynomial algebra")
            if any(len(indices) != 1 for indices in field.terms):
                raise DegreeError(f"phi({lie.basis_names[index]}) must be a vector field")
            self.fields[index] = field

    def field(self, index: int) -> PolyVectorField:
        return self.fields[index]

    def image(self, element: MultiVector) -> PolyVectorField:
        return wedge_phi(self, element)

    def morphism_witness(self) -> Optional[Tuple[int, int]]:
        """First (i, j) with phi([e_i, e_j]) != [phi(e_i), phi(e_j)], or None"""
        for i in range(self.lie.dim):
            for j in range(i + 1, self.lie.dim):
                expected = PolyVectorField.zero(self.algebra)
                for k, c in self.lie.bracket_basis(i, j).items():
                    expected = expected + self.fields[k].scale(c)
                if schouten_vf(self.fields[i], self.fields[j]) != expected:
                    return (i, j)
        return None

    def require(self):
        """Raises NotAction with the failing basis pair"""
        witness = self.morphism_witness()
        if witness is not None:
            names = self.lie.basis_names
            raise NotAction(
                f"phi is not a Lie algebra morphism on ({names[witness[0]]}, {names[witness[1]]})", witness
            )

    def __repr__(self) -> str:
        names = self.lie.basis_names
        return "LieAction(" + ", ".join(f"{names[i]} -> {f}" for i, f in self.fields.items()) + ")"


def check_action(lie: LieAlgebra, phi: LieAction) -> bool:
    if phi.lie is not lie:
        raise AlgebraMismatch("Action of a different Lie algebra")
    witness = phi.morphism_witness()
    if witness is not None:
        logger.debug(f"Action fails the morphism property on {witness}")
    return witness is None


def wedge_phi(phi: LieAction, element: MultiVector) -> PolyVectorField:
    """Extension of phi to the exterior algebra"""
    if element.parent is not phi.lie:
        raise AlgebraMismatch("Multivector over a different Lie algebra")
    algebra = phi.algebra
    result = PolyVectorField.zero(algebra)
    for indices, coefficient in element.components.items():
        term = phi.fields[indices[0]]
        for i in indices[1:]:
            term = term.wedge(phi.fields[i])
        result = result + term.scale(coefficient)
    return result


def induced_poisson(r: RMatrix, phi: LieAction) -> PolyVectorField:
    """pi = 1/2 sum_{i,j} r^ij phi(e_i) ^ phi(e_j).

    Raises:
        NotTriangular: when [r, r] != 0.
        NotAction: when phi is not a Lie algebra morphism.
    """
    if not isinstance(r, RMatrix):
        r = RMatrix(r)
    if r.parent is not phi.lie:
        raise AlgebraMismatch("r-matrix over a different Lie algebra")
    phi.require()
    # sum over i<j of the antisymmetric r^ij equals the halved double sum
    return wedge_phi(phi, r.value)


def check_poisson_action(r: RMatrix, phi: LieAction, pi: Optional[PolyVectorField] = None) -> bool:
    """[pi, phi(X)] = (phi ^ phi)([r, X]) on every basis element X"""
    pi = induced_poisson(r, phi) if pi is None else pi
    for i in range(phi.lie.dim):
        x = MultiVector.basis(phi.lie, (i,), r.order)
        lhs = schouten_vf(pi, phi.fields[i])
        rhs = wedge_phi(phi, cobracket(r, x))
        if lhs != rhs:
            logger.debug(f"Poisson action fails on {phi.lie.basis_names[i]}")
            return False
    return True


def is_poisson(pi: PolyVectorField) -> bool:
    return schouten_vf(pi, pi).is_zero()


def pairing(pi: PolyVectorField, f: PolyElement, g: PolyElement) -> PolyElement:
    """pi(df, dg) with d_a ^ d_b read as d_a (x) d_b - d_b (x) d_a"""
    algebra = pi.algebra
    result = algebra.zero
    for indices, coefficient in pi.terms.items():
        if len(indices) != 2:
            raise DegreeError("pairing takes a bivector field")
        a, b = indices
        df_a, df_b = algebra.derivative(f, a), algebra.derivative(f, b)
        dg_a, dg_b = algebra.derivative(g, a), algebra.derivative(g, b)
        result += coefficient * (df_a * dg_b - df_b * dg_a)
    return algebra.truncate(result)
