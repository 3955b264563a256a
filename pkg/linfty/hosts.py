"""
Graded Lie hosts for the L-infinity engine: basis keys, degrees,
differentials and brackets of the concrete DGLAs
"""

import itertools
import logging
from functools import lru_cache
from typing import Dict, Hashable, List, Optional, Tuple

from algebra.errors import AlgebraMismatch, DomainError
from algebra.lie import LieAlgebra, MultiVector, schouten_bracket
from algebra.enveloping import TensorWord
from algebra.series import RationalLike, ScalarSeries
from linfty.engine import TaylorMorphism, strict_morphism
from quantize.hochschild import (
    DeformationSymmetry,
    PolyDiffOperator,
    gerstenhaber_hochschild,
    hochschild_differential,
)
from quantize.polynomials import LieAction, PolynomialAlgebra, PolyVectorField, schouten_vf, wedge_phi
from twist.hpoly import HPoly, HPolyElement

logger = logging.getLogger(__name__)

Key = Hashable
Vector = Dict[Key, ScalarSeries]


class GradedHost:
    """Basis-level view of a graded Lie algebra (L, d, [-, -]).

    Subclasses provide degree, expand, assemble and the element-level
    differential and bracket; basis images are memoized here.
    """

    name = "host"

    def __init__(self, order: int):
        self.order = order
        self._differentials: Dict[Key, Vector] = {}
        self._brackets: Dict[Tuple[Key, Key], Vector] = {}

    def degree(self, key: Key) -> int:
        raise NotImplementedError

    def shifted_degree(self, key: Key) -> int:
        """Degree in L[1]"""
        return self.degree(key) - 1

    def expand(self, value) -> Vector:
        raise NotImplementedError

    def assemble(self, terms: Vector):
        raise NotImplementedError

    def sample_basis(self) -> List[Key]:
        raise NotImplementedError

    def differential_value(self, value):
        return None

    def bracket_value(self, a, b):
        raise NotImplementedError

    def basis_value(self, key: Key):
        return self.assemble({key: ScalarSeries.one(self.order)})

    def differential(self, key: Key) -> Vector:
        cached = self._differentials.get(key)
        if cached is None:
            image = self.differential_value(self.basis_value(key))
            cached = {} if image is None else self.expand(image)
            self._differentials[key] = cached
        return cached

    def bracket(self, a: Key, b: Key) -> Vector:
        cached = self._brackets.get((a, b))
        if cached is None:
            cached = self.expand(self.bracket_value(self.basis_value(a), self.basis_value(b)))
            self._brackets[(a, b)] = cached
        return cached

    def curvature(self) -> Vector:
        return {}

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name}, order={self.order})"


class SchoutenHost(GradedHost):
    """(wedge g, 0, Schouten); key = increasing index tuple, degree = length - 1"""

    name = "schouten"

    def __init__(self, lie: LieAlgebra, order: int, max_wedge: int = 3):
        super().__init__(order)
        self.lie = lie
        self.max_wedge = max_wedge

    def degree(self, key: Tuple[int, ...]) -> int:
        return len(key) - 1

    def expand(self, value: MultiVector) -> Vector:
        if value.parent is not self.lie:
            raise AlgebraMismatch("Multivector over a different Lie algebra")
        return dict(value.components)

    def assemble(self, terms: Vector) -> MultiVector:
        return MultiVector(self.lie, dict(terms), self.order)

    def bracket_value(self, a: MultiVector, b: MultiVector) -> MultiVector:
        return schouten_bracket(a, b)

    def sample_basis(self) -> List[Tuple[int, ...]]:
        top = min(self.max_wedge, self.lie.dim)
        return [key for size in range(1, top + 1) for key in itertools.combinations(range(self.lie.dim), size)]


class HPolyHost(GradedHost):
    """H_poly with d = [1 (x) 1, -]; key = tuple of PBW monomials (one per leg)"""

    name = "hpoly"

    def __init__(self, hpoly: HPoly, max_legs: int = 3, max_degree: int = 1):
        super().__init__(hpoly.order)
        self.hpoly = hpoly
        self.max_legs = max_legs
        self.max_degree = max_degree

    def degree(self, key) -> int:
        return len(key) - 1

    def expand(self, value: HPolyElement) -> Vector:
        if value.parent is not self.hpoly:
            raise AlgebraMismatch(f"Element does not belong to {self.hpoly.name}")
        terms: Vector = {}
        for word in value.parts.values():
            terms.update(word.terms)
        return terms

    def assemble(self, terms: Vector) -> HPolyElement:
        grouped: Dict[int, Dict] = {}
        for key, value in terms.items():
            grouped.setdefault(len(key), {})[key] = value
        words = [TensorWord(self.hpoly.algebra, legs, group) for legs, group in grouped.items()]
        return self.hpoly.element(*words)

    def differential_value(self, value: HPolyElement) -> HPolyElement:
        return self.hpoly.differential(value)

    def bracket_value(self, a: HPolyElement, b: HPolyElement) -> HPolyElement:
        return self.hpoly.bracket(a, b)

    def sample_basis(self) -> List:
        dim = self.hpoly.algebra.dim
        monomials = [m for m in itertools.product(range(self.max_degree + 1), repeat=dim) if sum(m) <= self.max_degree]
        keys = []
        for legs in range(1, self.max_legs + 1):
            keys.extend(itertools.product(monomials, repeat=legs))
        return keys


class PolyVectorHost(GradedHost):
    """(T_poly, 0, Schouten); key = (derivative indices, x-exponents)"""

    name = "polyvector"

    def __init__(self, algebra: PolynomialAlgebra, max_wedge: int = 2, max_degree: int = 1):
        super().__init__(algebra.order)
        self.algebra = algebra
        self.max_wedge = max_wedge
        self.max_degree = max_degree

    def degree(self, key) -> int:
        return len(key[0]) - 1

    def expand(self, value: PolyVectorField) -> Vector:
        if value.algebra is not self.algebra:
            raise AlgebraMismatch("Polyvector field over a different polynomial algebra")
        terms: Vector = {}
        for indices, coefficient in value.terms.items():
            for exponents, series in self.algebra.split_hbar(coefficient).items():
                terms[(indices, exponents)] = series
        return terms

    def assemble(self, terms: Vector) -> PolyVectorField:
        algebra = self.algebra
        grouped: Dict[Tuple[int, ...], object] = {}
        for (indices, exponents), series in terms.items():
            piece = algebra.mul(algebra.monomial(exponents), algebra.from_series(series))
            grouped[indices] = grouped.get(indices, algebra.zero) + piece
        return PolyVectorField(algebra, grouped)

    def bracket_value(self, a: PolyVectorField, b: PolyVectorField) -> PolyVectorField:
        return schouten_vf(a, b)

    def sample_basis(self) -> List:
        dim = self.algebra.dim
        exponents = [e for e in itertools.product(range(self.max_degree + 1), repeat=dim) if sum(e) <= self.max_degree]
        keys = []
        for size in range(1, min(self.max_wedge, dim) + 1):
            for indices in itertools.combinations(range(dim), size):
                keys.extend((indices, e) for e in exponents)
        return keys


class HochschildHost(GradedHost):
    """Polydifferential Hochschild cochains with [m, -] and the Gerstenhaber bracket.

    Key = (per-slot multi-indices, x-exponents of the coefficient).
    """

    name = "hochschild"

    def __init__(self, algebra: PolynomialAlgebra, max_arity: int = 2, max_order: int = 1, max_degree: int = 1):
        super().__init__(algebra.order)
        self.algebra = algebra
        self.max_arity = max_arity
        self.max_order = max_order
        self.max_degree = max_degree

    def degree(self, key) -> int:
        return len(key[0]) - 1

    def expand(self, value: PolyDiffOperator) -> Vector:
        if value.algebra is not self.algebra:
            raise AlgebraMismatch("Operator over a different polynomial algebra")
        terms: Vector = {}
        for slots, coefficient in value.terms.items():
            for exponents, series in self.algebra.split_hbar(coefficient).items():
                terms[(slots, exponents)] = series
        return terms

    def assemble(self, terms: Vector) -> PolyDiffOperator:
        algebra = self.algebra
        grouped: Dict[Tuple, object] = {}
        for (slots, exponents), series in terms.items():
            piece = algebra.mul(algebra.monomial(exponents), algebra.from_series(series))
            grouped[slots] = grouped.get(slots, algebra.zero) + piece
        return PolyDiffOperator(algebra, grouped)

    def differential_value(self, value: PolyDiffOperator) -> PolyDiffOperator:
        return hochschild_differential(value)

    def bracket_value(self, a: PolyDiffOperator, b: PolyDiffOperator) -> PolyDiffOperator:
        return gerstenhaber_hochschild(a, b)

    def sample_basis(self) -> List:
        dim = self.algebra.dim
        indices = [i for i in itertools.product(range(self.max_order + 1), repeat=dim) if sum(i) <= self.max_order]
        exponents = [e for e in itertools.product(range(self.max_degree + 1), repeat=dim) if sum(e) <= self.max_degree]
        keys = []
        for arity in range(1, self.max_arity + 1):
            for slots in itertools.product(indices, repeat=arity):
                keys.extend((slots, e) for e in exponents)
        return keys


class AbelianHost(GradedHost):
    """Graded vector space with named basis, optional differential and zero bracket.

    Args:
        degrees: Basis name -> L-degree.
        order: Truncation order.
        differential: Optional basis name -> {name: coefficient}, of degree +1.
    """

    name = "abelian"

    def __init__(self, degrees: Dict[str, int], order: int,
                 differential: Optional[Dict[str, Dict[str, RationalLike]]] = None):
        super().__init__(order)
        self.degrees = dict(degrees)
        self.table: Dict[str, Vector] = {}
        for name, image in (differential or {}).items():
            for target in image:
                if self.degrees[target] != self.degrees[name] + 1:
                    raise DomainError(f"d({name}) -> {target} does not raise the degree by one")
            self.table[name] = {t: ScalarSeries.constant(c, order) for t, c in image.items()}

    def degree(self, key: str) -> int:
        try:
            return self.degrees[key]
        except KeyError:
            raise DomainError(f"Unknown basis element {key!r}") from None

    def expand(self, value: Vector) -> Vector:
        return dict(value)

    def assemble(self, terms: Vector) -> Vector:
        return dict(terms)

    def differential(self, key: str) -> Vector:
        return self.table.get(key, {})

    def bracket(self, a: str, b: str) -> Vector:
        return {}

    def sample_basis(self) -> List[str]:
        return sorted(self.degrees)

    def element(self, terms: Dict[str, RationalLike], power: int = 0) -> Vector:
        return {k: ScalarSeries.monomial(c, power, self.order) for k, c in terms.items()}


def action_morphism(phi: LieAction, source: SchoutenHost, target: PolyVectorHost) -> TaylorMorphism:
    """Strict morphism wedge(phi): (wedge g, Schouten) -> (T_poly, Schouten)"""
    if source.lie is not phi.lie or target.algebra is not phi.algebra:
        raise AlgebraMismatch("Hosts do not match the action")

    def linear(key: Tuple[int, ...]) -> Vector:
        return target.expand(wedge_phi(phi, MultiVector.basis(phi.lie, key, source.order)))

    return strict_morphism(source, target, lru_cache(maxsize=None)(linear), "wedge_phi")


def deformation_morphism(symmetry: DeformationSymmetry, source: HPolyHost, target: HochschildHost) -> TaylorMorphism:
    """Strict DGLA morphism Phi: H_poly -> Hochschild cochains"""
    if source.hpoly.algebra is not symmetry.enveloping or target.algebra is not symmetry.algebra:
        raise AlgebraMismatch("Hosts do not match the deformation symmetry")

    def linear(key) -> Vector:
        word = TensorWord(symmetry.enveloping, len(key), {key: ScalarSeries.one(source.order)})
        return target.expand(symmetry.word(word))

    return strict_morphism(source, target, lru_cache(maxsize=None)(linear), "Phi")
