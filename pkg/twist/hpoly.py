"""
The H_poly DGLA of a bialgebra: insertion (pre-Lie) product, bracket,
differential [1 (x) 1, -] and braces
"""

import itertools
import logging
from typing import Callable, Dict, List, Optional, Sequence

from algebra.enveloping import EnvelopingAlgebra, TensorWord, random_word
from algebra.errors import AlgebraMismatch, DegreeError, DomainError
from algebra.series import ScalarSeries, parity_sign

logger = logging.getLogger(__name__)

Splitter = Callable[[TensorWord, int, int], TensorWord]


def _plain_split(word: TensorWord, leg: int, k: int) -> TensorWord:
    return word.split_leg(leg, k)


class HPoly:
    """Graded Lie algebra T^(k+1)H in degree k over an enveloping algebra.

    Args:
        algebra: The enveloping algebra H.
        splitter: Iterated coproduct applied to a single leg, (word, leg, k).
            Defaults to the coproduct of H; twisted bialgebras pass their own.
    """

    def __init__(self, algebra: EnvelopingAlgebra, splitter: Optional[Splitter] = None, name: str = "H_poly"):
        self.algebra = algebra
        self.order = algebra.order
        self.split = splitter or _plain_split
        self.name = name

    def element(self, *words: TensorWord) -> "HPolyElement":
        parts: Dict[int, TensorWord] = {}
        for word in words:
            if word.parent is not self.algebra:
                raise AlgebraMismatch("Word over a different enveloping algebra")
            degree = word.legs - 1
            parts[degree] = parts[degree] + word if degree in parts else word
        return HPolyElement(self, parts)

    def zero(self) -> "HPolyElement":
        return HPolyElement(self, {})

    def unit(self) -> "HPolyElement":
        """1 (x) 1, the degree-one element defining the differential"""
        return self.element(self.algebra.unit_word(2))

    def scalar(self, value) -> "HPolyElement":
        """Degree -1 element (no legs)"""
        series = value if isinstance(value, ScalarSeries) else ScalarSeries.constant(value, self.order)
        return self.element(TensorWord(self.algebra, 0, {(): series}))

    def bullet_words(self, p: TensorWord, q: TensorWord) -> TensorWord:
        k1, k2 = p.legs - 1, q.legs - 1
        total = k1 + k2 + 1
        result = TensorWord(self.algebra, total, {})
        for i in range(k1 + 1):
            term = self.split(p, i, k2) * q.embed(i, total)
            result = result + term if parity_sign(i * k2) > 0 else result - term
        return result

    def brace_words(self, p: TensorWord, qs: Sequence[TensorWord]) -> TensorWord:
        k = p.legs - 1
        degrees = [q.legs - 1 for q in qs]
        total = k + sum(degrees) + 1
        unit_leg = self.algebra.unit_word(1)
        result = TensorWord(self.algebra, total, {})
        for positions in itertools.combinations(range(k + 1), len(qs)):
            split = p
            for j in reversed(range(len(qs))):
                split = self.split(split, positions[j], degrees[j])
            factor = self.algebra.unit_word(0)
            inserted = dict(zip(positions, qs))
            for leg in range(k + 1):
                factor = factor.tensor(inserted.get(leg, unit_leg))
            term = split * factor
            exponent = sum(i * d for i, d in zip(positions, degrees))
            result = result + term if parity_sign(exponent) > 0 else result - term
        return result

    def bullet(self, p: "HPolyElement", q: "HPolyElement") -> "HPolyElement":
        self._check(p, q)
        words = [self.bullet_words(a, b) for a in p.parts.values() for b in q.parts.values()]
        return self.element(*words)

    def bracket(self, p: "HPolyElement", q: "HPolyElement") -> "HPolyElement":
        self._check(p, q)
        words = []
        for k1, a in p.parts.items():
            for k2, b in q.parts.items():
                forward = self.bullet_words(a, b)
                backward = self.bullet_words(b, a)
                words.append(forward - backward if parity_sign(k1 * k2) > 0 else forward + backward)
        return self.element(*words)

    def differential(self, p: "HPolyElement") -> "HPolyElement":
        return self.bracket(self.unit(), p)

    def braces(self, p: "HPolyElement", qs: Sequence["HPolyElement"]) -> "HPolyElement":
        """P<Q_1, ..., Q_r>, extended multilinearly over graded parts"""
        if not qs:
            raise DomainError("braces need at least one inserted element")
        self._check(p, *qs)
        words = []
        for a in p.parts.values():
            for choice in itertools.product(*[list(q.parts.values()) for q in qs]):
                words.append(self.brace_words(a, list(choice)))
        return self.element(*words)

    def _check(self, *elements: "HPolyElement"):
        for element in elements:
            if element.parent is not self:
                raise AlgebraMismatch(f"Element does not belong to {self.name}")

    def __repr__(self) -> str:
        return f"HPoly({self.name}, {self.algebra})"


class HPolyElement:
    """Graded element: degree k -> word with k + 1 legs"""

    def __init__(self, parent: HPoly, parts: Dict[int, TensorWord]):
        self.parent = parent
        self.order = parent.order
        self.parts = {}
        for degree, word in parts.items():
            if word.legs != degree + 1:
                raise DegreeError(f"Degree {degree} part must have {degree + 1} legs")
            if not word.is_zero():
                self.parts[degree] = word

    @property
    def degree(self) -> int:
        if len(self.parts) != 1:
            raise DegreeError(f"Element is not homogeneous (degrees {sorted(self.parts)})")
        return next(iter(self.parts))

    def degrees(self) -> List[int]:
        return sorted(self.parts)

    def part(self, degree: int) -> TensorWord:
        return self.parts.get(degree, TensorWord(self.parent.algebra, degree + 1, {}))

    def is_zero(self) -> bool:
        return not self.parts

    @property
    def valuation(self) -> int:
        return min((w.valuation for w in self.parts.values()), default=self.order + 1)

    def nonzero_orders(self) -> List[int]:
        orders = set()
        for word in self.parts.values():
            orders.update(word.nonzero_orders())
        return sorted(orders)

    def map_words(self, fn: Callable[[TensorWord], TensorWord], parent: Optional[HPoly] = None) -> "HPolyElement":
        target = parent or self.parent
        return target.element(*[fn(word) for word in self.parts.values()])

    def __eq__(self, other) -> bool:
        if not isinstance(other, HPolyElement):
            return NotImplemented
        return self.parent is other.parent and self.parts == other.parts

    def __add__(self, other: "HPolyElement") -> "HPolyElement":
        self.parent._check(other)
        return self.parent.element(*self.parts.values(), *other.parts.values())

    def __neg__(self) -> "HPolyElement":
        return self.map_words(lambda w: -w)

    def __sub__(self, other: "HPolyElement") -> "HPolyElement":
        return self + (-other)

    def scale(self, scalar) -> "HPolyElement":
        return self.map_words(lambda w: w.scale(scalar))

    __mul__ = scale
    __rmul__ = scale

    def __str__(self) -> str:
        if not self.parts:
            return "0"
        return " + ".join(f"[deg {k}] {self.parts[k]}" for k in sorted(self.parts))

    __repr__ = __str__


def bullet(p: HPolyElement, q: HPolyElement) -> HPolyElement:
    return p.parent.bullet(p, q)


def gerstenhaber_bracket(p: HPolyElement, q: HPolyElement) -> HPolyElement:
    return p.parent.bracket(p, q)


def hochschild_differential(p: HPolyElement) -> HPolyElement:
    return p.parent.differential(p)


def braces(p: HPolyElement, qs: Sequence[HPolyElement]) -> HPolyElement:
    return p.parent.braces(p, qs)


def associator(a: HPolyElement, b: HPolyElement, c: HPolyElement) -> HPolyElement:
    """a.(b.c) - (a.b).c for the insertion product"""
    return bullet(a, bullet(b, c)) - bullet(bullet(a, b), c)


def random_element(hpoly: HPoly, rng, degree: int, max_degree: int = 1, terms: int = 2,
                   max_power: int = 1) -> HPolyElement:
    """Homogeneous pseudo-random element with small integer coefficients"""
    word = random_word(hpoly.algebra, rng, degree + 1, max_degree=max_degree, terms=terms, max_power=max_power)
    return hpoly.element(word)
