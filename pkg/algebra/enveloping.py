"""
Universal enveloping algebra in PBW normal form with hbar-series
coefficients, its Hopf structure and tensor powers
"""

import itertools
import logging
from typing import Dict, List, Optional, Sequence, Tuple

from sympy.ntheory.multinomial import multinomial_coefficients
from sympy.polys.domains import QQ

from algebra.errors import AlgebraMismatch, DomainError, NotFiltered, NotInvertible
from algebra.lie import LieAlgebra
from algebra.series import RationalLike, ScalarSeries, parity_sign, to_rational

logger = logging.getLogger(__name__)

Monomial = Tuple[int, ...]
LegKey = Tuple[Monomial, ...]


class EnvelopingAlgebra:
    """U(g)[[hbar]] in the PBW basis of the declared generator order.

    Monomial products, coproducts and antipodes are memoized per instance.
    """

    def __init__(self, lie: LieAlgebra, order: int):
        self.lie = lie
        self.order = order
        self.dim = lie.dim
        self.unit_monomial: Monomial = (0,) * lie.dim
        self._generator_products: Dict[Tuple[Monomial, int], Dict[Monomial, object]] = {}
        self._products: Dict[Tuple[Monomial, Monomial], Dict[Monomial, object]] = {}
        self._coproducts: Dict[Tuple[Monomial, int], Dict[LegKey, object]] = {}

    def generator_monomial(self, index: int) -> Monomial:
        exponents = [0] * self.dim
        exponents[index] = 1
        return tuple(exponents)

    def _times_generator(self, mono: Monomial, g: int) -> Dict[Monomial, object]:
        cache_key = (mono, g)
        cached = self._generator_products.get(cache_key)
        if cached is not None:
            return cached
        highest = max((i for i, a in enumerate(mono) if a), default=-1)
        if highest <= g:
            exponents = list(mono)
            exponents[g] += 1
            result = {tuple(exponents): QQ.one}
        else:
            # u e_h e_g = (u e_g) e_h + sum_k c^k_hg u e_k
            lowered = list(mono)
            lowered[highest] -= 1
            lowered = tuple(lowered)
            result = {}
            for middle, c in self._times_generator(lowered, g).items():
                for final, d in self._times_generator(middle, highest).items():
                    _add_rational(result, final, c * d)
            for k, c in self.lie.bracket_basis(highest, g).items():
                for final, d in self._times_generator(lowered, k).items():
                    _add_rational(result, final, c * d)
        self._generator_products[cache_key] = result
        return result

    def multiply_monomials(self, a: Monomial, b: Monomial) -> Dict[Monomial, object]:
        """PBW normal form of the product of two monomials"""
        cache_key = (a, b)
        cached = self._products.get(cache_key)
        if cached is not None:
            return cached
        current = {a: QQ.one}
        for g, exponent in enumerate(b):
            for _ in range(exponent):
                following = {}
                for mono, c in current.items():
                    for final, d in self._times_generator(mono, g).items():
                        _add_rational(following, final, c * d)
                current = following
        self._products[cache_key] = current
        return current

    def monomial_coproduct(self, mono: Monomial, k: int) -> Dict[LegKey, object]:
        """k-th iterated coproduct of a PBW monomial (k + 1 legs)"""
        cache_key = (mono, k)
        cached = self._coproducts.get(cache_key)
        if cached is not None:
            return cached
        per_generator = [
            list(multinomial_coefficients(k + 1, exponent).items()) if exponent else [((0,) * (k + 1), 1)]
            for exponent in mono
        ]
        result = {}
        for choice in itertools.product(*per_generator):
            coefficient = 1
            for _, c in choice:
                coefficient *= c
            legs = tuple(tuple(split[leg] for split, _ in choice) for leg in range(k + 1))
            result[legs] = QQ(coefficient)
        self._coproducts[cache_key] = result
        return result

    def antipode_monomial(self, mono: Monomial) -> Dict[Monomial, object]:
        current = {self.unit_monomial: QQ(parity_sign(sum(mono)))}
        for g in reversed(range(self.dim)):
            for _ in range(mono[g]):
                following = {}
                for m, c in current.items():
                    for final, d in self._times_generator(m, g).items():
                        _add_rational(following, final, c * d)
                current = following
        return current

    def element(self, terms: Dict[Monomial, RationalLike]) -> "UEAElement":
        return UEAElement(self, {m: ScalarSeries.constant(c, self.order) for m, c in terms.items()})

    def one(self) -> "UEAElement":
        return self.element({self.unit_monomial: 1})

    def zero(self) -> "UEAElement":
        return UEAElement(self, {})

    def generator(self, index: int, coefficient: RationalLike = 1) -> "UEAElement":
        return self.element({self.generator_monomial(index): coefficient})

    def named(self, name: str) -> "UEAElement":
        return self.generator(self.lie.index(name))

    def unit_word(self, legs: int) -> "TensorWord":
        return TensorWord(self, legs, {(self.unit_monomial,) * legs: ScalarSeries.one(self.order)})

    def word(self, terms: Dict[LegKey, RationalLike], legs: int) -> "TensorWord":
        return TensorWord(self, legs, {k: ScalarSeries.constant(c, self.order) for k, c in terms.items()})

    def __repr__(self) -> str:
        return f"EnvelopingAlgebra({list(self.lie.basis_names)}, order={self.order})"


def _add_rational(acc: Dict, key, value):
    total = acc.get(key, QQ.zero) + value
    if total:
        acc[key] = total
    else:
        acc.pop(key, None)


def _add_series(acc: Dict, key, value: ScalarSeries):
    if key in acc:
        acc[key] = acc[key] + value
    else:
        acc[key] = value


class TensorWord:
    """Element of U(g)^(legs) with ScalarSeries coefficients.

    Keys are tuples of PBW monomials, one per leg; zero coefficients are
    dropped. legs == 0 holds scalars.
    """

    def __init__(self, parent: EnvelopingAlgebra, legs: int, terms: Dict[LegKey, ScalarSeries]):
        self.parent = parent
        self.legs = legs
        self.order = parent.order
        self.terms: Dict[LegKey, ScalarSeries] = {}
        for key, value in terms.items():
            if len(key) != legs:
                raise DomainError(f"Key {key} does not have {legs} legs")
            if value.order != self.order:
                raise AlgebraMismatch(f"Coefficient of order {value.order} in order {self.order} word")
            if not value.is_zero():
                self.terms[key] = value

    def _check(self, other: "TensorWord", same_legs: bool = True):
        if self.parent is not other.parent:
            raise AlgebraMismatch("Tensor words over different enveloping algebras")
        if same_legs and self.legs != other.legs:
            raise AlgebraMismatch(f"Cannot combine {self.legs}-leg and {other.legs}-leg words")

    @classmethod
    def from_element(cls, element: "UEAElement") -> "TensorWord":
        return cls(element.parent, 1, {(m,): c for m, c in element.terms.items()})

    def to_element(self) -> "UEAElement":
        if self.legs != 1:
            raise DomainError("Only single-leg words are elements of U(g)")
        return UEAElement(self.parent, {key[0]: c for key, c in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def valuation(self) -> int:
        return min((c.valuation for c in self.terms.values()), default=self.order + 1)

    def nonzero_orders(self) -> List[int]:
        orders = set()
        for c in self.terms.values():
            orders.update(n for n, value in enumerate(c.coefficients) if value)
        return sorted(orders)

    def order_part(self, n: int) -> "TensorWord":
        """Terms of hbar^n exactly, still carrying the hbar^n factor"""
        return TensorWord(self.parent, self.legs, {
            key: ScalarSeries.monomial(c.coefficient(n), n, self.order) for key, c in self.terms.items()
        })

    def coefficients_at(self, n: int) -> Dict[LegKey, object]:
        return {key: c.coefficient(n) for key, c in self.terms.items() if c.coefficient(n)}

    def __eq__(self, other) -> bool:
        if not isinstance(other, TensorWord):
            return NotImplemented
        return self.parent is other.parent and self.legs == other.legs and self.terms == other.terms

    def __add__(self, other: "TensorWord") -> "TensorWord":
        self._check(other)
        merged = dict(self.terms)
        for key, value in other.terms.items():
            _add_series(merged, key, value)
        return TensorWord(self.parent, self.legs, merged)

    def __neg__(self) -> "TensorWord":
        return TensorWord(self.parent, self.legs, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "TensorWord") -> "TensorWord":
        return self + (-other)

    def scale(self, scalar) -> "TensorWord":
        if isinstance(scalar, ScalarSeries):
            return TensorWord(self.parent, self.legs, {k: v * scalar for k, v in self.terms.items()})
        factor = to_rational(scalar)
        return TensorWord(self.parent, self.legs, {k: v.scale(factor) for k, v in self.terms.items()})

    def __mul__(self, other) -> "TensorWord":
        if not isinstance(other, TensorWord):
            return self.scale(other)
        self._check(other)
        order = self.order
        multiply = self.parent.multiply_monomials
        result: Dict[LegKey, ScalarSeries] = {}
        for left, a in self.terms.items():
            va = a.valuation
            for right, b in other.terms.items():
                if va + b.valuation > order:
                    continue
                coefficient = a * b
                per_leg = [list(multiply(x, y).items()) for x, y in zip(left, right)]
                for choice in itertools.product(*per_leg):
                    q = QQ.one
                    for _, c in choice:
                        q *= c
                    _add_series(result, tuple(m for m, _ in choice), coefficient.scale(q))
        return TensorWord(self.parent, self.legs, result)

    def __rmul__(self, scalar) -> "TensorWord":
        return self.scale(scalar)

    def tensor(self, other: "TensorWord") -> "TensorWord":
        """self (x) other, concatenating legs"""
        self._check(other, same_legs=False)
        result = {}
        for left, a in self.terms.items():
            for right, b in other.terms.items():
                _add_series(result, left + right, a * b)
        return TensorWord(self.parent, self.legs + other.legs, result)

    def embed(self, position: int, total: int) -> "TensorWord":
        """1^(position) (x) self (x) 1^(total - position - legs)"""
        after = total - position - self.legs
        if position < 0 or after < 0:
            raise DomainError(f"Cannot place {self.legs} legs at {position} inside {total}")
        unit = self.parent.unit_monomial
        return TensorWord(self.parent, total, {
            (unit,) * position + key + (unit,) * after: c for key, c in self.terms.items()
        })

    def split_leg(self, leg: int, k: int) -> "TensorWord":
        """Apply the k-th iterated coproduct on one leg.

        k = 0 is the identity and k = -1 applies the counit (dropping the leg).
        """
        if not 0 <= leg < self.legs:
            raise DomainError(f"No leg {leg} in a {self.legs}-leg word")
        if k < -1:
            raise DomainError(f"Iterated coproduct of negative order {k}")
        if k == 0:
            return self
        unit = self.parent.unit_monomial
        result = {}
        for key, c in self.terms.items():
            mono = key[leg]
            if k == -1:
                if mono == unit:
                    _add_series(result, key[:leg] + key[leg + 1:], c)
                continue
            for legs, q in self.parent.monomial_coproduct(mono, k).items():
                _add_series(result, key[:leg] + legs + key[leg + 1:], c.scale(q))
        return TensorWord(self.parent, self.legs + k, result)

    def permute_legs(self, permutation: Sequence[int]) -> "TensorWord":
        """Leg j of the result is leg permutation[j] of self"""
        if sorted(permutation) != list(range(self.legs)):
            raise DomainError(f"Not a leg permutation: {tuple(permutation)}")
        return TensorWord(self.parent, self.legs, {
            tuple(key[p] for p in permutation): c for key, c in self.terms.items()
        })

    def flip(self) -> "TensorWord":
        if self.legs != 2:
            raise DomainError("flip is defined on two-leg words")
        return self.permute_legs((1, 0))

    def exp(self) -> "TensorWord":
        """sum X^n / n!; X must vanish at hbar^0"""
        if self.valuation < 1:
            raise NotFiltered("exp needs a word in the first hbar-filtration level")
        result = self.parent.unit_word(self.legs)
        power = result
        for n in range(1, self.order + 1):
            power = (power * self).scale(QQ(1, n))
            if power.is_zero():
                break
            result = result + power
        return result

    def inverse(self) -> "TensorWord":
        """Inverse of c*1 + O(hbar) by the geometric series.

        Raises:
            NotInvertible: when the hbar^0 part is not a nonzero multiple of the unit.
        """
        unit_key = (self.parent.unit_monomial,) * self.legs
        base = self.coefficients_at(0)
        if set(base) != {unit_key}:
            raise NotInvertible("Only words of the form c*1 + O(hbar) are inverted")
        c0 = base[unit_key]
        normalized = self.scale(1 / c0)
        unit = self.parent.unit_word(self.legs)
        deviation = normalized - unit
        result = unit
        power = unit
        for _ in range(self.order):
            power = power * (-deviation)
            if power.is_zero():
                break
            result = result + power
        return result.scale(1 / c0)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        names = self.parent.lie.basis_names
        parts = []
        for key in sorted(self.terms):
            legs = " (x) ".join(_monomial_text(m, names) for m in key)
            parts.append(f"({self.terms[key]})*[{legs}]")
        return " + ".join(parts)

    __repr__ = __str__


def _monomial_text(mono: Monomial, names: Sequence[str]) -> str:
    factors = []
    for name, exponent in zip(names, mono):
        if exponent == 1:
            factors.append(name)
        elif exponent:
            factors.append(f"{name}^{exponent}")
    return "*".join(factors) or "1"


class UEAElement:
    """Element of U(g)[[hbar]]: PBW monomial -> ScalarSeries"""

    def __init__(self, parent: EnvelopingAlgebra, terms: Dict[Monomial, ScalarSeries]):
        self.parent = parent
        self.order = parent.order
        self.terms = {m: c for m, c in terms.items() if not c.is_zero()}
        for mono in self.terms:
            if len(mono) != parent.dim:
                raise DomainError(f"Monomial {mono} has the wrong number of exponents")

    def as_word(self) -> TensorWord:
        return TensorWord.from_element(self)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        if not isinstance(other, UEAElement):
            return NotImplemented
        return self.parent is other.parent and self.terms == other.terms

    def __add__(self, other: "UEAElement") -> "UEAElement":
        return (self.as_word() + other.as_word()).to_element()

    def __sub__(self, other: "UEAElement") -> "UEAElement":
        return (self.as_word() - other.as_word()).to_element()

    def __neg__(self) -> "UEAElement":
        return (-self.as_word()).to_element()

    def __mul__(self, other) -> "UEAElement":
        if isinstance(other, UEAElement):
            return pbw_product(self, other)
        return self.as_word().scale(other).to_element()

    def __rmul__(self, scalar) -> "UEAElement":
        return self.as_word().scale(scalar).to_element()

    def __str__(self) -> str:
        return str(self.as_word())

    __repr__ = __str__


def pbw_product(a: UEAElement, b: UEAElement) -> UEAElement:
    if a.parent is not b.parent:
        raise AlgebraMismatch("Elements of different enveloping algebras")
    return (a.as_word() * b.as_word()).to_element()


def coproduct(a: UEAElement) -> TensorWord:
    return a.as_word().split_leg(0, 1)


def iterated_coproduct(a: UEAElement, k: int) -> TensorWord:
    """k-th iterate of the coproduct, k + 1 legs.

    Raises:
        DomainError: for negative k.
    """
    if k < 0:
        raise DomainError(f"Iterated coproduct needs k >= 0, got {k}")
    return a.as_word().split_leg(0, k)


def counit(a: UEAElement) -> ScalarSeries:
    return a.terms.get(a.parent.unit_monomial, ScalarSeries.zero(a.order))


def antipode(a: UEAElement) -> UEAElement:
    parent = a.parent
    result = {}
    for mono, c in a.terms.items():
        for image, q in parent.antipode_monomial(mono).items():
            _add_series(result, image, c.scale(q))
    return UEAElement(parent, result)


def tensor_product_word(p: TensorWord, q: TensorWord, position: Optional[int] = None) -> TensorWord:
    """Leg-wise product p*q, or p * (1^position (x) q (x) 1^...) when position is given"""
    if position is None:
        return p * q
    p._check(q, same_legs=False)
    return p * q.embed(position, p.legs)


def random_element(parent: EnvelopingAlgebra, rng, max_degree: int = 2, terms: int = 3,
                   max_power: int = 1) -> UEAElement:
    """Small pseudo-random element with integer coefficients"""
    monomials = [m for m in itertools.product(range(max_degree + 1), repeat=parent.dim) if sum(m) <= max_degree]
    chosen = {}
    for _ in range(terms):
        mono = rng.choice(monomials)
        power = rng.randint(0, max_power)
        value = rng.choice([-2, -1, 1, 2, 3])
        _add_series(chosen, mono, ScalarSeries.monomial(value, power, parent.order))
    return UEAElement(parent, chosen)


def random_word(parent: EnvelopingAlgebra, rng, legs: int, max_degree: int = 1, terms: int = 3,
                max_power: int = 1) -> TensorWord:
    monomials = [m for m in itertools.product(range(max_degree + 1), repeat=parent.dim) if sum(m) <= max_degree]
    chosen = {}
    for _ in range(terms):
        key = tuple(rng.choice(monomials) for _ in range(legs))
        power = rng.randint(0, max_power)
        value = rng.choice([-2, -1, 1, 2, 3])
        _add_series(chosen, key, ScalarSeries.monomial(value, power, parent.order))
    return TensorWord(parent, legs, chosen)
