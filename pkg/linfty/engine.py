"""
L-infinity calculus over a graded Lie host.

Elements of L[1] and of the symmetric coalgebra are kept basis-expanded:
a wedge word is a tuple of host basis keys in ascending order, with Koszul
signs taken from the shifted degrees (L-degree - 1). Coderivations and
morphisms are given by their Taylor components, callables from a tuple of
keys (any order) to {key: ScalarSeries}.
"""

import itertools
import logging
import random
from dataclasses import dataclass, field
from typing import Callable, Dict, Hashable, List, Optional, Sequence, Tuple

from sympy.polys.domains import QQ
from sympy.utilities.iterables import multiset_partitions

from algebra.errors import AlgebraMismatch, BoundExceeded, DegreeError, NotFiltered
from algebra.series import KoszulContext, ScalarSeries, koszul_sign, parity_sign, sort_with_sign
from config.settings import config

logger = logging.getLogger(__name__)

Key = Hashable
Word = Tuple[Key, ...]
Vector = Dict[Key, ScalarSeries]
Component = Callable[[Word], Vector]


def _accumulate(result: Dict, key, value: ScalarSeries):
    if value.is_zero():
        return
    total = result[key] + value if key in result else value
    if total.is_zero():
        result.pop(key, None)
    else:
        result[key] = total


def _signed(value: ScalarSeries, sign: int) -> ScalarSeries:
    return value if sign > 0 else -value


def _default_bound(bound: Optional[int]) -> int:
    return config.get("word_length_bound") if bound is None else bound


class GradedElement:
    """Element of L[1]: host basis key -> ScalarSeries.

    Args:
        host: The graded Lie structure the keys belong to.
        terms: Basis expansion; zero coefficients are dropped.
    """

    def __init__(self, host, terms: Vector):
        self.host = host
        self.order = host.order
        self.terms: Vector = {k: v for k, v in terms.items() if not v.is_zero()}

    @classmethod
    def from_value(cls, host, value) -> "GradedElement":
        return cls(host, host.expand(value))

    @classmethod
    def zero(cls, host) -> "GradedElement":
        return cls(host, {})

    @property
    def value(self):
        """The element as a host object (MultiVector, HPolyElement, ...)"""
        return self.host.assemble(self.terms)

    @property
    def shifted_degree(self) -> Optional[int]:
        """Degree in L[1]; None for the zero element"""
        degrees = {self.host.shifted_degree(key) for key in self.terms}
        if len(degrees) > 1:
            raise DegreeError(f"Element is not homogeneous (shifted degrees {sorted(degrees)})")
        return next(iter(degrees), None)

    @property
    def filtration_level(self) -> int:
        return min((v.valuation for v in self.terms.values()), default=self.order + 1)

    def is_zero(self) -> bool:
        return not self.terms

    def nonzero_orders(self) -> List[int]:
        orders = set()
        for v in self.terms.values():
            orders.update(n for n, c in enumerate(v.coefficients) if c)
        return sorted(orders)

    def as_word(self) -> "WedgeSum":
        return WedgeSum(self.host, {(key,): v for key, v in self.terms.items()})

    def _check(self, other: "GradedElement"):
        if self.host is not other.host:
            raise AlgebraMismatch("Elements of different hosts")

    def __eq__(self, other) -> bool:
        if not isinstance(other, GradedElement):
            return NotImplemented
        return self.host is other.host and self.terms == other.terms

    def __add__(self, other: "GradedElement") -> "GradedElement":
        self._check(other)
        merged = dict(self.terms)
        for key, value in other.terms.items():
            _accumulate(merged, key, value)
        return GradedElement(self.host, merged)

    def __neg__(self) -> "GradedElement":
        return GradedElement(self.host, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "GradedElement") -> "GradedElement":
        return self + (-other)

    def scale(self, factor) -> "GradedElement":
        if isinstance(factor, ScalarSeries):
            return GradedElement(self.host, {k: v * factor for k, v in self.terms.items()})
        return GradedElement(self.host, {k: v.scale(factor) for k, v in self.terms.items()})

    __mul__ = scale
    __rmul__ = scale

    def __str__(self) -> str:
        return str(self.value)

    __repr__ = __str__


class WedgeSum:
    """Finite sum of wedge words in the symmetric coalgebra of L[1].

    Words are canonicalized to ascending key order on construction; a word
    repeating an odd key vanishes. The empty word is the counit element 1.
    """

    def __init__(self, host, terms: Dict[Word, ScalarSeries]):
        self.host = host
        self.order = host.order
        self.terms: Dict[Word, ScalarSeries] = {}
        for word, value in terms.items():
            if value.is_zero():
                continue
            canonical, sign = sort_with_sign(word, [host.shifted_degree(k) for k in word])
            if sign:
                _accumulate(self.terms, canonical, _signed(value, sign))

    @classmethod
    def unit(cls, host) -> "WedgeSum":
        return cls(host, {(): ScalarSeries.one(host.order)})

    @classmethod
    def zero(cls, host) -> "WedgeSum":
        return cls(host, {})

    @classmethod
    def word(cls, host, keys: Sequence[Key], coefficient=1) -> "WedgeSum":
        value = coefficient if isinstance(coefficient, ScalarSeries) else ScalarSeries.constant(coefficient, host.order)
        return cls(host, {tuple(keys): value})

    @classmethod
    def of(cls, *elements: GradedElement) -> "WedgeSum":
        """gamma_1 ^ ... ^ gamma_n"""
        if not elements:
            raise DegreeError("WedgeSum.of needs at least one element")
        result = elements[0].as_word()
        for element in elements[1:]:
            result = result.wedge(element.as_word())
        return result

    def _check(self, other: "WedgeSum"):
        if self.host is not other.host:
            raise AlgebraMismatch("Wedge words over different hosts")

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def max_length(self) -> int:
        return max((len(word) for word in self.terms), default=0)

    def part(self, length: int) -> "WedgeSum":
        return WedgeSum(self.host, {w: v for w, v in self.terms.items() if len(w) == length})

    def degree_of(self, word: Word) -> int:
        return sum(self.host.shifted_degree(k) for k in word)

    def nonzero_orders(self) -> List[int]:
        orders = set()
        for v in self.terms.values():
            orders.update(n for n, c in enumerate(v.coefficients) if c)
        return sorted(orders)

    def to_element(self) -> GradedElement:
        if any(len(word) != 1 for word in self.terms):
            raise DegreeError("Only words of length one are elements of L[1]")
        return GradedElement(self.host, {word[0]: v for word, v in self.terms.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, WedgeSum):
            return NotImplemented
        return self.host is other.host and self.terms == other.terms

    def __add__(self, other: "WedgeSum") -> "WedgeSum":
        self._check(other)
        merged = dict(self.terms)
        for word, value in other.terms.items():
            _accumulate(merged, word, value)
        return WedgeSum(self.host, merged)

    def __neg__(self) -> "WedgeSum":
        return WedgeSum(self.host, {w: -v for w, v in self.terms.items()})

    def __sub__(self, other: "WedgeSum") -> "WedgeSum":
        return self + (-other)

    def scale(self, factor) -> "WedgeSum":
        if isinstance(factor, ScalarSeries):
            return WedgeSum(self.host, {w: v * factor for w, v in self.terms.items()})
        return WedgeSum(self.host, {w: v.scale(factor) for w, v in self.terms.items()})

    __mul__ = scale
    __rmul__ = scale

    def wedge(self, other: "WedgeSum") -> "WedgeSum":
        self._check(other)
        result: Dict[Word, ScalarSeries] = {}
        for left, a in self.terms.items():
            va = a.valuation
            for right, b in other.terms.items():
                if va + b.valuation > self.order:
                    continue
                canonical, sign = sort_with_sign(
                    left + right, [self.host.shifted_degree(k) for k in left + right]
                )
                if sign:
                    _accumulate(result, canonical, _signed(a * b, sign))
        return WedgeSum(self.host, result)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(
            f"({self.terms[w]})*<{' ^ '.join(map(str, w)) or '1'}>" for w in sorted(self.terms, key=repr)
        )

    __repr__ = __str__


def _shuffles(word: Word, degrees: Sequence[int], k: int):
    """(chosen keys, remaining keys, Koszul sign) over all (k, n-k) unshuffles"""
    n = len(word)
    ctx = KoszulContext(tuple(degrees))
    for chosen in itertools.combinations(range(n), k):
        rest = [i for i in range(n) if i not in chosen]
        sign = koszul_sign(list(chosen) + rest, ctx)
        yield tuple(word[i] for i in chosen), tuple(word[i] for i in rest), sign


def _set_partitions(word: Word, degrees: Sequence[int]):
    """(blocks of keys, Koszul sign) over all set partitions of the word positions"""
    n = len(word)
    ctx = KoszulContext(tuple(degrees))
    for partition in multiset_partitions(list(range(n))):
        order = [i for block in partition for i in block]
        sign = koszul_sign(order, ctx)
        yield [tuple(word[i] for i in block) for block in partition], sign


def _product_of_images(images: Sequence[Vector]):
    """Expand a product of basis expansions into (keys, coefficient)"""
    for choice in itertools.product(*[list(image.items()) for image in images]):
        coefficient = choice[0][1]
        for _, value in choice[1:]:
            coefficient = coefficient * value
            if coefficient.is_zero():
                break
        if not coefficient.is_zero():
            yield tuple(key for key, _ in choice), coefficient


@dataclass
class TaylorCoderivation:
    """Degree +1 coderivation Q fixed by its components Q_n, n = 0..n_max.

    Q_0 (when present) takes the empty tuple and returns the curvature.
    """

    host: object
    components: Dict[int, Component]
    name: str = "Q"

    @property
    def n_max(self) -> int:
        return max(self.components, default=0)

    def component(self, n: int, *elements: GradedElement) -> GradedElement:
        """Q_n(gamma_1 ^ ... ^ gamma_n) evaluated multilinearly"""
        if len(elements) != n:
            raise DegreeError(f"Q_{n} takes {n} arguments, got {len(elements)}")
        if n == 0:
            return GradedElement(self.host, self.components.get(0, lambda keys: {})(()))
        return _apply_component(self.host, self.components.get(n), WedgeSum.of(*elements))

    def __call__(self, w: WedgeSum, bound: Optional[int] = None) -> WedgeSum:
        return coderivation_apply(self, w, bound)


@dataclass
class TaylorMorphism:
    """Co-unital coalgebra morphism F fixed by its components F_n, n >= 1"""

    source: object
    target: object
    components: Dict[int, Component]
    name: str = "F"

    @property
    def n_max(self) -> int:
        return max(self.components, default=0)

    def component(self, n: int, *elements: GradedElement) -> GradedElement:
        if len(elements) != n:
            raise DegreeError(f"F_{n} takes {n} arguments, got {len(elements)}")
        if n == 0:
            raise DegreeError("Morphisms have no F_0 component")
        return _apply_component(self.target, self.components.get(n), WedgeSum.of(*elements))

    def __call__(self, w: WedgeSum, bound: Optional[int] = None) -> WedgeSum:
        return morphism_apply(self, w, bound)


def _apply_component(target_host, component: Optional[Component], w: WedgeSum) -> GradedElement:
    result: Vector = {}
    if component is not None:
        for word, c in w.terms.items():
            for key, value in component(word).items():
                _accumulate(result, key, c * value)
    return GradedElement(target_host, result)


def dgla_coderivation(host, name: str = "Q") -> TaylorCoderivation:
    """Q_1 = d, Q_2(a ^ b) = (-1)^|a| [a, b] (shifted |a|), Q_0 = curvature if any"""

    def q1(keys: Word) -> Vector:
        return host.differential(keys[0])

    def q2(keys: Word) -> Vector:
        a, b = keys
        bracket = host.bracket(a, b)
        if host.shifted_degree(a) % 2:
            return {k: -v for k, v in bracket.items()}
        return bracket

    components: Dict[int, Component] = {1: q1, 2: q2}
    curvature = host.curvature()
    if curvature:
        components[0] = lambda keys: dict(curvature)
    return TaylorCoderivation(host, components, name)


def coderivation_apply(Q: TaylorCoderivation, w: WedgeSum, bound: Optional[int] = None) -> WedgeSum:
    """Q(g_1 ^ ... ^ g_n) = sum_k sum_unshuffles eps Q_k(g_s(1..k)) ^ g_s(k+1) ^ ... ^ g_s(n).

    Raises:
        BoundExceeded: for words longer than the bound (config word_length_bound).
    """
    if w.host is not Q.host:
        raise AlgebraMismatch(f"{Q.name} acts on a different host")
    limit = _default_bound(bound)
    host = Q.host
    result: Dict[Word, ScalarSeries] = {}
    for word, c in w.terms.items():
        n = len(word)
        if n > limit:
            raise BoundExceeded(f"Word of length {n} exceeds the bound {limit}", word)
        degrees = [host.shifted_degree(key) for key in word]
        for k, component in Q.components.items():
            if k > n:
                continue
            for chosen, rest, sign in _shuffles(word, degrees, k):
                for key, value in component(chosen).items():
                    _accumulate(result, (key,) + rest, _signed(c * value, sign))
    return WedgeSum(host, result)


def sample_words(host, max_length: int, count: int, seed: Optional[int] = None,
                 max_power: int = 1) -> List[WedgeSum]:
    """Deterministic pseudo-random single words of every length 0..max_length"""
    rng = random.Random(config.get("seed") if seed is None else seed)
    basis = host.sample_basis()
    words = [WedgeSum.unit(host)]
    for length in range(1, max_length + 1):
        for _ in range(count):
            keys = tuple(rng.choice(basis) for _ in range(length))
            value = ScalarSeries.monomial(rng.choice([-2, -1, 1, 2, 3]), rng.randint(0, max_power), host.order)
            word = WedgeSum(host, {keys: value})
            if not word.is_zero():
                words.append(word)
    return words


def square_residual(Q: TaylorCoderivation, w: WedgeSum, bound: Optional[int] = None) -> WedgeSum:
    limit = _default_bound(bound)
    return coderivation_apply(Q, coderivation_apply(Q, w, limit), limit + 1)


def coderivation_square_check(Q: TaylorCoderivation, m: Optional[int] = None,
                              words: Optional[Sequence[WedgeSum]] = None) -> bool:
    """Q(Q(w)) = 0 on sampled words of length <= m"""
    limit = _default_bound(m)
    words = words if words is not None else sample_words(Q.host, limit, config.get("sample_count"))
    for w in words:
        residual = square_residual(Q, w, limit)
        if not residual.is_zero():
            logger.debug(f"{Q.name}^2 does not vanish on {w}: {residual}")
            return False
    return True


def wedge_coproduct(w: WedgeSum) -> Dict[Tuple[Word, Word], ScalarSeries]:
    """Unshuffle coproduct of the symmetric coalgebra, counit terms included"""
    result: Dict[Tuple[Word, Word], ScalarSeries] = {}
    for word, c in w.terms.items():
        degrees = [w.host.shifted_degree(key) for key in word]
        for k in range(len(word) + 1):
            for chosen, rest, sign in _shuffles(word, degrees, k):
                _accumulate(result, (chosen, rest), _signed(c, sign))
    return result


def _tensor_of(left: WedgeSum, right: WedgeSum) -> Dict[Tuple[Word, Word], ScalarSeries]:
    result: Dict[Tuple[Word, Word], ScalarSeries] = {}
    for a, x in left.terms.items():
        for b, y in right.terms.items():
            _accumulate(result, (a, b), x * y)
    return result


def _merge(target: Dict, source: Dict, sign: int = 1):
    for key, value in source.items():
        _accumulate(target, key, _signed(value, sign))


def coderivation_leibniz_check(Q: TaylorCoderivation, w: WedgeSum, bound: Optional[int] = None) -> bool:
    """Delta(Q w) = (Q (x) id + id (x) Q) Delta(w)"""
    limit = _default_bound(bound)
    host = Q.host
    lhs = wedge_coproduct(coderivation_apply(Q, w, limit))
    rhs: Dict[Tuple[Word, Word], ScalarSeries] = {}
    for (a, b), c in wedge_coproduct(w).items():
        left = WedgeSum(host, {a: c})
        right = WedgeSum(host, {b: ScalarSeries.one(host.order)})
        _merge(rhs, _tensor_of(coderivation_apply(Q, left, limit), right))
        sign = parity_sign(left.degree_of(a))
        _merge(rhs, _tensor_of(left, coderivation_apply(Q, right, limit)), sign)
    return lhs == rhs


def morphism_apply(F: TaylorMorphism, w: WedgeSum, bound: Optional[int] = None) -> WedgeSum:
    """F(g_1 ^ ... ^ g_n) = sum over set partitions of eps F_|B1|(..) ^ ... ^ F_|Bp|(..); F(1) = 1.

    Raises:
        BoundExceeded: for words longer than the bound.
    """
    if w.host is not F.source:
        raise AlgebraMismatch(f"{F.name} is defined on a different host")
    limit = _default_bound(bound)
    result: Dict[Word, ScalarSeries] = {}
    for word, c in w.terms.items():
        n = len(word)
        if n > limit:
            raise BoundExceeded(f"Word of length {n} exceeds the bound {limit}", word)
        if n == 0:
            _accumulate(result, (), c)
            continue
        degrees = [F.source.shifted_degree(key) for key in word]
        for blocks, sign in _set_partitions(word, degrees):
            if any(len(block) not in F.components for block in blocks):
                continue
            images = [F.components[len(block)](block) for block in blocks]
            for keys, coefficient in _product_of_images(images):
                _accumulate(result, keys, _signed(c * coefficient, sign))
    return WedgeSum(F.target, result)


def coalgebra_morphism_check(F: TaylorMorphism, w: WedgeSum, bound: Optional[int] = None) -> bool:
    """Delta(F w) = (F (x) F) Delta(w)"""
    limit = _default_bound(bound)
    lhs = wedge_coproduct(morphism_apply(F, w, limit))
    rhs: Dict[Tuple[Word, Word], ScalarSeries] = {}
    one = ScalarSeries.one(F.source.order)
    for (a, b), c in wedge_coproduct(w).items():
        left = morphism_apply(F, WedgeSum(F.source, {a: c}), limit)
        right = morphism_apply(F, WedgeSum(F.source, {b: one}), limit)
        _merge(rhs, _tensor_of(left, right))
    return lhs == rhs


def intertwining_check(F: TaylorMorphism, Q: TaylorCoderivation, Q_target: TaylorCoderivation,
                       w: WedgeSum, bound: Optional[int] = None) -> bool:
    """F(Q w) = Q'(F w)"""
    limit = _default_bound(bound)
    lhs = morphism_apply(F, coderivation_apply(Q, w, limit), limit + 1)
    rhs = coderivation_apply(Q_target, morphism_apply(F, w, limit), max(limit, w.max_length))
    return lhs == rhs


def strict_morphism(source, target, linear: Callable[[Key], Vector], name: str = "F") -> TaylorMorphism:
    """Morphism with F_1 only, built from a degree-preserving linear map on basis keys"""
    return TaylorMorphism(source, target, {1: lambda keys: linear(keys[0])}, name)


def symmetric_component(host, table: Dict[Word, Vector]) -> Component:
    """Graded-symmetric component from values on ascending key tuples"""

    def component(keys: Word) -> Vector:
        canonical, sign = sort_with_sign(keys, [host.shifted_degree(k) for k in keys])
        if not sign:
            return {}
        return {k: _signed(v, sign) for k, v in table.get(canonical, {}).items()}

    return component


def _require_mc_shape(pi: GradedElement):
    degree = pi.shifted_degree
    if degree not in (None, 0):
        raise DegreeError(f"Expected shifted degree 0, got {degree}")
    if pi.filtration_level < 1:
        raise NotFiltered("Element must vanish at hbar^0")


def wedge_powers(pi: GradedElement, top: int) -> List[WedgeSum]:
    """[1, pi, pi^2/2!, ..., pi^top/top!]"""
    powers = [WedgeSum.unit(pi.host)]
    word = pi.as_word()
    for n in range(1, top + 1):
        powers.append(powers[-1].wedge(word).scale(QQ(1, n)))
    return powers


def exp_element(pi: GradedElement) -> WedgeSum:
    """exp(pi) = sum pi^n / n!, finite by the hbar filtration.

    Raises:
        DegreeError: unless pi has shifted degree 0.
        NotFiltered: unless pi vanishes at hbar^0.
    """
    _require_mc_shape(pi)
    result = WedgeSum.unit(pi.host)
    power = result
    word = pi.as_word()
    for n in range(1, pi.order + 1):
        power = power.wedge(word).scale(QQ(1, n))
        if power.is_zero():
            break
        result = result + power
    return result


def group_like_check(e: WedgeSum) -> bool:
    """Delta(e) = e (x) e"""
    return wedge_coproduct(e) == _tensor_of(e, e)


@dataclass
class MCReport:
    """Maurer-Cartan residual sum_n Q_n(pi^n)/n! against the Q(exp pi) path"""

    residual: GradedElement
    exp_path: WedgeSum
    orders: List[int] = field(default_factory=list)

    @property
    def is_mc(self) -> bool:
        return self.residual.is_zero()

    @property
    def paths_agree(self) -> bool:
        # Q(exp pi) = R ^ exp(pi): its length-one part is R itself
        projected = self.exp_path.part(1)
        return self.exp_path.is_zero() == self.residual.is_zero() and projected == self.residual.as_word()

    def to_dict(self) -> Dict:
        return {
            "is_maurer_cartan": self.is_mc,
            "residual_orders": self.orders,
            "paths_agree": self.paths_agree,
        }


def curvature_of(Q: TaylorCoderivation, pi: GradedElement) -> GradedElement:
    """sum_n Q_n(pi^n) / n!"""
    _require_mc_shape(pi)
    powers = wedge_powers(pi, Q.n_max)
    result: Vector = {}
    for n, component in Q.components.items():
        for word, c in powers[n].terms.items():
            for key, value in component(word).items():
                _accumulate(result, key, c * value)
    return GradedElement(Q.host, result)


def mc_equation(pi: GradedElement, Q: TaylorCoderivation) -> MCReport:
    """Evaluate the Maurer-Cartan equation directly and through Q(exp pi).

    Raises:
        NotFiltered: when pi does not vanish at hbar^0.
    """
    if pi.host is not Q.host:
        raise AlgebraMismatch("Element and coderivation live on different hosts")
    residual = curvature_of(Q, pi)
    e = exp_element(pi)
    exp_path = coderivation_apply(Q, e, bound=e.max_length)
    report = MCReport(residual=residual, exp_path=exp_path, orders=residual.nonzero_orders())
    logger.debug(f"MC residual orders {report.orders}, paths agree: {report.paths_agree}")
    return report


def twist_coderivation(Q: TaylorCoderivation, pi: GradedElement) -> TaylorCoderivation:
    """Q^pi_k(g_1..g_k) = sum_n Q_(n+k)(pi^n, g_1, .., g_k) / n!"""
    _require_mc_shape(pi)
    powers = wedge_powers(pi, Q.n_max)

    def twisted(k: int) -> Component:
        def component(keys: Word) -> Vector:
            result: Vector = {}
            for n in range(Q.n_max - k + 1):
                inner = Q.components.get(n + k)
                if inner is None:
                    continue
                for word, c in powers[n].terms.items():
                    for key, value in inner(word + keys).items():
                        _accumulate(result, key, c * value)
            return result

        return component

    return TaylorCoderivation(Q.host, {k: twisted(k) for k in range(Q.n_max + 1)}, f"{Q.name}^pi")


def twisted_apply(Q: TaylorCoderivation, pi: GradedElement, w: WedgeSum) -> WedgeSum:
    """exp(-pi) ^ Q(exp(pi) ^ w), computed without the twisted components"""
    lifted = exp_element(pi).wedge(w)
    image = coderivation_apply(Q, lifted, bound=lifted.max_length)
    return exp_element(-pi).wedge(image)


def pushforward_mc(F: TaylorMorphism, pi: GradedElement) -> GradedElement:
    """pi_F = sum_n F_n(pi^n) / n!"""
    if pi.host is not F.source:
        raise AlgebraMismatch(f"{F.name} is defined on a different host")
    _require_mc_shape(pi)
    powers = wedge_powers(pi, F.n_max)
    result: Vector = {}
    for n, component in F.components.items():
        for word, c in powers[n].terms.items():
            for key, value in component(word).items():
                _accumulate(result, key, c * value)
    return GradedElement(F.target, result)


def twist_morphism(F: TaylorMorphism, pi: GradedElement) -> TaylorMorphism:
    """F^pi_k(g_1..g_k) = sum_n F_(n+k)(pi^n, g_1, .., g_k) / n!.

    F^pi intertwines Q^pi with Q'^(pi_F) and satisfies F^pi(1) = 1.
    """
    _require_mc_shape(pi)
    powers = wedge_powers(pi, F.n_max)

    def twisted(k: int) -> Component:
        def component(keys: Word) -> Vector:
            result: Vector = {}
            for n in range(F.n_max - k + 1):
                inner = F.components.get(n + k)
                if inner is None:
                    continue
                for word, c in powers[n].terms.items():
                    for key, value in inner(word + keys).items():
                        _accumulate(result, key, c * value)
            return result

        return component

    return TaylorMorphism(F.source, F.target, {k: twisted(k) for k in range(1, F.n_max + 1)}, f"{F.name}^pi")


def twisted_morphism_apply(F: TaylorMorphism, pi: GradedElement, w: WedgeSum) -> WedgeSum:
    """exp(-pi_F) ^ F(exp(pi) ^ w), computed without the twisted components"""
    lifted = exp_element(pi).wedge(w)
    image = morphism_apply(F, lifted, bound=lifted.max_length)
    return exp_element(-pushforward_mc(F, pi)).wedge(image)


def compose(G: TaylorMorphism, F: TaylorMorphism) -> TaylorMorphism:
    """(G o F)_n = sum over set partitions of eps G_p(F_|B1|(..), ..., F_|Bp|(..))"""
    if F.target is not G.source:
        raise AlgebraMismatch(f"Cannot compose {G.name} after {F.name}: hosts differ")

    def composite(n: int) -> Component:
        def component(keys: Word) -> Vector:
            degrees = [F.source.shifted_degree(key) for key in keys]
            result: Vector = {}
            for blocks, sign in _set_partitions(keys, degrees):
                outer = G.components.get(len(blocks))
                if outer is None or any(len(block) not in F.components for block in blocks):
                    continue
                images = [F.components[len(block)](block) for block in blocks]
                for inner_keys, coefficient in _product_of_images(images):
                    for key, value in outer(inner_keys).items():
                        _accumulate(result, key, _signed(coefficient * value, sign))
            return result

        return component

    top = F.n_max * G.n_max
    return TaylorMorphism(F.source, G.target, {n: composite(n) for n in range(1, top + 1)},
                          f"{G.name}o{F.name}")
