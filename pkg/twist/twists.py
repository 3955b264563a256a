"""
Formal Drinfeld twists: certification, the J_k tower, twisted coproducts,
the twisting isomorphism onto H_poly and the built-in closed-form twists
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from sympy.polys.domains import QQ

from algebra.enveloping import EnvelopingAlgebra, TensorWord, UEAElement
from algebra.errors import DegreeError, DomainError, NotFiltered, NotMaurerCartan
from algebra.lie import MultiVector, RMatrix
from algebra.series import ScalarSeries, to_rational
from twist.hpoly import HPoly, HPolyElement

logger = logging.getLogger(__name__)


@dataclass
class TwistCertificate:
    """Outcome of a twist verification.

    ``residual_orders`` are the hbar orders where the cocycle identity fails,
    ``dgla_orders`` those where the H_poly Maurer-Cartan residual fails; the
    two lists are computed independently and must agree.
    """

    filtered: bool
    residual_orders: List[int] = field(default_factory=list)
    dgla_orders: List[int] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.filtered and not self.residual_orders and not self.dgla_orders

    @property
    def first_failure_order(self) -> Optional[int]:
        orders = self.residual_orders + self.dgla_orders
        if not self.filtered:
            return 0
        return min(orders) if orders else None

    @property
    def paths_agree(self) -> bool:
        return self.residual_orders == self.dgla_orders

    def __bool__(self) -> bool:
        return self.passed

    def to_dict(self) -> Dict:
        return {
            "passed": self.passed,
            "filtered": self.filtered,
            "first_failure_order": self.first_failure_order,
            "cocycle_residual_orders": self.residual_orders,
            "maurer_cartan_residual_orders": self.dgla_orders,
        }


def _require_two_legs(J: TensorWord):
    if J.legs != 2:
        raise DegreeError(f"A twist has two legs, got {J.legs}")


def cocycle_residual(J: TensorWord) -> TensorWord:
    """(D (x) id)(J)(J (x) 1) - (id (x) D)(J)(1 (x) J)"""
    _require_two_legs(J)
    left = J.split_leg(0, 1) * J.embed(0, 3)
    right = J.split_leg(1, 1) * J.embed(1, 3)
    return left - right


def twist_deviation(J: TensorWord) -> TensorWord:
    """F = J - 1 (x) 1"""
    return J - J.parent.unit_word(2)


def hpoly_mc_residual(hpoly: HPoly, F: HPolyElement) -> HPolyElement:
    """dF + 1/2 [F, F]_H"""
    return hpoly.differential(F) + hpoly.bracket(F, F).scale(QQ(1, 2))


def is_formal_twist(J: TensorWord) -> TwistCertificate:
    """Check J = 1 (x) 1 + O(hbar) and the cocycle identity mod hbar^(N+1).

    The cocycle residual and the Maurer-Cartan residual of F in H_poly are
    both evaluated.
    """
    _require_two_legs(J)
    F = twist_deviation(J)
    filtered = F.valuation >= 1
    hpoly = HPoly(J.parent)
    F_element = hpoly.element(F)
    certificate = TwistCertificate(
        filtered=filtered,
        residual_orders=cocycle_residual(J).nonzero_orders(),
        dgla_orders=hpoly_mc_residual(hpoly, F_element).nonzero_orders(),
    )
    logger.debug(f"Twist certificate: {certificate.to_dict()}")
    return certificate


def counit_normalization_check(J: TensorWord) -> bool:
    """(eps (x) id)J = (id (x) eps)J = 1"""
    _require_two_legs(J)
    unit = J.parent.unit_word(1)
    return J.split_leg(0, -1) == unit and J.split_leg(1, -1) == unit


def classical_tensor(r: MultiVector, algebra: EnvelopingAlgebra) -> TensorWord:
    """sum_{i<j} r^ij (e_i (x) e_j - e_j (x) e_i)"""
    if r.wedge_degrees() not in ([2], []):
        raise DegreeError("The tensor form is defined for bivectors")
    terms = {}
    for (i, j), c in r.components.items():
        ei, ej = algebra.generator_monomial(i), algebra.generator_monomial(j)
        terms[(ei, ej)] = terms[(ei, ej)] + c if (ei, ej) in terms else c
        terms[(ej, ei)] = terms[(ej, ei)] - c if (ej, ei) in terms else -c
    return TensorWord(algebra, 2, terms)


def classical_limit(J: TensorWord) -> TensorWord:
    """(J - tau(J)) / hbar at hbar = 0, as a constant word"""
    _require_two_legs(J)
    difference = J - J.flip()
    return TensorWord(J.parent, 2, {
        key: ScalarSeries.constant(value, J.order) for key, value in difference.coefficients_at(1).items()
    })


class FormalTwist:
    """J = 1 (x) 1 + F with F in the first hbar-filtration level.

    Args:
        J: Two-leg word.
        validate: Run the cocycle certification and raise on failure.

    Raises:
        NotFiltered: when F has an hbar^0 part.
        NotMaurerCartan: when validation is requested and the cocycle fails.
    """

    def __init__(self, J: TensorWord, validate: bool = True):
        _require_two_legs(J)
        self.J = J
        self.algebra = J.parent
        self.order = J.order
        self.F = twist_deviation(J)
        if self.F.valuation < 1:
            raise NotFiltered("J - 1 (x) 1 must vanish at hbar^0")
        if validate:
            certificate = is_formal_twist(J)
            if not certificate:
                raise NotMaurerCartan(
                    f"Cocycle identity fails at hbar^{certificate.first_failure_order}",
                    certificate.first_failure_order,
                )
        self._tower: Dict[int, TensorWord] = {0: self.algebra.unit_word(1), 1: J}
        self._inverse_tower: Dict[int, TensorWord] = {0: self.algebra.unit_word(1)}
        self._inverse: Optional[TensorWord] = None

    @property
    def inverse(self) -> TensorWord:
        if self._inverse is None:
            self._inverse = self.J.inverse()
        return self._inverse

    def tower(self, k: int) -> TensorWord:
        """J_k = prod_{i=1..k} (D^(k-i) (x) id^i)(J (x) 1^(i-1))"""
        if k < 0:
            raise DomainError(f"J_k needs k >= 0, got {k}")
        if k not in self._tower:
            self._tower[k] = self._tower_product(self.J, k, range(1, k + 1))
        return self._tower[k]

    def tower_inverse(self, k: int) -> TensorWord:
        """J_k^-1 as the reversed product of the J^-1 factors"""
        if k < 0:
            raise DomainError(f"J_k needs k >= 0, got {k}")
        if k not in self._inverse_tower:
            self._inverse_tower[k] = self._tower_product(self.inverse, k, range(k, 0, -1))
        return self._inverse_tower[k]

    def _tower_product(self, base: TensorWord, k: int, indices) -> TensorWord:
        result = self.algebra.unit_word(k + 1)
        for i in indices:
            factor = base.embed(0, i + 1).split_leg(0, k - i)
            result = result * factor
        return result

    def hpoly_element(self, hpoly: HPoly) -> HPolyElement:
        return hpoly.element(self.F)

    def __repr__(self) -> str:
        return f"FormalTwist({self.J})"


def jk_tower(J: FormalTwist, k: int) -> TensorWord:
    return J.tower(k)


def jk_coherence_check(J: FormalTwist, k: int, i: int, l: int) -> bool:
    """(id^i (x) D^(l) (x) id^(k-i))(J_k) (1^i (x) J_l (x) 1^(k-i)) = J_(k+l)"""
    if not 0 <= i <= k or l < 0:
        raise DomainError(f"Need 0 <= i <= k and l >= 0, got k={k}, i={i}, l={l}")
    lhs = J.tower(k).split_leg(i, l) * J.tower(l).embed(i, k + l + 1)
    return lhs == J.tower(k + l)


class TwistedBialgebra:
    """H_J: the enveloping algebra with coproduct J^-1 D(-) J"""

    def __init__(self, twist: FormalTwist):
        self.twist = twist
        self.algebra = twist.algebra
        self.base_hpoly = HPoly(self.algebra, name="H_poly")
        self.hpoly = HPoly(self.algebra, splitter=self.split, name="(H_J)_poly")

    def twisted_coproduct(self, x: UEAElement) -> TensorWord:
        return self.twist.inverse * x.as_word().split_leg(0, 1) * self.twist.J

    def split(self, word: TensorWord, leg: int, k: int) -> TensorWord:
        """Twisted k-th coproduct on one leg via J_k^-1 D^(k)(-) J_k"""
        if k <= 0:
            return word.split_leg(leg, k)
        total = word.legs + k
        inner = word.split_leg(leg, k)
        return (self.twist.tower_inverse(k).embed(leg, total) * inner
                * self.twist.tower(k).embed(leg, total))

    def iterated_twisted_coproduct(self, x: UEAElement, k: int) -> TensorWord:
        """Iterate the twisted coproduct on the first leg k times"""
        if k < 0:
            raise DomainError(f"Iterated coproduct needs k >= 0, got {k}")
        word = x.as_word()
        J, J_inverse = self.twist.J, self.twist.inverse
        for step in range(k):
            legs = word.legs + 1
            word = J_inverse.embed(0, legs) * word.split_leg(0, 1) * J.embed(0, legs)
        return word


def twisted_coproduct(T: TwistedBialgebra, x: UEAElement) -> TensorWord:
    return T.twisted_coproduct(x)


def iterated_twisted_coproduct_check(T: TwistedBialgebra, x: UEAElement, k: int) -> bool:
    iterated = T.iterated_twisted_coproduct(x, k)
    conjugated = T.twist.tower_inverse(k) * x.as_word().split_leg(0, k) * T.twist.tower(k)
    return iterated == conjugated


def script_j(T: TwistedBialgebra, p: HPolyElement) -> HPolyElement:
    """P -> J_k P on the degree k part (identity in degree -1)"""
    if p.parent is not T.hpoly:
        raise DomainError("script_j acts on elements of the twisted H_poly")
    words = []
    for degree, word in p.parts.items():
        words.append(word if degree < 0 else T.twist.tower(degree) * word)
    return T.base_hpoly.element(*words)


def script_j_inverse(T: TwistedBialgebra, p: HPolyElement) -> HPolyElement:
    if p.parent is not T.base_hpoly:
        raise DomainError("The inverse acts on elements of the untwisted H_poly")
    words = []
    for degree, word in p.parts.items():
        words.append(word if degree < 0 else T.twist.tower_inverse(degree) * word)
    return T.hpoly.element(*words)


class TwistedDGLA:
    """(H_poly, d + [F, -], [-, -]) for a Maurer-Cartan element F"""

    def __init__(self, hpoly: HPoly, F: HPolyElement):
        self.hpoly = hpoly
        self.F = F

    def differential(self, p: HPolyElement) -> HPolyElement:
        return self.hpoly.differential(p) + self.hpoly.bracket(self.F, p)

    def bracket(self, p: HPolyElement, q: HPolyElement) -> HPolyElement:
        return self.hpoly.bracket(p, q)

    def curvature(self) -> HPolyElement:
        return hpoly_mc_residual(self.hpoly, self.F)


def twist_dgla(hpoly: HPoly, F: HPolyElement) -> TwistedDGLA:
    """Twist H_poly by F.

    Raises:
        NotMaurerCartan: with the failing hbar orders as witness.
    """
    dgla = TwistedDGLA(hpoly, F)
    orders = dgla.curvature().nonzero_orders()
    if orders:
        raise NotMaurerCartan(f"Curvature does not vanish at hbar orders {orders}", orders)
    return dgla


# Built-in closed-form twists


def trivial_twist(algebra: EnvelopingAlgebra) -> FormalTwist:
    return FormalTwist(algebra.unit_word(2), validate=False)


def abelian_twist(algebra: EnvelopingAlgebra, r: RMatrix) -> FormalTwist:
    """exp(hbar sum_{i<j} r^ij e_i (x) e_j) for r with commuting support"""
    support = r.support()
    if not algebra.lie.is_abelian_on(support):
        raise DomainError(f"Abelian twist needs commuting support, got {support}")
    terms = {}
    for (i, j), c in r.value.components.items():
        key = (algebra.generator_monomial(i), algebra.generator_monomial(j))
        terms[key] = c.shift(1)
    exponent = TensorWord(algebra, 2, terms)
    if exponent.is_zero():
        return trivial_twist(algebra)
    return FormalTwist(exponent.exp(), validate=False)


def jordanian_twist(algebra: EnvelopingAlgebra, h: int, e: int, scale=1) -> FormalTwist:
    """exp(-log(1 + lambda*c*hbar*E) (x) H / lambda) for [H, E] = lambda*E.

    Its classical limit is c * (H (x) E - E (x) H).
    """
    bracket = algebra.lie.bracket_basis(h, e)
    if set(bracket) != {e}:
        raise DomainError("Jordanian twist needs [H, E] proportional to E")
    lam = bracket[e]
    c = to_rational(scale)
    order = algebra.order
    h_mono = algebra.generator_monomial(h)
    terms = {}
    for m in range(1, order + 1):
        e_power = tuple(m if index == e else 0 for index in range(algebra.dim))
        # -(1/lambda) * (-1)^(m+1) (lambda c)^m / m
        value = -((-1) ** (m + 1)) * (lam * c) ** m / (lam * m)
        terms[(e_power, h_mono)] = ScalarSeries.monomial(value, m, order)
    return FormalTwist(TensorWord(algebra, 2, terms).exp(), validate=False)


def builtin_twist(name: str, algebra: EnvelopingAlgebra, r: RMatrix) -> FormalTwist:
    """Dispatch a built-in twist name against an r-matrix.

    Raises:
        DomainError: when the r-matrix does not fit the requested family.
    """
    if name == "trivial" or r.value.is_zero():
        if name != "trivial":
            logger.info("Zero r-matrix, using the trivial twist")
        return trivial_twist(algebra)
    if name == "abelian":
        return abelian_twist(algebra, r)
    if name == "jordanian":
        if len(r.value.components) != 1:
            raise DomainError("Jordanian twist needs r = c * H ^ E")
        (a, b), series = next(iter(r.value.components.items()))
        c = series.coefficient(0)
        lie = algebra.lie
        if set(lie.bracket_basis(a, b)) == {b}:
            return jordanian_twist(algebra, a, b, c)
        if set(lie.bracket_basis(b, a)) == {a}:
            return jordanian_twist(algebra, b, a, -c)
        raise DomainError("Jordanian twist needs [H, E] proportional to E on the support of r")
    raise DomainError(f"Unknown built-in twist {name!r}")
