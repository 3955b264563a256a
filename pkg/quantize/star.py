"""
Star products from twists: the Hopf action of U(g) on functions,
f * g = m(J acting on f (x) g), and their certification
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from sympy.polys.rings import PolyElement

from algebra.enveloping import Monomial, TensorWord, UEAElement, coproduct
from algebra.errors import AlgebraMismatch, DomainError
from config.settings import config
from quantize.hochschild import (
    DeformationSymmetry,
    PolyDiffOperator,
    hochschild_mc_residual,
    multiplication,
    poisson_bidifferential,
)
from quantize.polynomials import LieAction, PolynomialAlgebra, PolyVectorField, pairing
from twist.hpoly import HPoly
from twist.twists import FormalTwist, TwistedBialgebra

logger = logging.getLogger(__name__)

Triple = Tuple[PolyElement, PolyElement, PolyElement]


class HopfAction:
    """U(g) acting on polynomials through iterated vector fields"""

    def __init__(self, action: LieAction):
        self.action = action
        self.algebra = action.algebra
        self._cache: Dict[Tuple[Monomial, PolyElement], PolyElement] = {}

    def monomial(self, mono: Monomial, f: PolyElement) -> PolyElement:
        key = (mono, f)
        cached = self._cache.get(key)
        if cached is None:
            cached = f
            # rightmost PBW factor first
            for g in reversed(range(len(mono))):
                for _ in range(mono[g]):
                    cached = self.action.field(g).apply(cached)
                    if not cached:
                        break
            self._cache[key] = cached
        return cached

    def __call__(self, u: UEAElement, f: PolyElement) -> PolyElement:
        if u.parent.lie is not self.action.lie:
            raise AlgebraMismatch("Element of a different enveloping algebra")
        algebra = self.algebra
        result = algebra.zero
        for mono, series in u.terms.items():
            result += algebra.mul(algebra.from_series(series), self.monomial(mono, f))
        return algebra.truncate(result)

    def word(self, word: TensorWord, arguments: Sequence[PolyElement]) -> PolyElement:
        """m^(k)(word acting leg-wise on f_0 (x) ... (x) f_k)"""
        if word.legs != len(arguments):
            raise DomainError(f"{word.legs}-leg word applied to {len(arguments)} functions")
        algebra = self.algebra
        result = algebra.zero
        for key, series in word.terms.items():
            value = algebra.from_series(series)
            for mono, f in zip(key, arguments):
                value = algebra.mul(value, self.monomial(mono, f))
                if not value:
                    break
            result += value
        return algebra.truncate(result)


def hopf_action(phi: LieAction, u: UEAElement, f: PolyElement) -> PolyElement:
    return HopfAction(phi)(u, f)


def module_algebra_check(action: HopfAction, u: UEAElement, f: PolyElement, g: PolyElement) -> bool:
    """u(fg) = sum (u_(1) f)(u_(2) g)"""
    algebra = action.algebra
    return action(u, algebra.mul(f, g)) == action.word(coproduct(u), (f, g))


class StarProduct:
    """f * g = m(J (f (x) g)) for a formal twist J and a Lie algebra action.

    Args:
        twist: The twist; its enveloping algebra must belong to the acting Lie algebra.
        action: Action by vector fields.
    """

    def __init__(self, twist: FormalTwist, action: LieAction):
        if twist.algebra.lie is not action.lie:
            raise AlgebraMismatch("Twist and action use different Lie algebras")
        if twist.order != action.algebra.order:
            raise AlgebraMismatch("Twist and function algebra have different truncation orders")
        self.twist = twist
        self.action = action
        self.algebra = action.algebra
        self.hopf = HopfAction(action)
        self._cache: Dict[Tuple[PolyElement, PolyElement], PolyElement] = {}

    @property
    def order(self) -> int:
        return self.algebra.order

    def __call__(self, f: PolyElement, g: PolyElement) -> PolyElement:
        key = (f, g)
        cached = self._cache.get(key)
        if cached is None:
            cached = self._bilinear(f, g)
            self._cache[key] = cached
        return cached

    def _bilinear(self, f: PolyElement, g: PolyElement) -> PolyElement:
        # expand in x-monomials so the cache sees small arguments
        algebra = self.algebra
        if len(f) > 1 or len(g) > 1:
            result = algebra.zero
            for fm, fc in f.items():
                for gm, gc in g.items():
                    single = self(algebra.ring({fm: 1}), algebra.ring({gm: 1}))
                    result += single * (fc * gc)
            return algebra.truncate(result)
        return self.hopf.word(self.twist.J, (f, g))

    def commutator(self, f: PolyElement, g: PolyElement) -> PolyElement:
        return self(f, g) - self(g, f)

    def associator(self, f: PolyElement, g: PolyElement, h: PolyElement) -> PolyElement:
        return self(self(f, g), h) - self(f, self(g, h))


def star_product(J: FormalTwist, phi: LieAction, f: PolyElement, g: PolyElement) -> PolyElement:
    return StarProduct(J, phi)(f, g)


def monomial_triples(algebra: PolynomialAlgebra, max_total_degree: int) -> List[Triple]:
    """All monomial triples with total degree <= max_total_degree"""
    monomials = algebra.monomials(max_total_degree)
    degrees = {m: sum(algebra.exponents(m)) for m in monomials}
    triples = []
    for f, g, h in itertools.product(monomials, repeat=3):
        if degrees[f] + degrees[g] + degrees[h] <= max_total_degree:
            triples.append((f, g, h))
    return triples


@dataclass
class AssociativityReport:
    """(f * g) * h - f * (g * h) per hbar order over the checked triples"""

    residual_orders: List[int] = field(default_factory=list)
    witnesses: Dict[int, Triple] = field(default_factory=dict)
    triples_checked: int = 0

    @property
    def associative(self) -> bool:
        return not self.residual_orders

    @property
    def first_failure_order(self) -> Optional[int]:
        return self.residual_orders[0] if self.residual_orders else None

    def to_dict(self, algebra: PolynomialAlgebra) -> Dict:
        return {
            "associative": self.associative,
            "first_failure_order": self.first_failure_order,
            "residual_orders": self.residual_orders,
            "triples_checked": self.triples_checked,
            "witnesses": {
                str(order): [algebra.to_records(p) for p in triple]
                for order, triple in sorted(self.witnesses.items())
            },
        }


def associativity_report(star: StarProduct, triples: Optional[Sequence[Triple]] = None) -> AssociativityReport:
    """Associator of the star product on sampled triples, by hbar order.

    Defaults to every monomial triple of total degree <= config sample_degree.
    """
    algebra = star.algebra
    if triples is None:
        triples = monomial_triples(algebra, config.get("sample_degree"))
    report = AssociativityReport(triples_checked=len(triples))
    for triple in triples:
        residual = star.associator(*triple)
        for order in algebra.nonzero_orders(residual):
            report.witnesses.setdefault(order, triple)
    report.residual_orders = sorted(report.witnesses)
    logger.debug(f"Associativity over {len(triples)} triples: failing orders {report.residual_orders}")
    return report


def unit_check(star: StarProduct, samples: Sequence[PolyElement]) -> bool:
    one = star.algebra.one
    return all(star(one, f) == f and star(f, one) == f for f in samples)


def classical_limit_check(star: StarProduct, pi: PolyVectorField,
                          pairs: Sequence[Tuple[PolyElement, PolyElement]]) -> bool:
    """(f * g - g * f) / hbar at hbar = 0 equals pi(df, dg)"""
    algebra = star.algebra
    for f, g in pairs:
        commutator = star.commutator(f, g)
        if algebra.hbar_part(commutator, 0):
            return False
        if algebra.hbar_part(commutator, 1) != pairing(pi, f, g):
            logger.debug(f"Classical limit fails on ({algebra.format(f)}, {algebra.format(g)})")
            return False
    return True


def _witness_triples(residual: PolyDiffOperator) -> Dict[int, Triple]:
    """Per hbar order, the monomials x^a, x^b, x^c of a term of minimal total derivative order.

    No other term of that order survives on this triple, so it detects the residual exactly.
    """
    algebra = residual.algebra
    witnesses = {}
    for order in residual.nonzero_orders():
        part = residual.hbar_part(order)
        slots = min((s for s in part.terms if len(s) == 3), key=lambda s: (sum(map(sum, s)), s), default=None)
        if slots is not None:
            witnesses[order] = tuple(algebra.monomial(index) for index in slots)
    return witnesses


@dataclass
class ConsistencyReport:
    """Hochschild Maurer-Cartan residual of B = Phi(F) against star associativity"""

    mc_orders: List[int]
    associativity: AssociativityReport
    operator_matches_star: bool
    first_order_matches_poisson: Optional[bool] = None

    @property
    def consistent(self) -> bool:
        return (self.mc_orders == self.associativity.residual_orders
                and self.operator_matches_star
                and self.first_order_matches_poisson is not False)

    def to_dict(self, algebra: PolynomialAlgebra) -> Dict:
        return {
            "consistent": self.consistent,
            "maurer_cartan_residual_orders": self.mc_orders,
            "associativity": self.associativity.to_dict(algebra),
            "operator_matches_star": self.operator_matches_star,
            "first_order_matches_poisson": self.first_order_matches_poisson,
        }


def twist_cochain(symmetry: DeformationSymmetry, twist: FormalTwist) -> PolyDiffOperator:
    """B = Phi(J - 1 (x) 1), the Hochschild cochain deforming m"""
    hpoly = HPoly(twist.algebra)
    return symmetry(hpoly.element(twist.F))


def mc_to_star_consistency(twist: FormalTwist, symmetry: DeformationSymmetry, star: Optional[StarProduct] = None,
                           pi: Optional[PolyVectorField] = None,
                           triples: Optional[Sequence[Triple]] = None) -> ConsistencyReport:
    """Compare the Hochschild MC residual of Phi(F) with the associativity of m + Phi(F).

    Sample triples are joined by witness triples read off the residual, so
    every failing order is seen by both paths.
    """
    star = star or StarProduct(twist, symmetry.action)
    algebra = star.algebra
    B = twist_cochain(symmetry, twist)
    residual = hochschild_mc_residual(B)
    if triples is None:
        triples = monomial_triples(algebra, config.get("sample_degree"))
    checked = list(triples) + list(_witness_triples(residual).values())
    associativity = associativity_report(star, checked)

    deformed = multiplication(algebra) + B
    pairs = [(f, g) for f, g, _ in checked]
    operator_matches = all(deformed(f, g) == star(f, g) for f, g in pairs)

    first_order = None
    if pi is not None:
        antisymmetric = B.hbar_part(1).part(2)
        first_order = antisymmetric - antisymmetric.swap() == poisson_bidifferential(pi)
    report = ConsistencyReport(
        mc_orders=residual.nonzero_orders(),
        associativity=associativity,
        operator_matches_star=operator_matches,
        first_order_matches_poisson=first_order,
    )
    logger.info(f"MC/associativity consistency: {report.consistent}")
    return report


def twisted_module_check(star: StarProduct, samples: Sequence[Tuple[UEAElement, PolyElement, PolyElement]]) -> bool:
    """u(f * g) = sum (u_(1)J f) * (u_(2)J g) with the twisted coproduct"""
    bialgebra = TwistedBialgebra(star.twist)
    algebra = star.algebra
    for u, f, g in samples:
        lhs = star.hopf(u, star(f, g))
        rhs = algebra.zero
        for (m1, m2), series in bialgebra.twisted_coproduct(u).terms.items():
            left = star.hopf.monomial(m1, f)
            right = star.hopf.monomial(m2, g)
            rhs += algebra.mul(algebra.from_series(series), star(left, right))
        if lhs != algebra.truncate(rhs):
            logger.debug(f"Twisted module law fails for u = {u}")
            return False
    return True


def star_table(star: StarProduct, max_degree: int) -> List[Dict]:
    """Entries (f-monomial, g-monomial, hbar order) -> coefficient polynomial"""
    algebra = star.algebra
    monomials = algebra.monomials(max_degree)
    table = []
    for f, g in itertools.product(monomials, repeat=2):
        product = star(f, g)
        f_exponents = list(algebra.exponents(f))
        g_exponents = list(algebra.exponents(g))
        for order in algebra.nonzero_orders(product):
            table.append({
                "f": f_exponents,
                "g": g_exponents,
                "order": order,
                "value": [record[:1] + record[2:] for record in algebra.to_records(algebra.hbar_part(product, order))],
            })
    return table
