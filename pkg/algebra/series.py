"""
Exact rationals, hbar-adically truncated power series and Koszul signs
"""

import re
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Dict, Iterable, List, Sequence, Tuple, Union

import sympy
from sympy.polys.domains import QQ

from algebra.errors import ConfigMismatch, DomainError, NotInvertible

_RATIONAL_PATTERN = re.compile(r"^\s*-?\d+(\s*/\s*\d+)?\s*$")

RationalLike = Union[int, str, Any]


def to_rational(value: RationalLike):
    """Coerce ints, ``"p/q"`` strings and QQ elements to a QQ element"""
    if isinstance(value, str):
        return parse_rational(value)
    if isinstance(value, bool):
        raise DomainError(f"Not a rational: {value!r}")
    if isinstance(value, int):
        return QQ(value)
    if isinstance(value, QQ.dtype):
        return value
    if isinstance(value, sympy.Rational):
        return QQ.from_sympy(value)
    raise DomainError(f"Not a rational: {value!r}")


def parse_rational(text: str):
    """Parse ``"p/q"`` (or an integer literal) into a reduced QQ element.

    Raises:
        DomainError: if the text is not an exact rational, or q is zero.
    """
    if not _RATIONAL_PATTERN.match(text):
        raise DomainError(f"Not an exact rational literal: {text!r}")
    numerator, _, denominator = text.replace(" ", "").partition("/")
    if denominator and int(denominator) == 0:
        raise DomainError(f"Zero denominator in {text!r}")
    return QQ(int(numerator), int(denominator or 1))


def format_rational(value) -> str:
    """Lowest-terms ``"p/q"`` text, or ``"p"`` for integers"""
    numerator, denominator = int(QQ.numer(value)), int(QQ.denom(value))
    if denominator == 1:
        return str(numerator)
    return f"{numerator}/{denominator}"


def parity_sign(exponent: int) -> int:
    """(-1)**exponent as an int, valid for negative exponents too"""
    return -1 if exponent % 2 else 1


@dataclass(frozen=True)
class ScalarSeries:
    """Truncated series a_0 + a_1*hbar + ... + a_N*hbar^N over QQ.

    Arithmetic is modulo hbar^(N+1). Combining series of different
    truncation orders raises ConfigMismatch.
    """

    coefficients: Tuple[Any, ...]
    order: int

    def __post_init__(self):
        if len(self.coefficients) != self.order + 1:
            raise ConfigMismatch(
                f"Series of order {self.order} needs {self.order + 1} coefficients, "
                f"got {len(self.coefficients)}"
            )

    @classmethod
    def zero(cls, order: int) -> "ScalarSeries":
        return cls((QQ.zero,) * (order + 1), order)

    @classmethod
    def one(cls, order: int) -> "ScalarSeries":
        return cls.constant(1, order)

    @classmethod
    def constant(cls, value: RationalLike, order: int) -> "ScalarSeries":
        return cls.monomial(value, 0, order)

    @classmethod
    def monomial(cls, value: RationalLike, power: int, order: int) -> "ScalarSeries":
        """value * hbar^power, truncated (zero when power > order)"""
        if power < 0:
            raise DomainError("Negative hbar powers are not supported")
        coefficients = [QQ.zero] * (order + 1)
        if power <= order:
            coefficients[power] = to_rational(value)
        return cls(tuple(coefficients), order)

    @classmethod
    def from_terms(cls, terms: Dict[int, RationalLike], order: int) -> "ScalarSeries":
        coefficients = [QQ.zero] * (order + 1)
        for power, value in terms.items():
            if power < 0:
                raise DomainError("Negative hbar powers are not supported")
            if power <= order:
                coefficients[power] += to_rational(value)
        return cls(tuple(coefficients), order)

    def coefficient(self, power: int):
        if 0 <= power <= self.order:
            return self.coefficients[power]
        return QQ.zero

    @cached_property
    def valuation(self) -> int:
        """Lowest power with a nonzero coefficient; order + 1 for the zero series"""
        for power, value in enumerate(self.coefficients):
            if value:
                return power
        return self.order + 1

    def is_zero(self) -> bool:
        return self.valuation > self.order

    def _check(self, other: "ScalarSeries"):
        if self.order != other.order:
            raise ConfigMismatch(
                f"Cannot combine series of orders {self.order} and {other.order}"
            )

    def __add__(self, other: "ScalarSeries") -> "ScalarSeries":
        if not isinstance(other, ScalarSeries):
            return NotImplemented
        self._check(other)
        return ScalarSeries(
            tuple(a + b for a, b in zip(self.coefficients, other.coefficients)), self.order
        )

    def __sub__(self, other: "ScalarSeries") -> "ScalarSeries":
        if not isinstance(other, ScalarSeries):
            return NotImplemented
        self._check(other)
        return ScalarSeries(
            tuple(a - b for a, b in zip(self.coefficients, other.coefficients)), self.order
        )

    def __neg__(self) -> "ScalarSeries":
        return ScalarSeries(tuple(-a for a in self.coefficients), self.order)

    def __mul__(self, other) -> "ScalarSeries":
        if not isinstance(other, ScalarSeries):
            try:
                return self.scale(other)
            except DomainError:
                return NotImplemented
        self._check(other)
        order = self.order
        if self.valuation + other.valuation > order:
            return ScalarSeries.zero(order)
        product = [QQ.zero] * (order + 1)
        right = [(j, b) for j, b in enumerate(other.coefficients) if b]
        for i, a in enumerate(self.coefficients):
            if not a:
                continue
            for j, b in right:
                if i + j > order:
                    break
                product[i + j] += a * b
        return ScalarSeries(tuple(product), order)

    __rmul__ = __mul__

    def scale(self, value: RationalLike) -> "ScalarSeries":
        factor = to_rational(value)
        return ScalarSeries(tuple(a * factor for a in self.coefficients), self.order)

    def shift(self, power: int) -> "ScalarSeries":
        """Multiply by hbar^power"""
        if power < 0:
            raise DomainError("Negative hbar powers are not supported")
        shifted = (QQ.zero,) * power + self.coefficients
        return ScalarSeries(shifted[: self.order + 1], self.order)

    def invert(self) -> "ScalarSeries":
        """Exact inverse modulo hbar^(N+1).

        Raises:
            NotInvertible: when the constant coefficient is zero.
        """
        a0 = self.coefficients[0]
        if not a0:
            raise NotInvertible("Series with zero constant term is not invertible")
        inverse = [QQ.zero] * (self.order + 1)
        inverse[0] = 1 / a0
        for n in range(1, self.order + 1):
            acc = QQ.zero
            for k in range(1, n + 1):
                if self.coefficients[k]:
                    acc += self.coefficients[k] * inverse[n - k]
            inverse[n] = -acc / a0
        return ScalarSeries(tuple(inverse), self.order)

    def to_records(self) -> List[List[Any]]:
        """``[[power, "p/q"], ...]`` for the nonzero coefficients"""
        return [
            [power, format_rational(value)]
            for power, value in enumerate(self.coefficients)
            if value
        ]

    def __str__(self) -> str:
        parts = []
        for power, value in enumerate(self.coefficients):
            if not value:
                continue
            text = format_rational(value)
            if power == 0:
                parts.append(text)
            elif power == 1:
                parts.append(f"({text})*hbar")
            else:
                parts.append(f"({text})*hbar^{power}")
        return " + ".join(parts) or "0"


def series_add(a: ScalarSeries, b: ScalarSeries) -> ScalarSeries:
    return a + b


def series_mul(a: ScalarSeries, b: ScalarSeries) -> ScalarSeries:
    return a * b


def series_invert(a: ScalarSeries) -> ScalarSeries:
    return a.invert()


def exp_series(value: RationalLike, order: int) -> ScalarSeries:
    """exp(value * hbar) truncated at the given order"""
    factor = to_rational(value)
    terms = {}
    term = QQ.one
    for n in range(order + 1):
        terms[n] = term
        term = term * factor / (n + 1)
    return ScalarSeries.from_terms(terms, order)


@dataclass(frozen=True)
class KoszulContext:
    """Shifted degrees of the factors being permuted"""

    degrees: Tuple[int, ...]

    @classmethod
    def of(cls, degrees: Iterable[int]) -> "KoszulContext":
        return cls(tuple(degrees))


def koszul_sign(sigma: Sequence[int], ctx: KoszulContext) -> int:
    """Sign with g_0 ^ ... ^ g_{k-1} = sign * g_{sigma(0)} ^ ... ^ g_{sigma(k-1)}.

    Every pair of factors whose relative order is reversed contributes
    (-1)^(p*q) for their shifted degrees p, q.

    Raises:
        ConfigMismatch: if sigma and the degree list differ in length.
        DomainError: if sigma is not a permutation of 0..k-1.
    """
    degrees = ctx.degrees
    if len(sigma) != len(degrees):
        raise ConfigMismatch(
            f"Permutation of length {len(sigma)} against {len(degrees)} degrees"
        )
    if sorted(sigma) != list(range(len(sigma))):
        raise DomainError(f"Not a permutation: {tuple(sigma)}")
    exponent = 0
    for a in range(len(sigma)):
        da = degrees[sigma[a]]
        if not da % 2:
            continue
        for b in range(a + 1, len(sigma)):
            if sigma[a] > sigma[b] and degrees[sigma[b]] % 2:
                exponent += 1
    return parity_sign(exponent)


def sort_with_sign(keys: Sequence[Any], degrees: Sequence[int]) -> Tuple[Tuple[Any, ...], int]:
    """Sort graded factors into ascending key order, returning (keys, sign).

    The sign is 0 when an odd factor repeats (the wedge vanishes).
    """
    sigma = sorted(range(len(keys)), key=lambda index: keys[index])
    ordered = tuple(keys[index] for index in sigma)
    for position in range(1, len(ordered)):
        if ordered[position] == ordered[position - 1] and degrees[sigma[position]] % 2:
            return ordered, 0
    return ordered, koszul_sign(sigma, KoszulContext(tuple(degrees)))
