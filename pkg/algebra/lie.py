"""
Finite-dimensional Lie algebras, the exterior algebra with its Schouten
bracket, classical r-matrices and the induced cobracket
"""

import logging
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from sympy.polys.domains import QQ

from algebra.errors import AlgebraMismatch, DegreeError, NotLieAlgebra, NotTriangular
from algebra.series import RationalLike, ScalarSeries, parity_sign, sort_with_sign, to_rational

logger = logging.getLogger(__name__)

Constants = Dict[Tuple[int, int], Dict[int, object]]


def _clean_constants(dim: int, constants: Constants) -> Constants:
    cleaned = {}
    for (i, j), values in constants.items():
        if not (0 <= i < dim and 0 <= j < dim):
            raise NotLieAlgebra(f"Bracket index ({i}, {j}) outside basis of size {dim}")
        row = {}
        for k, value in values.items():
            if not 0 <= k < dim:
                raise NotLieAlgebra(f"Result index {k} outside basis of size {dim}")
            value = to_rational(value)
            if value:
                row[k] = value
        if row:
            cleaned[(i, j)] = row
    return cleaned


def antisymmetry_witness(dim: int, constants: Constants) -> Optional[Tuple[int, int, int]]:
    """First (i, j, k) with c^k_ij != -c^k_ji, or None"""
    for i in range(dim):
        for j in range(i, dim):
            left = constants.get((i, j), {})
            right = constants.get((j, i), {})
            for k in range(dim):
                if left.get(k, QQ.zero) + right.get(k, QQ.zero):
                    return (i, j, k)
    return None


def jacobi_witness(dim: int, constants: Constants) -> Optional[Tuple[int, int, int, int]]:
    """First (i, j, k, l) where the Jacobi sum of structure constants is nonzero"""

    def c(a, b, k):
        return constants.get((a, b), {}).get(k, QQ.zero)

    for i in range(dim):
        for j in range(dim):
            for k in range(dim):
                for l in range(dim):
                    total = QQ.zero
                    for m in range(dim):
                        total += c(i, j, m) * c(m, k, l)
                        total += c(j, k, m) * c(m, i, l)
                        total += c(k, i, m) * c(m, j, l)
                    if total:
                        return (i, j, k, l)
    return None


class LieAlgebra:
    """Lie algebra given by structure constants [e_i, e_j] = sum_k c^k_ij e_k.

    Antisymmetry and Jacobi are checked on construction.

    Args:
        basis_names: Names of the basis elements, in PBW order.
        constants: Mapping (i, j) -> {k: c^k_ij}; missing entries are zero.
        validate: Skip the axiom checks (only for building deliberately
            broken inputs).

    Raises:
        NotLieAlgebra: with an (i, j, k) or (i, j, k, l) witness.
    """

    def __init__(self, basis_names: Sequence[str], constants: Constants, validate: bool = True):
        if not basis_names:
            raise NotLieAlgebra("A Lie algebra needs at least one basis element")
        if len(set(basis_names)) != len(basis_names):
            raise NotLieAlgebra(f"Duplicate basis names in {list(basis_names)}")
        self.basis_names = tuple(basis_names)
        self.dim = len(basis_names)
        self.structure_constants = _clean_constants(self.dim, constants)
        self.validated = validate
        if validate:
            witness = antisymmetry_witness(self.dim, self.structure_constants)
            if witness is not None:
                raise NotLieAlgebra(f"Antisymmetry fails at (i, j, k) = {witness}", witness)
            witness = jacobi_witness(self.dim, self.structure_constants)
            if witness is not None:
                raise NotLieAlgebra(f"Jacobi identity fails at (i, j, k, l) = {witness}", witness)

    def index(self, name: str) -> int:
        try:
            return self.basis_names.index(name)
        except ValueError:
            raise AlgebraMismatch(f"No basis element named {name!r}") from None

    def bracket_basis(self, i: int, j: int) -> Dict[int, object]:
        """[e_i, e_j] as {k: c^k_ij}"""
        return self.structure_constants.get((i, j), {})

    def is_abelian_on(self, indices: Iterable[int]) -> bool:
        indices = list(indices)
        return all(not self.bracket_basis(i, j) for i in indices for j in indices)

    def __repr__(self) -> str:
        return f"LieAlgebra({list(self.basis_names)})"


def abelian_algebra(dim: int, names: Optional[Sequence[str]] = None) -> LieAlgebra:
    names = names or [f"e{i + 1}" for i in range(dim)]
    return LieAlgebra(names, {})


def ax_plus_b_algebra() -> LieAlgebra:
    """Basis H, E with [H, E] = E"""
    return LieAlgebra(["H", "E"], {(0, 1): {1: 1}, (1, 0): {1: -1}})


def sl2_algebra() -> LieAlgebra:
    """Basis H, E, F with [H,E] = 2E, [H,F] = -2F, [E,F] = H"""
    return LieAlgebra(
        ["H", "E", "F"],
        {
            (0, 1): {1: 2}, (1, 0): {1: -2},
            (0, 2): {2: -2}, (2, 0): {2: 2},
            (1, 2): {0: 1}, (2, 1): {0: -1},
        },
    )


class MultiVector:
    """Element of the exterior algebra over a Lie algebra.

    Components map strictly increasing index tuples to ScalarSeries. A
    k-vector has degree k - 1 as an element of the graded Lie algebra
    (wedge degree 0, the scalars, is not represented).
    """

    def __init__(self, parent: LieAlgebra, components: Dict[Tuple[int, ...], ScalarSeries], order: int):
        self.parent = parent
        self.order = order
        self.components = {}
        for key, value in components.items():
            if not key:
                raise DegreeError("Scalars are not elements of the multivector algebra")
            canonical, sign = sort_with_sign(key, [1] * len(key))
            if not sign or value.is_zero():
                continue
            if value.order != order:
                raise AlgebraMismatch(f"Coefficient of order {value.order} in order {order} multivector")
            total = self.components.get(canonical, ScalarSeries.zero(order)) + (value if sign > 0 else -value)
            if total.is_zero():
                self.components.pop(canonical, None)
            else:
                self.components[canonical] = total

    @classmethod
    def zero(cls, parent: LieAlgebra, order: int) -> "MultiVector":
        return cls(parent, {}, order)

    @classmethod
    def basis(cls, parent: LieAlgebra, indices: Sequence[int], order: int,
              coefficient: RationalLike = 1) -> "MultiVector":
        """coefficient * e_{i1} ^ ... ^ e_{ik}; indices in any order"""
        return cls(parent, {tuple(indices): ScalarSeries.constant(coefficient, order)}, order)

    @classmethod
    def from_rationals(cls, parent: LieAlgebra, terms: Dict[Tuple[int, ...], RationalLike],
                       order: int) -> "MultiVector":
        return cls(parent, {k: ScalarSeries.constant(v, order) for k, v in terms.items()}, order)

    def _check(self, other: "MultiVector"):
        if self.parent is not other.parent:
            raise AlgebraMismatch("Multivectors over different Lie algebras")
        if self.order != other.order:
            raise AlgebraMismatch("Multivectors with different truncation orders")

    def wedge_degrees(self) -> List[int]:
        return sorted({len(key) for key in self.components})

    @property
    def degree(self) -> int:
        """Graded Lie degree (wedge degree - 1) of a homogeneous multivector"""
        degrees = self.wedge_degrees()
        if len(degrees) != 1:
            raise DegreeError(f"Multivector is not homogeneous (wedge degrees {degrees})")
        return degrees[0] - 1

    def is_zero(self) -> bool:
        return not self.components

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiVector):
            return NotImplemented
        return self.parent is other.parent and self.components == other.components

    def __add__(self, other: "MultiVector") -> "MultiVector":
        self._check(other)
        merged = dict(self.components)
        for key, value in other.components.items():
            merged[key] = merged[key] + value if key in merged else value
        return MultiVector(self.parent, merged, self.order)

    def __neg__(self) -> "MultiVector":
        return MultiVector(self.parent, {k: -v for k, v in self.components.items()}, self.order)

    def __sub__(self, other: "MultiVector") -> "MultiVector":
        return self + (-other)

    def __mul__(self, scalar) -> "MultiVector":
        if isinstance(scalar, ScalarSeries):
            return MultiVector(self.parent, {k: v * scalar for k, v in self.components.items()}, self.order)
        return MultiVector(self.parent, {k: v.scale(scalar) for k, v in self.components.items()}, self.order)

    __rmul__ = __mul__

    def wedge(self, other: "MultiVector") -> "MultiVector":
        self._check(other)
        result = {}
        for left, a in self.components.items():
            for right, b in other.components.items():
                key = left + right
                result[key] = result[key] + a * b if key in result else a * b
        return MultiVector(self.parent, result, self.order)

    def __str__(self) -> str:
        if not self.components:
            return "0"
        names = self.parent.basis_names
        parts = []
        for key in sorted(self.components):
            word = "^".join(names[i] for i in key)
            parts.append(f"({self.components[key]})*{word}")
        return " + ".join(parts)

    __repr__ = __str__


def _wedge_into(result: Dict[Tuple[int, ...], object], word: Tuple[int, ...], coefficient):
    canonical, sign = sort_with_sign(word, [1] * len(word))
    if not sign:
        return
    value = result.get(canonical, QQ.zero) + (coefficient if sign > 0 else -coefficient)
    if value:
        result[canonical] = value
    else:
        result.pop(canonical, None)


@lru_cache(maxsize=None)
def _vector_on_word(parent: LieAlgebra, i: int, word: Tuple[int, ...]) -> Tuple:
    """[e_i, Y_0 ^ ... ^ Y_l] acting as a derivation in place"""
    result = {}
    for m, y in enumerate(word):
        for k, c in parent.bracket_basis(i, y).items():
            _wedge_into(result, word[:m] + (k,) + word[m + 1:], c)
    return tuple(result.items())


@lru_cache(maxsize=None)
def _schouten_words(parent: LieAlgebra, left: Tuple[int, ...], right: Tuple[int, ...]) -> Tuple:
    # [X_0 ^ ... ^ X_k, Y] = sum_j (-1)^(kl+j) [X_j, Y] ^ X_0 ^ .. X_j^ .. ^ X_k
    k, l = len(left) - 1, len(right) - 1
    result = {}
    for j, x in enumerate(left):
        sign = parity_sign(k * l + j)
        rest = left[:j] + left[j + 1:]
        for word, c in _vector_on_word(parent, x, right):
            _wedge_into(result, word + rest, c * sign)
    return tuple(result.items())


def schouten_bracket(a: MultiVector, b: MultiVector) -> MultiVector:
    """Schouten bracket on the exterior algebra, fixed by the Leibniz rule.

    Raises:
        AlgebraMismatch: for operands over different Lie algebras.
    """
    a._check(b)
    result = {}
    zero = ScalarSeries.zero(a.order)
    for left, ca in a.components.items():
        for right, cb in b.components.items():
            coefficient = ca * cb
            if coefficient.is_zero():
                continue
            for word, c in _schouten_words(a.parent, left, right):
                result[word] = result.get(word, zero) + coefficient.scale(c)
    return MultiVector(a.parent, result, a.order)


def lie_bracket(x: MultiVector, y: MultiVector) -> MultiVector:
    """Bracket of two wedge-degree-one elements"""
    x._check(y)
    if x.wedge_degrees() not in ([1], []) or y.wedge_degrees() not in ([1], []):
        raise DegreeError("lie_bracket takes elements of wedge degree 1")
    return schouten_bracket(x, y)


def check_cybe(parent: LieAlgebra, r: MultiVector) -> bool:
    """True iff [r, r] = 0 exactly"""
    return cybe_residual(parent, r).is_zero()


def cybe_residual(parent: LieAlgebra, r: MultiVector) -> MultiVector:
    if r.parent is not parent:
        raise AlgebraMismatch("r-matrix over a different Lie algebra")
    if r.wedge_degrees() not in ([2], []):
        raise DegreeError("The classical Yang-Baxter equation takes a bivector")
    return schouten_bracket(r, r)


class RMatrix:
    """Bivector r with [r, r] = 0.

    Raises:
        NotTriangular: with the [r, r] witness when CYBE fails.
    """

    def __init__(self, value: MultiVector):
        residual = cybe_residual(value.parent, value)
        if not residual.is_zero():
            raise NotTriangular(f"[r, r] = {residual} is not zero", residual)
        self.value = value
        self.parent = value.parent
        self.order = value.order

    def coefficient(self, i: int, j: int):
        """Antisymmetric r^{ij} as a rational (constant part of the series)"""
        if i == j:
            return QQ.zero
        key, sign = sort_with_sign((i, j), [1, 1])
        series = self.value.components.get(key)
        if series is None:
            return QQ.zero
        return series.coefficient(0) * sign

    def support(self) -> List[int]:
        return sorted({i for key in self.value.components for i in key})


def cobracket(r: RMatrix, x: MultiVector) -> MultiVector:
    """gamma(x) = [r, x] for x of wedge degree one"""
    if x.wedge_degrees() not in ([1], []):
        raise DegreeError("The cobracket is evaluated on wedge-degree-1 elements")
    if x.parent is not r.parent:
        raise AlgebraMismatch("Element over a different Lie algebra")
    return schouten_bracket(r.value, x)


def cocycle_witness(r: RMatrix) -> Optional[Tuple[int, int]]:
    """First basis pair (i, j) where gamma([x,y]) != x.gamma(y) - y.gamma(x)"""
    parent, order = r.parent, r.order
    basis = [MultiVector.basis(parent, (i,), order) for i in range(parent.dim)]
    for i in range(parent.dim):
        for j in range(i + 1, parent.dim):
            x, y = basis[i], basis[j]
            lhs = cobracket(r, lie_bracket(x, y))
            rhs = schouten_bracket(x, cobracket(r, y)) - schouten_bracket(y, cobracket(r, x))
            if lhs != rhs:
                logger.debug(f"Cobracket cocycle fails on ({i}, {j})")
                return (i, j)
    return None
