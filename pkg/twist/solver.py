"""
Order-by-order construction of a formal twist from a triangular r-matrix.

F_1 = hbar/2 * (tensor form of r); at hbar^n the equation
dF_n = -sum_{i+j=n} F_i . F_j is solved by exact row reduction, one block
per generator multidegree (d preserves multidegree).
"""

import itertools
import logging
from typing import Dict, List, Optional, Tuple, Union

from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from algebra.enveloping import EnvelopingAlgebra, Monomial, TensorWord
from algebra.errors import AnsatzTooSmall, NotTriangular
from algebra.lie import MultiVector, RMatrix, cybe_residual
from algebra.series import ScalarSeries
from config.constants import DEFAULT_SCHEDULE_FACTOR
from twist.hpoly import HPoly
from twist.twists import FormalTwist, classical_tensor

logger = logging.getLogger(__name__)


def _multidegree(key) -> Tuple[int, ...]:
    return tuple(sum(column) for column in zip(*key))


def _splits(alpha: Tuple[int, ...]) -> List[Tuple[Monomial, Monomial]]:
    """All (m1, m2) with m1 + m2 = alpha, in lexicographic order"""
    splits = []
    for left in itertools.product(*[range(a + 1) for a in alpha]):
        right = tuple(a - b for a, b in zip(alpha, left))
        splits.append((tuple(left), right))
    return sorted(splits)


class TwistSolver:
    """Perturbative solver for the twist equation.

    Args:
        algebra: Enveloping algebra; its truncation order is the target order.
        degree_schedule: Optional overrides order -> maximal total PBW degree
            of the ansatz; the default at hbar^n is 2n.
    """

    def __init__(self, algebra: EnvelopingAlgebra, degree_schedule: Optional[Dict[int, int]] = None):
        self.algebra = algebra
        self.order = algebra.order
        self.hpoly = HPoly(algebra)
        self.degree_schedule = dict(degree_schedule or {})
        self._columns: Dict[Tuple[Monomial, Monomial], Dict] = {}

    def schedule(self, n: int) -> int:
        return self.degree_schedule.get(n, DEFAULT_SCHEDULE_FACTOR * n)

    def _differential_column(self, split: Tuple[Monomial, Monomial]) -> Dict:
        cached = self._columns.get(split)
        if cached is None:
            word = TensorWord(self.algebra, 2, {split: ScalarSeries.one(self.order)})
            image = self.hpoly.differential(self.hpoly.element(word))
            cached = image.part(2).coefficients_at(0)
            self._columns[split] = cached
        return cached

    def _solve_block(self, n: int, alpha: Tuple[int, ...], target: Dict) -> Dict:
        """Solve d X = target inside multidegree alpha; returns {split: value}"""
        if sum(alpha) > self.schedule(n):
            raise AnsatzTooSmall(
                f"Order {n} needs PBW degree {sum(alpha)} > schedule {self.schedule(n)}; "
                f"enlarge the degree schedule",
                order=n,
                witness=alpha,
            )
        unknowns = _splits(alpha)
        columns = [self._differential_column(split) for split in unknowns]
        row_keys = sorted(set(target).union(*[set(column) for column in columns]))
        row_index = {key: position for position, key in enumerate(row_keys)}
        width = len(unknowns) + 1
        rows = [[QQ.zero] * width for _ in row_keys]
        for c, column in enumerate(columns):
            for key, value in column.items():
                rows[row_index[key]][c] = value
        for key, value in target.items():
            rows[row_index[key]][-1] = value
        reduced, pivots = DomainMatrix(rows, (len(rows), width), QQ).rref()
        if len(unknowns) in pivots:
            raise AnsatzTooSmall(
                f"Linear system at order {n}, multidegree {alpha} is inconsistent",
                order=n,
                witness=alpha,
            )
        matrix = reduced.to_Matrix()
        solution = {}
        for row, column in enumerate(pivots):
            value = QQ.from_sympy(matrix[row, width - 1])
            if value:
                solution[unknowns[column]] = value
        return solution

    def solve(self, r: Union[RMatrix, MultiVector]) -> FormalTwist:
        """Build J = 1 (x) 1 + sum_n F_n up to the truncation order.

        Raises:
            NotTriangular: when [r, r] != 0 (witness: the residual).
            AnsatzTooSmall: when an order has no solution inside the ansatz.
        """
        value = r.value if isinstance(r, RMatrix) else r
        residual = cybe_residual(value.parent, value)
        if not residual.is_zero():
            raise NotTriangular(f"[r, r] = {residual} is not zero", residual)

        order = self.order
        first = classical_tensor(value, self.algebra)
        slices: Dict[int, TensorWord] = {
            1: TensorWord(self.algebra, 2, {
                key: ScalarSeries.monomial(c.coefficient(0) / 2, 1, order)
                for key, c in first.terms.items()
            })
        }
        logger.info(f"Solving twist up to hbar^{order} for r = {value}")
        for n in range(2, order + 1):
            rhs = TensorWord(self.algebra, 3, {})
            for i in range(1, n):
                rhs = rhs + self.hpoly.bullet_words(slices[i], slices[n - i])
            blocks: Dict[Tuple[int, ...], Dict] = {}
            for key, c in rhs.coefficients_at(n).items():
                blocks.setdefault(_multidegree(key), {})[key] = -c
            terms = {}
            for alpha in sorted(blocks):
                for split, c in self._solve_block(n, alpha, blocks[alpha]).items():
                    terms[split] = ScalarSeries.monomial(c, n, order)
            slices[n] = TensorWord(self.algebra, 2, terms)
            logger.debug(f"Order {n}: {len(blocks)} blocks, {len(terms)} terms")

        J = self.algebra.unit_word(2)
        for piece in slices.values():
            J = J + piece
        return FormalTwist(J, validate=False)


def solve_twist_perturbatively(r: Union[RMatrix, MultiVector], algebra: EnvelopingAlgebra,
                               degree_schedule: Optional[Dict[int, int]] = None) -> FormalTwist:
    return TwistSolver(algebra, degree_schedule).solve(r)
