"""
Verification and quantization pipelines behind the CLI and the HTTP surface
"""

import json
import logging
import random
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from sympy.polys.domains import QQ

from algebra.errors import NotTriangular, QuantizerError, SchemaError
from algebra.lie import RMatrix, antisymmetry_witness, cocycle_witness, cybe_residual, jacobi_witness
from algebra.enveloping import random_element
from algebra.series import format_rational
from config.constants import CHECK_NAMES, EXIT_CODES, REPORT_VERSION, TWIST_MODES
from config.settings import config
from quantize.hochschild import deformation_symmetry_from_action
from quantize.polynomials import check_poisson_action, induced_poisson, is_poisson
from quantize.star import (
    StarProduct,
    associativity_report,
    classical_limit_check,
    mc_to_star_consistency,
    monomial_triples,
    star_table,
    twisted_module_check,
    unit_check,
)
from service.problem import Problem, twist_from_json, twist_to_json
from twist.solver import TwistSolver
from twist.twists import (
    FormalTwist,
    TwistedBialgebra,
    builtin_twist,
    classical_limit,
    classical_tensor,
    counit_normalization_check,
    is_formal_twist,
    iterated_twisted_coproduct_check,
    jk_coherence_check,
)

logger = logging.getLogger(__name__)

PASS, FAIL, SKIPPED = "pass", "fail", "skipped"


def jsonable(value: Any) -> Any:
    """Exact, deterministic JSON form of a witness"""
    if value is None or isinstance(value, (bool, int, str)):
        return value
    if isinstance(value, QQ.dtype):
        return format_rational(value)
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    return str(value)


@dataclass
class CheckResult:
    name: str
    status: str
    first_failure_order: Optional[int] = None
    witness: Any = None
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.status != FAIL

    def to_dict(self) -> Dict:
        return {
            "name": self.name,
            "status": self.status,
            "first_failure_order": self.first_failure_order,
            "witness": jsonable(self.witness),
            "detail": self.detail,
        }


@dataclass
class Report:
    """Outcome of one command; deterministic for a given problem and seed"""

    command: str
    problem: str
    order: int
    seed: int
    checks: List[CheckResult] = field(default_factory=list)
    twist: Optional[Dict] = None
    certificate: Optional[Dict] = None
    table: Optional[List[Dict]] = None
    details: Dict[str, Any] = field(default_factory=dict)
    error: Optional[Dict] = None

    def add(self, name: str, passed: bool, witness: Any = None, order: Optional[int] = None,
            detail: str = "") -> CheckResult:
        result = CheckResult(name, PASS if passed else FAIL, order, None if passed else witness, detail)
        self.checks.append(result)
        logger.info(f"[{self.command}] {name}: {result.status}")
        return result

    def skip(self, name: str, reason: str) -> CheckResult:
        result = CheckResult(name, SKIPPED, detail=reason)
        self.checks.append(result)
        logger.info(f"[{self.command}] {name}: skipped ({reason})")
        return result

    def fail_with(self, error: QuantizerError):
        self.error = {
            "type": type(error).__name__,
            "message": str(error),
            "order": getattr(error, "order", None),
            "witness": jsonable(error.witness),
        }
        logger.warning(f"[{self.command}] {type(error).__name__}: {error}")

    def check(self, name: str) -> Optional[CheckResult]:
        return next((c for c in self.checks if c.name == name), None)

    @property
    def passed(self) -> bool:
        return self.error is None and all(c.passed for c in self.checks)

    @property
    def exit_code(self) -> int:
        return EXIT_CODES["PASS"] if self.passed else EXIT_CODES["CHECK_FAILED"]

    def to_dict(self) -> Dict:
        data = {
            "version": REPORT_VERSION,
            "command": self.command,
            "problem": self.problem,
            "truncation_order": self.order,
            "seed": self.seed,
            "passed": self.passed,
            "exit_code": self.exit_code,
            "checks": [c.to_dict() for c in self.checks],
            "error": self.error,
        }
        if self.twist is not None:
            data["twist"] = self.twist
        if self.certificate is not None:
            data["certificate"] = self.certificate
        if self.table is not None:
            data["table"] = self.table
        if self.details:
            data["details"] = jsonable(self.details)
        return data

    def to_json(self) -> str:
        return dump_json(self.to_dict())


def dump_json(data: Any) -> str:
    """Sorted keys, two-space indent, newline-terminated"""
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _seed(seed: Optional[int]) -> int:
    return config.get("seed") if seed is None else seed


def r_matrix_of(problem: Problem) -> RMatrix:
    """Raises NotTriangular with the [r, r] witness"""
    return RMatrix(problem.r)


def resolve_twist(problem: Problem, r: Optional[RMatrix] = None) -> FormalTwist:
    """Twist of a problem: imported, built in, or solved order by order.

    Raises:
        NotTriangular, AnsatzTooSmall, DomainError, SchemaError
    """
    spec = problem.spec
    mode = spec.twist_mode
    if mode == TWIST_MODES["IMPORTED"]:
        return twist_from_json(spec.twist, problem.enveloping)
    r = r or r_matrix_of(problem)
    if mode == TWIST_MODES["BUILTIN"]:
        return builtin_twist(spec.builtin_name, problem.enveloping, r)
    return TwistSolver(problem.enveloping, problem.degree_schedule).solve(r)


def _names(problem: Problem, indices) -> List[str]:
    return [problem.lie.basis_names[i] for i in indices]


def _certify_twist(report: Report, problem: Problem, twist: FormalTwist, r: Optional[RMatrix]):
    certificate = is_formal_twist(twist.J)
    report.certificate = certificate.to_dict()
    report.add("twist_cocycle", certificate.passed, certificate.to_dict(), certificate.first_failure_order)
    report.add("counit_normalization", counit_normalization_check(twist.J))
    if r is None:
        report.skip("classical_limit", "no triangular r-matrix")
        return
    limit = classical_limit(twist.J)
    expected = classical_tensor(r.value, problem.enveloping)
    report.add("classical_limit", limit == expected, {"limit": limit, "expected": expected})


def cmd_verify(problem: Problem, seed: Optional[int] = None) -> Report:
    """Run every structural check in CHECK_NAMES order; later checks that need
    a failed ingredient are skipped."""
    report = Report("verify", problem.name, problem.order, _seed(seed))
    lie = problem.lie

    witness = antisymmetry_witness(lie.dim, lie.structure_constants)
    if witness is None:
        witness = jacobi_witness(lie.dim, lie.structure_constants)
    report.add("lie_algebra", witness is None, {"indices": witness, "names": _names(problem, witness or ())})
    if witness is not None:
        for name in CHECK_NAMES[1:]:
            report.skip(name, "not a Lie algebra")
        return report

    residual = cybe_residual(lie, problem.r)
    r = RMatrix(problem.r) if residual.is_zero() else None
    report.add("cybe", r is not None, residual)

    if r is None:
        report.skip("cobracket_cocycle", "r-matrix is not triangular")
    else:
        pair = cocycle_witness(r)
        report.add("cobracket_cocycle", pair is None, _names(problem, pair or ()))

    action_ok = False
    if problem.action is None:
        report.skip("action_morphism", "problem has no action")
    else:
        pair = problem.action.morphism_witness()
        action_ok = pair is None
        report.add("action_morphism", action_ok, _names(problem, pair or ()))

    if not action_ok or r is None:
        report.skip("poisson_action", "needs a valid action and a triangular r-matrix")
    else:
        pi = induced_poisson(r, problem.action)
        report.details["poisson_bivector"] = str(pi)
        report.add("poisson_action", is_poisson(pi) and check_poisson_action(r, problem.action, pi), str(pi))

    try:
        twist = resolve_twist(problem, r)
    except SchemaError:
        raise
    except QuantizerError as e:
        report.fail_with(e)
        for name in CHECK_NAMES[CHECK_NAMES.index("twist_cocycle"):]:
            report.skip(name, f"no twist: {type(e).__name__}")
        return report
    report.twist = twist_to_json(twist)

    _certify_twist(report, problem, twist, r)

    failing = None
    for k in range(config.get("coherence_max_k") + 1):
        for l in range(config.get("coherence_max_l") + 1):
            for i in range(k + 1):
                if failing is None and not jk_coherence_check(twist, k, i, l):
                    failing = {"k": k, "i": i, "l": l}
    report.add("jk_coherence", failing is None, failing)

    bialgebra = TwistedBialgebra(twist)
    failing = None
    for index, name in enumerate(lie.basis_names):
        x = problem.enveloping.generator(index)
        for k in range(config.get("coherence_max_k") + 1):
            if failing is None and not iterated_twisted_coproduct_check(bialgebra, x, k):
                failing = {"generator": name, "k": k}
    report.add("twisted_coproduct_iterates", failing is None, failing)
    return report


def cmd_quantize(problem: Problem, max_degree: Optional[int] = None, seed: Optional[int] = None) -> Report:
    """Star-product table of the problem's twist and action with its verdicts.

    Raises:
        SchemaError: when the problem has no action.
    """
    if problem.action is None:
        raise SchemaError("quantize needs an 'action' section")
    seed = _seed(seed)
    max_degree = config.get("max_degree") if max_degree is None else max_degree
    report = Report("quantize", problem.name, problem.order, seed)
    action = problem.action
    algebra = problem.polynomials

    try:
        action.require()
        r = r_matrix_of(problem)
        twist = resolve_twist(problem, r)
        symmetry = deformation_symmetry_from_action(action, problem.enveloping)
    except SchemaError:
        raise
    except QuantizerError as e:
        report.fail_with(e)
        return report
    report.twist = twist_to_json(twist)

    star = StarProduct(twist, action)
    report.table = star_table(star, max_degree)

    triples = monomial_triples(algebra, config.get("sample_degree"))
    associativity = associativity_report(star, triples)
    report.details["associativity"] = associativity.to_dict(algebra)
    report.add("associativity", associativity.associative, associativity.to_dict(algebra)["witnesses"],
               associativity.first_failure_order)

    monomials = algebra.monomials(max_degree)
    report.add("unit", unit_check(star, monomials))

    pi = induced_poisson(r, action)
    report.details["poisson_bivector"] = str(pi)
    pairs = [(f, g) for f in monomials for g in monomials]
    report.add("classical_limit", classical_limit_check(star, pi, pairs), str(pi))

    consistency = mc_to_star_consistency(twist, symmetry, star, pi, triples)
    report.details["maurer_cartan"] = consistency.to_dict(algebra)
    report.add("mc_consistency", consistency.consistent, consistency.to_dict(algebra))

    rng = random.Random(seed)
    samples = [
        (random_element(problem.enveloping, rng, max_degree=1, terms=2, max_power=0),
         rng.choice(monomials), rng.choice(monomials))
        for _ in range(config.get("sample_count"))
    ]
    report.add("twisted_module", twisted_module_check(star, samples))
    return report


def cmd_twist_solve(problem: Problem, seed: Optional[int] = None) -> Report:
    """Solve for a twist of the problem's r-matrix and certify it per hbar order"""
    report = Report("twist-solve", problem.name, problem.order, _seed(seed))
    try:
        r = r_matrix_of(problem)
        twist = TwistSolver(problem.enveloping, problem.degree_schedule).solve(r)
    except NotTriangular as e:
        report.fail_with(e)
        report.add("cybe", False, e.witness)
        return report
    except QuantizerError as e:
        report.fail_with(e)
        return report
    report.add("cybe", True)
    report.twist = twist_to_json(twist)
    _certify_twist(report, problem, twist, r)
    return report


COMMANDS = {
    "verify": cmd_verify,
    "quantize": cmd_quantize,
    "twist-solve": cmd_twist_solve,
}
