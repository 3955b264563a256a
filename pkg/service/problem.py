"""
Problem specifications: pydantic schema for the JSON input and the
builders that turn it into algebraic objects
"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from algebra.enveloping import EnvelopingAlgebra, TensorWord
from algebra.errors import DomainError, QuantizerError, SchemaError
from algebra.lie import LieAlgebra, MultiVector
from algebra.series import ScalarSeries, format_rational, parse_rational
from config.constants import BUILTIN_TWISTS, TWIST_MODES
from config.settings import config, parse_degree_schedule
from quantize.polynomials import LieAction, PolynomialAlgebra, PolyVectorField
from twist.twists import FormalTwist

logger = logging.getLogger(__name__)

Ref = Union[int, str]


def _rational_text(value: str) -> str:
    try:
        parse_rational(value)
    except DomainError as e:
        raise ValueError(str(e)) from None
    return value


class LieAlgebraSpec(BaseModel):
    """Basis names and structure constants ``[i, j, k, "c"]`` meaning c^k_ij = c"""

    model_config = ConfigDict(extra="forbid")

    basis: List[str] = Field(min_length=1)
    structure_constants: List[Tuple[Ref, Ref, Ref, str]] = Field(default_factory=list)

    @field_validator("structure_constants")
    @classmethod
    def _exact_constants(cls, entries):
        for entry in entries:
            _rational_text(entry[3])
        return entries


class FieldTerm(BaseModel):
    """coefficient * d/d(variable), coefficient as polynomial records"""

    model_config = ConfigDict(extra="forbid")

    variable: Ref
    coefficient: List[list]


class ActionSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    variables: List[str] = Field(min_length=1)
    fields: Dict[str, List[FieldTerm]] = Field(default_factory=dict)


class TwistWordSpec(BaseModel):
    """Explicit twist: terms ``[[leg exponents...], hbar power, "c"]``"""

    model_config = ConfigDict(extra="forbid")

    legs: int = 2
    order: Optional[int] = None
    basis: Optional[List[str]] = None
    terms: List[Tuple[List[List[int]], int, str]]

    @field_validator("legs")
    @classmethod
    def _two_legs(cls, legs):
        if legs != 2:
            raise ValueError("A twist has exactly two legs")
        return legs

    @field_validator("terms")
    @classmethod
    def _exact_terms(cls, terms):
        for legs, power, value in terms:
            if power < 0:
                raise ValueError("hbar powers must be non-negative")
            _rational_text(value)
        return terms


class ProblemSpec(BaseModel):
    """Top-level problem file"""

    model_config = ConfigDict(extra="forbid")

    name: str = "problem"
    description: str = ""
    lie_algebra: LieAlgebraSpec
    r_matrix: List[Tuple[Ref, Ref, str]] = Field(default_factory=list)
    action: Optional[ActionSpec] = None
    twist: Union[str, TwistWordSpec] = "solve"
    truncation_order: Optional[int] = Field(default=None, ge=1)
    degree_schedule: Optional[Union[str, Dict[int, int]]] = None

    @field_validator("r_matrix")
    @classmethod
    def _exact_r(cls, entries):
        for entry in entries:
            _rational_text(entry[2])
        return entries

    @field_validator("twist")
    @classmethod
    def _known_twist(cls, twist):
        if isinstance(twist, str):
            name = twist.split(":", 1)[1] if twist.startswith("builtin:") else twist
            if name != TWIST_MODES["SOLVE"] and name not in BUILTIN_TWISTS:
                raise ValueError(f"Unknown twist {twist!r}; use 'solve' or builtin:{'|'.join(BUILTIN_TWISTS)}")
        return twist

    @property
    def twist_mode(self) -> str:
        if isinstance(self.twist, TwistWordSpec):
            return TWIST_MODES["IMPORTED"]
        if self.twist == TWIST_MODES["SOLVE"]:
            return TWIST_MODES["SOLVE"]
        return TWIST_MODES["BUILTIN"]

    @property
    def builtin_name(self) -> Optional[str]:
        if self.twist_mode != TWIST_MODES["BUILTIN"]:
            return None
        return self.twist.split(":", 1)[1] if self.twist.startswith("builtin:") else self.twist


def parse_problem(data: Dict) -> ProblemSpec:
    """Validate a decoded JSON document.

    Raises:
        SchemaError: with the pydantic error list as witness.
    """
    try:
        return ProblemSpec.model_validate(data)
    except ValidationError as e:
        raise SchemaError(f"Invalid problem specification: {e.error_count()} error(s)",
                          e.errors(include_url=False)) from None


def load_problem(path: Union[str, Path]) -> ProblemSpec:
    """Read and validate a problem file"""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise SchemaError(f"Problem file not found: {path}") from None
    except json.JSONDecodeError as e:
        raise SchemaError(f"{path} is not valid JSON: {e}") from None
    if not isinstance(data, dict):
        raise SchemaError(f"{path} must hold a JSON object")
    logger.info(f"Loaded problem from {path}")
    return parse_problem(data)


@dataclass
class Problem:
    """Algebraic objects built from a ProblemSpec"""

    spec: ProblemSpec
    order: int
    lie: LieAlgebra
    r: MultiVector
    enveloping: EnvelopingAlgebra
    polynomials: Optional[PolynomialAlgebra]
    action: Optional[LieAction]
    degree_schedule: Dict[int, int]

    @property
    def name(self) -> str:
        return self.spec.name


def _resolve(ref: Ref, names: Tuple[str, ...], what: str) -> int:
    if isinstance(ref, int):
        if not 0 <= ref < len(names):
            raise SchemaError(f"{what} index {ref} outside 0..{len(names) - 1}")
        return ref
    if ref not in names:
        raise SchemaError(f"Unknown {what} {ref!r}; expected one of {list(names)}")
    return names.index(ref)


def build_lie_algebra(spec: LieAlgebraSpec) -> LieAlgebra:
    """Entries fix c^k_ij; the opposite orientation is filled in unless listed too.

    The axioms are not enforced here so that verification can report witnesses.
    """
    names = tuple(spec.basis)
    if len(set(names)) != len(names):
        raise SchemaError(f"Duplicate basis names in {list(names)}")
    given: Dict[Tuple[int, int, int], object] = {}
    for i, j, k, value in spec.structure_constants:
        key = (_resolve(i, names, "basis element"), _resolve(j, names, "basis element"),
               _resolve(k, names, "basis element"))
        given[key] = given.get(key, 0) + parse_rational(value)
    completed = dict(given)
    for (i, j, k), value in given.items():
        if (j, i, k) not in given:
            completed[(j, i, k)] = -value
    constants: Dict[Tuple[int, int], Dict[int, object]] = {}
    for (i, j, k), value in completed.items():
        constants.setdefault((i, j), {})[k] = value
    return LieAlgebra(names, constants, validate=False)


def build_r_matrix(spec: ProblemSpec, lie: LieAlgebra, order: int) -> MultiVector:
    terms: Dict[Tuple[int, int], object] = {}
    for a, b, value in spec.r_matrix:
        i = _resolve(a, lie.basis_names, "basis element")
        j = _resolve(b, lie.basis_names, "basis element")
        if i == j:
            raise SchemaError(f"r-matrix entry ({a}, {b}) is on the diagonal")
        terms[(i, j)] = terms.get((i, j), 0) + parse_rational(value)
    return MultiVector.from_rationals(lie, terms, order)


def build_action(spec: ActionSpec, lie: LieAlgebra, order: int) -> Tuple[PolynomialAlgebra, LieAction]:
    try:
        algebra = PolynomialAlgebra(spec.variables, order)
    except DomainError as e:
        raise SchemaError(str(e)) from None
    names = tuple(spec.variables)
    fields: Dict[int, PolyVectorField] = {}
    for generator, terms in spec.fields.items():
        index = _resolve(generator, lie.basis_names, "basis element")
        vector = PolyVectorField.zero(algebra)
        for term in terms:
            variable = _resolve(term.variable, names, "variable")
            try:
                coefficient = algebra.from_records(term.coefficient)
            except (DomainError, TypeError, ValueError) as e:
                raise SchemaError(f"Bad coefficient for {generator}: {e}") from None
            vector = vector + PolyVectorField.coordinate(algebra, (variable,), coefficient)
        fields[index] = vector
    return algebra, LieAction(lie, algebra, fields)


def build_problem(spec: ProblemSpec, order: Optional[int] = None,
                  degree_schedule: Optional[Dict[int, int]] = None) -> Problem:
    """Instantiate the algebras of a problem.

    ``order`` and ``degree_schedule`` override the file, which overrides
    the configuration.
    """
    if order is not None and order < 1:
        raise SchemaError(f"Truncation order must be at least 1, got {order}")
    if order is None:
        order = spec.truncation_order or config.get("truncation_order")
    if degree_schedule is None:
        if isinstance(spec.degree_schedule, dict):
            degree_schedule = dict(spec.degree_schedule)
        elif spec.degree_schedule:
            try:
                degree_schedule = parse_degree_schedule(spec.degree_schedule)
            except ValueError as e:
                raise SchemaError(str(e)) from None
        else:
            degree_schedule = config.get_degree_schedule()
    lie = build_lie_algebra(spec.lie_algebra)
    r = build_r_matrix(spec, lie, order)
    polynomials, action = (None, None)
    if spec.action is not None:
        polynomials, action = build_action(spec.action, lie, order)
    logger.info(f"Built problem {spec.name!r}: {lie}, order {order}, twist {spec.twist_mode}")
    return Problem(
        spec=spec,
        order=order,
        lie=lie,
        r=r,
        enveloping=EnvelopingAlgebra(lie, order),
        polynomials=polynomials,
        action=action,
        degree_schedule=degree_schedule,
    )


# Twist codec


def twist_to_json(twist: FormalTwist) -> Dict:
    """``{"legs": 2, "order": N, "basis": [...], "terms": [[[m0, m1], power, "c"], ...]}``"""
    terms = []
    for (m0, m1), series in sorted(twist.J.terms.items()):
        for power, value in enumerate(series.coefficients):
            if value:
                terms.append([[list(m0), list(m1)], power, format_rational(value)])
    return {
        "legs": 2,
        "order": twist.order,
        "basis": list(twist.algebra.lie.basis_names),
        "terms": terms,
    }


def twist_from_json(data: Union[Dict, TwistWordSpec], algebra: EnvelopingAlgebra,
                    validate: bool = False) -> FormalTwist:
    """Rebuild a twist written by twist_to_json.

    Raises:
        SchemaError: on malformed terms or exponent vectors of the wrong size.
    """
    if isinstance(data, dict):
        try:
            data = TwistWordSpec.model_validate(data)
        except ValidationError as e:
            raise SchemaError(f"Invalid twist: {e.error_count()} error(s)", e.errors(include_url=False)) from None
    if data.basis is not None and tuple(data.basis) != algebra.lie.basis_names:
        raise SchemaError(f"Twist written for basis {data.basis}, expected {list(algebra.lie.basis_names)}")
    collected: Dict[Tuple, Dict[int, object]] = {}
    for legs, power, value in data.terms:
        if len(legs) != 2 or any(len(m) != algebra.dim or min(m, default=0) < 0 for m in legs):
            raise SchemaError(f"Twist term {legs} does not match {algebra.dim} generators on two legs")
        key = tuple(tuple(m) for m in legs)
        bucket = collected.setdefault(key, {})
        bucket[power] = bucket.get(power, 0) + parse_rational(value)
    word = TensorWord(algebra, 2, {
        key: ScalarSeries.from_terms(powers, algebra.order) for key, powers in collected.items()
    })
    try:
        return FormalTwist(word, validate=validate)
    except QuantizerError as e:
        raise SchemaError(f"Imported twist rejected: {e}", e.witness) from None
