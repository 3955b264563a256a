"""
Exception hierarchy shared by all algebraic modules
"""

from typing import Any, Optional


class QuantizerError(ValueError):
    """Base class for every domain error raised by the quantizer.

    Args:
        message: Human readable description.
        witness: Optional counterexample (indices, a multivector, an order...).
    """

    def __init__(self, message: str, witness: Optional[Any] = None):
        super().__init__(message)
        self.witness = witness


class ConfigMismatch(QuantizerError):
    """Values built for different truncation orders (or sizes) were combined."""


class NotInvertible(QuantizerError):
    """Constant term vanishes, no inverse exists."""


class AlgebraMismatch(QuantizerError):
    """Operands belong to different parent algebras."""


class DegreeError(QuantizerError):
    """Wrong (or inhomogeneous) degree for the requested operation."""


class DomainError(QuantizerError):
    """Argument outside the domain of the operation."""


class NotLieAlgebra(QuantizerError):
    """Structure constants violate antisymmetry or the Jacobi identity."""


class NotTriangular(QuantizerError):
    """The bivector does not solve the classical Yang-Baxter equation."""


class NotAction(QuantizerError):
    """The vector fields do not define a Lie algebra morphism."""


class NotMaurerCartan(QuantizerError):
    """Element fails the Maurer-Cartan equation."""


class AnsatzTooSmall(QuantizerError):
    """The perturbative solver found no solution at a given hbar order."""

    def __init__(self, message: str, order: int, witness: Optional[Any] = None):
        super().__init__(message, witness)
        self.order = order


class BoundExceeded(QuantizerError):
    """Wedge word longer than the configured bound."""


class NotFiltered(QuantizerError):
    """Element is not in the first filtration level (hbar-adic valuation < 1)."""


class SchemaError(QuantizerError):
    """Problem specification does not follow the JSON schema."""
