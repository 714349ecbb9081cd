"""Custom exceptions for cherednik-wb computations."""

from __future__ import annotations

__all__ = [
    "CherednikError",
    "CollisionDetected",
    "ConfigError",
    "FactorizationFailed",
    "HyperplaneTooClose",
    "IdentityViolation",
    "MissingParabolicTable",
    "MoveCapExceeded",
    "NonTerminating",
    "NotDivisible",
    "NotInvariant",
    "OrderCapExceeded",
    "PoleAtPoint",
    "RDivisibleByN",
    "SeparationTooSmall",
    "StepFailure",
    "ToleranceNotMet",
    "UnsupportedType",
    "VariableMismatch",
    "ZeroDenominator",
]


class CherednikError(Exception):
    """Base exception for all cherednik-wb errors."""


class ConfigError(CherednikError):
    """Invalid job configuration or settings file."""


# === Exact arithmetic ===


class VariableMismatch(CherednikError):
    """Operands live in different coordinate rings."""


class NotDivisible(CherednikError):
    """Polynomial is not a multiple of the linear form."""

    def __init__(self, message: str, remainder: object = None) -> None:
        super().__init__(message)
        self.remainder = remainder


class ZeroDenominator(CherednikError):
    """Rational function built with the zero polynomial as denominator."""


class PoleAtPoint(CherednikError):
    """Denominator vanishes at the evaluation point."""


# === Groups ===


class OrderCapExceeded(CherednikError):
    """Group enumeration exceeded the configured order cap."""


class UnsupportedType(CherednikError):
    """Group spec names a type that cannot be built."""


class FactorizationFailed(CherednikError):
    """Poincare polynomial did not split into q-integers."""


class MissingParabolicTable(CherednikError):
    """No maximal parabolic degree data for the group label."""


# === Identities ===


class NotInvariant(CherednikError):
    """Polynomial is not invariant under the group."""


class IdentityViolation(CherednikError):
    """Two computation paths of an asserted identity disagree."""

    def __init__(self, message: str, witness: str | None = None) -> None:
        super().__init__(message)
        self.witness = witness


class RDivisibleByN(CherednikError):
    """Residue construction needs n not dividing r."""


class NonTerminating(CherednikError):
    """Quotient Hilbert series did not terminate below the degree cap."""


# === Numerics ===


class SeparationTooSmall(CherednikError):
    """Particle positions closer than the separation threshold."""


class CollisionDetected(CherednikError):
    """Eigenvalue paths came closer than the separation threshold."""

    def __init__(self, message: str, trajectory: object = None) -> None:
        super().__init__(message)
        self.trajectory = trajectory


class StepFailure(CherednikError):
    """Adaptive integrator could not complete the step."""


class MoveCapExceeded(CherednikError):
    """Rewriting did not reach normal form within the move cap."""


class HyperplaneTooClose(CherednikError):
    """Transport path passes too close to a reflection hyperplane."""


class ToleranceNotMet(CherednikError):
    """Integrated transport failed its accuracy self-check."""
