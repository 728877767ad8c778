"""Exception types shared across the package."""

from __future__ import annotations


class SymplabError(Exception):
    """Base class for package errors."""


class DomainError(SymplabError, ValueError):
    """Input outside the domain of a function or field."""


class SingularMatrixError(SymplabError, ValueError):
    def __init__(self, message: str, condition: float = float("inf")):
        super().__init__(f"{message} (condition estimate {condition:.3g})")
        self.condition = condition


class ContractError(SymplabError, ValueError):
    """Rank or shape mismatch between an operator and its arguments."""


class UnsupportedOrderError(SymplabError, ValueError):
    """Composite operator needs derivatives beyond what jets carry."""


class UnsupportedError(SymplabError, ValueError):
    """Operation not defined for the requested group or theory."""


class InvalidPolarizationError(SymplabError, ValueError):
    """Plane-wave data violating transversality, tracelessness or null conditions."""


class PreconditionError(SymplabError, ValueError):
    """Input violates a documented precondition."""


class ConfigError(SymplabError, ValueError):
    """Malformed scenario configuration."""


class InstabilityError(SymplabError, RuntimeError):
    """Numerical evolution left its controlled regime."""
