"""
Custom exceptions and error handlers for the engine.
"""

from typing import Any

from loguru import logger

EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_USAGE = 2
EXIT_CAP = 3


class NonFGraphException(Exception):
    """Base exception for the non-F graph engine."""

    def __init__(
        self,
        message: str,
        exit_code: int = EXIT_VERIFICATION_FAILED,
        details: dict[str, Any] | None = None,
    ):
        self.message = message
        self.exit_code = exit_code
        self.details = details or {}
        super().__init__(self.message)


class CapExceeded(NonFGraphException):
    """Exception raised when a computation would pass a configured cap."""

    def __init__(self, what: str, size: int, cap: int):
        super().__init__(
            message=f"{what} of size {size} exceeds the cap {cap}",
            exit_code=EXIT_CAP,
            details={"what": what, "size": size, "cap": cap},
        )


class BudgetExceeded(NonFGraphException):
    """Exception raised when a search runs out of budget before a verdict."""

    def __init__(self, search: str, budget: int, partial: str = "not found within budget"):
        self.partial = partial
        super().__init__(
            message=f"{search} exhausted its budget of {budget} nodes ({partial})",
            exit_code=EXIT_CAP,
            details={"search": search, "budget": budget, "partial": partial},
        )


class InvalidPermutation(NonFGraphException):
    """Exception raised when a generator is not a bijection of the point set."""

    def __init__(self, position: int, degree: int):
        super().__init__(
            message=f"Generator {position} is not a permutation of {degree} points",
            exit_code=EXIT_USAGE,
            details={"position": position, "degree": degree},
        )


class NotAnAction(NonFGraphException):
    """Exception raised when a supplied action is not a homomorphism into Aut(N)."""

    def __init__(self, reason: str, element: int | None = None):
        super().__init__(
            message=f"Action check failed: {reason}",
            exit_code=EXIT_USAGE,
            details={"reason": reason, "element": element},
        )


class NotNormal(NonFGraphException):
    """Exception raised when a subgroup is not normal where normality is required."""

    def __init__(self, order: int, witness: int):
        super().__init__(
            message=f"Subgroup of order {order} is not normal (conjugating element {witness})",
            exit_code=EXIT_USAGE,
            details={"order": order, "witness": witness},
        )


class NotIrreducible(NonFGraphException):
    """Exception raised when a module has a proper nonzero invariant subspace."""

    def __init__(self, dimension: int, subspace_dimension: int):
        super().__init__(
            message=f"Module of dimension {dimension} has an invariant subspace of dimension {subspace_dimension}",
            exit_code=EXIT_USAGE,
            details={"dimension": dimension, "subspace_dimension": subspace_dimension},
        )


class NotFaithful(NonFGraphException):
    """Exception raised when a module action has a nontrivial kernel."""

    def __init__(self, kernel_order: int):
        super().__init__(
            message=f"Module action has a kernel of order {kernel_order}",
            exit_code=EXIT_USAGE,
            details={"kernel_order": kernel_order},
        )


class NotAHomomorphism(NonFGraphException):
    """Exception raised when generator matrices do not extend to a homomorphism."""

    def __init__(self, element: int, generator: int):
        super().__init__(
            message=f"Matrix assignment fails the relation at element {element}, generator {generator}",
            exit_code=EXIT_USAGE,
            details={"element": element, "generator": generator},
        )


class NotInvertible(NonFGraphException):
    """Exception raised when a generator matrix is singular over the prime field."""

    def __init__(self, position: int, prime: int):
        super().__init__(
            message=f"Generator matrix {position} is not invertible over GF({prime})",
            exit_code=EXIT_USAGE,
            details={"position": position, "prime": prime},
        )


class ShapeMismatch(NonFGraphException):
    """Exception raised when a structure check finds an unexpected shape."""

    def __init__(self, step: str, reason: str, details: dict[str, Any] | None = None):
        super().__init__(
            message=f"Structure check failed at {step}: {reason}",
            exit_code=EXIT_USAGE,
            details={"step": step, "reason": reason, **(details or {})},
        )


class InvalidParameters(NonFGraphException):
    """Exception raised for invalid family or operation parameters."""

    def __init__(self, message: str, details: dict[str, Any] | None = None):
        super().__init__(message=message, exit_code=EXIT_USAGE, details=details)


class ParseError(NonFGraphException):
    """Exception raised when a group file, family spec or class spec cannot be parsed."""

    def __init__(self, source: str, reason: str, line: int | None = None):
        super().__init__(
            message=f"Cannot parse {source}: {reason}",
            exit_code=EXIT_USAGE,
            details={"source": source, "reason": reason, "line": line},
        )


def handle_exception(exc: Exception) -> int:
    """
    Log an exception and map it to a CLI exit code.

    Args:
        exc: The exception raised by a command

    Returns:
        Exit code for the process
    """
    if isinstance(exc, NonFGraphException):
        logger.error(
            f"{type(exc).__name__}: {exc.message}",
            exit_code=exc.exit_code,
            details=exc.details,
        )
        return exc.exit_code

    logger.opt(exception=exc).error("Unhandled exception")
    return EXIT_VERIFICATION_FAILED
