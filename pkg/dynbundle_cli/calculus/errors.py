"""Exceptions raised by the calculus library."""

from typing import Any, Optional


class CalculusError(Exception):
    """Base exception for every failure inside the calculus library."""

    def __init__(self, message: str, details: Optional[dict[str, Any]] = None):
        self.message = message
        self.details = details
        super().__init__(self.message)


class ContractError(CalculusError):
    """A caller broke an operation's contract (dimensions, base points, orders)."""


class DomainError(CalculusError):
    """A point lies outside the region where a map or manifold is defined."""


class SingularityError(DomainError):
    """A state came within the guard radius of a singularity.

    Attributes:
        step: Integration step at which the singularity was hit, if any.
    """

    def __init__(
        self,
        message: str,
        step: Optional[int] = None,
        details: Optional[dict[str, Any]] = None,
    ):
        self.step = step
        if step is not None:
            message = f"{message} (step {step})"
        super().__init__(message, details)


class NonContractionError(CalculusError):
    """Picard iteration did not settle within its iteration budget."""

    def __init__(self, message: str, last_change: float, iterations: int):
        self.last_change = last_change
        self.iterations = iterations
        super().__init__(
            f"{message}: last change {last_change:.3e} after {iterations} iteration(s)",
            {"last_change": last_change, "iterations": iterations},
        )
