from __future__ import annotations


class DomainError(ValueError):
    """An argument lies outside the domain where an operation is defined."""


class ConvergenceError(ArithmeticError):
    """An iterative method (Newton, series summation) failed to converge."""


class SingularSystemError(ArithmeticError):
    """A Galerkin system is singular to working precision.

    The condition number estimate (when available) is kept in :attr:`cond`.
    """

    def __init__(self, message: str, cond: float | None = None) -> None:
        super().__init__(message)
        self.cond = cond
