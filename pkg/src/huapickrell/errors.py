"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class HuaPickrellError(Exception):
    """Base class for all errors raised by the package."""


class PoleError(HuaPickrellError, ValueError):
    """A gamma function or hypergeometric parameter sits on a pole."""


class DomainError(HuaPickrellError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class ExistenceError(DomainError):
    """A pseudo-Jacobi polynomial of the requested degree does not exist."""


class StripError(DomainError):
    """A moment exponent lies outside the validity strip."""


class QuadratureError(HuaPickrellError, RuntimeError):
    """Adaptive quadrature failed to converge within its node budget.

    Attributes
    ----------
    result : QuadratureResult or None
        Best estimate reached before the budget ran out.
    """

    def __init__(self, message: str, result=None):
        super().__init__(message)
        self.result = result


class RecurrencePivotError(HuaPickrellError, ZeroDivisionError):
    """The leading coefficient of a recurrence vanished during propagation."""


class ConditioningWarning(UserWarning):
    """A computation is numerically ill-conditioned in double precision."""


class AcceptanceRateWarning(UserWarning):
    """An MCMC chain ended with an acceptance rate outside (0.1, 0.6)."""
