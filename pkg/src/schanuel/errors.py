"""Exceptions raised by schanuel."""


class SchanuelError(Exception):
    """Base class for every error raised by the package."""


class TermSyntaxError(SchanuelError, ValueError):
    """Raised when term text does not conform to the grammar.

    Parameters
    ----------
    position: int
        0-based character offset of the offending token.
    message: str
        What was expected at that position.
    """
    def __init__(self, position: int, message: str):
        super().__init__(f"Syntax error at position {position}: {message}")
        self.position = position


class LogOfZeroError(SchanuelError, ValueError):
    """Raised when a Log node's argument normalizes to Rational 0."""


class UnknownConstantError(SchanuelError, KeyError):
    """Raised when an algebraic constant name is not registered."""


class DegreeCapError(SchanuelError, ValueError):
    """Raised when an algebraic result would exceed the degree cap."""


class ReduciblePolynomialError(SchanuelError, ValueError):
    """Raised when a polynomial is reducible and no factor can be singled out."""
    def __init__(self, factors):
        self.factors = tuple(factors)
        super().__init__(
            f"Polynomial is reducible, factors: {list(self.factors)}")


class NonIsolatingBoxError(SchanuelError, ValueError):
    """Raised when a box does not contain exactly one root."""
    def __init__(self, root_count: int):
        self.root_count = root_count
        super().__init__(
            f"Box must isolate exactly one root, found {root_count}")


class AlgebraicInversionError(SchanuelError, ZeroDivisionError):
    """Raised on inversion of the algebraic number zero."""


class UndefinedLevelError(SchanuelError, ValueError):
    """Raised when a support extraction precondition on tower level fails."""


class PrecisionEscalationError(SchanuelError, ArithmeticError):
    """Raised when an enclosure stays degenerate after the maximum doublings."""


class InsufficientPrecisionError(SchanuelError, ValueError):
    """Raised when relation search is given values at too low a precision."""


class MissingCertificateError(SchanuelError, ValueError):
    """Raised when a rule is fed a premise that is absent or does not match."""


class CoverageError(SchanuelError, ValueError):
    """Raised when a monomial base lacks an independence certificate."""


class UnknownStatusError(SchanuelError, ValueError):
    """Raised when basis selection cannot classify an element."""


class DegenerateWitnessError(SchanuelError, ValueError):
    """Raised when a theorem witness fails the Qbar-independence filter."""


class ObligationError(SchanuelError):
    """Raised when an inference rule rejects a proposed conclusion.

    Parameters
    ----------
    rule: str
        Name of the rule whose check failed.
    reason: str
        The failing obligation.
    """
    def __init__(self, rule: str, reason: str):
        super().__init__(f"{rule}: {reason}")
        self.rule = rule
        self.reason = reason


class BudgetExhaustedError(SchanuelError):
    """Raised when a proof script runs out of its depth budget."""


class TraceFormatError(SchanuelError, ValueError):
    """Raised when a proof trace file cannot be parsed."""
