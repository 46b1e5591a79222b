"""Exception types shared across the package."""


class ChoreSwapError(Exception):
    """Base class for all package errors."""


class ParseError(ChoreSwapError):
    """Malformed input file; carries a 1-based line and column."""

    def __init__(self, message, line=None, col=None):
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", col {col}" if col is not None else "") + ")"
        super().__init__(message + loc)
        self.line = line
        self.col = col


class MalformedHeader(ParseError):
    pass


class BadRational(ParseError):
    pass


class NonPositiveDisutility(ParseError):
    pass


class RowCountMismatch(ParseError):
    pass


class AgentOutOfRange(ChoreSwapError):
    pass


class ChoreOutOfRange(ChoreSwapError):
    pass


class InvalidDistribution(ChoreSwapError):
    pass


class IncompleteAllocation(ChoreSwapError):
    pass


class PriceLengthMismatch(ChoreSwapError):
    pass


class EmptyBundle(ChoreSwapError):
    def __init__(self, agent):
        super().__init__(f"agent {agent + 1} has an empty bundle")
        self.agent = agent


class ChoreNotHeld(ChoreSwapError):
    pass


class SelfSwap(ChoreSwapError):
    pass


class CertificateInvalid(ChoreSwapError):
    def __init__(self, violations):
        super().__init__(
            "certificate invalid: " + "; ".join(str(v) for v in violations)
        )
        self.violations = violations


class PostconditionViolated(ChoreSwapError):
    """An always-on invariant monitor fired. Carries the full trace."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class BudgetExceeded(ChoreSwapError):
    pass


class NotBivalued(ChoreSwapError):
    pass


class RhoNotLessThanK(ChoreSwapError):
    pass


class TooManyChores(ChoreSwapError):
    pass


class RoundedInputInvalid(ChoreSwapError):
    def __init__(self, violations):
        super().__init__(
            "rounded input invalid: " + "; ".join(str(v) for v in violations)
        )
        self.violations = violations


class CouplingUnsatisfiable(ChoreSwapError):
    pass


class TraceMismatch(ChoreSwapError):
    pass


class GenerationBudgetExceeded(ChoreSwapError):
    pass


class InvariantViolation(ChoreSwapError):
    pass
