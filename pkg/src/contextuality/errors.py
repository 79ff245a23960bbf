"""Exception types shared across the package."""


class ContextualityError(Exception):
    """Base class for all package-specific errors."""


class InvalidInput(ContextualityError):
    """Malformed or dimensionally inconsistent input."""


class NonCommuting(ContextualityError):
    """Operation requires a commuting pair of operators."""


class ClosureTooLarge(ContextualityError):
    """Closure of the seed set exceeded the configured cap."""


class ClosureViolation(ContextualityError):
    """Label set is not closed under sums of commuting labels."""


class DegreeError(ContextualityError):
    """Chain or cochain has the wrong degree for this operation."""


class NotClosed(ContextualityError):
    """Sub-label set is not closed under commuting sums within itself."""


class InconsistentStateData(ContextualityError):
    """Declared eigenvalue exponents contradict the operator algebra."""


class NotACycle(ContextualityError):
    """A 2-chain with nonzero boundary was passed where a cycle is required."""


class NotASymmetry(ContextualityError):
    """Transformation does not preserve the label set (up to phases)."""


class BudgetExceeded(ContextualityError):
    """Search stopped at its budget without a conclusive answer."""


class QTooLarge(ContextualityError):
    """Quotient group exceeds the configured size cap."""


class NoSuchN(ContextualityError):
    """No edge-fixing group element realizes the requested phase cochain."""


class NotACochainSolution(ContextualityError):
    """Proposed cochain fails the defining coboundary equation."""


class BackendMismatch(ContextualityError):
    """Simulation backend cannot handle the requested measurement."""
