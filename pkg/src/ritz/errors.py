"""Exception hierarchy.  ``category`` is what the CLI prints on failure."""


class RitzError(Exception):
    category = "error"


class ConfigurationError(RitzError, ValueError):
    category = "configuration"


class ContextMismatchError(RitzError, ValueError):
    category = "precision-context"


class DomainError(RitzError, ValueError):
    category = "domain"


class PotentialParseError(RitzError, ValueError):
    category = "parse"

    def __init__(self, message: str, text: str, position: int):
        self.text = text
        self.position = position
        super().__init__(f"{message} at position {position}: {text!r}")


class UnsupportedPotentialError(RitzError, ValueError):
    category = "unsupported-potential"


class BasisSpecError(RitzError, ValueError):
    category = "basis-spec"


class AssemblyError(RitzError):
    category = "assembly"


class QuadratureError(RitzError):
    category = "quadrature"


class ConvergenceError(RitzError):
    category = "convergence"


class OverlapNotPositiveDefinite(RitzError):
    """Cholesky of the overlap matrix hit a nonpositive pivot."""

    category = "overlap-not-positive-definite"

    def __init__(self, pivot_index: int, pivot, digits: int):
        self.pivot_index = pivot_index
        self.pivot = pivot
        self.digits = digits
        super().__init__(
            f"overlap pivot {pivot_index} is nonpositive at {digits} digits; "
            f"retry with at least {2 * digits} digits"
        )


class PrecisionExhaustedError(RitzError):
    category = "precision-exhausted"

    def __init__(self, message: str, condition_estimate=None, digits: int | None = None):
        self.condition_estimate = condition_estimate
        self.digits = digits
        super().__init__(message)


class UnknownReferenceError(RitzError, KeyError):
    category = "reference"
