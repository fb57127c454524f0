class DomainError(ValueError):
    """Input outside the domain of an operation (invalid shape, violated hypothesis)."""


class HypothesisError(DomainError):
    """A theorem hypothesis does not hold; ``margin`` is its signed slack (negative = violated)."""

    def __init__(self, message: str, margin: float):
        super().__init__(message)
        self.margin = margin


class PreconditionError(DomainError):
    pass


class ConvergenceError(RuntimeError):
    """Iterative solver gave up; ``partial`` carries whatever was computed."""

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial
