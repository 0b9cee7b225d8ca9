"""Exception types shared across the toolkit."""


class ValidationError(ValueError):
    """Input violates a documented precondition or type invariant."""


class SchemaError(ValidationError):
    """JSON input does not match the documented schema.

    ``location`` is a path such as ``elements[2][0][1]`` pointing at the
    offending value.
    """

    def __init__(self, message: str, location: str = ""):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


class DomainError(ValueError):
    """A scalar function was applied outside its domain.

    Carries the offending (post-clamp) eigenvalue.
    """

    def __init__(self, message: str, eigenvalue: float):
        self.eigenvalue = eigenvalue
        super().__init__(f"{message} (eigenvalue {eigenvalue!r})")


class ZeroProbabilityOutcomeError(ValueError):
    """Retrodiction conditioned on an outcome of (numerically) zero probability."""


class DegenerateSuperpositionError(ValidationError):
    """The requested superposition has vanishing norm."""


class ConsistencyError(RuntimeError):
    """An internal identity failed beyond tolerance; signals a broken invariant upstream."""
