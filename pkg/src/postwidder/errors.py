"""Exception hierarchy shared by all modules."""


class PostWidderError(Exception):
    """Base class for every error raised by this package."""


class DomainError(PostWidderError, ValueError):
    """An argument lies outside the domain of the requested operation."""


class DivergenceError(PostWidderError, ArithmeticError):
    """The operator integral diverges (n <= A*x for growth constant A)."""


class BudgetError(PostWidderError, RuntimeError):
    """A series or refinement budget was exhausted before convergence.

    ``partial`` carries the best value obtained so far (or None).
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class SpecParseError(PostWidderError, ValueError):
    """Malformed function specification string."""

    def __init__(self, message, text="", position=0):
        super().__init__(f"{message} at position {position} in {text!r}")
        self.text = text
        self.position = position
