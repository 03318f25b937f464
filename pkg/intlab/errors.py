"""
Exception hierarchy shared by the solvers and the command-line front end.
"""


class IntlabError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class ConfigError(IntlabError):
    """Malformed or inconsistent run configuration."""

    exit_code = 1


class DomainError(IntlabError):
    """A precondition of an operation is violated."""

    exit_code = 1


class ConvergenceError(IntlabError):
    """An iterative solver did not reach its tolerance."""

    exit_code = 2

    def __init__(self, message, iterations=None, residual=None):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual


class SingularityError(IntlabError):
    """Degenerate determinant, vanishing denominator or pole hit."""

    exit_code = 2


class ToleranceError(IntlabError):
    """A --check comparison exceeded its bound."""

    exit_code = 3

    def __init__(self, quantity, value, bound):
        super().__init__(f"{quantity} = {value:.3e} exceeds tolerance {bound:.1e}")
        self.quantity = quantity
        self.value = value
        self.bound = bound
