"""Exception hierarchy shared across the package."""


class SymqaError(Exception):
    """Base class for all package errors."""


class ArgumentError(SymqaError, ValueError):
    """An argument is out of range or has the wrong shape."""


class ContractError(SymqaError):
    """An operation precondition on operator structure does not hold."""


class NumericalError(SymqaError):
    """A computed quantity violates a numerical tolerance."""


class IntegrationError(NumericalError):
    """Time integration failed or produced an invalid state.

    ``time`` carries the schedule time (ns) at which the failure was detected.
    """

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class AmbiguityError(SymqaError):
    """The problem ground state is degenerate across symmetry sectors."""
