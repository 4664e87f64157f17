"""Exception hierarchy shared by every module of the package."""


class PsidoError(Exception):
    """Base class for all errors raised by toroidal_psido."""


class AliasingError(PsidoError, ValueError):
    """Grid too coarse for the requested frequency truncation."""


class InvalidWeightError(PsidoError, ValueError):
    """A weight function took a nonpositive value or failed its growth axioms."""


class OutOfWindowError(PsidoError, IndexError):
    """A tabulated quantity was requested outside its stored frequency window."""


class PreconditionError(PsidoError, ValueError):
    """An operation was called with inputs violating its documented hypotheses."""


class SingularSymbolError(PsidoError, ZeroDivisionError):
    """Division by a symbol value too close to zero."""


class NotEllipticError(PreconditionError):
    """The symbol failed the (strong) M-ellipticity scan."""


class GardingFailure(PsidoError):
    """No admissible pair of Garding constants could be found."""


class SolverFailure(PsidoError):
    """A linear solve was singular or did not converge."""

    def __init__(self, message, condition=None, partial=None):
        super().__init__(message)
        self.condition = condition
        self.partial = partial
