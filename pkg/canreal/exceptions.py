"""Exceptions raised by canreal."""

from typing import Any, Optional


class CanrealError(Exception):
    """Base class of all errors raised by canreal."""


class EchoStatePropertyError(CanrealError, ValueError):
    """The operation requires the echo state property, which the system does not have.

    Parameters
    ----------
    message : str
        Human readable description.
    witness : Any, optional
        Spectral certificate of a linear system or a cycle of the distinct-pair graph of
        a finite system.
    """

    def __init__(self, message: str, witness: Optional[Any] = None):
        super().__init__(message)
        self.witness = witness


class EigenSolverError(CanrealError, ArithmeticError):
    """An eigenvalue or singular value computation did not converge."""


class NoContractionError(CanrealError, ArithmeticError):
    """No power of the state matrix with operator norm below one was found."""


class NotCanonicalError(CanrealError, ValueError):
    """A system that must be canonical is not strongly reachable and observable."""


class NoIsomorphismError(CanrealError, ValueError):
    """Two systems are not isomorphic, usually because their filters differ."""


class SingularMapError(CanrealError, ValueError):
    """A map that must be invertible is singular."""


class InfeasibleRequestError(CanrealError, ValueError):
    """The requested accuracy cannot be achieved.

    Parameters
    ----------
    message : str
        Human readable description.
    floor : float
        The smallest achievable value of the requested quantity.
    """

    def __init__(self, message: str, floor: float):
        super().__init__(message)
        self.floor = floor


class DocumentParseError(CanrealError, ValueError):
    """An input document could not be parsed."""


class InternalConsistencyError(CanrealError, RuntimeError):
    """A construction that is well defined in theory turned out not to be."""


class OperationCancelledError(CanrealError):
    """A cooperative cancellation token was triggered."""
