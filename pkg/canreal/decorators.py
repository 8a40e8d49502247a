import functools
import inspect

from canreal.exceptions import EchoStatePropertyError
from canreal.utils import DEFAULT_MARGIN


def require_esp(func):
    """
    Check that the linear system passed to the decorated function has the echo state property.

    The system needs to be the first argument of the decorated function. The check uses the
    `margin` argument of the call, given by position or by keyword, and falls back to the
    default of the decorated function and then to the package default.

    Raises
    ------
    EchoStatePropertyError
        If the spectral radius of the state matrix is not certified to be below one.
    """

    signature = inspect.signature(func)

    @functools.wraps(func)
    def wrapper_require_esp(system, *args, **kwargs):
        bound = signature.bind(system, *args, **kwargs)
        bound.apply_defaults()
        margin = bound.arguments.get("margin", DEFAULT_MARGIN)
        certificate = system.esp_certificate(margin=margin)
        if not certificate.holds:
            raise EchoStatePropertyError(
                f"`{func.__name__}` requires the echo state property, but the spectral radius "
                f"is {certificate.rho:.12g} ({certificate.status}). "
                "Rescale the state matrix so that its spectral radius is below one.",
                witness=certificate,
            )
        return func(system, *args, **kwargs)

    return wrapper_require_esp


def require_esp_finite(func):
    """
    Check that the finite system passed to the decorated function has the echo state property.

    The system needs to be the first argument of the decorated function.

    Raises
    ------
    EchoStatePropertyError
        If the distinct-pair graph of the system contains a cycle.
    """

    @functools.wraps(func)
    def wrapper_require_esp_finite(system, *args, **kwargs):
        cycle = system.esp_witness_cycle()
        if cycle is not None:
            raise EchoStatePropertyError(
                f"`{func.__name__}` requires the echo state property, but the distinct-pair "
                f"graph has the cycle {cycle}.",
                witness=cycle,
            )
        return func(system, *args, **kwargs)

    return wrapper_require_esp_finite
