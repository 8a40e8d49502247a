"""Module for loading example systems and filters."""
import os

from canreal.io import load_document
from canreal.linear_systems import ImpulseResponse, LinearSystem
from canreal.nerode_oracle import FiniteSystem
from canreal.realization import FiniteMemoryFilter

_SYSTEMS_DIR = os.path.abspath(os.path.join(os.path.dirname(__file__), "../example-systems"))


def example_path(name: str) -> str:
    """
    Path of an example document.

    Parameters
    ----------
    name : str
        File name without the .json extension, e.g. "scalar_half" or "malformed".

    Returns
    -------
    str
    """
    return os.path.join(_SYSTEMS_DIR, f"{name}.json")


def _load(name: str):
    return load_document(example_path(name))[1]


def system_scalar_half() -> LinearSystem:
    """
    Returns the scalar system x_t = 0.5 x_{t-1} + z_t, y_t = x_t.

    Returns
    -------
    LinearSystem
    """
    return _load("scalar_half")


def system_identity() -> LinearSystem:
    """
    Returns a two-dimensional system with the identity as state matrix. It lacks the echo state
    property.

    Returns
    -------
    LinearSystem
    """
    return _load("identity")


def system_shift_01() -> LinearSystem:
    """
    Returns the shift-register realization of the filter (0, 1), which is reachable but not
    observable. Its canonical realization is one-dimensional and memoryless.

    Returns
    -------
    LinearSystem
    """
    return _load("shift_01")


def system_diag_example() -> LinearSystem:
    """
    Returns the system A = diag(0.5, 0.3), C = (1, 0), W = (1, 1), whose reachable subspace is
    one-dimensional. It reduces to the scalar system (0.5, 1, 1).

    Returns
    -------
    LinearSystem
    """
    return _load("diag_example")


def system_canonical() -> LinearSystem:
    """
    Returns the canonical system A = diag(0.5, 0.3), C = (1, 1), W = (1, 1).

    Returns
    -------
    LinearSystem
    """
    return _load("canonical")


def filter_2m13() -> FiniteMemoryFilter:
    """Returns the filter with coefficients (2, -1, 3), past to present; its Hankel rank is 3."""
    return _load("filter_2m13")


def filter_0001() -> FiniteMemoryFilter:
    """Returns the memoryless filter (0, 0, 0, 1) written with memory 4."""
    return _load("filter_0001")


def filter_zero() -> FiniteMemoryFilter:
    """Returns the zero filter with memory 3."""
    return _load("zero_filter")


def impulse_geometric() -> ImpulseResponse:
    """
    Returns the kernel (1, 0.5, 0.25, ...) of the scalar system `system_scalar_half`, given
    explicitly for lags 0 to 30 with the exact tail bound 2^-30.

    Returns
    -------
    ImpulseResponse
    """
    return _load("geometric_impulse")


def finite_contracting() -> FiniteSystem:
    """
    Returns a canonical finite system with four states that remember the last two binary
    inputs and output their exclusive or.

    Returns
    -------
    FiniteSystem
    """
    return _load("contracting_finite")


def finite_permutation() -> FiniteSystem:
    """
    Returns a three-state system in which every input permutes the states. It lacks the echo
    state property.

    Returns
    -------
    FiniteSystem
    """
    return _load("permutation_finite")


def finite_cloned() -> FiniteSystem:
    """
    Returns a three-state system in which state 2 is a clone of state 0, with the same outputs
    and successors, so that it reduces to two states.

    Returns
    -------
    FiniteSystem
    """
    return _load("cloned_finite")
