"""State-space realization of filters given by convolution kernels.

Finite-memory filters are realized on a shift register and then reduced; l1 kernels are
truncated to the shortest finite-memory filter within a given error budget first.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict

import numpy as np
import scipy.linalg

from canreal.exceptions import InfeasibleRequestError
from canreal.linear_systems import ImpulseResponse, LinearSystem
from canreal.reduction import ReducedRealization, reduce
from canreal.utils import DEFAULT_TOL, frozen_array, matrix_rank

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class FiniteMemoryFilter:
    """Convolution filter with finitely many nonzero coefficients.

    Parameters
    ----------
    psi : array-like
        Coefficients (Psi_{-N+1}, ..., Psi_0), past to present. An empty kernel is the zero
        filter.
    """

    psi: np.ndarray

    def __post_init__(self):
        psi = frozen_array(self.psi) if len(self.psi) > 0 else frozen_array([])
        if psi.ndim != 1:
            raise ValueError(f"Filter coefficients must form a flat list, got shape {psi.shape}")
        if not np.all(np.isfinite(psi)):
            raise ValueError("Filter coefficients must be finite")
        object.__setattr__(self, "psi", psi)

    @property
    def memory(self) -> int:
        """Memory length N."""
        return len(self.psi)

    def to_impulse_response(self) -> ImpulseResponse:
        """Kernel in present-to-past order with a zero tail bound."""
        if self.memory == 0:
            return ImpulseResponse([0.0], 0.0)
        return ImpulseResponse(self.psi[::-1], 0.0)

    def to_dict(self) -> Dict[str, Any]:
        """Serialize as {"psi": [...]}, past to present."""
        return {"psi": self.psi.tolist()}

    @classmethod
    def from_dict(cls, document: Dict[str, Any]) -> "FiniteMemoryFilter":
        """Inverse of `to_dict`."""
        if "psi" not in document:
            raise ValueError("Filter document is missing key 'psi'")
        return cls(document["psi"])


@dataclass(frozen=True)
class ApproximateRealization:
    """Minimal realization of a truncated kernel.

    Parameters
    ----------
    realization : ReducedRealization
        Minimal realization of the kept prefix.
    truncation_error : float
        Certified l1 mass of the dropped coefficients, tail bound included. It bounds the
        output error for inputs of sup norm one.
    cut : int
        Number of kept coefficients.
    """

    realization: ReducedRealization
    truncation_error: float
    cut: int

    def to_dict(self) -> Dict[str, Any]:
        """Structured representation."""
        return {
            "realization": self.realization.to_dict(),
            "truncation_error": self.truncation_error,
            "cut": self.cut,
        }


def shift_realization(f: FiniteMemoryFilter) -> LinearSystem:
    """
    Shift-register realization of a finite-memory filter.

    A is the nilpotent upper shift, C = e_N and W = (Psi_{-N+1}, ..., Psi_0), so that
    W A^j C = Psi_{-j}.

    Parameters
    ----------
    f : FiniteMemoryFilter
        Filter to realize.

    Returns
    -------
    LinearSystem
        The realization, of dimension 0 for the empty kernel.
    """
    n = f.memory
    if n == 0:
        return LinearSystem.zero()
    input_vector = np.zeros(n)
    input_vector[-1] = 1.0
    return LinearSystem(np.eye(n, k=1), input_vector, f.psi)


def minimal_realization(f: FiniteMemoryFilter, tol: float = DEFAULT_TOL) -> ReducedRealization:
    """
    Canonical realization of a finite-memory filter by reducing its shift realization.

    Parameters
    ----------
    f : FiniteMemoryFilter
        Filter to realize.
    tol : float (default = 1e-9)
        Relative rank tolerance.

    Returns
    -------
    ReducedRealization
        Its dimension equals `hankel_rank(f, tol)`.
    """
    return reduce(shift_realization(f), tol)


def hankel_matrix(f: FiniteMemoryFilter) -> np.ndarray:
    """
    N x N Hankel matrix H[i, j] = Psi_{-(i+j)}, zero where i + j >= N.

    Parameters
    ----------
    f : FiniteMemoryFilter
        Filter.

    Returns
    -------
    np.ndarray
    """
    if f.memory == 0:
        return np.zeros((0, 0))
    return scipy.linalg.hankel(f.psi[::-1])


def hankel_rank(f: FiniteMemoryFilter, tol: float = DEFAULT_TOL) -> int:
    """Numerical rank of `hankel_matrix(f)`, the dimension of any canonical realization."""
    if f.memory == 0:
        return 0
    return matrix_rank(hankel_matrix(f), tol)


def approximate_realization(
    psi: ImpulseResponse, eps: float, tol: float = DEFAULT_TOL
) -> ApproximateRealization:
    """
    Realize an l1 kernel up to an output error of eps on inputs of sup norm one.

    The kernel is cut after the shortest prefix whose dropped mass, the coefficients beyond the
    cut plus the tail bound, is at most eps.

    Parameters
    ----------
    psi : ImpulseResponse
        Kernel with a certified tail bound.
    eps : float
        Error budget.
    tol : float (default = 1e-9)
        Relative rank tolerance of the minimal realization.

    Returns
    -------
    ApproximateRealization

    Raises
    ------
    InfeasibleRequestError
        If the tail bound alone is at least eps.
    """
    if eps <= 0:
        raise ValueError(f"Error budget must be positive, not {eps}")
    if psi.tail_bound >= eps:
        raise InfeasibleRequestError(
            f"Error budget {eps:g} is not above the certified tail bound {psi.tail_bound:g}; "
            "recompute the impulse response with a longer horizon",
            floor=psi.tail_bound,
        )
    # dropped[m] is the mass lost when keeping the first m coefficients
    dropped = np.append(np.cumsum(np.abs(psi.coefficients)[::-1])[::-1], 0.0) + psi.tail_bound
    cut = int(np.argmax(dropped <= eps))
    kept = FiniteMemoryFilter(psi.coefficients[:cut][::-1])
    realization = minimal_realization(kept, tol)
    logger.info(
        "Kept %d of %d coefficients, realized in dimension %d with truncation error %.3g",
        cut,
        psi.horizon + 1,
        realization.dim,
        dropped[cut],
    )
    return ApproximateRealization(realization, float(dropped[cut]), cut)
