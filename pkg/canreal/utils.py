"""Utils package."""

import threading
from typing import Optional, Tuple

import numpy as np
import scipy.linalg

from canreal.exceptions import EigenSolverError, OperationCancelledError

DEFAULT_TOL = 1e-9
DEFAULT_MARGIN = 1e-8
DEFAULT_HORIZON = 200

# Singular values at or below this value are zero regardless of the relative tolerance.
ABSOLUTE_RANK_FLOOR = 1e-12


class CancellationToken:
    """Cooperative cancellation flag shared between a caller and a long computation.

    The computation polls the token with `raise_if_cancelled`; any thread may call `cancel`.
    """

    def __init__(self):
        self._event = threading.Event()

    def cancel(self) -> None:
        """Request cancellation."""
        self._event.set()

    @property
    def cancelled(self) -> bool:
        """Whether cancellation was requested."""
        return self._event.is_set()

    def raise_if_cancelled(self) -> None:
        """Raise `OperationCancelledError` if cancellation was requested.

        Raises
        ------
        OperationCancelledError
            If `cancel` has been called.
        """
        if self._event.is_set():
            raise OperationCancelledError("Operation cancelled")


def check_cancelled(cancel_token: Optional[CancellationToken]) -> None:
    """Poll an optional cancellation token."""
    if cancel_token is not None:
        cancel_token.raise_if_cancelled()


def rank_threshold(singular_values: np.ndarray, tol: float) -> float:
    """
    Return the threshold below which singular values are treated as zero.

    The threshold is relative to the largest singular value with an absolute floor.

    Parameters
    ----------
    singular_values : np.ndarray
        Singular values in descending order.
    tol : float
        Relative tolerance.

    Returns
    -------
    float
    """
    if tol <= 0:
        raise ValueError(f"Tolerance must be positive, not {tol}")
    sigma_max = float(singular_values[0]) if len(singular_values) > 0 else 0.0
    return max(tol * sigma_max, ABSOLUTE_RANK_FLOOR)


def numerical_rank(singular_values: np.ndarray, tol: float) -> int:
    """
    Return the number of singular values above the rank threshold.

    Parameters
    ----------
    singular_values : np.ndarray
        Singular values in descending order.
    tol : float
        Relative tolerance.

    Returns
    -------
    int
    """
    if len(singular_values) == 0:
        return 0
    return int(np.sum(singular_values > rank_threshold(singular_values, tol)))


def svd(matrix: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Full singular value decomposition that tolerates empty matrices.

    Parameters
    ----------
    matrix : np.ndarray
        Matrix of shape (m, n).

    Returns
    -------
    Tuple[np.ndarray, np.ndarray, np.ndarray]
        U of shape (m, m), singular values of length min(m, n) and V^T of shape (n, n).

    Raises
    ------
    EigenSolverError
        If the decomposition does not converge.
    """
    rows, cols = matrix.shape
    if rows == 0 or cols == 0:
        return np.eye(rows), np.zeros(0), np.eye(cols)
    try:
        return scipy.linalg.svd(matrix, full_matrices=True, lapack_driver="gesvd")
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise EigenSolverError(f"Singular value decomposition failed: {exc}") from exc


def matrix_rank(matrix: np.ndarray, tol: float = DEFAULT_TOL) -> int:
    """
    Numerical rank of a matrix under the package-wide tolerance policy.

    Parameters
    ----------
    matrix : np.ndarray
        Input matrix.
    tol : float (default = 1e-9)
        Relative tolerance.

    Returns
    -------
    int
    """
    _, singular_values, _ = svd(np.atleast_2d(matrix))
    return numerical_rank(singular_values, tol)


def normalize_signs(basis: np.ndarray) -> np.ndarray:
    """
    Flip columns so that the first non-negligible coordinate of each column is positive.

    Parameters
    ----------
    basis : np.ndarray
        Matrix whose columns are basis vectors.

    Returns
    -------
    np.ndarray
        Copy of basis with deterministic column signs.
    """
    basis = np.array(basis, dtype=float, copy=True)
    for j in range(basis.shape[1]):
        column = basis[:, j]
        significant = np.flatnonzero(np.abs(column) > ABSOLUTE_RANK_FLOOR)
        if len(significant) > 0 and column[significant[0]] < 0:
            basis[:, j] = -column
    return basis


def frozen_array(values, dtype=float, ndim: Optional[int] = None) -> np.ndarray:
    """
    Copy values into a read-only numpy array.

    Parameters
    ----------
    values : array-like
        Values to copy.
    dtype : type (default = float)
        Data type of the result.
    ndim : int, optional
        Required number of dimensions.

    Returns
    -------
    np.ndarray

    Raises
    ------
    ValueError
        If the dimensionality does not match.
    """
    array = np.array(values, dtype=dtype, copy=True)
    if ndim is not None and array.ndim != ndim:
        raise ValueError(f"Expected an array with {ndim} dimensions, got shape {array.shape}")
    array.setflags(write=False)
    return array
