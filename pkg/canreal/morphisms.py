"""Morphisms and isomorphisms between linear systems."""

import logging
import warnings
from dataclasses import dataclass
from typing import Any, Dict, List

import numpy as np
import scipy.linalg

from canreal.exceptions import NoIsomorphismError, NotCanonicalError, SingularMapError
from canreal.linear_systems import LinearSystem, markov_parameters
from canreal.subspaces import controllability_matrix, is_canonical
from canreal.utils import DEFAULT_MARGIN, DEFAULT_TOL, frozen_array

logger = logging.getLogger(__name__)

# Condition number beyond which residual tolerances stop being meaningful in double precision.
CONDITION_WARNING_LIMIT = 1e12


@dataclass(frozen=True, eq=False)
class LinearMap:
    """Linear map between state spaces given by a matrix of shape (n2, n1).

    Parameters
    ----------
    matrix : array-like
        Matrix with finite entries.
    """

    matrix: np.ndarray

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=float)
        if matrix.size == 0:
            matrix = matrix.reshape(0, 0)
        if matrix.ndim != 2:
            raise ValueError(f"A linear map needs a matrix, got shape {matrix.shape}")
        if not np.all(np.isfinite(matrix)):
            raise ValueError("Linear map entries must be finite")
        object.__setattr__(self, "matrix", frozen_array(matrix))

    @classmethod
    def identity(cls, n: int) -> "LinearMap":
        """Identity on R^n."""
        return cls(np.eye(n))

    @property
    def shape(self):
        """Shape (n2, n1) of the matrix."""
        return self.matrix.shape

    @property
    def condition_number(self) -> float:
        """2-norm condition number; infinite for singular or non-square maps."""
        rows, cols = self.shape
        if rows != cols:
            return float("inf")
        if rows == 0:
            return 1.0
        return float(np.linalg.cond(self.matrix))

    def inverse(self) -> "LinearMap":
        """
        Inverse map.

        Raises
        ------
        SingularMapError
            If the map is not invertible in double precision.
        """
        self._require_invertible()
        return LinearMap(scipy.linalg.inv(self.matrix))

    def _require_invertible(self) -> float:
        condition = self.condition_number
        if not np.isfinite(condition) or condition * np.finfo(float).eps >= 1:
            raise SingularMapError(
                f"Map of shape {self.shape} is not invertible (condition number {condition:.3g})"
            )
        return condition

    def to_list(self) -> List[List[float]]:
        """Serialize as a plain matrix."""
        return self.matrix.tolist()


@dataclass(frozen=True)
class MorphismReport:
    """Residuals of the morphism equations f A1 = A2 f, f C1 = C2 and W1 = W2 f.

    A residual passes when it does not exceed tol * max(1, ||f||).
    """

    state_residual: float
    input_residual: float
    readout_residual: float
    tol: float
    scale: float = 1.0

    @property
    def passed(self) -> bool:
        """Whether all three residuals are within tolerance."""
        limit = self.tol * self.scale
        return max(self.state_residual, self.input_residual, self.readout_residual) <= limit

    def to_dict(self) -> Dict[str, Any]:
        """Structured representation."""
        return {
            "passed": self.passed,
            "state_residual": self.state_residual,
            "input_residual": self.input_residual,
            "readout_residual": self.readout_residual,
            "tol": self.tol,
        }


def gl_action(B: LinearMap, system: LinearSystem) -> LinearSystem:  # pylint: disable=invalid-name
    """
    Action of an invertible change of coordinates: (B A B^-1, B C, W B^-1).

    Parameters
    ----------
    B : LinearMap
        Invertible map of R^N.
    system : LinearSystem
        System of dimension N.

    Returns
    -------
    LinearSystem
        The transformed system; the system itself when B is the identity.

    Raises
    ------
    ValueError
        If B is not N x N.
    SingularMapError
        If B is singular.
    """
    n = system.N
    if B.shape != (n, n):
        raise ValueError(f"Map of shape {B.shape} cannot act on a system of dimension {n}")
    if np.array_equal(B.matrix, np.eye(n)):
        return system
    condition = B._require_invertible()  # pylint: disable=protected-access
    if condition > CONDITION_WARNING_LIMIT:
        message = f"Change of coordinates is ill-conditioned (condition number {condition:.3g})"
        logger.warning(message)
        warnings.warn(message, RuntimeWarning)
    matrix = B.matrix
    lu_piv = scipy.linalg.lu_factor(matrix.T)
    # X B = Y is solved as B^T X^T = Y^T
    state = scipy.linalg.lu_solve(lu_piv, (matrix @ system.A).T).T
    readout = scipy.linalg.lu_solve(lu_piv, system.W)
    return LinearSystem(state, matrix @ system.C, readout)


def conjugate_system(f: LinearMap, system: LinearSystem) -> LinearSystem:
    """
    System (f A f^-1, f C, W f^-1) transported along a bijection f.

    f is a system isomorphism from `system` onto the result. Same as `gl_action`.
    """
    return gl_action(f, system)


def check_morphism(
    f: LinearMap, first: LinearSystem, second: LinearSystem, tol: float = DEFAULT_TOL
) -> MorphismReport:
    """
    Check the system equivariance and readout invariance equations of a linear map.

    Parameters
    ----------
    f : LinearMap
        Map from the state space of `first` to the state space of `second`.
    first : LinearSystem
        Source system.
    second : LinearSystem
        Target system.
    tol : float (default = 1e-9)
        Tolerance, relative to max(1, ||f||).

    Returns
    -------
    MorphismReport

    Raises
    ------
    ValueError
        If the shape of f does not match the two systems.
    """
    if f.shape != (second.N, first.N):
        raise ValueError(
            f"Map of shape {f.shape} does not go from dimension {first.N} to {second.N}"
        )
    matrix = f.matrix
    scale = max(float(np.linalg.norm(matrix, 2)) if matrix.size else 0.0, 1.0)
    return MorphismReport(
        state_residual=float(np.linalg.norm(matrix @ first.A - second.A @ matrix)),
        input_residual=float(np.linalg.norm(matrix @ first.C - second.C)),
        readout_residual=float(np.linalg.norm(first.W - second.W @ matrix)),
        tol=tol,
        scale=scale,
    )


def find_isomorphism(
    first: LinearSystem,
    second: LinearSystem,
    tol: float = DEFAULT_TOL,
    margin: float = DEFAULT_MARGIN,
) -> LinearMap:
    """
    Recover the isomorphism between two canonical realizations of the same filter.

    The map B satisfies B R1 = R2 for the controllability matrices R1 and R2, which are
    invertible by strong reachability.

    Parameters
    ----------
    first : LinearSystem
        Canonical system.
    second : LinearSystem
        Canonical system.
    tol : float (default = 1e-9)
        Rank and comparison tolerance.
    margin : float (default = 1e-8)
        Margin of the echo state property checks.

    Returns
    -------
    LinearMap

    Raises
    ------
    NotCanonicalError
        If either system is not canonical.
    NoIsomorphismError
        If the impulse responses differ over the horizon 2N or the recovered map fails the
        morphism check.
    """
    for label, system in (("first", first), ("second", second)):
        result = is_canonical(system, tol, margin=margin)
        if not result.canonical:
            raise NotCanonicalError(
                f"The {label} system is not canonical (reachable dimension "
                f"{result.reachable_dim} of {system.N}, kernel dimension {result.kernel_dim})"
            )
    if first.N != second.N:
        raise NoIsomorphismError(
            f"Canonical dimensions differ ({first.N} and {second.N}), so the filters differ"
        )
    n = first.N
    horizon = 2 * n
    reference = markov_parameters(first, horizon)
    gap = float(np.max(np.abs(reference - markov_parameters(second, horizon))))
    if gap > tol * max(float(np.max(np.abs(reference))), 1.0):
        raise NoIsomorphismError(f"Impulse responses differ by {gap:.3g} within lag {horizon}")
    if n == 0:
        return LinearMap.identity(0)

    first_krylov = controllability_matrix(first)
    second_krylov = controllability_matrix(second)
    B = LinearMap(scipy.linalg.solve(first_krylov.T, second_krylov.T).T)  # pylint: disable=C0103
    report = check_morphism(B, first, second, 10 * tol)
    if not report.passed:
        raise NoIsomorphismError(
            f"Recovered map fails the morphism equations: {report.to_dict()}"
        )
    logger.debug("Isomorphism found with condition number %.3g", B.condition_number)
    return B
