"""Reachable subspaces, observability kernels and rank decisions for linear systems."""

import logging
import math
import warnings
from dataclasses import dataclass
from typing import Any, Dict, NamedTuple, Optional

import numpy as np
import scipy.linalg

from canreal.decorators import require_esp
from canreal.linear_systems import LinearSystem
from canreal.utils import (
    ABSOLUTE_RANK_FLOOR,
    DEFAULT_MARGIN,
    DEFAULT_TOL,
    numerical_rank,
    normalize_signs,
    svd,
)

logger = logging.getLogger(__name__)

# Condition estimate of the retained Krylov factor above which the rank is recomputed by
# Arnoldi iteration and flagged.
KRYLOV_CONDITION_LIMIT = 1e8


@dataclass(frozen=True, eq=False)
class Subspace:
    """Subspace of R^N given by an orthonormal basis.

    Parameters
    ----------
    basis : np.ndarray
        Matrix of shape (N, k) with orthonormal columns.
    ambient_dim : int
        Dimension N of the ambient space.
    tol : float (default = 1e-9)
        Rank tolerance used to construct the subspace.
    unreliable_rank : bool (default = False)
        Whether the dimension was decided on an ill-conditioned factorization.
    """

    basis: np.ndarray
    ambient_dim: int
    tol: float = DEFAULT_TOL
    unreliable_rank: bool = False

    def __post_init__(self):
        basis = np.array(self.basis, dtype=float)
        if basis.size == 0:
            basis = np.zeros((self.ambient_dim, 0))
        if basis.ndim != 2 or basis.shape[0] != self.ambient_dim:
            raise ValueError(
                f"Basis of shape {basis.shape} does not fit the ambient dimension "
                f"{self.ambient_dim}"
            )
        if basis.shape[1] > self.ambient_dim:
            raise ValueError("A subspace cannot have more basis vectors than its ambient dimension")
        basis.setflags(write=False)
        object.__setattr__(self, "basis", basis)

    @classmethod
    def zero(cls, n: int, tol: float = DEFAULT_TOL) -> "Subspace":
        """The trivial subspace {0} of R^n."""
        return cls(np.zeros((n, 0)), n, tol)

    @classmethod
    def full(cls, n: int, tol: float = DEFAULT_TOL) -> "Subspace":
        """The whole space R^n with the standard basis."""
        return cls(np.eye(n), n, tol)

    @property
    def dim(self) -> int:
        """Dimension of the subspace."""
        return self.basis.shape[1]

    def project(self, v: np.ndarray) -> np.ndarray:
        """Orthogonal projection of a vector (or the columns of a matrix) onto the subspace."""
        return self.basis @ (self.basis.T @ np.asarray(v, dtype=float))

    def contains(self, v: np.ndarray, tol: Optional[float] = None) -> bool:
        """Whether v lies in the subspace up to a relative distance of 10 * tol."""
        tol = self.tol if tol is None else tol
        v = np.asarray(v, dtype=float)
        distance = np.linalg.norm(v - self.project(v))
        return bool(distance <= 10 * tol * max(np.linalg.norm(v), 1.0))

    def to_dict(self) -> Dict[str, Any]:
        """Serialize as {"ambient_dim": N, "basis": [[...]], "tol": x}."""
        return {"ambient_dim": self.ambient_dim, "basis": self.basis.tolist(), "tol": self.tol}


class CanonicalityResult(NamedTuple):
    """Outcome of the canonicality test."""

    canonical: bool
    reachable_dim: int
    kernel_dim: int
    unreliable_rank: bool = False


def controllability_matrix(system: LinearSystem, depth: Optional[int] = None) -> np.ndarray:
    """
    Krylov matrix (C | AC | ... | A^(depth-1) C).

    Parameters
    ----------
    system : LinearSystem
        Linear system.
    depth : int, optional
        Number of columns, N by default.

    Returns
    -------
    np.ndarray
        Matrix of shape (N, depth).
    """
    depth = system.N if depth is None else depth
    columns = np.zeros((system.N, depth))
    v = system.C
    for i in range(depth):
        columns[:, i] = v
        v = system.A @ v
    return columns


def observability_matrix(system: LinearSystem, depth: Optional[int] = None) -> np.ndarray:
    """
    Stacked rows W, WA, ..., W A^(depth-1).

    Parameters
    ----------
    system : LinearSystem
        Linear system.
    depth : int, optional
        Number of rows, N by default.

    Returns
    -------
    np.ndarray
        Matrix of shape (depth, N).
    """
    depth = system.N if depth is None else depth
    rows = np.zeros((depth, system.N))
    w = system.W
    for i in range(depth):
        rows[i] = w
        w = w @ system.A
    return rows


def column_space(matrix: np.ndarray, tol: float = DEFAULT_TOL) -> Subspace:
    """
    Orthonormal basis of the column space by a rank-revealing SVD.

    Parameters
    ----------
    matrix : np.ndarray
        Matrix of shape (N, m).
    tol : float (default = 1e-9)
        Relative rank tolerance.

    Returns
    -------
    Subspace
    """
    left, singular_values, _ = svd(np.atleast_2d(matrix))
    rank = numerical_rank(singular_values, tol)
    return Subspace(normalize_signs(left[:, :rank]), left.shape[0], tol)


def null_space(matrix: np.ndarray, tol: float = DEFAULT_TOL) -> Subspace:
    """
    Orthonormal basis of the kernel of a matrix by SVD.

    Parameters
    ----------
    matrix : np.ndarray
        Matrix of shape (m, N).
    tol : float (default = 1e-9)
        Relative rank tolerance.

    Returns
    -------
    Subspace
    """
    _, singular_values, right_t = svd(np.atleast_2d(matrix))
    rank = numerical_rank(singular_values, tol)
    return Subspace(normalize_signs(right_t[rank:].T), right_t.shape[0], tol)


def _arnoldi_basis(system: LinearSystem, tol: float) -> np.ndarray:
    """Orthonormal Krylov basis with two passes of Gram-Schmidt per step."""
    scale = max(float(np.linalg.norm(system.A, 2)), 1.0)
    norm_c = float(np.linalg.norm(system.C))
    if norm_c <= ABSOLUTE_RANK_FLOOR:
        return np.zeros((system.N, 0))
    vectors = [system.C / norm_c]
    breakdown = max(tol * scale, ABSOLUTE_RANK_FLOOR)
    while len(vectors) < system.N:
        basis = np.column_stack(vectors)
        w = system.A @ vectors[-1]
        for _ in range(2):
            w = w - basis @ (basis.T @ w)
        norm_w = float(np.linalg.norm(w))
        if norm_w <= breakdown:
            break
        vectors.append(w / norm_w)
    return np.column_stack(vectors)


def reachable_subspace(
    system: LinearSystem, tol: float = DEFAULT_TOL, depth: Optional[int] = None
) -> Subspace:
    """
    Reachable subspace span{C, AC, ..., A^(N-1) C}.

    When the retained singular values of the Krylov matrix span more than
    `KRYLOV_CONDITION_LIMIT`, the basis is recomputed by Arnoldi iteration and the result is
    flagged as `unreliable_rank`.

    Parameters
    ----------
    system : LinearSystem
        Linear system.
    tol : float (default = 1e-9)
        Relative rank tolerance.
    depth : int, optional
        Krylov depth, N by default. By the Cayley-Hamilton theorem larger depths span the same
        subspace.

    Returns
    -------
    Subspace
    """
    krylov = controllability_matrix(system, depth)
    left, singular_values, _ = svd(krylov)
    rank = numerical_rank(singular_values, tol)
    if rank == 0:
        return Subspace.zero(system.N, tol)
    condition = singular_values[0] / singular_values[rank - 1]
    if condition <= KRYLOV_CONDITION_LIMIT:
        return Subspace(normalize_signs(left[:, :rank]), system.N, tol)

    basis = _arnoldi_basis(system, tol)
    message = (
        f"Krylov matrix is ill-conditioned (condition estimate {condition:.3g}); reachable "
        f"dimension {basis.shape[1]} from Arnoldi iteration may be unreliable"
    )
    logger.warning(message)
    warnings.warn(message, RuntimeWarning)
    return Subspace(normalize_signs(basis), system.N, tol, unreliable_rank=True)


def observability_kernel(
    system: LinearSystem, tol: float = DEFAULT_TOL, depth: Optional[int] = None
) -> Subspace:
    """
    Indistinguishability subspace, the intersection of ker(W A^i) for i < depth.

    Parameters
    ----------
    system : LinearSystem
        Linear system.
    tol : float (default = 1e-9)
        Relative rank tolerance.
    depth : int, optional
        Number of stacked rows, N by default.

    Returns
    -------
    Subspace
    """
    if system.N == 0:
        return Subspace.zero(0, tol)
    return null_space(observability_matrix(system, depth), tol)


def intersect(first: Subspace, second: Subspace) -> Subspace:
    """
    Intersection of two subspaces of the same ambient space.

    A vector lies in both subspaces iff it is annihilated by both orthogonal complement
    projectors, so the intersection is the kernel of the stacked projectors.

    Parameters
    ----------
    first : Subspace
        First subspace.
    second : Subspace
        Second subspace.

    Returns
    -------
    Subspace
        The intersection at the larger of the two tolerances.

    Raises
    ------
    ValueError
        If the ambient dimensions differ.
    """
    if first.ambient_dim != second.ambient_dim:
        raise ValueError(
            f"Cannot intersect subspaces of R^{first.ambient_dim} and R^{second.ambient_dim}"
        )
    n = first.ambient_dim
    tol = max(first.tol, second.tol)
    unreliable = first.unreliable_rank or second.unreliable_rank
    if first.dim == 0 or second.dim == 0:
        return Subspace(np.zeros((n, 0)), n, tol, unreliable)
    identity = np.eye(n)
    stacked = np.vstack(
        [identity - first.basis @ first.basis.T, identity - second.basis @ second.basis.T]
    )
    # the complement projectors have unit singular values, so an absolute cut at tol works
    _, singular_values, right_t = svd(stacked)
    rank = int(np.sum(singular_values > max(tol, ABSOLUTE_RANK_FLOOR) * math.sqrt(n)))
    return Subspace(normalize_signs(right_t[rank:].T), n, tol, unreliable)


@require_esp
def is_canonical(
    system: LinearSystem, tol: float = DEFAULT_TOL, margin: float = DEFAULT_MARGIN
) -> CanonicalityResult:
    """
    Test whether a system is strongly reachable and observable.

    Parameters
    ----------
    system : LinearSystem
        System with the echo state property.
    tol : float (default = 1e-9)
        Relative rank tolerance.
    margin : float (default = 1e-8)
        Margin of the echo state property check.

    Returns
    -------
    CanonicalityResult
        Canonical iff the reachable subspace is R^N and the observability kernel is trivial.
    """
    reachable = reachable_subspace(system, tol)
    kernel = observability_kernel(system, tol)
    canonical = reachable.dim == system.N and kernel.dim == 0
    logger.debug(
        "Reachable dimension %d, kernel dimension %d of %d", reachable.dim, kernel.dim, system.N
    )
    return CanonicalityResult(canonical, reachable.dim, kernel.dim, reachable.unreliable_rank)


def principal_angles(first: Subspace, second: Subspace) -> np.ndarray:
    """
    Principal angles between two subspaces in radians, largest first.

    Parameters
    ----------
    first : Subspace
        First subspace.
    second : Subspace
        Second subspace.

    Returns
    -------
    np.ndarray
        min(dim1, dim2) angles; empty if either subspace is trivial.
    """
    if first.ambient_dim != second.ambient_dim:
        raise ValueError("Principal angles need subspaces of the same ambient space")
    if first.dim == 0 or second.dim == 0:
        return np.zeros(0)
    return scipy.linalg.subspace_angles(first.basis, second.basis)


def same_subspace(first: Subspace, second: Subspace, tol: Optional[float] = None) -> bool:
    """
    Whether two subspaces coincide.

    The dimensions must agree and the sine of the largest principal angle must not exceed
    sqrt(tol), the accuracy to which an SVD resolves a subspace perturbed at level tol.

    Parameters
    ----------
    first : Subspace
        First subspace.
    second : Subspace
        Second subspace.
    tol : float, optional
        Tolerance; the larger construction tolerance by default.

    Returns
    -------
    bool
    """
    if first.ambient_dim != second.ambient_dim or first.dim != second.dim:
        return False
    tol = max(first.tol, second.tol) if tol is None else tol
    angles = principal_angles(first, second)
    return bool(len(angles) == 0 or np.sin(np.max(angles)) <= math.sqrt(tol))


def eigenvector_reachability_test(
    system: LinearSystem, tol: float = DEFAULT_TOL
) -> Optional[bool]:
    """
    Reachability criterion for state matrices with distinct eigenvalues.

    With A = V diag(lambda) V^-1 and distinct eigenvalues, the system is reachable iff every
    coordinate of V^-1 C is nonzero.

    Parameters
    ----------
    system : LinearSystem
        Linear system.
    tol : float (default = 1e-9)
        Relative tolerance for distinct eigenvalues and nonzero coordinates.

    Returns
    -------
    Optional[bool]
        None if the eigenvalues are not numerically distinct and the criterion does not apply.
    """
    if system.N == 0:
        return True
    eigenvalues, vectors = np.linalg.eig(system.A)
    scale = max(float(np.max(np.abs(eigenvalues))), 1.0)
    gaps = np.abs(eigenvalues[:, None] - eigenvalues[None, :]) + np.eye(system.N) * scale
    if np.min(gaps) <= math.sqrt(tol) * scale:
        return None
    coordinates = np.linalg.solve(vectors, system.C.astype(complex))
    threshold = max(tol * float(np.linalg.norm(coordinates)), ABSOLUTE_RANK_FLOOR)
    return bool(np.all(np.abs(coordinates) > threshold))
