"""Canonicalization of linear systems by reduction.

The reduced state space is the quotient of the reachable subspace by its indistinguishable
directions, represented by their orthogonal complement inside the reachable subspace.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

import numpy as np

from canreal.decorators import require_esp
from canreal.exceptions import EchoStatePropertyError
from canreal.linear_systems import LinearSystem, markov_parameters, spectral_radius
from canreal.subspaces import (
    CanonicalityResult,
    controllability_matrix,
    intersect,
    is_canonical,
    observability_kernel,
    observability_matrix,
    reachable_subspace,
)
from canreal.utils import (
    DEFAULT_MARGIN,
    DEFAULT_TOL,
    matrix_rank,
    normalize_signs,
    numerical_rank,
    svd,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ReducedRealization:
    """Reduced system together with the maps relating it to the original.

    Parameters
    ----------
    system : LinearSystem
        Reduced system of dimension n.
    projection : np.ndarray
        Map pi of shape (n, N) onto the reduced state space.
    section : np.ndarray
        Map sigma of shape (N, n) with pi sigma = identity.
    original_dim : int
        Dimension N of the original system.
    warnings : Tuple[str, ...]
        Notices propagated from the subspace computations.
    """

    system: LinearSystem
    projection: np.ndarray
    section: np.ndarray
    original_dim: int
    warnings: Tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self):
        n = self.system.N
        projection = np.array(self.projection, dtype=float).reshape(n, self.original_dim)
        section = np.array(self.section, dtype=float).reshape(self.original_dim, n)
        projection.setflags(write=False)
        section.setflags(write=False)
        object.__setattr__(self, "projection", projection)
        object.__setattr__(self, "section", section)
        object.__setattr__(self, "warnings", tuple(self.warnings))

    @property
    def dim(self) -> int:
        """Reduced dimension n."""
        return self.system.N

    def to_dict(self) -> Dict[str, Any]:
        """Serialize with the embedded system and both maps."""
        return {
            "system": self.system.to_dict(),
            "projection": self.projection.tolist(),
            "section": self.section.tolist(),
            "original_dim": self.original_dim,
            "warnings": list(self.warnings),
        }

    @classmethod
    def from_dict(cls, document: Dict[str, Any]) -> "ReducedRealization":
        """Inverse of `to_dict`."""
        missing = {"system", "projection", "section"} - set(document)
        if missing:
            raise ValueError(f"Reduced realization document is missing keys {sorted(missing)}")
        system = LinearSystem.from_dict(document["system"])
        section = np.array(document["section"], dtype=float)
        original_dim = int(document.get("original_dim", section.shape[0] if section.ndim else 0))
        return cls(
            system,
            document["projection"],
            document["section"],
            original_dim,
            tuple(document.get("warnings", ())),
        )


@dataclass(frozen=True)
class ReductionReport:
    """Residuals certifying a reduction.

    Parameters
    ----------
    impulse_gap : float
        Largest |W A^j C - W' A'^j C'| over the horizon.
    relative_impulse_gap : float
        The impulse gap divided by max(1, largest |W A^j C|); compared against the tolerance.
    worst_lag : int
        Lag at which the impulse gap is attained.
    canonicality : CanonicalityResult, optional
        Canonicality of the reduced system; None if it lacks the echo state property.
    intertwining_residual : float
        Largest ||pi A v - A' pi v|| over a basis of the reachable subspace.
    readout_residual : float
        Largest |W v - W' pi v| over a basis of the reachable subspace.
    section_residual : float
        ||pi sigma - I||.
    annihilation_residual : float
        ||pi K|| for a basis K of the indistinguishable reachable directions.
    spectrum_residual : float
        Largest sigma_min(A - mu I) / max(1, ||A||) over eigenvalues mu of the reduced matrix.
    reduced_rho : float
        Spectral radius of the reduced state matrix.
    tol : float
        Tolerance of the verification.
    """

    impulse_gap: float
    relative_impulse_gap: float
    worst_lag: int
    canonicality: Optional[CanonicalityResult]
    intertwining_residual: float
    readout_residual: float
    section_residual: float
    annihilation_residual: float
    spectrum_residual: float
    reduced_rho: float
    tol: float

    @property
    def canonical(self) -> bool:
        """Whether the reduced system is canonical."""
        return self.canonicality is not None and self.canonicality.canonical

    @property
    def passed(self) -> bool:
        """Whether every residual is within tolerance and the reduced system is canonical."""
        residuals = (
            self.intertwining_residual,
            self.readout_residual,
            self.section_residual,
            self.annihilation_residual,
            self.spectrum_residual,
        )
        return (
            self.relative_impulse_gap <= self.tol
            and all(residual <= 10 * self.tol for residual in residuals)
            and self.canonical
            and self.reduced_rho < 1
        )

    def to_dict(self) -> Dict[str, Any]:
        """Structured representation."""
        return {
            "passed": self.passed,
            "impulse_gap": self.impulse_gap,
            "relative_impulse_gap": self.relative_impulse_gap,
            "worst_lag": self.worst_lag,
            "canonical": self.canonical,
            "reachable_dim": None if self.canonicality is None else self.canonicality.reachable_dim,
            "kernel_dim": None if self.canonicality is None else self.canonicality.kernel_dim,
            "intertwining_residual": self.intertwining_residual,
            "readout_residual": self.readout_residual,
            "section_residual": self.section_residual,
            "annihilation_residual": self.annihilation_residual,
            "spectrum_residual": self.spectrum_residual,
            "reduced_rho": self.reduced_rho,
            "tol": self.tol,
        }


@require_esp
def reduce(
    system: LinearSystem, tol: float = DEFAULT_TOL, margin: float = DEFAULT_MARGIN
) -> ReducedRealization:
    """
    Reduce a linear system to its canonical realization.

    With Q_R an orthonormal basis of the reachable subspace, the indistinguishable reachable
    directions are Q_R ker(O Q_R). The right singular vectors of O Q_R spanning its row space
    give the orthonormal complement Q of these directions inside the reachable subspace.
    The reduced system is (Q^T A Q, Q^T C, W Q) with pi = Q^T and sigma = Q.

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
    ReducedRealization

    Raises
    ------
    EchoStatePropertyError
        If the echo state property is not certified.
    """
    n_original = system.N
    reachable = reachable_subspace(system, tol)
    notices = []
    if reachable.unreliable_rank:
        notices.append(
            f"unreliable_rank: the reachable dimension {reachable.dim} was decided on an "
            "ill-conditioned Krylov matrix"
        )
    if reachable.dim == 0:
        logger.info("System of dimension %d realizes the zero filter", n_original)
        return ReducedRealization(
            LinearSystem.zero(),
            np.zeros((0, n_original)),
            np.zeros((n_original, 0)),
            n_original,
            tuple(notices),
        )

    restricted = observability_matrix(system) @ reachable.basis
    _, singular_values, right_t = svd(restricted)
    rank = numerical_rank(singular_values, tol)
    basis = normalize_signs(reachable.basis @ right_t[:rank].T)

    reduced = LinearSystem(basis.T @ system.A @ basis, basis.T @ system.C, system.W @ basis)
    logger.info(
        "Reduced dimension %d from %d (reachable %d, indistinguishable %d)",
        rank,
        n_original,
        reachable.dim,
        reachable.dim - rank,
    )
    return ReducedRealization(reduced, basis.T, basis, n_original, tuple(notices))


def _spectrum_residual(original: np.ndarray, reduced: np.ndarray) -> float:
    if reduced.size == 0:
        return 0.0
    scale = max(float(np.linalg.norm(original, 2)), 1.0)
    identity = np.eye(original.shape[0])
    worst = 0.0
    for mu in np.linalg.eigvals(reduced):
        singular_values = np.linalg.svd(original - mu * identity, compute_uv=False)
        worst = max(worst, float(singular_values[-1]) / scale)
    return worst


def _max_norm(matrix: np.ndarray) -> float:
    return float(np.max(np.abs(matrix))) if matrix.size > 0 else 0.0


def verify_reduction(
    original: LinearSystem,
    reduced: ReducedRealization,
    horizon: int = 300,
    tol: float = DEFAULT_TOL,
) -> ReductionReport:
    """
    Check a reduction against the original system.

    The report contains the impulse response gap over the horizon, the canonicality of the
    reduced system, the intertwining residuals of pi on the reachable subspace and the
    pseudospectral distance of the reduced spectrum to the original spectrum. The impulse gap
    is reported as is and, for the pass decision, relative to the largest original
    coefficient when that exceeds one.

    Parameters
    ----------
    original : LinearSystem
        The system that was reduced.
    reduced : ReducedRealization
        The result of `reduce`.
    horizon : int (default = 300)
        Largest lag of the impulse response comparison.
    tol : float (default = 1e-9)
        Tolerance of all checks.

    Returns
    -------
    ReductionReport
    """
    small = reduced.system
    pi, sigma = reduced.projection, reduced.section

    reference = markov_parameters(original, horizon)
    gaps = np.abs(reference - markov_parameters(small, horizon))
    scale = max(float(np.max(np.abs(reference))), 1.0)
    worst_lag = int(np.argmax(gaps))

    try:
        canonicality = is_canonical(small, tol)
    except EchoStatePropertyError:
        canonicality = None

    reachable = reachable_subspace(original, tol)
    basis = reachable.basis
    intertwining = _max_norm(pi @ original.A @ basis - small.A @ pi @ basis)
    readout = _max_norm(original.W @ basis - small.W @ pi @ basis)
    section = _max_norm(pi @ sigma - np.eye(small.N))
    indistinguishable = intersect(observability_kernel(original, tol), reachable)
    annihilation = _max_norm(pi @ indistinguishable.basis)

    report = ReductionReport(
        impulse_gap=float(gaps[worst_lag]),
        relative_impulse_gap=float(gaps[worst_lag]) / scale,
        worst_lag=worst_lag,
        canonicality=canonicality,
        intertwining_residual=intertwining,
        readout_residual=readout,
        section_residual=section,
        annihilation_residual=annihilation,
        spectrum_residual=_spectrum_residual(original.A, small.A),
        reduced_rho=spectral_radius(small.A),
        tol=tol,
    )
    logger.debug("Reduction verification: %s", report.to_dict())
    return report


def reduction_oracle_rank(system: LinearSystem, tol: float = DEFAULT_TOL) -> int:
    """
    Numerical rank of the Hankel factor product O R.

    O R is the N x N Hankel matrix of the Markov parameters, whose rank is the canonical
    dimension. It is computed independently of `reduce`.

    Parameters
    ----------
    system : LinearSystem
        Linear system.
    tol : float (default = 1e-9)
        Relative rank tolerance.

    Returns
    -------
    int
    """
    if system.N == 0:
        return 0
    return matrix_rank(observability_matrix(system) @ controllability_matrix(system), tol)
