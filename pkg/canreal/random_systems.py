"""Seeded random linear systems, maps and filters shared by tests, the CLI and notebooks."""

from typing import List, NamedTuple, Optional

import numpy as np
import scipy.linalg

from canreal.linear_systems import LinearSystem
from canreal.realization import FiniteMemoryFilter


class NonminimalSample(NamedTuple):
    """Random system with a known canonical dimension."""

    system: LinearSystem
    minimal_dim: int


def random_orthogonal_matrix(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar-distributed orthogonal matrix from the QR factorization of a Gaussian matrix."""
    if n == 0:
        return np.zeros((0, 0))
    q, r = np.linalg.qr(rng.normal(size=(n, n)))
    return q * np.sign(np.diag(r))


def _spectrum_blocks(rng: np.random.Generator, n: int, rho: float) -> List[np.ndarray]:
    """Real 1x1 and rotation-scaling 2x2 blocks with spread eigenvalues of largest modulus rho."""
    n_pairs, n_real = divmod(n, 2)
    moduli = rng.uniform(0.75, 0.9, size=n_pairs + n_real)
    moduli *= rho / np.max(moduli)
    blocks = []
    for k in range(n_pairs):
        jitter = rng.uniform(-0.25, 0.25) * np.pi / n_pairs
        angle = np.pi * (k + 0.5) / n_pairs + jitter
        radius = moduli[k]
        blocks.append(
            radius * np.array([[np.cos(angle), -np.sin(angle)], [np.sin(angle), np.cos(angle)]])
        )
    if n_real:
        sign = 1.0 if rng.random() < 0.5 else -1.0
        blocks.append(np.array([[sign * moduli[-1]]]))
    return blocks


def random_stable_system(rng: np.random.Generator, n: int, rho: float = 0.9) -> LinearSystem:
    """
    Random system of dimension n whose state matrix has spectral radius exactly rho.

    Eigenvalue moduli are spread in [0.75, 0.9] before rescaling and arguments are spread
    around the half circle, which keeps the Krylov matrices well conditioned.

    Parameters
    ----------
    rng : np.random.Generator
        Random generator.
    n : int
        State dimension.
    rho : float (default = 0.9)
        Spectral radius.

    Returns
    -------
    LinearSystem
    """
    if n == 0:
        return LinearSystem.zero()
    q = random_orthogonal_matrix(rng, n)
    state = q @ scipy.linalg.block_diag(*_spectrum_blocks(rng, n, rho)) @ q.T
    return LinearSystem(state, rng.normal(size=n), rng.normal(size=n))


def random_nonminimal_system(
    rng: np.random.Generator, n: int, rho: float = 0.9
) -> NonminimalSample:
    """
    Random system with unreachable and unobservable parts.

    Every spectral block is assigned to the minimal part, to an unreachable part (C vanishes
    on it) or to an unobservable part (W vanishes on it), then the coordinates are rotated.

    Parameters
    ----------
    rng : np.random.Generator
        Random generator.
    n : int
        State dimension, at least 1.
    rho : float (default = 0.9)
        Spectral radius.

    Returns
    -------
    NonminimalSample
        The system and the dimension of its minimal part.
    """
    blocks = _spectrum_blocks(rng, n, rho)
    input_vector = rng.normal(size=n)
    readout = rng.normal(size=n)
    minimal_dim = 0
    offset = 0
    for block in blocks:
        size = block.shape[0]
        role = rng.choice(["minimal", "unreachable", "unobservable"], p=[0.5, 0.25, 0.25])
        if role == "unreachable":
            input_vector[offset : offset + size] = 0.0
        elif role == "unobservable":
            readout[offset : offset + size] = 0.0
        else:
            minimal_dim += size
        offset += size
    q = random_orthogonal_matrix(rng, n)
    state = q @ scipy.linalg.block_diag(*blocks) @ q.T
    return NonminimalSample(LinearSystem(state, q @ input_vector, readout @ q.T), minimal_dim)


def random_well_conditioned_matrix(
    rng: np.random.Generator, n: int, max_singular_value: float = 10.0
) -> np.ndarray:
    """Random n x n matrix with singular values in [1, max_singular_value]."""
    singular_values = rng.uniform(1.0, max_singular_value, size=n)
    left = random_orthogonal_matrix(rng, n)
    right = random_orthogonal_matrix(rng, n)
    return left @ np.diag(singular_values) @ right.T


def random_finite_filter(
    rng: np.random.Generator, n: int, leading_zeros: Optional[int] = None
) -> FiniteMemoryFilter:
    """
    Random finite-memory filter with coefficients of modulus in [0.5, 2].

    Parameters
    ----------
    rng : np.random.Generator
        Random generator.
    n : int
        Memory length.
    leading_zeros : int, optional
        Number of oldest coefficients set to zero; random (and often zero) by default.

    Returns
    -------
    FiniteMemoryFilter
    """
    psi = rng.uniform(0.5, 2.0, size=n) * rng.choice([-1.0, 1.0], size=n)
    if leading_zeros is None:
        leading_zeros = int(rng.integers(0, n)) if n > 0 and rng.random() < 0.5 else 0
    psi[:leading_zeros] = 0.0
    return FiniteMemoryFilter(psi)
