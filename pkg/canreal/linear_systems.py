"""Linear state-space systems x_t = A x_{t-1} + C z_t, y_t = W x_t with scalar input and output.

The module provides the echo state property test, evaluation of the associated filter and
functional, impulse responses with certified l1 tail bounds, convolution and the input
forgetting bound.
"""

import logging
import math
from dataclasses import dataclass
from enum import IntEnum
from typing import Any, Dict, NamedTuple, Optional, Tuple

import numpy as np

from canreal.decorators import require_esp
from canreal.exceptions import EigenSolverError, NoContractionError
from canreal.signals import Signal, WeightingSequence, impulse, sup_norm
from canreal.utils import (
    DEFAULT_MARGIN,
    CancellationToken,
    check_cancelled,
    frozen_array,
)

logger = logging.getLogger(__name__)

# Number of multiplications between finiteness and cancellation checks in power loops.
_CHECK_EVERY = 64
# Krylov vectors this far below the largest earlier one are rounding noise and count as zero.
_NEGLIGIBLE = 1024 * np.finfo(float).eps


class EspStatus(IntEnum):
    """Outcome of the echo state property test."""

    HOLDS = 1
    FAILS = 2
    INDETERMINATE = 3

    def __str__(self):
        return self.name.lower()


@dataclass(frozen=True)
class EspCertificate:
    """Spectral certificate of the echo state property.

    Parameters
    ----------
    status : EspStatus
        Whether the property holds, fails or cannot be decided at the given margin.
    rho : float
        Spectral radius of the state matrix.
    margin : float
        Margin used for the decision.
    eigenvalue : complex
        An eigenvalue of largest modulus. When the property fails, this eigenvalue and its
        eigenvector v give the bounded zero-input solution x_t = eigenvalue^t v that competes
        with the zero solution.
    """

    status: EspStatus
    rho: float
    margin: float
    eigenvalue: complex

    @property
    def holds(self) -> bool:
        """Whether the echo state property is certified."""
        return self.status == EspStatus.HOLDS

    def to_dict(self) -> Dict[str, Any]:
        """Structured representation."""
        return {
            "status": str(self.status),
            "rho": self.rho,
            "margin": self.margin,
            "eigenvalue": [self.eigenvalue.real, self.eigenvalue.imag],
        }


@dataclass(frozen=True, eq=False)
class LinearSystem:
    """Linear system (A, C, W) with state dimension N.

    N = 0 is the zero filter on the empty state space.

    Parameters
    ----------
    A : array-like
        State matrix of shape (N, N).
    C : array-like
        Input vector of length N.
    W : array-like
        Readout row of length N.
    """

    A: np.ndarray
    C: np.ndarray
    W: np.ndarray

    def __post_init__(self):
        A = np.array(self.A, dtype=float)
        if A.size == 0:
            A = A.reshape(0, 0)
        C = np.array(self.C, dtype=float).reshape(-1)
        W = np.array(self.W, dtype=float).reshape(-1)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError(f"State matrix must be square, got shape {A.shape}")
        n = A.shape[0]
        if C.shape != (n,) or W.shape != (n,):
            raise ValueError(
                f"Inconsistent dimensions: A is {A.shape}, C has {C.size} and W has {W.size} "
                "entries"
            )
        for name, value in (("A", A), ("C", C), ("W", W)):
            if not np.all(np.isfinite(value)):
                raise ValueError(f"All entries of {name} must be finite")
        object.__setattr__(self, "A", frozen_array(A))
        object.__setattr__(self, "C", frozen_array(C))
        object.__setattr__(self, "W", frozen_array(W))

    @property
    def N(self) -> int:  # pylint: disable=invalid-name
        """State dimension."""
        return self.A.shape[0]

    @classmethod
    def zero(cls) -> "LinearSystem":
        """The zero filter on the empty state space."""
        return cls(np.zeros((0, 0)), np.zeros(0), np.zeros(0))

    def esp_certificate(self, margin: float = DEFAULT_MARGIN) -> EspCertificate:
        """Shorthand for `esp_check(self, margin)`."""
        return esp_check(self, margin=margin)

    def to_dict(self) -> Dict[str, Any]:
        """Serialize as {"A": [[...]], "C": [...], "W": [...]}."""
        return {"A": self.A.tolist(), "C": self.C.tolist(), "W": self.W.tolist()}

    @classmethod
    def from_dict(cls, document: Dict[str, Any]) -> "LinearSystem":
        """Inverse of `to_dict`."""
        missing = {"A", "C", "W"} - set(document)
        if missing:
            raise ValueError(f"Linear system document is missing keys {sorted(missing)}")
        return cls(document["A"], document["C"], document["W"])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LinearSystem):
            return NotImplemented
        return (
            np.array_equal(self.A, other.A)
            and np.array_equal(self.C, other.C)
            and np.array_equal(self.W, other.W)
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class ImpulseResponse:
    """Truncated convolution kernel (Psi_0, Psi_{-1}, ..., Psi_{-T}) with an l1 tail bound.

    Parameters
    ----------
    coefficients : array-like
        Kernel coefficients, most recent lag first.
    tail_bound : float
        Certified upper bound on sum_{j > T} |Psi_{-j}|.
    """

    coefficients: np.ndarray
    tail_bound: float = 0.0

    def __post_init__(self):
        coefficients = frozen_array(self.coefficients, ndim=1)
        if len(coefficients) == 0:
            raise ValueError("An impulse response needs at least the coefficient Psi_0")
        if not np.all(np.isfinite(coefficients)):
            raise ValueError("Impulse response coefficients must be finite")
        if not (math.isfinite(self.tail_bound) and self.tail_bound >= 0):
            raise ValueError(f"Tail bound must be finite and non-negative, not {self.tail_bound}")
        object.__setattr__(self, "coefficients", coefficients)
        object.__setattr__(self, "tail_bound", float(self.tail_bound))

    @property
    def horizon(self) -> int:
        """Largest lag T stored explicitly."""
        return len(self.coefficients) - 1

    def suffix_l1(self, t: int) -> float:
        """
        Certified bound on sum_{j >= t} |Psi_{-j}|.

        Parameters
        ----------
        t : int
            First lag of the suffix.

        Returns
        -------
        float
        """
        if t < 0:
            raise ValueError(f"Lag must be non-negative, not {t}")
        if t > self.horizon:
            return self.tail_bound
        # reversed cumulative sums keep the suffix monotone in floating point
        suffix = np.cumsum(np.abs(self.coefficients)[::-1])[::-1]
        return float(suffix[t]) + self.tail_bound

    def partial_l1(self, t: int) -> float:
        """Sum of |Psi_{-j}| for j < t (lags beyond the horizon contribute nothing)."""
        return float(np.sum(np.abs(self.coefficients[: max(t, 0)])))

    @property
    def l1_norm_bound(self) -> float:
        """Certified upper bound on the l1 norm of the kernel."""
        return self.suffix_l1(0)

    def to_dict(self) -> Dict[str, Any]:
        """Serialize as {"coefficients": [...], "tail_bound": x}."""
        return {"coefficients": self.coefficients.tolist(), "tail_bound": self.tail_bound}

    @classmethod
    def from_dict(cls, document: Dict[str, Any]) -> "ImpulseResponse":
        """Inverse of `to_dict`."""
        if "coefficients" not in document:
            raise ValueError("Impulse response document is missing key 'coefficients'")
        return cls(document["coefficients"], float(document.get("tail_bound", 0.0)))


class FunctionalValue(NamedTuple):
    """Value of the functional on a window and the bound on the truncation error."""

    value: float
    truncation_bound: float


class StateValue(NamedTuple):
    """Value of the state functional on a window and the bound on the truncation error."""

    state: np.ndarray
    truncation_bound: float


class ConvolutionValue(NamedTuple):
    """Value of a truncated convolution and the bound on the neglected tail."""

    value: float
    error_bound: float


def spectral_radius(A: np.ndarray) -> float:  # pylint: disable=invalid-name
    """
    Return the largest eigenvalue modulus of a square matrix.

    Parameters
    ----------
    A : np.ndarray
        Square matrix with finite entries.

    Returns
    -------
    float

    Raises
    ------
    ValueError
        If the matrix is not square or has non-finite entries.
    EigenSolverError
        If the eigenvalue computation fails.
    """
    return abs(_dominant_eigenvalue(A))


def _dominant_eigenvalue(A: np.ndarray) -> complex:  # pylint: disable=invalid-name
    A = np.asarray(A, dtype=float)
    if A.size == 0:
        return 0j
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"Spectral radius needs a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("Spectral radius needs a matrix with finite entries")
    try:
        eigenvalues = np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverError(f"Eigenvalue computation failed: {exc}") from exc
    return complex(eigenvalues[np.argmax(np.abs(eigenvalues))])


def esp_check(system: LinearSystem, margin: float = DEFAULT_MARGIN) -> EspCertificate:
    """
    Decide the echo state property of a linear system.

    The property holds if and only if the spectral radius is below one. Computed radii
    below `1 - margin` certify the property, radii in [1 - margin, 1) are indeterminate and
    radii of at least one refute it.

    Parameters
    ----------
    system : LinearSystem
        System to test.
    margin : float (default = 1e-8)
        Width of the band below one in which no decision is made.

    Returns
    -------
    EspCertificate
    """
    if margin <= 0:
        raise ValueError(f"Margin must be positive, not {margin}")
    eigenvalue = _dominant_eigenvalue(system.A)
    rho = abs(eigenvalue)
    if rho < 1 - margin:
        status = EspStatus.HOLDS
    elif rho < 1:
        status = EspStatus.INDETERMINATE
    else:
        status = EspStatus.FAILS
    logger.debug("Spectral radius %.12g, echo state property %s", rho, status)
    return EspCertificate(status=status, rho=rho, margin=margin, eigenvalue=eigenvalue)


def default_power_limit(n: int, rho: float) -> int:
    """
    Largest power searched for a contraction: 10 * N * ceil(1 / (1 - rho)).

    Parameters
    ----------
    n : int
        State dimension.
    rho : float
        Spectral radius, below one.

    Returns
    -------
    int
    """
    return 10 * max(n, 1) * math.ceil(1 / (1 - rho))


def contraction_power(
    A: np.ndarray,  # pylint: disable=invalid-name
    k_max: Optional[int] = None,
    cancel_token: Optional[CancellationToken] = None,
) -> Tuple[int, float]:
    """
    Find a power k0 with operator 2-norm ||A^k0|| < 1.

    The first power with norm at most 1/2 is preferred when one exists below `k_max`, since
    it tightens the geometric block bounds; otherwise the first power with norm below one is
    returned.

    Parameters
    ----------
    A : np.ndarray
        Square matrix with spectral radius below one.
    k_max : int, optional
        Largest power searched. Defaults to `default_power_limit`.
    cancel_token : CancellationToken, optional
        Token polled during the search.

    Returns
    -------
    Tuple[int, float]
        The power k0 and the norm ||A^k0||.

    Raises
    ------
    NoContractionError
        If no power up to `k_max` is a contraction.
    """
    n = A.shape[0]
    if k_max is None:
        rho = spectral_radius(A)
        if rho >= 1:
            raise NoContractionError(f"Spectral radius {rho} is not below one")
        k_max = default_power_limit(n, rho)
    power = np.eye(n)
    first: Optional[Tuple[int, float]] = None
    for k in range(1, k_max + 1):
        power = A @ power
        norm = float(np.linalg.norm(power, 2)) if n > 0 else 0.0
        if not math.isfinite(norm):
            break
        if norm <= 0.5:
            return k, norm
        if norm < 1 and first is None:
            first = (k, norm)
        if k % _CHECK_EVERY == 0:
            check_cancelled(cancel_token)
    if first is None:
        raise NoContractionError(
            f"No power of the state matrix up to {k_max} has operator norm below one"
        )
    return first


def _krylov_vector(A: np.ndarray, v: np.ndarray, power: int, cancel_token=None) -> np.ndarray:
    """A^power v, or zero when it is negligible against the largest A^i v computed on the way."""
    # pylint: disable=invalid-name
    peak = float(np.linalg.norm(v))
    for step in range(power):
        if not np.any(v):
            break
        v = A @ v
        peak = max(peak, float(np.linalg.norm(v)))
        if step % _CHECK_EVERY == 0:
            check_cancelled(cancel_token)
    if np.linalg.norm(v) <= _NEGLIGIBLE * len(v) * peak:
        return np.zeros_like(v)
    return v


def _block_sum(
    A: np.ndarray, u: np.ndarray, cancel_token=None  # pylint: disable=invalid-name
) -> float:
    """Certified bound on sum_{j >= 0} ||A^j u|| via the geometric block construction."""
    if not np.any(u):
        return 0.0
    k0, contraction = contraction_power(A, cancel_token=cancel_token)
    partial = 0.0
    for _ in range(k0):
        partial += float(np.linalg.norm(u))
        u = A @ u
    return partial / (1 - contraction)


def _tail_bound(system: LinearSystem, horizon: int, cancel_token=None) -> float:
    if horizon < 0:
        raise ValueError(f"Horizon must be non-negative, not {horizon}")
    if system.N == 0:
        return 0.0
    u = _krylov_vector(system.A, system.C, horizon + 1, cancel_token)
    if not np.any(u):
        return 0.0
    return float(np.linalg.norm(system.W)) * _block_sum(system.A, u, cancel_token)


@require_esp
def l1_tail_bound(
    system: LinearSystem,
    horizon: int,
    margin: float = DEFAULT_MARGIN,
    cancel_token: Optional[CancellationToken] = None,
) -> float:
    """
    Certified bound on sum_{j > horizon} |W A^j C|.

    With u = A^(horizon + 1) C and k0 the contraction power of A, the tail is bounded by
    ||W|| * sum_{i < k0} ||A^i u|| / (1 - ||A^k0||). The bound is exactly zero when
    A^(horizon + 1) C vanishes, in particular for nilpotent A and horizon >= N - 1. A computed
    u with norm at most 1024 * N * eps times the largest ||A^i C||, i <= horizon + 1, is
    rounding noise and counts as zero, so a nilpotent A known only up to rounding, such as
    B S B^-1 for a shift S, also gets a zero bound.

    Parameters
    ----------
    system : LinearSystem
        System with the echo state property.
    horizon : int
        Last lag excluded from the tail.
    margin : float (default = 1e-8)
        Margin of the echo state property check.
    cancel_token : CancellationToken, optional
        Token polled in long loops.

    Returns
    -------
    float

    Raises
    ------
    EchoStatePropertyError
        If the echo state property is not certified.
    NoContractionError
        If no contraction power is found.
    """
    return _tail_bound(system, horizon, cancel_token)


@require_esp
def state_gain_bound(
    system: LinearSystem,
    margin: float = DEFAULT_MARGIN,
    cancel_token: Optional[CancellationToken] = None,
) -> float:
    """
    Bound on the operator norm of sum_j A^j: sum_{i < k0} ||A^i|| / (1 - ||A^k0||).

    Parameters
    ----------
    system : LinearSystem
        System with the echo state property.
    margin : float (default = 1e-8)
        Margin of the echo state property check.
    cancel_token : CancellationToken, optional
        Token polled in long loops.

    Returns
    -------
    float
    """
    if system.N == 0:
        return 0.0
    k0, contraction = contraction_power(system.A, cancel_token=cancel_token)
    power = np.eye(system.N)
    total = 0.0
    for _ in range(k0):
        total += float(np.linalg.norm(power, 2))
        power = system.A @ power
    return total / (1 - contraction)


def simulate(
    system: LinearSystem, inputs, x0: Optional[np.ndarray] = None
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Run the state recursion forward from an initial state.

    Parameters
    ----------
    system : LinearSystem
        System to simulate. The echo state property is not required.
    inputs : array-like
        Inputs z_1, ..., z_T.
    x0 : np.ndarray, optional
        Initial state; zero by default.

    Returns
    -------
    Tuple[np.ndarray, np.ndarray]
        States of shape (T, N) and outputs of length T.
    """
    inputs = np.asarray(inputs, dtype=float).reshape(-1)
    x = np.zeros(system.N) if x0 is None else np.array(x0, dtype=float).reshape(-1)
    if x.shape != (system.N,):
        raise ValueError(f"Initial state must have {system.N} entries, not {x.size}")
    states = np.empty((len(inputs), system.N))
    for t, z_t in enumerate(inputs):
        x = system.A @ x + system.C * z_t
        states[t] = x
    return states, states @ system.W


def markov_parameters(system: LinearSystem, horizon: int) -> np.ndarray:
    """
    Coefficients W A^j C for j = 0, ..., horizon without any stability requirement.

    Parameters
    ----------
    system : LinearSystem
        Linear system.
    horizon : int
        Largest power.

    Returns
    -------
    np.ndarray
    """
    coefficients = np.zeros(horizon + 1)
    v = system.C
    for j in range(horizon + 1):
        if system.N == 0 or not np.any(v):
            break
        coefficients[j] = system.W @ v
        v = system.A @ v
    return coefficients


@require_esp
def evaluate_state(
    system: LinearSystem,
    z: Signal,
    margin: float = DEFAULT_MARGIN,
    cancel_token: Optional[CancellationToken] = None,
) -> StateValue:
    """
    State functional sum_{j < L} A^j C z_{-j} over the window of z.

    Parameters
    ----------
    system : LinearSystem
        System with the echo state property.
    z : Signal
        Input history.
    margin : float (default = 1e-8)
        Margin of the echo state property check.
    cancel_token : CancellationToken, optional
        Token polled in long loops.

    Returns
    -------
    StateValue
        The state and a bound on its distance to the state of any bounded extension of the
        history whose sup norm does not exceed that of the window.
    """
    states, _ = simulate(system, z.window)
    state = states[-1] if len(z) > 0 else np.zeros(system.N)
    if len(z) == 0 or system.N == 0:
        return StateValue(state, 0.0)
    u = _krylov_vector(system.A, system.C, len(z), cancel_token)
    return StateValue(state, _block_sum(system.A, u, cancel_token) * sup_norm(z))


@require_esp
def evaluate_functional(
    system: LinearSystem,
    z: Signal,
    margin: float = DEFAULT_MARGIN,
    cancel_token: Optional[CancellationToken] = None,
) -> FunctionalValue:
    """
    Evaluate the functional H(z) = W sum_j A^j C z_{-j} on a window.

    Parameters
    ----------
    system : LinearSystem
        System with the echo state property.
    z : Signal
        Input history.
    margin : float (default = 1e-8)
        Margin of the echo state property check.
    cancel_token : CancellationToken, optional
        Token polled in long loops.

    Returns
    -------
    FunctionalValue
        The value over the window and the bound l1_tail_bound(L - 1) * sup_norm(z) on the
        error with respect to any bounded extension of the zero tail.

    Raises
    ------
    EchoStatePropertyError
        If the echo state property is not certified.
    """
    if len(z) == 0:
        return FunctionalValue(0.0, 0.0)
    _, outputs = simulate(system, z.window)
    bound = _tail_bound(system, len(z) - 1, cancel_token) * sup_norm(z)
    return FunctionalValue(float(outputs[-1]), bound)


@require_esp
def evaluate_filter(
    system: LinearSystem,
    z: Signal,
    out_len: int,
    margin: float = DEFAULT_MARGIN,
    cancel_token: Optional[CancellationToken] = None,
) -> Signal:
    """
    Evaluate the filter output (U(z)_{-out_len+1}, ..., U(z)_0).

    Times before the window see only the zero tail, so the output there is exactly zero.

    Parameters
    ----------
    system : LinearSystem
        System with the echo state property.
    z : Signal
        Input history.
    out_len : int
        Number of output values.
    margin : float (default = 1e-8)
        Margin of the echo state property check.
    cancel_token : CancellationToken, optional
        Token polled in long loops.

    Returns
    -------
    Signal
    """
    if out_len < 1:
        raise ValueError(f"Output length must be positive, not {out_len}")
    check_cancelled(cancel_token)
    _, outputs = simulate(system, z.padded(out_len))
    return Signal(outputs[-out_len:])


@require_esp
def impulse_response(
    system: LinearSystem,
    horizon: int,
    margin: float = DEFAULT_MARGIN,
    cancel_token: Optional[CancellationToken] = None,
) -> ImpulseResponse:
    """
    Impulse response Psi_{-j} = W A^j C for j = 0, ..., horizon with a certified tail bound.

    Parameters
    ----------
    system : LinearSystem
        System with the echo state property.
    horizon : int
        Largest lag computed explicitly.
    margin : float (default = 1e-8)
        Margin of the echo state property check.
    cancel_token : CancellationToken, optional
        Token polled in long loops.

    Returns
    -------
    ImpulseResponse
    """
    if horizon < 0:
        raise ValueError(f"Horizon must be non-negative, not {horizon}")
    coefficients = np.zeros(horizon + 1)
    v = system.C.copy()
    for j in range(horizon + 1):
        if system.N == 0 or not np.any(v):
            break
        coefficients[j] = system.W @ v
        v = system.A @ v
        if j % _CHECK_EVERY == 0:
            if not np.all(np.isfinite(v)):
                raise NoContractionError("Powers of the state matrix overflowed")
            check_cancelled(cancel_token)
    tail = 0.0 if not np.any(v) else _tail_bound(system, horizon, cancel_token)
    return ImpulseResponse(coefficients, tail)


@require_esp
def probe_impulse_response(
    system: LinearSystem, horizon: int, margin: float = DEFAULT_MARGIN
) -> ImpulseResponse:
    """
    Recover the kernel by evaluating the functional on the impulses e_{-j}.

    The coefficients agree with `impulse_response`, which witnesses that the convolution
    kernel of the filter is unique.

    Parameters
    ----------
    system : LinearSystem
        System with the echo state property.
    horizon : int
        Largest lag probed.
    margin : float (default = 1e-8)
        Margin of the echo state property check.

    Returns
    -------
    ImpulseResponse
    """
    coefficients = [
        evaluate_functional(system, impulse(-j), margin=margin).value for j in range(horizon + 1)
    ]
    return ImpulseResponse(coefficients, _tail_bound(system, horizon))


def convolve(psi: ImpulseResponse, z: Signal) -> ConvolutionValue:
    """
    Truncated convolution sum_{j <= min(T, L - 1)} Psi_{-j} z_{-j}.

    Parameters
    ----------
    psi : ImpulseResponse
        Kernel.
    z : Signal
        Input history.

    Returns
    -------
    ConvolutionValue
        The value and the bound tail_bound * sup_norm(z) on the neglected lags.
    """
    terms = min(psi.horizon + 1, len(z))
    lagged = z.window[::-1][:terms]
    value = float(psi.coefficients[:terms] @ lagged) if terms > 0 else 0.0
    return ConvolutionValue(value, psi.tail_bound * sup_norm(z))


def ifp_gap_bound(psi: ImpulseResponse, t: int, input_gap: float) -> float:
    """
    Input forgetting bound |H(u z_t) - H(v z_t)| <= (||Psi||_1 - sum_{j < t} |Psi_{-j}|) gap.

    Parameters
    ----------
    psi : ImpulseResponse
        Kernel of the filter.
    t : int
        Length of the common continuation, at least one.
    input_gap : float
        Sup norm of the difference between the two histories.

    Returns
    -------
    float
        A bound that is non-increasing in t and tends to tail_bound * input_gap.
    """
    if t < 1:
        raise ValueError(f"Continuation length must be positive, not {t}")
    if input_gap < 0:
        raise ValueError(f"Input gap must be non-negative, not {input_gap}")
    return psi.suffix_l1(t) * input_gap


def fmp_constant(
    system: LinearSystem,
    w: WeightingSequence,
    horizon: int = 200,
    margin: float = DEFAULT_MARGIN,
) -> float:
    """
    Fading memory constant K with |H(z)| <= K ||z||_w for a geometric weighting sequence.

    Since |z_{-j}| <= ||z||_w / w_j, K is the l1 norm of the kernel of (A / decay, C, W).
    It is finite exactly when the decay exceeds the spectral radius; then delta(eps) = eps / K
    witnesses the fading memory property.

    Parameters
    ----------
    system : LinearSystem
        System whose functional is examined.
    w : WeightingSequence
        Geometric weighting sequence.
    horizon : int (default = 200)
        Horizon of the explicit part of the scaled kernel.
    margin : float (default = 1e-8)
        Margin of the echo state property check of the scaled system.

    Returns
    -------
    float

    Raises
    ------
    ValueError
        If the decay of the weighting sequence does not exceed the spectral radius.
    """
    scaled = LinearSystem(system.A / w.decay, system.C, system.W)
    if not scaled.esp_certificate(margin).holds:
        raise ValueError(
            f"Weighting decay {w.decay} does not exceed the spectral radius "
            f"{spectral_radius(system.A):.12g}; the weighted l1 norm of the kernel diverges"
        )
    return impulse_response(scaled, horizon, margin=margin).l1_norm_bound
