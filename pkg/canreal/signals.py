"""Left-infinite signals represented by finite windows with a zero tail.

Index 0 of a signal is the present and negative indices count into the past. The window stores
(z_{-L+1}, ..., z_0); every value older than the window is zero.
"""

from dataclasses import dataclass
from typing import Iterable, List, Sequence, Union

import numpy as np

from canreal.utils import frozen_array


@dataclass(frozen=True, eq=False)
class Signal:
    """A left-infinite real sequence with a zero tail.

    Parameters
    ----------
    window : Sequence[float]
        Values (z_{-L+1}, ..., z_0), oldest first. An empty window is the zero sequence.
    """

    window: np.ndarray = ()

    def __post_init__(self):
        window = frozen_array(self.window, ndim=1) if len(self.window) > 0 else frozen_array([])
        if not np.all(np.isfinite(window)):
            raise ValueError("Signal entries must be finite reals")
        object.__setattr__(self, "window", window)

    def __len__(self) -> int:
        return len(self.window)

    def at(self, t: int) -> float:
        """Value at time t <= 0; zero outside the window."""
        if t > 0:
            raise ValueError(f"Signals are indexed by non-positive times, not {t}")
        index = len(self.window) - 1 + t
        return float(self.window[index]) if index >= 0 else 0.0

    def to_list(self) -> List[float]:
        """Serialize as a flat list [z_{-L+1}, ..., z_0]."""
        return [float(value) for value in self.window]

    @classmethod
    def from_list(cls, values: Iterable[float]) -> "Signal":
        """Build a signal from a flat list [z_{-L+1}, ..., z_0]."""
        return cls(list(values))

    def padded(self, length: int) -> np.ndarray:
        """Window extended with zeros into the past to at least `length` entries."""
        missing = max(length - len(self.window), 0)
        return np.concatenate([np.zeros(missing), self.window])

    def _aligned(self, other: "Signal"):
        length = max(len(self), len(other))
        return self.padded(length), other.padded(length)

    def __add__(self, other: "Signal") -> "Signal":
        left, right = self._aligned(other)
        return Signal(left + right)

    def __sub__(self, other: "Signal") -> "Signal":
        left, right = self._aligned(other)
        return Signal(left - right)

    def __mul__(self, scalar: float) -> "Signal":
        return Signal(self.window * float(scalar))

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Signal):
            return NotImplemented
        return np.array_equal(np.trim_zeros(self.window, "f"), np.trim_zeros(other.window, "f"))

    def __hash__(self) -> int:
        return hash(tuple(np.trim_zeros(self.window, "f")))


@dataclass(frozen=True)
class WeightingSequence:
    """Strictly decreasing null sequence w: N -> (0, 1] with w_0 = 1.

    Only the geometric family w_t = decay^t is built in.

    Parameters
    ----------
    decay : float
        Ratio of the geometric sequence, 0 < decay < 1.
    """

    decay: float

    def __post_init__(self):
        if not 0 < self.decay < 1:
            raise ValueError(f"Geometric weighting needs 0 < decay < 1, not {self.decay}")

    @classmethod
    def geometric(cls, decay: float) -> "WeightingSequence":
        """Geometric weighting sequence w_t = decay^t."""
        return cls(decay)

    def weight(self, t: int) -> float:
        """Return w_t for t >= 0."""
        if t < 0:
            raise ValueError(f"Weights are indexed by non-negative integers, not {t}")
        return self.decay**t

    def weights(self, n: int) -> np.ndarray:
        """Return (w_0, ..., w_{n-1})."""
        return self.decay ** np.arange(n, dtype=float)


def sup_norm(z: Signal) -> float:
    """
    Supremum norm of a signal; the zero tail contributes nothing.

    Parameters
    ----------
    z : Signal
        Input signal.

    Returns
    -------
    float
    """
    if len(z) == 0:
        return 0.0
    return float(np.max(np.abs(z.window)))


def weighted_norm(z: Signal, w: WeightingSequence) -> float:
    """
    Weighted norm sup_t |z_t| w_{-t}.

    Parameters
    ----------
    z : Signal
        Input signal.
    w : WeightingSequence
        Weighting sequence.

    Returns
    -------
    float
    """
    if len(z) == 0:
        return 0.0
    # window is oldest first, so reverse it to line up lag j with weight w_j
    lagged = np.abs(z.window[::-1])
    return float(np.max(lagged * w.weights(len(z))))


def delay(z: Signal, tau: int) -> Signal:
    """
    Time delay operator T_tau.

    For tau >= 0 the value now is the value tau steps ago, so the tau most recent entries are
    dropped. For tau < 0, |tau| zeros are appended at the recent end.

    Parameters
    ----------
    z : Signal
        Input signal.
    tau : int
        Delay.

    Returns
    -------
    Signal
    """
    if tau >= 0:
        return Signal(z.window[: max(len(z) - tau, 0)])
    return Signal(np.concatenate([z.window, np.zeros(-tau)]))


def concat(z: Signal, tail: Union[Sequence[float], np.ndarray]) -> Signal:
    """
    Concatenate a finite sequence at the recent end of a signal.

    Parameters
    ----------
    z : Signal
        Left-infinite history.
    tail : Sequence[float]
        Finite continuation; its last element becomes the value at time 0.

    Returns
    -------
    Signal
    """
    tail = np.asarray(tail, dtype=float)
    if len(tail) == 0:
        return z
    return Signal(np.concatenate([z.window, tail]))


def impulse(t: int, height: float = 1.0) -> Signal:
    """
    Impulse of the given height at time t <= 0.

    Parameters
    ----------
    t : int
        Non-positive time of the impulse.
    height : float (default = 1.0)
        Height of the impulse.

    Returns
    -------
    Signal
    """
    if t > 0:
        raise ValueError(f"Impulse time must be non-positive, not {t}")
    window = np.zeros(1 - t)
    window[0] = height
    return Signal(window)
