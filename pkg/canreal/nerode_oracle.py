"""Exact echo state, reachability and Nerode computations for finite-state systems.

A finite system has states 0, ..., n_states - 1, input symbols 0, ..., n_inputs - 1, a
transition table F[state, input] and an output table h[state]. At this scale every notion
of the general theory is decidable and the module serves as an independent oracle.
"""

import functools
import itertools
import logging
from dataclasses import dataclass
from typing import Any, Dict, FrozenSet, List, NamedTuple, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from canreal.decorators import require_esp_finite
from canreal.exceptions import (
    CanrealError,
    InternalConsistencyError,
    NoIsomorphismError,
    NotCanonicalError,
)
from canreal.utils import frozen_array

logger = logging.getLogger(__name__)

Pair = Tuple[int, int]


@dataclass(frozen=True, eq=False)
class FiniteSystem:
    """Finite-state, finite-alphabet system.

    Parameters
    ----------
    transition : array-like
        Table of shape (n_states, n_inputs); row is the state, column the input symbol.
    output : array-like
        Output symbol of every state.
    """

    transition: np.ndarray
    output: np.ndarray

    def __post_init__(self):
        transition = frozen_array(self.transition, dtype=int, ndim=2)
        output = frozen_array(self.output, dtype=int, ndim=1)
        n_states, n_inputs = transition.shape
        if n_states < 1 or n_inputs < 1:
            raise ValueError("A finite system needs at least one state and one input symbol")
        if len(output) != n_states:
            raise ValueError(f"Output table has {len(output)} entries for {n_states} states")
        if np.any(transition < 0) or np.any(transition >= n_states):
            raise ValueError(f"Transition targets must lie in [0, {n_states})")
        if np.any(output < 0):
            raise ValueError("Output symbols must be non-negative integers")
        object.__setattr__(self, "transition", transition)
        object.__setattr__(self, "output", output)

    @property
    def n_states(self) -> int:
        """Number of states."""
        return self.transition.shape[0]

    @property
    def n_inputs(self) -> int:
        """Number of input symbols."""
        return self.transition.shape[1]

    def esp_witness_cycle(self) -> Optional[List[Pair]]:
        """Shorthand for `esp_witness_cycle(self)`."""
        return esp_witness_cycle(self)

    @property
    def has_esp(self) -> bool:
        """Whether the distinct-pair graph is acyclic; same as `esp_check_finite(self)`."""
        return self.esp_witness_cycle() is None

    def to_dict(self) -> Dict[str, Any]:
        """Serialize as {"transition": [[...]], "output": [...]}."""
        return {"transition": self.transition.tolist(), "output": self.output.tolist()}

    @classmethod
    def from_dict(cls, document: Dict[str, Any]) -> "FiniteSystem":
        """Inverse of `to_dict`."""
        missing = {"transition", "output"} - set(document)
        if missing:
            raise ValueError(f"Finite system document is missing keys {sorted(missing)}")
        return cls(document["transition"], document["output"])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FiniteSystem):
            return NotImplemented
        return np.array_equal(self.transition, other.transition) and np.array_equal(
            self.output, other.output
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class Partition:
    """Partition of a set of states into classes.

    Parameters
    ----------
    class_of : array-like
        Class index of every state, -1 for states outside the partitioned set. Class indices
        are contiguous from 0.
    """

    class_of: np.ndarray

    def __post_init__(self):
        class_of = frozen_array(self.class_of, dtype=int, ndim=1)
        labels = np.unique(class_of[class_of >= 0])
        if not np.array_equal(labels, np.arange(len(labels))):
            raise ValueError("Class indices must be contiguous from 0 with nonempty classes")
        if np.any(class_of < -1):
            raise ValueError("States outside the partition are marked with -1")
        object.__setattr__(self, "class_of", class_of)

    @property
    def n_classes(self) -> int:
        """Number of classes."""
        return int(np.max(self.class_of)) + 1 if np.any(self.class_of >= 0) else 0

    def classes(self) -> List[List[int]]:
        """Members of every class, in class order."""
        return [np.flatnonzero(self.class_of == c).tolist() for c in range(self.n_classes)]

    @property
    def discrete(self) -> bool:
        """Whether every class is a singleton."""
        return self.n_classes == int(np.sum(self.class_of >= 0))

    def to_dict(self) -> Dict[str, Any]:
        """Structured representation."""
        return {"class_of": self.class_of.tolist(), "n_classes": self.n_classes}


class FiniteMorphismReport(NamedTuple):
    """Violations of the morphism equations f(F1(x, z)) = F2(f(x), z) and h1 = h2 o f."""

    equivariance_violations: int
    readout_violations: int

    @property
    def passed(self) -> bool:
        """Whether the map is a system morphism."""
        return self.equivariance_violations == 0 and self.readout_violations == 0


@functools.lru_cache(maxsize=64)
def all_words(n_inputs: int, length: int) -> np.ndarray:
    """
    All words of a given length in lexicographic order.

    Parameters
    ----------
    n_inputs : int
        Alphabet size.
    length : int
        Word length.

    Returns
    -------
    np.ndarray
        Read-only array of shape (n_inputs ** length, length).
    """
    words = np.array(list(itertools.product(range(n_inputs), repeat=length)), dtype=int)
    words = words.reshape(n_inputs**length, length)
    words.setflags(write=False)
    return words


def distinct_pair_graph(system: FiniteSystem) -> nx.DiGraph:
    """
    Directed graph on unordered pairs of distinct states.

    Each input z adds the edge (x, y) -> {F(x, z), F(y, z)} whenever the image pair is still
    distinct; the edge attribute `symbols` lists the inputs producing it.

    Parameters
    ----------
    system : FiniteSystem
        Finite system.

    Returns
    -------
    nx.DiGraph
    """
    graph = nx.DiGraph()
    graph.add_nodes_from(itertools.combinations(range(system.n_states), 2))
    for x, y in itertools.combinations(range(system.n_states), 2):
        for symbol in range(system.n_inputs):
            a, b = system.transition[x, symbol], system.transition[y, symbol]
            if a == b:
                continue
            target = (int(min(a, b)), int(max(a, b)))
            if graph.has_edge((x, y), target):
                graph.edges[(x, y), target]["symbols"].append(symbol)
            else:
                graph.add_edge((x, y), target, symbols=[symbol])
    return graph


def esp_witness_cycle(system: FiniteSystem) -> Optional[List[Pair]]:
    """
    A cycle of the distinct-pair graph, or None if the graph is acyclic.

    Following such a cycle backwards in time produces two distinct solutions for the same
    left-infinite input, so a cycle refutes the echo state property.

    Parameters
    ----------
    system : FiniteSystem
        Finite system.

    Returns
    -------
    Optional[List[Tuple[int, int]]]
        The pairs along the cycle.
    """
    try:
        edges = nx.find_cycle(distinct_pair_graph(system))
    except nx.NetworkXNoCycle:
        return None
    return [tuple(int(state) for state in edge[0]) for edge in edges]


def esp_check_finite(system: FiniteSystem) -> bool:
    """
    Decide the echo state property of a finite system.

    The property holds iff the distinct-pair graph is acyclic.

    Parameters
    ----------
    system : FiniteSystem
        Finite system.

    Returns
    -------
    bool
    """
    return esp_witness_cycle(system) is None


@require_esp_finite
def pair_graph_depth(system: FiniteSystem) -> int:
    """
    Length of the longest path in the distinct-pair graph.

    Every input word longer than this maps all states to a single state.

    Parameters
    ----------
    system : FiniteSystem
        Finite system with the echo state property.

    Returns
    -------
    int
    """
    graph = distinct_pair_graph(system)
    if graph.number_of_nodes() == 0:
        return 0
    return int(nx.dag_longest_path_length(graph))


def run_batch(
    system: FiniteSystem, starts: Sequence[int], words: np.ndarray, trajectory: bool = False
) -> np.ndarray:
    """
    Run many words from many initial states at once.

    Parameters
    ----------
    system : FiniteSystem
        Finite system.
    starts : Sequence[int]
        Initial state of every run, shape (B,).
    words : np.ndarray
        Input words, shape (B, T).
    trajectory : bool (default = False)
        Return the states after every step instead of the final states only.

    Returns
    -------
    np.ndarray
        Final states of shape (B,), or states of shape (B, T) if `trajectory` is set.
    """
    states = np.array(starts, dtype=int).reshape(-1)
    words = np.asarray(words, dtype=int).reshape(len(states), -1)
    history = np.empty(words.shape, dtype=int)
    for t in range(words.shape[1]):
        states = system.transition[states, words[:, t]]
        history[:, t] = states
    return history if trajectory else states


def output_batch(system: FiniteSystem, starts: Sequence[int], words: np.ndarray) -> np.ndarray:
    """Outputs after every step of `run_batch`, shape (B, T)."""
    return system.output[run_batch(system, starts, words, trajectory=True)]


@require_esp_finite
def reachable_states_finite(system: FiniteSystem) -> FrozenSet[int]:
    """
    States attained at time 0 by some left-infinite input.

    Computed as the limit of the decreasing chain S_{T+1} = union over z of F(S_T, z) from
    S_0 = all states.

    Parameters
    ----------
    system : FiniteSystem
        Finite system with the echo state property.

    Returns
    -------
    FrozenSet[int]
    """
    current = np.arange(system.n_states)
    for _ in range(system.n_states + 1):
        image = np.unique(system.transition[current])
        if np.array_equal(image, current):
            break
        current = image
    return frozenset(int(state) for state in current)


def _reachable_array(system: FiniteSystem) -> np.ndarray:
    return np.array(sorted(reachable_states_finite(system)), dtype=int)


@require_esp_finite
def nerode_partition(system: FiniteSystem) -> Partition:
    """
    Partition of the reachable states into classes of indistinguishable states.

    Moore refinement starts from the output classes and splits by the classes of successors
    until the number of classes is stable.

    Parameters
    ----------
    system : FiniteSystem
        Finite system with the echo state property.

    Returns
    -------
    Partition
        Unreachable states are marked with -1.
    """
    reachable = _reachable_array(system)
    position = np.full(system.n_states, -1)
    position[reachable] = np.arange(len(reachable))
    successors = position[system.transition[reachable]]

    _, labels = np.unique(system.output[reachable], return_inverse=True)
    labels = labels.reshape(-1)
    n_classes = int(np.max(labels)) + 1
    for _ in range(len(reachable)):
        signature = np.column_stack([labels, labels[successors]])
        _, refined = np.unique(signature, axis=0, return_inverse=True)
        refined = refined.reshape(-1)
        refined_count = int(np.max(refined)) + 1
        labels = refined
        if refined_count == n_classes:
            break
        n_classes = refined_count

    class_of = np.full(system.n_states, -1)
    class_of[reachable] = labels
    logger.debug(
        "Nerode partition of %d reachable states into %d classes", len(reachable), n_classes
    )
    return Partition(class_of)


@require_esp_finite
def reduce_finite(system: FiniteSystem) -> FiniteSystem:
    """
    Canonical reduced system on the Nerode classes of the reachable states.

    Parameters
    ----------
    system : FiniteSystem
        Finite system with the echo state property.

    Returns
    -------
    FiniteSystem
        Quotient system with transitions [x] z = [F(x, z)] and outputs [x] -> h(x).

    Raises
    ------
    InternalConsistencyError
        If members of a class disagree on outputs or successor classes.
    """
    partition = nerode_partition(system)
    transition = np.zeros((partition.n_classes, system.n_inputs), dtype=int)
    output = np.zeros(partition.n_classes, dtype=int)
    for index, members in enumerate(partition.classes()):
        successor_classes = partition.class_of[system.transition[members]]
        outputs = system.output[members]
        if np.any(successor_classes != successor_classes[0]) or np.any(outputs != outputs[0]):
            raise InternalConsistencyError(
                f"Nerode class {index} with states {members} is not compatible with the system"
            )
        transition[index] = successor_classes[0]
        output[index] = outputs[0]
    logger.info("Reduced %d states to %d classes", system.n_states, partition.n_classes)
    return FiniteSystem(transition, output)


def state_signatures(system: FiniteSystem, states: Sequence[int], depth: int) -> np.ndarray:
    """
    Outputs reached from each state after every word of length at most `depth`.

    Two states are indistinguishable iff their signatures agree for depth n_states - 1.

    Parameters
    ----------
    system : FiniteSystem
        Finite system.
    states : Sequence[int]
        States to sign.
    depth : int
        Largest continuation length.

    Returns
    -------
    np.ndarray
        Array of shape (len(states), number of words), words ordered by length then
        lexicographically.
    """
    states = np.asarray(states, dtype=int)
    columns = []
    for length in range(depth + 1):
        words = all_words(system.n_inputs, length)
        starts = np.repeat(states, len(words))
        finals = run_batch(system, starts, np.tile(words, (len(states), 1)))
        columns.append(system.output[finals].reshape(len(states), len(words)))
    return np.hstack(columns)


@require_esp_finite
def ifp_empirical(
    system: FiniteSystem, u: Sequence[int], v: Sequence[int], z: Sequence[int]
) -> np.ndarray:
    """
    Discrete-metric output gaps between two histories followed by a common continuation.

    Parameters
    ----------
    system : FiniteSystem
        Finite system with the echo state property.
    u : Sequence[int]
        First history, used as a washout of length at least 4 n_states^2.
    v : Sequence[int]
        Second history, same length requirement.
    z : Sequence[int]
        Common continuation.

    Returns
    -------
    np.ndarray
        gap[t - 1] = 1 if the outputs after u z_1..z_t and v z_1..z_t differ, else 0.
    """
    washout = 4 * system.n_states**2
    if min(len(u), len(v)) < washout:
        raise ValueError(f"Histories must have at least {washout} symbols to wash out the start")
    z = np.asarray(z, dtype=int)
    if len(z) == 0:
        return np.zeros(0, dtype=int)
    histories = run_batch(system, [0, 0], np.array([u[-washout:], v[-washout:]]))
    outputs = output_batch(system, histories, np.vstack([z, z]))
    return (outputs[0] != outputs[1]).astype(int)


def _history_signature(
    system: FiniteSystem, history: np.ndarray, depth: int
) -> Tuple[int, ...]:
    """Outputs after the washed-out history followed by every continuation up to `depth`."""
    signature = []
    for length in range(depth + 1):
        continuations = all_words(system.n_inputs, length)
        words = np.hstack([np.tile(history, (len(continuations), 1)), continuations])
        finals = run_batch(system, np.zeros(len(words), dtype=int), words)
        signature.extend(system.output[finals].tolist())
    return tuple(signature)


@require_esp_finite
def input_quotient_realization(system: FiniteSystem) -> FiniteSystem:
    """
    Canonical realization built on classes of input histories.

    Histories longer than the pair-graph depth are washed out, so the system acts as a black
    box functional on them. Two histories are identified when every continuation produces the
    same output; the classes are explored breadth first from a constant history with
    transitions [u] z = [u z] and outputs [u] -> H(u).

    Parameters
    ----------
    system : FiniteSystem
        Finite system with the echo state property.

    Returns
    -------
    FiniteSystem
        Realization whose number of states equals the number of Nerode classes of states.
    """
    washout = pair_graph_depth(system) + 1
    depth = system.n_states - 1
    start = np.zeros(washout, dtype=int)
    signatures = {_history_signature(system, start, depth): 0}
    representatives = [start]
    transitions: List[List[int]] = []
    outputs: List[int] = []
    index = 0
    while index < len(representatives):
        history = representatives[index]
        row = []
        for symbol in range(system.n_inputs):
            extended = np.append(history[1:], symbol)
            signature = _history_signature(system, extended, depth)
            if signature not in signatures:
                signatures[signature] = len(representatives)
                representatives.append(extended)
            row.append(signatures[signature])
        transitions.append(row)
        index += 1
    for signature, _ in sorted(signatures.items(), key=lambda item: item[1]):
        outputs.append(signature[0])
    return FiniteSystem(transitions, outputs)


def input_class_count(system: FiniteSystem) -> int:
    """Number of classes of washed-out input histories under the Nerode relation."""
    return input_quotient_realization(system).n_states


def is_canonical_finite(system: FiniteSystem) -> bool:
    """Whether the system has the echo state property, all states reachable and no two
    states indistinguishable."""
    if not esp_check_finite(system):
        return False
    if len(reachable_states_finite(system)) != system.n_states:
        return False
    return nerode_partition(system).discrete


def check_finite_morphism(
    f: Sequence[int], first: FiniteSystem, second: FiniteSystem
) -> FiniteMorphismReport:
    """
    Check the morphism equations of a state map between finite systems.

    Parameters
    ----------
    f : Sequence[int]
        Image in `second` of every state of `first`.
    first : FiniteSystem
        Source system.
    second : FiniteSystem
        Target system.

    Returns
    -------
    FiniteMorphismReport
    """
    f = np.asarray(f, dtype=int)
    if f.shape != (first.n_states,) or first.n_inputs != second.n_inputs:
        raise ValueError("State map does not fit the two systems")
    if np.any(f < 0) or np.any(f >= second.n_states):
        raise ValueError(f"State map targets must lie in [0, {second.n_states})")
    equivariance = f[first.transition] != second.transition[f]
    readout = first.output != second.output[f]
    return FiniteMorphismReport(int(np.sum(equivariance)), int(np.sum(readout)))


def find_finite_isomorphism(first: FiniteSystem, second: FiniteSystem) -> np.ndarray:
    """
    The unique isomorphism between two canonical finite systems.

    States are matched by their continuation-output signatures, which are distinct within a
    canonical system.

    Parameters
    ----------
    first : FiniteSystem
        Canonical system.
    second : FiniteSystem
        Canonical system.

    Returns
    -------
    np.ndarray
        Image in `second` of every state of `first`.

    Raises
    ------
    NotCanonicalError
        If either system is not canonical.
    NoIsomorphismError
        If no signature-preserving bijection is a system morphism.
    """
    for label, system in (("first", first), ("second", second)):
        if not is_canonical_finite(system):
            raise NotCanonicalError(f"The {label} finite system is not canonical")
    if first.n_states != second.n_states or first.n_inputs != second.n_inputs:
        raise NoIsomorphismError("Canonical finite systems of different sizes are not isomorphic")
    depth = first.n_states - 1
    lookup = {
        tuple(row): state
        for state, row in enumerate(state_signatures(second, range(second.n_states), depth))
    }
    mapping = []
    for row in state_signatures(first, range(first.n_states), depth):
        if tuple(row) not in lookup:
            raise NoIsomorphismError("A state of the first system has no counterpart")
        mapping.append(lookup[tuple(row)])
    mapping = np.array(mapping, dtype=int)
    if not check_finite_morphism(mapping, first, second).passed:
        raise NoIsomorphismError("Signature matching does not give a system morphism")
    return mapping


def relabel(system: FiniteSystem, permutation: Sequence[int]) -> FiniteSystem:
    """
    Rename state x to permutation[x].

    Parameters
    ----------
    system : FiniteSystem
        Finite system.
    permutation : Sequence[int]
        Bijection of the states.

    Returns
    -------
    FiniteSystem
    """
    permutation = np.asarray(permutation, dtype=int)
    inverse = np.argsort(permutation)
    return FiniteSystem(permutation[system.transition[inverse]], system.output[inverse])


def random_finite_system(
    rng: np.random.Generator, n_states: int, n_inputs: int, n_outputs: int = 2
) -> FiniteSystem:
    """Finite system with uniformly random transition and output tables."""
    return FiniteSystem(
        rng.integers(0, n_states, size=(n_states, n_inputs)),
        rng.integers(0, n_outputs, size=n_states),
    )


def _symbols_eventually_constant(tables: np.ndarray) -> np.ndarray:
    """For a batch of shape (batch, n_states, n_inputs), whether every z^n_states is constant."""
    n_states = tables.shape[1]
    images = np.broadcast_to(np.arange(n_states)[None, :, None], tables.shape).copy()
    for _ in range(n_states):
        images = np.take_along_axis(tables, images, axis=1)
    return np.all(images == images[:, :1, :], axis=(1, 2))


def sample_esp_finite_system(
    rng: np.random.Generator,
    n_states: int,
    n_inputs: int,
    n_outputs: int = 2,
    batch_size: int = 4096,
    max_batches: int = 1000,
) -> FiniteSystem:
    """
    Uniformly random finite system conditioned on the echo state property.

    Transition tables are drawn in batches. A table survives the screen when every constant
    input word drives all states to one state, which the echo state property implies; the
    survivors are decided by the distinct-pair graph. The output table is drawn after
    acceptance.

    Parameters
    ----------
    rng : np.random.Generator
        Random generator.
    n_states : int
        Number of states.
    n_inputs : int
        Alphabet size.
    n_outputs : int (default = 2)
        Number of output symbols.
    batch_size : int (default = 4096)
        Tables drawn per batch.
    max_batches : int (default = 1000)
        Number of batches before giving up.

    Returns
    -------
    FiniteSystem

    Raises
    ------
    CanrealError
        If no table with the echo state property was drawn.
    """
    for _ in range(max_batches):
        tables = rng.integers(0, n_states, size=(batch_size, n_states, n_inputs))
        for index in np.flatnonzero(_symbols_eventually_constant(tables)):
            system = FiniteSystem(tables[index], rng.integers(0, n_outputs, size=n_states))
            if system.has_esp:
                return system
    raise CanrealError(
        f"No system with {n_states} states and {n_inputs} inputs had the echo state property "
        f"in {batch_size * max_batches} draws"
    )


def random_esp_finite_system(
    rng: np.random.Generator,
    max_states: int = 8,
    n_inputs: int = 2,
    n_outputs: int = 2,
) -> FiniteSystem:
    """
    Random finite system with the echo state property.

    The core remembers the last k input symbols. Clones copy the final row and output of a
    core state and take over some of its incoming transitions; garbage states have outgoing
    transitions only and are never reached. States are relabeled at random.

    Parameters
    ----------
    rng : np.random.Generator
        Random generator.
    max_states : int (default = 8)
        Upper bound on the number of states, at least n_inputs.
    n_inputs : int (default = 2)
        Alphabet size.
    n_outputs : int (default = 2)
        Number of output symbols.

    Returns
    -------
    FiniteSystem
    """
    if max_states < n_inputs:
        raise ValueError(f"Need room for at least {n_inputs} core states, got {max_states}")
    memories = [k for k in range(1, max_states + 1) if n_inputs**k <= max_states]
    memory = int(rng.choice(memories)) if n_inputs > 1 else 1
    words = all_words(n_inputs, memory)
    n_core = len(words)
    code = {tuple(word): index for index, word in enumerate(words)}
    transition = [
        [code[tuple(word[1:]) + (symbol,)] for symbol in range(n_inputs)] for word in words
    ]
    output = rng.integers(0, n_outputs, size=n_core).tolist()

    spare = max_states - n_core
    n_clones = int(rng.integers(0, spare + 1))
    n_garbage = int(rng.integers(0, spare - n_clones + 1))
    originals = []
    for _ in range(n_clones):
        original = int(rng.integers(0, n_core))
        clone = n_core + len(originals)
        originals.append(original)
        output.append(output[original])
        for row in transition:
            for symbol in range(n_inputs):
                if row[symbol] == original and rng.random() < 0.5:
                    row[symbol] = clone
    # a clone and its original must keep identical rows so that they merge in one step
    transition.extend(list(transition[original]) for original in originals)
    live = len(transition)
    for _ in range(n_garbage):
        transition.append(rng.integers(0, live, size=n_inputs).tolist())
        output.append(int(rng.integers(0, n_outputs)))

    system = FiniteSystem(transition, output)
    return relabel(system, rng.permutation(system.n_states))


def permutation_system(
    n_states: int, n_inputs: int = 2, rng: Optional[np.random.Generator] = None
) -> FiniteSystem:
    """
    System in which every input permutes the states; it lacks the echo state property when
    n_states >= 2.

    Input 0 is the cyclic shift, the others are random permutations.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    columns = [np.roll(np.arange(n_states), -1)]
    columns.extend(rng.permutation(n_states) for _ in range(n_inputs - 1))
    return FiniteSystem(np.column_stack(columns), np.arange(n_states) % 2)
