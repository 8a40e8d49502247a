"""Oracle section: cross-checks of the exact finite-system constructions."""
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from canreal.exceptions import CanrealError
from canreal.nerode_oracle import (
    FiniteSystem,
    Partition,
    esp_witness_cycle,
    find_finite_isomorphism,
    ifp_empirical,
    input_class_count,
    is_canonical_finite,
    nerode_partition,
    output_batch,
    pair_graph_depth,
    reachable_states_finite,
    reduce_finite,
    relabel,
    run_batch,
    state_signatures,
)
from canreal.pandas_formatting import dict_to_frame
from canreal.report_sections.code_string_formatting import document_literal
from canreal.report_sections.section_base import ExitCode, Section

CONTINUATION_LENGTH = 50


class OracleSection(Section):
    """Cross-checks the exact constructions on a finite system by random simulation.

    Every check compares a graph or partition computation against an independent brute-force
    or simulated counterpart:

    * synchronization: every word longer than the pair-graph depth maps all states to one state,
    * reachability: states observed after long random words lie in the reachable set,
    * partition: the Nerode partition agrees with continuation-output signatures,
    * reduction: the reduced system is canonical and produces the same outputs as the original
      on random words after a washout,
    * input classes: the input-side quotient has as many states as there are Nerode classes,
    * input forgetting: two washed-out histories give equal outputs once the common continuation
      is longer than the pair-graph depth,
    * isomorphism: a random relabeling of the reduced system is recovered exactly.

    Parameters
    ----------
    system : FiniteSystem
        System to check.
    trials : int (default = 1000)
        Number of random words per simulated check.
    seed : int (default = 0)
        Seed of the random generator.
    verbosity : int (default = 0)
        Detail level, one of [0, 1, 2].
    """

    def __init__(
        self, system: FiniteSystem, trials: int = 1000, seed: int = 0, verbosity: int = 0
    ):
        super().__init__(verbosity)
        if trials < 1:
            raise ValueError(f"Number of trials must be positive, not {trials}")
        self.system = system
        self.trials = trials
        self.seed = seed
        self.cycle = None
        self.depth: Optional[int] = None
        self.reachable: List[int] = []
        self.partition: Optional[Partition] = None
        self.reduced: Optional[FiniteSystem] = None
        self.checks: Dict[str, bool] = {}

    @property
    def name(self) -> str:
        return "Finite system oracle"

    def _random_words(self, rng: np.random.Generator, length: int) -> np.ndarray:
        return rng.integers(0, self.system.n_inputs, size=(self.trials, length))

    def _run(self) -> None:
        self.cycle = esp_witness_cycle(self.system)
        if self.cycle is not None:
            self.exit_code = ExitCode.FAILED
            return
        rng = np.random.default_rng(self.seed)
        system = self.system
        n = system.n_states
        self.depth = pair_graph_depth(system)
        self.reachable = sorted(reachable_states_finite(system))
        self.partition = nerode_partition(system)
        self.reduced = reduce_finite(system)

        self.checks["synchronization"] = self._check_synchronization(rng)
        self.checks["reachable_states"] = self._check_reachable(rng)
        self.checks["partition"] = self._check_partition()
        self.checks["reduced_canonical"] = is_canonical_finite(self.reduced)
        self.checks["output_equivalence"] = self._check_outputs(rng)
        self.checks["input_classes"] = input_class_count(system) == self.partition.n_classes
        self.checks["input_forgetting"] = self._check_forgetting(rng, 4 * n * n)
        self.checks["isomorphism"] = self._check_isomorphism(rng)
        failed = [name for name, passed in self.checks.items() if not passed]
        if failed:
            self._class_logger.warning("Failed cross-checks: %s", ", ".join(failed))
        self.exit_code = ExitCode.FAILED if failed else ExitCode.SUCCESS

    def _check_synchronization(self, rng: np.random.Generator) -> bool:
        n = self.system.n_states
        words = self._random_words(rng, self.depth + 1)
        finals = run_batch(self.system, np.tile(np.arange(n), self.trials), np.repeat(words, n, 0))
        finals = finals.reshape(self.trials, n)
        return bool(np.all(finals == finals[:, :1]))

    def _check_reachable(self, rng: np.random.Generator) -> bool:
        n = self.system.n_states
        starts = rng.integers(0, n, size=self.trials)
        finals = run_batch(self.system, starts, self._random_words(rng, 4 * n))
        return set(finals.tolist()) <= set(self.reachable)

    def _check_partition(self) -> bool:
        signatures = state_signatures(self.system, self.reachable, self.system.n_states - 1)
        _, labels = np.unique(signatures, axis=0, return_inverse=True)
        labels = labels.reshape(-1)
        classes = self.partition.class_of[self.reachable]
        pairs = set(zip(labels.tolist(), classes.tolist()))
        return len(pairs) == len(set(labels.tolist())) == len(set(classes.tolist()))

    def _check_outputs(self, rng: np.random.Generator) -> bool:
        n = self.system.n_states
        washout = max(4 * n, self.depth + 1)
        words = np.hstack(
            [self._random_words(rng, washout), self._random_words(rng, CONTINUATION_LENGTH)]
        )
        original = output_batch(self.system, rng.integers(0, n, size=self.trials), words)
        starts = rng.integers(0, self.reduced.n_states, size=self.trials)
        reduced = output_batch(self.reduced, starts, words)
        return bool(np.array_equal(original[:, washout:], reduced[:, washout:]))

    def _check_forgetting(self, rng: np.random.Generator, washout: int) -> bool:
        for _ in range(max(1, self.trials // 100)):
            u, v = rng.integers(0, self.system.n_inputs, size=(2, washout))
            z = rng.integers(0, self.system.n_inputs, size=CONTINUATION_LENGTH)
            if np.any(ifp_empirical(self.system, u, v, z)[self.depth :]):
                return False
        return True

    def _check_isomorphism(self, rng: np.random.Generator) -> bool:
        permutation = rng.permutation(self.reduced.n_states)
        relabeled = relabel(self.reduced, permutation)
        try:
            recovered = find_finite_isomorphism(self.reduced, relabeled)
        except CanrealError as exc:
            self._class_logger.warning("Isomorphism check failed: %s", exc)
            return False
        return bool(np.array_equal(recovered, permutation))

    def summary(self) -> str:
        self.run()
        if self.cycle is not None:
            return f"echo state property fails, distinct-pair cycle {self.cycle}"
        passed = sum(self.checks.values())
        return (
            f"{passed} of {len(self.checks)} cross-checks passed, "
            f"{len(self.reachable)} reachable states in {self.reduced.n_states} classes"
        )

    def to_dict(self) -> Dict[str, Any]:
        self.run()
        if self.cycle is not None:
            return {
                "n_states": self.system.n_states,
                "esp": False,
                "cycle": [list(pair) for pair in self.cycle],
            }
        return {
            "n_states": self.system.n_states,
            "esp": True,
            "pair_graph_depth": self.depth,
            "reachable_states": self.reachable,
            "n_classes": self.partition.n_classes,
            "reduced_states": self.reduced.n_states,
            "trials": self.trials,
            "seed": self.seed,
            "checks": dict(self.checks),
        }

    def to_frame(self) -> pd.DataFrame:
        result = self.to_dict()
        result.update(result.pop("checks", {}))
        return dict_to_frame(result)

    def detail_frames(self) -> Dict[str, pd.DataFrame]:
        if self.partition is None:
            return {}
        classes = {
            f"class {index}": members for index, members in enumerate(self.partition.classes())
        }
        return {"Nerode classes": dict_to_frame(classes)}

    def required_imports(self) -> List[str]:
        return [
            "from canreal.nerode_oracle import (\n"
            "    FiniteSystem,\n"
            "    input_quotient_realization,\n"
            "    nerode_partition,\n"
            "    reachable_states_finite,\n"
            "    reduce_finite,\n"
            ")"
        ]

    def code(self) -> List[str]:
        return [
            f"system = FiniteSystem.from_dict({document_literal(self.system.to_dict())})",
            "sorted(reachable_states_finite(system)), nerode_partition(system).classes()",
            "reduce_finite(system).to_dict()",
            "input_quotient_realization(system).to_dict()",
        ]
