"""Reduction sections for linear and finite systems."""
from typing import Any, Dict, List, Optional

import pandas as pd

from canreal.linear_systems import EspCertificate, LinearSystem, esp_check
from canreal.nerode_oracle import (
    FiniteSystem,
    Partition,
    esp_witness_cycle,
    is_canonical_finite,
    nerode_partition,
    reachable_states_finite,
    reduce_finite,
)
from canreal.pandas_formatting import dict_to_frame, format_number, matrix_to_frame
from canreal.reduction import (
    ReducedRealization,
    ReductionReport,
    reduce,
    reduction_oracle_rank,
    verify_reduction,
)
from canreal.report_sections.code_string_formatting import code_dedent, document_literal
from canreal.report_sections.echo_state import exit_code_of
from canreal.report_sections.section_base import ExitCode, Section
from canreal.utils import DEFAULT_HORIZON, DEFAULT_MARGIN, DEFAULT_TOL


class ReductionSection(Section):
    """Reduces a linear system to its canonical realization and verifies the result.

    The section succeeds when the verification passes and the reduced dimension equals the
    rank of the Hankel factor product.

    Parameters
    ----------
    system : LinearSystem
        System to reduce.
    tol : float (default = 1e-9)
        Rank and verification tolerance.
    margin : float (default = 1e-8)
        Margin of the echo state property check.
    horizon : int (default = 200)
        Horizon of the impulse response comparison.
    verbosity : int (default = 0)
        Detail level, one of [0, 1, 2].
    """

    def __init__(
        self,
        system: LinearSystem,
        tol: float = DEFAULT_TOL,
        margin: float = DEFAULT_MARGIN,
        horizon: int = DEFAULT_HORIZON,
        verbosity: int = 0,
    ):
        super().__init__(verbosity)
        self.system = system
        self.tol = tol
        self.margin = margin
        self.horizon = horizon
        self.certificate: Optional[EspCertificate] = None
        self.reduced: Optional[ReducedRealization] = None
        self.verification: Optional[ReductionReport] = None
        self.oracle_rank: Optional[int] = None

    @property
    def name(self) -> str:
        return "Reduction"

    def _run(self) -> None:
        self.certificate = esp_check(self.system, self.margin)
        if not self.certificate.holds:
            self.exit_code = exit_code_of(self.certificate)
            return
        self.reduced = reduce(self.system, self.tol, margin=self.margin)
        self.verification = verify_reduction(self.system, self.reduced, self.horizon, self.tol)
        self.oracle_rank = reduction_oracle_rank(self.system, self.tol)
        consistent = self.oracle_rank == self.reduced.dim
        if not consistent:
            self._class_logger.warning(
                "Reduced dimension %d differs from the Hankel factor rank %d",
                self.reduced.dim,
                self.oracle_rank,
            )
        passed = self.verification.passed and consistent
        self.exit_code = ExitCode.SUCCESS if passed else ExitCode.FAILED

    def summary(self) -> str:
        self.run()
        if self.reduced is None:
            return (
                f"not reduced: rho = {format_number(self.certificate.rho)} "
                f"({self.certificate.status})"
            )
        verdict = "verified" if self.exit_code == ExitCode.SUCCESS else "verification failed"
        return f"reduced dimension {self.reduced.dim} of {self.system.N}, {verdict}"

    def to_dict(self) -> Dict[str, Any]:
        self.run()
        result = {"esp": self.certificate.to_dict(), "original_dim": self.system.N}
        if self.reduced is not None:
            result.update(
                {
                    "reduced_dim": self.reduced.dim,
                    "oracle_rank": self.oracle_rank,
                    "verification": self.verification.to_dict(),
                    "warnings": list(self.reduced.warnings),
                    "output": self.reduced.to_dict(),
                }
            )
        return result

    def to_frame(self) -> pd.DataFrame:
        self.run()
        summary = {"rho": self.certificate.rho, "original dimension": self.system.N}
        if self.reduced is not None:
            summary["reduced dimension"] = self.reduced.dim
            summary["Hankel factor rank"] = self.oracle_rank
            summary.update(self.verification.to_dict())
        return dict_to_frame(summary)

    def detail_frames(self) -> Dict[str, pd.DataFrame]:
        if self.reduced is None or self.reduced.dim == 0:
            return {}
        small = self.reduced.system
        frames = {
            "Reduced state matrix": matrix_to_frame(small.A),
            "Reduced input and readout": matrix_to_frame(
                [small.C, small.W], row_label="vector", column_label="coordinate"
            ).rename(index={0: "C", 1: "W"}),
        }
        if self.verbosity > 1:
            frames["Projection"] = matrix_to_frame(self.reduced.projection)
        return frames

    def required_imports(self) -> List[str]:
        return [
            "from canreal.linear_systems import LinearSystem",
            "from canreal.reduction import reduce, verify_reduction",
        ]

    def code(self) -> List[str]:
        cells = [
            f"system = LinearSystem.from_dict({document_literal(self.system.to_dict())})",
            f"reduced = reduce(system, tol={self.tol!r}, margin={self.margin!r})\nreduced.system",
            code_dedent(
                f"""
                report = verify_reduction(system, reduced, horizon={self.horizon}, tol={self.tol!r})
                report.passed
                """
            ),
        ]
        if self.verbosity > 0:
            cells.append("reduced.projection, reduced.section")
        return cells


class FiniteReductionSection(Section):
    """Reduces a finite system to the Nerode classes of its reachable states.

    Parameters
    ----------
    system : FiniteSystem
        System to reduce.
    verbosity : int (default = 0)
        Detail level, one of [0, 1, 2].
    """

    def __init__(self, system: FiniteSystem, verbosity: int = 0):
        super().__init__(verbosity)
        self.system = system
        self.cycle = None
        self.reachable: List[int] = []
        self.partition: Optional[Partition] = None
        self.reduced: Optional[FiniteSystem] = None
        self.canonical = False

    @property
    def name(self) -> str:
        return "Reduction (finite system)"

    def _run(self) -> None:
        self.cycle = esp_witness_cycle(self.system)
        if self.cycle is not None:
            self.exit_code = ExitCode.FAILED
            return
        self.reachable = sorted(reachable_states_finite(self.system))
        self.partition = nerode_partition(self.system)
        self.reduced = reduce_finite(self.system)
        self.canonical = is_canonical_finite(self.reduced)
        self.exit_code = ExitCode.SUCCESS if self.canonical else ExitCode.FAILED

    def summary(self) -> str:
        self.run()
        if self.reduced is None:
            return f"not reduced: distinct-pair cycle {self.cycle}"
        return f"reduced {self.system.n_states} states to {self.reduced.n_states} classes"

    def to_dict(self) -> Dict[str, Any]:
        self.run()
        if self.reduced is None:
            return {
                "n_states": self.system.n_states,
                "cycle": [list(pair) for pair in self.cycle],
            }
        return {
            "n_states": self.system.n_states,
            "reachable_states": self.reachable,
            "n_classes": self.partition.n_classes,
            "class_of": self.partition.class_of.tolist(),
            "canonical": self.canonical,
            "output": self.reduced.to_dict(),
        }

    def to_frame(self) -> pd.DataFrame:
        result = self.to_dict()
        result.pop("output", None)
        return dict_to_frame(result)

    def detail_frames(self) -> Dict[str, pd.DataFrame]:
        if self.reduced is None:
            return {}
        return {
            "Reduced transitions": matrix_to_frame(
                self.reduced.transition, row_label="class", column_label="input"
            ).assign(output=self.reduced.output)
        }

    def required_imports(self) -> List[str]:
        return ["from canreal.nerode_oracle import FiniteSystem, nerode_partition, reduce_finite"]

    def code(self) -> List[str]:
        return [
            f"system = FiniteSystem.from_dict({document_literal(self.system.to_dict())})",
            "nerode_partition(system).classes()",
            "reduced = reduce_finite(system)\nreduced.to_dict()",
        ]
