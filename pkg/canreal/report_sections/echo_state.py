"""Echo state property sections."""
from typing import Any, Dict, List, Optional

import pandas as pd

from canreal.exceptions import NoContractionError
from canreal.linear_systems import (
    EspCertificate,
    EspStatus,
    ImpulseResponse,
    LinearSystem,
    esp_check,
    impulse_response,
    state_gain_bound,
)
from canreal.nerode_oracle import FiniteSystem, esp_witness_cycle, pair_graph_depth
from canreal.pandas_formatting import dict_to_frame, format_number, matrix_to_frame
from canreal.report_sections.code_string_formatting import code_dedent, document_literal
from canreal.report_sections.section_base import ExitCode, Section
from canreal.utils import DEFAULT_HORIZON, DEFAULT_MARGIN

_STATUS_EXIT_CODES = {
    EspStatus.HOLDS: ExitCode.SUCCESS,
    EspStatus.FAILS: ExitCode.FAILED,
    EspStatus.INDETERMINATE: ExitCode.INDETERMINATE,
}


def exit_code_of(certificate: EspCertificate) -> ExitCode:
    """Exit code for an echo state certificate."""
    return _STATUS_EXIT_CODES[certificate.status]


class EchoStateSection(Section):
    """Decides the echo state property of a linear system.

    When the property holds, the section also reports a certified bound on the l1 norm of the
    impulse response and on the gain from inputs to states.

    Parameters
    ----------
    system : LinearSystem
        System to test.
    margin : float (default = 1e-8)
        Margin of the spectral radius test.
    horizon : int (default = 200)
        Horizon of the impulse response.
    verbosity : int (default = 0)
        Detail level, one of [0, 1, 2].
    """

    def __init__(
        self,
        system: LinearSystem,
        margin: float = DEFAULT_MARGIN,
        horizon: int = DEFAULT_HORIZON,
        verbosity: int = 0,
    ):
        super().__init__(verbosity)
        self.system = system
        self.margin = margin
        self.horizon = horizon
        self.certificate: Optional[EspCertificate] = None
        self.impulse: Optional[ImpulseResponse] = None
        self.gain: Optional[float] = None

    @property
    def name(self) -> str:
        return "Echo State Property"

    def _run(self) -> None:
        self.certificate = esp_check(self.system, self.margin)
        self.exit_code = exit_code_of(self.certificate)
        if not self.certificate.holds:
            return
        try:
            self.impulse = impulse_response(self.system, self.horizon, margin=self.margin)
            self.gain = state_gain_bound(self.system, margin=self.margin)
        except NoContractionError as exc:
            self._class_logger.warning("No l1 certificate: %s", exc)

    def summary(self) -> str:
        self.run()
        return f"rho = {format_number(self.certificate.rho)} ({self.certificate.status})"

    def to_dict(self) -> Dict[str, Any]:
        self.run()
        result = {"kind": "linear", "dimension": self.system.N, **self.certificate.to_dict()}
        if self.impulse is not None:
            result["l1_norm_bound"] = self.impulse.l1_norm_bound
            result["tail_bound"] = self.impulse.tail_bound
            result["state_gain_bound"] = self.gain
        return result

    def to_frame(self) -> pd.DataFrame:
        result = self.to_dict()
        result.pop("eigenvalue")
        return dict_to_frame(result)

    def detail_frames(self) -> Dict[str, pd.DataFrame]:
        if self.impulse is None:
            return {}
        count = len(self.impulse.coefficients) if self.verbosity > 1 else 10
        return {
            "Impulse response": matrix_to_frame(
                self.impulse.coefficients[:count, None], row_label="lag", column_names=["psi"]
            )
        }

    def required_imports(self) -> List[str]:
        return ["from canreal.linear_systems import LinearSystem, esp_check, impulse_response"]

    def code(self) -> List[str]:
        cells = [
            f"system = LinearSystem.from_dict({document_literal(self.system.to_dict())})",
            f"certificate = esp_check(system, margin={self.margin!r})\ncertificate",
        ]
        if self.verbosity > 0:
            cells.append(
                code_dedent(
                    f"""
                    psi = impulse_response(system, {self.horizon}, margin={self.margin!r})
                    psi.l1_norm_bound, psi.tail_bound
                    """
                )
            )
        return cells


class FiniteEchoStateSection(Section):
    """Decides the echo state property of a finite system with the distinct-pair graph.

    Parameters
    ----------
    system : FiniteSystem
        System to test.
    verbosity : int (default = 0)
        Detail level, one of [0, 1, 2].
    """

    def __init__(self, system: FiniteSystem, verbosity: int = 0):
        super().__init__(verbosity)
        self.system = system
        self.cycle = None
        self.depth: Optional[int] = None

    @property
    def name(self) -> str:
        return "Echo State Property (finite system)"

    def _run(self) -> None:
        self.cycle = esp_witness_cycle(self.system)
        if self.cycle is None:
            self.depth = pair_graph_depth(self.system)
            self.exit_code = ExitCode.SUCCESS
        else:
            self.exit_code = ExitCode.FAILED

    def summary(self) -> str:
        self.run()
        if self.cycle is None:
            return f"echo state property holds, every word of length {self.depth + 1} synchronizes"
        return f"echo state property fails, distinct-pair cycle {self.cycle}"

    def to_dict(self) -> Dict[str, Any]:
        self.run()
        return {
            "kind": "finite",
            "n_states": self.system.n_states,
            "n_inputs": self.system.n_inputs,
            "holds": self.cycle is None,
            "cycle": None if self.cycle is None else [list(pair) for pair in self.cycle],
            "pair_graph_depth": self.depth,
        }

    def to_frame(self) -> pd.DataFrame:
        return dict_to_frame(self.to_dict())

    def required_imports(self) -> List[str]:
        return ["from canreal.nerode_oracle import FiniteSystem, esp_witness_cycle"]

    def code(self) -> List[str]:
        return [
            f"system = FiniteSystem.from_dict({document_literal(self.system.to_dict())})",
            "esp_witness_cycle(system)",
        ]
