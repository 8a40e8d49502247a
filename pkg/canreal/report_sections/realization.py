"""Realization section: minimal state-space realizations of filters."""
from typing import Any, Dict, List, Optional, Union

import pandas as pd

from canreal.exceptions import InfeasibleRequestError
from canreal.linear_systems import (
    EspCertificate,
    ImpulseResponse,
    LinearSystem,
    esp_check,
    impulse_response,
)
from canreal.pandas_formatting import dict_to_frame, matrix_to_frame
from canreal.realization import (
    ApproximateRealization,
    FiniteMemoryFilter,
    approximate_realization,
    hankel_rank,
    minimal_realization,
)
from canreal.reduction import ReducedRealization
from canreal.report_sections.code_string_formatting import code_dedent, document_literal
from canreal.report_sections.echo_state import exit_code_of
from canreal.report_sections.section_base import ExitCode, Section
from canreal.utils import DEFAULT_HORIZON, DEFAULT_MARGIN, DEFAULT_TOL

Source = Union[FiniteMemoryFilter, ImpulseResponse, LinearSystem]


class RealizationSection(Section):
    """Realizes a filter by a canonical linear system.

    A finite-memory filter is realized exactly. An impulse response is truncated to the shortest
    prefix within the error budget `eps` first, and a linear system is replaced by its impulse
    response over `horizon` lags before that.

    The section succeeds when the realized dimension equals the rank of the Hankel matrix of
    the realized kernel, and reports an infeasible request when `eps` does not exceed the
    certified tail bound.

    Parameters
    ----------
    source : Union[FiniteMemoryFilter, ImpulseResponse, LinearSystem]
        Filter to realize.
    eps : float (default = 1e-6)
        Output error budget of approximate realizations.
    tol : float (default = 1e-9)
        Rank tolerance.
    horizon : int (default = 200)
        Horizon of the impulse response of a linear system source.
    margin : float (default = 1e-8)
        Margin of the echo state property check of a linear system source.
    verbosity : int (default = 0)
        Detail level, one of [0, 1, 2].
    """

    def __init__(
        self,
        source: Source,
        eps: float = 1e-6,
        tol: float = DEFAULT_TOL,
        horizon: int = DEFAULT_HORIZON,
        margin: float = DEFAULT_MARGIN,
        verbosity: int = 0,
    ):
        super().__init__(verbosity)
        if not isinstance(source, (FiniteMemoryFilter, ImpulseResponse, LinearSystem)):
            raise ValueError(f"Cannot realize an object of type {type(source).__name__}")
        self.source = source
        self.eps = eps
        self.tol = tol
        self.horizon = horizon
        self.margin = margin
        self.certificate: Optional[EspCertificate] = None
        self.realization: Optional[ReducedRealization] = None
        self.approximation: Optional[ApproximateRealization] = None
        self.oracle_rank: Optional[int] = None
        self.floor: Optional[float] = None

    @property
    def name(self) -> str:
        return "Realization"

    @property
    def exact(self) -> bool:
        """Whether the source is a finite-memory filter, realized without truncation."""
        return isinstance(self.source, FiniteMemoryFilter)

    def _run(self) -> None:
        if self.exact:
            self.realization = minimal_realization(self.source, self.tol)
            kernel = self.source
        else:
            psi = self.source
            if isinstance(psi, LinearSystem):
                self.certificate = esp_check(psi, self.margin)
                if not self.certificate.holds:
                    self.exit_code = exit_code_of(self.certificate)
                    return
                psi = impulse_response(psi, self.horizon, margin=self.margin)
            try:
                self.approximation = approximate_realization(psi, self.eps, self.tol)
            except InfeasibleRequestError as exc:
                self._class_logger.warning("%s", exc)
                self.floor = exc.floor
                self.exit_code = ExitCode.INFEASIBLE
                return
            self.realization = self.approximation.realization
            kernel = FiniteMemoryFilter(psi.coefficients[: self.approximation.cut][::-1])
        self.oracle_rank = hankel_rank(kernel, self.tol)
        consistent = self.oracle_rank == self.realization.dim
        self.exit_code = ExitCode.SUCCESS if consistent else ExitCode.FAILED

    def summary(self) -> str:
        self.run()
        if self.floor is not None:
            return f"infeasible: eps = {self.eps:g} does not exceed the tail floor {self.floor:g}"
        if self.realization is None:
            return f"not realized: echo state property {self.certificate.status}"
        kind = "exact" if self.exact else "approximate"
        return f"{kind} realization of dimension {self.realization.dim}"

    def to_dict(self) -> Dict[str, Any]:
        self.run()
        result: Dict[str, Any] = {"exact": self.exact, "eps": None if self.exact else self.eps}
        if self.certificate is not None:
            result["esp"] = self.certificate.to_dict()
        if self.floor is not None:
            result["floor"] = self.floor
        if self.realization is None:
            return result
        result["dimension"] = self.realization.dim
        result["hankel_rank"] = self.oracle_rank
        if self.approximation is not None:
            result["truncation_error"] = self.approximation.truncation_error
            result["cut"] = self.approximation.cut
        result["output"] = self.realization.system.to_dict()
        return result

    def to_frame(self) -> pd.DataFrame:
        result = self.to_dict()
        result.pop("output", None)
        result.pop("esp", None)
        return dict_to_frame(result)

    def detail_frames(self) -> Dict[str, pd.DataFrame]:
        if self.realization is None or self.realization.dim == 0:
            return {}
        system = self.realization.system
        frames = {"State matrix": matrix_to_frame(system.A)}
        if self.verbosity > 1:
            frames["Input and readout"] = matrix_to_frame(
                [system.C, system.W], row_label="vector", column_label="coordinate"
            ).rename(index={0: "C", 1: "W"})
        return frames

    def required_imports(self) -> List[str]:
        if self.exact:
            return ["from canreal.realization import FiniteMemoryFilter, minimal_realization"]
        imports = [
            "from canreal.linear_systems import ImpulseResponse",
            "from canreal.realization import approximate_realization",
        ]
        if isinstance(self.source, LinearSystem):
            imports.append("from canreal.linear_systems import LinearSystem, impulse_response")
        return imports

    def code(self) -> List[str]:
        document = document_literal(self.source.to_dict())
        if self.exact:
            return [
                f"f = FiniteMemoryFilter.from_dict({document})",
                f"realization = minimal_realization(f, tol={self.tol!r})\nrealization.system",
            ]
        if isinstance(self.source, LinearSystem):
            cells = [
                f"system = LinearSystem.from_dict({document})",
                f"psi = impulse_response(system, {self.horizon}, margin={self.margin!r})",
            ]
        else:
            cells = [f"psi = ImpulseResponse.from_dict({document})"]
        cells.append(
            code_dedent(
                f"""
                approximation = approximate_realization(psi, {self.eps!r}, tol={self.tol!r})
                approximation.truncation_error, approximation.realization.system
                """
            )
        )
        return cells
