"""Comparison section: impulse response distance and isomorphism of two systems."""
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from canreal.exceptions import CanrealError
from canreal.linear_systems import LinearSystem, esp_check, markov_parameters
from canreal.morphisms import LinearMap, find_isomorphism
from canreal.pandas_formatting import dict_to_frame, format_number, matrix_to_frame
from canreal.report_sections.code_string_formatting import document_literal
from canreal.report_sections.section_base import Section
from canreal.utils import DEFAULT_HORIZON, DEFAULT_MARGIN, DEFAULT_TOL


class ComparisonSection(Section):
    """Compares the filters of two linear systems.

    Reports the largest difference of the impulse responses over the horizon. When the
    responses agree within `tol` (relative to the size of the first response) the isomorphism
    between the two systems is recovered, which succeeds exactly when both are canonical.
    The comparison is informative only, so its exit code is always success.

    Parameters
    ----------
    first : LinearSystem
        First system.
    second : LinearSystem
        Second system.
    tol : float (default = 1e-9)
        Comparison tolerance.
    margin : float (default = 1e-8)
        Margin of the echo state property checks.
    horizon : int (default = 200)
        Largest lag compared.
    verbosity : int (default = 0)
        Detail level, one of [0, 1, 2].
    """

    def __init__(
        self,
        first: LinearSystem,
        second: LinearSystem,
        tol: float = DEFAULT_TOL,
        margin: float = DEFAULT_MARGIN,
        horizon: int = DEFAULT_HORIZON,
        verbosity: int = 0,
    ):
        super().__init__(verbosity)
        self.first = first
        self.second = second
        self.tol = tol
        self.margin = margin
        self.horizon = horizon
        self.gap: Optional[float] = None
        self.worst_lag: Optional[int] = None
        self.isomorphism: Optional[LinearMap] = None
        self.same_filter: Optional[bool] = None
        self.reason: Optional[str] = None

    @property
    def name(self) -> str:
        return "Comparison"

    def _run(self) -> None:
        with np.errstate(over="ignore", invalid="ignore"):
            reference = markov_parameters(self.first, self.horizon)
            differences = np.abs(reference - markov_parameters(self.second, self.horizon))
        differences = np.where(np.isfinite(differences), differences, np.inf)
        self.worst_lag = int(np.argmax(differences))
        self.gap = float(differences[self.worst_lag])
        finite_reference = reference[np.isfinite(reference)]
        scale = max(float(np.max(np.abs(finite_reference), initial=0.0)), 1.0)
        self.same_filter = self.gap <= self.tol * scale
        if not self.same_filter:
            self.reason = f"impulse responses differ by {format_number(self.gap)}"
            return
        for label, system in (("first", self.first), ("second", self.second)):
            certificate = esp_check(system, self.margin)
            if not certificate.holds:
                self.reason = f"echo state property of the {label} system: {certificate.status}"
                return
        try:
            self.isomorphism = find_isomorphism(
                self.first, self.second, self.tol, margin=self.margin
            )
        except CanrealError as exc:
            self.reason = str(exc)

    def summary(self) -> str:
        self.run()
        verdict = "isomorphic"
        if self.isomorphism is None:
            verdict = f"no isomorphism ({self.reason})"
        return f"impulse gap {format_number(self.gap)} at lag {self.worst_lag}, {verdict}"

    def to_dict(self) -> Dict[str, Any]:
        self.run()
        return {
            "horizon": self.horizon,
            "impulse_gap": self.gap,
            "worst_lag": self.worst_lag,
            "same_filter": self.same_filter,
            "isomorphism": None if self.isomorphism is None else self.isomorphism.to_list(),
            "reason": self.reason,
        }

    def to_frame(self) -> pd.DataFrame:
        result = self.to_dict()
        result.pop("isomorphism")
        result["isomorphic"] = self.isomorphism is not None
        return dict_to_frame(result)

    def detail_frames(self) -> Dict[str, pd.DataFrame]:
        if self.isomorphism is None or self.isomorphism.shape[0] == 0:
            return {}
        return {"Isomorphism": matrix_to_frame(self.isomorphism.matrix)}

    def required_imports(self) -> List[str]:
        return [
            "import numpy as np",
            "from canreal.linear_systems import LinearSystem, markov_parameters",
            "from canreal.morphisms import find_isomorphism",
        ]

    def code(self) -> List[str]:
        return [
            f"first = LinearSystem.from_dict({document_literal(self.first.to_dict())})",
            f"second = LinearSystem.from_dict({document_literal(self.second.to_dict())})",
            (
                f"gaps = np.abs(markov_parameters(first, {self.horizon}) "
                f"- markov_parameters(second, {self.horizon}))\ngaps.max(), gaps.argmax()"
            ),
            f"find_isomorphism(first, second, tol={self.tol!r}, margin={self.margin!r}).matrix",
        ]
