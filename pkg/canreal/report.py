"""Report package."""

import logging
from typing import Any, Dict, List, Optional, Union

import nbformat as nbf
import nbformat.v4 as nbf4

from canreal.io import dump_document, write_atomic
from canreal.linear_systems import ImpulseResponse, LinearSystem
from canreal.nerode_oracle import FiniteSystem
from canreal.realization import FiniteMemoryFilter
from canreal.report_sections.comparison import ComparisonSection
from canreal.report_sections.echo_state import EchoStateSection, FiniteEchoStateSection
from canreal.report_sections.oracle import OracleSection
from canreal.report_sections.realization import RealizationSection
from canreal.report_sections.reduction import FiniteReductionSection, ReductionSection
from canreal.report_sections.section_base import ExitCode, Section
from canreal.utils import DEFAULT_HORIZON, DEFAULT_MARGIN, DEFAULT_TOL

SCHEMA_VERSION = 1


class Report:
    """
    Ordered collection of sections run on one or two input documents.

    Parameters
    ----------
    title : str (default = "canreal")
        Title of the report, used in structured output and exported notebooks.
    verbosity : int (default = 0)
        The default verbosity of the sections, has to be one of [0, 1, 2].

    Raises
    ------
    ValueError
        If verbosity is not one of [0, 1, 2].
    """

    def __init__(self, title: str = "canreal", verbosity: int = 0):
        self._class_logger = logging.getLogger(__name__).getChild(self.__class__.__name__)
        if verbosity not in [0, 1, 2]:
            raise ValueError(f"Verbosity has to be one of [0, 1, 2], not {verbosity}.")
        self.title = title
        self.verbosity = verbosity
        self.sections: List[Section] = []

    def _verbosity(self, verbosity: Optional[int]) -> int:
        return verbosity if verbosity is not None else self.verbosity

    def add_section(self, section: Section) -> "Report":
        """Appends an already constructed section."""
        self.sections.append(section)
        return self

    def add_echo_state(
        self,
        system: Union[LinearSystem, FiniteSystem],
        margin: float = DEFAULT_MARGIN,
        horizon: int = DEFAULT_HORIZON,
        verbosity: Optional[int] = None,
    ) -> "Report":
        """
        Adds an echo state property section for a linear or a finite system.

        Parameters
        ----------
        system : Union[LinearSystem, FiniteSystem]
            System to test.
        margin : float (default = 1e-8)
            Margin of the spectral radius test of a linear system.
        horizon : int (default = 200)
            Horizon of the impulse response of a linear system.
        verbosity : int, optional
            Verbosity of the section. If None, the report verbosity is used.
        """
        if isinstance(system, FiniteSystem):
            section = FiniteEchoStateSection(system, verbosity=self._verbosity(verbosity))
        else:
            section = EchoStateSection(
                system, margin=margin, horizon=horizon, verbosity=self._verbosity(verbosity)
            )
        return self.add_section(section)

    def add_reduction(
        self,
        system: Union[LinearSystem, FiniteSystem],
        tol: float = DEFAULT_TOL,
        margin: float = DEFAULT_MARGIN,
        horizon: int = DEFAULT_HORIZON,
        verbosity: Optional[int] = None,
    ) -> "Report":
        """
        Adds a reduction section for a linear or a finite system.

        Parameters
        ----------
        system : Union[LinearSystem, FiniteSystem]
            System to reduce.
        tol : float (default = 1e-9)
            Rank and verification tolerance.
        margin : float (default = 1e-8)
            Margin of the echo state property check.
        horizon : int (default = 200)
            Horizon of the impulse response comparison.
        verbosity : int, optional
            Verbosity of the section. If None, the report verbosity is used.
        """
        if isinstance(system, FiniteSystem):
            section = FiniteReductionSection(system, verbosity=self._verbosity(verbosity))
        else:
            section = ReductionSection(
                system,
                tol=tol,
                margin=margin,
                horizon=horizon,
                verbosity=self._verbosity(verbosity),
            )
        return self.add_section(section)

    def add_realization(
        self,
        source: Union[FiniteMemoryFilter, ImpulseResponse, LinearSystem],
        eps: float = 1e-6,
        tol: float = DEFAULT_TOL,
        horizon: int = DEFAULT_HORIZON,
        margin: float = DEFAULT_MARGIN,
        verbosity: Optional[int] = None,
    ) -> "Report":
        """
        Adds a realization section.

        Parameters
        ----------
        source : Union[FiniteMemoryFilter, ImpulseResponse, LinearSystem]
            Filter to realize.
        eps : float (default = 1e-6)
            Error budget of approximate realizations.
        tol : float (default = 1e-9)
            Rank tolerance.
        horizon : int (default = 200)
            Horizon of the impulse response of a linear system source.
        margin : float (default = 1e-8)
            Margin of the echo state property check of a linear system source.
        verbosity : int, optional
            Verbosity of the section. If None, the report verbosity is used.
        """
        return self.add_section(
            RealizationSection(
                source,
                eps=eps,
                tol=tol,
                horizon=horizon,
                margin=margin,
                verbosity=self._verbosity(verbosity),
            )
        )

    def add_comparison(
        self,
        first: LinearSystem,
        second: LinearSystem,
        tol: float = DEFAULT_TOL,
        margin: float = DEFAULT_MARGIN,
        horizon: int = DEFAULT_HORIZON,
        verbosity: Optional[int] = None,
    ) -> "Report":
        """
        Adds a comparison section for two linear systems.

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
        verbosity : int, optional
            Verbosity of the section. If None, the report verbosity is used.
        """
        return self.add_section(
            ComparisonSection(
                first,
                second,
                tol=tol,
                margin=margin,
                horizon=horizon,
                verbosity=self._verbosity(verbosity),
            )
        )

    def add_oracle(
        self,
        system: FiniteSystem,
        trials: int = 1000,
        seed: int = 0,
        verbosity: Optional[int] = None,
    ) -> "Report":
        """
        Adds the finite system oracle section.

        Parameters
        ----------
        system : FiniteSystem
            System to check.
        trials : int (default = 1000)
            Number of random words per simulated check.
        seed : int (default = 0)
            Seed of the random generator.
        verbosity : int, optional
            Verbosity of the section. If None, the report verbosity is used.
        """
        return self.add_section(
            OracleSection(system, trials=trials, seed=seed, verbosity=self._verbosity(verbosity))
        )

    def run(self) -> "Report":
        """Runs every section that has not run yet."""
        for section in self.sections:
            section.run()
        self._class_logger.debug("Ran %d sections", len(self.sections))
        return self

    @property
    def exit_code(self) -> ExitCode:
        """
        The most severe exit code of the sections, success for an empty report.

        Severity increases from success over indeterminate and infeasible to failed.
        """
        self.run()
        return max(
            (section.exit_code for section in self.sections),
            key=lambda code: code.severity,
            default=ExitCode.SUCCESS,
        )

    def output(self) -> Optional[Dict[str, Any]]:
        """The `output` document of the last section that produced one."""
        for section in reversed(self.sections):
            document = section.to_dict().get("output")
            if document is not None:
                return document
        return None

    def to_dict(self) -> Dict[str, Any]:
        """
        The report as one JSON-compatible document.

        The document carries no run-specific identifiers, so equal inputs and options give
        equal documents.
        """
        self.run()
        return {
            "schema": SCHEMA_VERSION,
            "report": self.title,
            "exit_code": int(self.exit_code),
            "sections": [
                {"name": section.name, "result": section.to_dict()} for section in self.sections
            ],
        }

    def to_json(self) -> str:
        """Structured output as deterministic JSON text."""
        return dump_document(self.to_dict())

    def to_text(self) -> str:
        """Plain text rendering of every section."""
        self.run()
        parts = [f"{self.title}\n{'=' * len(self.title)}"]
        parts.extend(section.render_text() for section in self.sections)
        parts.append(f"exit code: {int(self.exit_code)} ({self.exit_code})")
        return "\n\n".join(parts) + "\n"

    def _generate_notebook(self, extra_imports: Optional[List[str]] = None) -> nbf.NotebookNode:
        """Generate a notebook object for the report.

        Parameters
        ----------
        extra_imports : List[str], optional
            Any additional imports to be included in imports section
            (other than imports required by report sections).

        Returns
        -------
        nbf.NotebookNode
            Generated notebook object.
        """
        nb = nbf4.new_notebook()
        nb["cells"].append(nbf4.new_markdown_cell(f"# {self.title} Report"))

        imports_set = {"import numpy as np"}
        if extra_imports is not None:
            imports_set.update(extra_imports)
        for section in self.sections:
            imports_set.update(section.required_imports())
        nb["cells"].append(nbf4.new_code_cell("\n".join(sorted(imports_set))))

        for section in self.sections:
            section.add_cells(nb["cells"])
        return nb

    def to_notebook_text(self) -> str:
        """The exported notebook as JSON text."""
        return nbf.writes(self._generate_notebook())

    def export_notebook(self, notebook_filepath: str) -> None:
        """Exports the report as an .ipynb file.

        Parameters
        ----------
        notebook_filepath : str
            Filepath of the exported notebook.
        """
        write_atomic(notebook_filepath, self.to_notebook_text())
