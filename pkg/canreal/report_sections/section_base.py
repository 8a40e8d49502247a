import logging
import uuid
from abc import ABC, abstractmethod
from enum import IntEnum
from typing import Any, Dict, List

import nbformat.v4 as nbfv4
import pandas as pd

from canreal.pandas_formatting import frame_to_text


class ExitCode(IntEnum):
    """Outcome of a section, used as the process exit status by the command line interface."""

    SUCCESS = 0
    FAILED = 2
    INDETERMINATE = 3
    INFEASIBLE = 4
    USAGE = 64

    def __str__(self):
        return self.name.lower()

    @property
    def severity(self) -> int:
        """Rank used to combine outcomes; unrelated to the numeric exit status."""
        return _SEVERITY[self]


_SEVERITY = {
    ExitCode.SUCCESS: 0,
    ExitCode.INDETERMINATE: 1,
    ExitCode.INFEASIBLE: 2,
    ExitCode.FAILED: 3,
    ExitCode.USAGE: 4,
}


class Section(ABC):
    """Base class for report sections.

    Parameters
    -----------
    verbosity : int
        Detail level of the rendered results and of the code in the exported notebook.
        Must be one of [0, 1, 2].

    Notes
    -----
    To create a new section, subclass this class and implement the abstract methods.

    * `run` performs the computation, stores its results on the section and sets `exit_code`.
      It returns the section so that calls can be chained.
    * `to_dict` returns the results as a JSON-compatible dictionary. A section that produces a
      system stores its document under the key `output`, so that structured reports can be read
      back as inputs.
    * `to_frame` summarizes the results in a dataframe.
    * `detail_frames` returns additional named dataframes rendered at verbosity 1 and 2.
    * `required_imports` and `code` return the lines that reproduce the computation with the
      library API in an exported notebook.
    """

    def __init__(self, verbosity: int = 0):
        if verbosity not in [0, 1, 2]:
            raise ValueError(f"Verbosity must be one of [0, 1, 2], not {verbosity}")
        self.verbosity = verbosity
        self.exit_code = ExitCode.SUCCESS
        self._has_run = False
        self._section_id: str = str(uuid.uuid4())
        self._class_logger = logging.getLogger(__name__).getChild(self.__class__.__name__)

    @property
    @abstractmethod
    def name(self) -> str:
        """Name of the section.

        Returns
        -------
        str
            Name of the section.
        """

    @property
    def uid(self) -> str:
        """Identifier of the section used for anchors in exported notebooks.

        Returns
        -------
        str
            Unique identifier of the section
        """
        return self._section_id

    def get_title(self, section_level: int) -> str:
        """Gets the title of the section in markdown format, with an anchor tag.

        Parameters
        ----------
        section_level: int
            The level of the section. Adds # according to it.

        Returns
        -------
        str
            Title of the section in markdown format.
        """
        title = f"{'#' * section_level} {self.name}<a id='{self.uid}'>"
        if section_level == 1:
            title += "\n---"
        return title

    def run(self) -> "Section":
        """Runs the computation once; later calls return the stored results."""
        if not self._has_run:
            self._run()
            self._has_run = True
            self._class_logger.debug("%s finished with %s", self.name, self.exit_code)
        return self

    @abstractmethod
    def _run(self) -> None:
        """Performs the computation and sets `exit_code`."""

    @abstractmethod
    def to_dict(self) -> Dict[str, Any]:
        """Results as a JSON-compatible dictionary."""

    @abstractmethod
    def to_frame(self) -> pd.DataFrame:
        """Summary of the results."""

    def detail_frames(self) -> Dict[str, pd.DataFrame]:
        """Named dataframes with vectors and matrices, shown at verbosity 1 and above."""
        return {}

    @abstractmethod
    def required_imports(self) -> List[str]:
        """Returns a list of imports to be put at the top of a generated notebook.

        Returns
        -------
        List[str]
            List of import strings, e.g. ['import numpy as np'].
        """

    @abstractmethod
    def code(self) -> List[str]:
        """Code cells reproducing the computation, one string per cell."""

    def summary(self) -> str:
        """One-line verdict shown above the summary table."""
        return str(self.exit_code)

    def render_text(self) -> str:
        """Renders the results as plain text."""
        self.run()
        parts = [self.summary(), frame_to_text(self.to_frame(), heading=self.name)]
        if self.verbosity > 0:
            for title, frame in self.detail_frames().items():
                parts.append(frame_to_text(frame, heading=title))
        return "\n\n".join(parts)

    def add_cells(self, cells: List[Dict[str, Any]]) -> None:
        """Adds the title and the code cells of the section to the list of cells.

        Parameters
        ----------
        cells : List[Dict[str, Any]]
            List of generated notebook cells which are represented as dictionaries.
        """
        cells.append(nbfv4.new_markdown_cell(self.get_title(section_level=2)))
        for source in self.code():
            cells.append(nbfv4.new_code_cell(source))
