"""Command line interface.

Every sub-command builds a report, renders it as text, as one structured JSON document or as
a notebook, and returns the exit code of the report: 0 success, 2 failure of the echo state
property or of a verification, 3 indeterminate, 4 infeasible request, 64 usage or parse error.
"""

import argparse
import logging
import sys
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Tuple

from canreal.data_types import DocumentType
from canreal.exceptions import DocumentParseError
from canreal.io import load_document, write_atomic
from canreal.linear_systems import LinearSystem
from canreal.realization import shift_realization
from canreal.report import Report
from canreal.report_sections.section_base import ExitCode
from canreal.utils import DEFAULT_HORIZON, DEFAULT_MARGIN, DEFAULT_TOL

logger = logging.getLogger(__name__)


class OutputMode(Enum):
    """Rendering of the report."""

    TEXT = "text"
    STRUCTURED = "structured"
    NOTEBOOK = "notebook"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class Config:
    """Options shared by all sub-commands.

    Parameters
    ----------
    tol : float (default = 1e-9)
        Rank and comparison tolerance.
    margin : float (default = 1e-8)
        Margin of the spectral radius test.
    horizon : int (default = 200)
        Horizon of impulse responses.
    eps : float (default = 1e-6)
        Error budget of approximate realizations.
    trials : int (default = 1000)
        Number of random words per check of the finite system oracle.
    seed : int (default = 0)
        Seed of every random draw.
    output_mode : OutputMode (default = OutputMode.TEXT)
        Rendering of the report.
    verbosity : int (default = 0)
        Detail level of the report, one of [0, 1, 2].
    """

    tol: float = DEFAULT_TOL
    margin: float = DEFAULT_MARGIN
    horizon: int = DEFAULT_HORIZON
    eps: float = 1e-6
    trials: int = 1000
    seed: int = 0
    output_mode: OutputMode = OutputMode.TEXT
    verbosity: int = 0

    def __post_init__(self):
        for name in ("tol", "margin", "eps"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, not {getattr(self, name)}")
        if self.horizon < 0:
            raise ValueError(f"horizon must be non-negative, not {self.horizon}")
        if self.trials < 1:
            raise ValueError(f"trials must be positive, not {self.trials}")
        if self.verbosity not in [0, 1, 2]:
            raise ValueError(f"Verbosity has to be one of [0, 1, 2], not {self.verbosity}.")


def _expect(
    document: Tuple[DocumentType, Any], accepted: List[DocumentType], path: str
) -> Tuple[DocumentType, Any]:
    document_type, value = document
    if document_type not in accepted:
        names = ", ".join(str(kind) for kind in accepted)
        raise DocumentParseError(f"{path} holds a {document_type}, expected one of: {names}")
    if document_type == DocumentType.REDUCED_REALIZATION:
        return DocumentType.LINEAR_SYSTEM, value.system
    return document_type, value


def _load_system(path: str) -> Any:
    _, system = _expect(
        load_document(path),
        [
            DocumentType.LINEAR_SYSTEM,
            DocumentType.FINITE_SYSTEM,
            DocumentType.REDUCED_REALIZATION,
        ],
        path,
    )
    return system


def cmd_check_esp(path: str, config: Config) -> Tuple[ExitCode, Report]:
    """Decide the echo state property of a linear or finite system."""
    report = Report("Echo state property", verbosity=config.verbosity)
    report.add_echo_state(_load_system(path), margin=config.margin, horizon=config.horizon)
    return report.exit_code, report


def cmd_reduce(path: str, config: Config) -> Tuple[ExitCode, Report]:
    """Reduce a linear or finite system to its canonical realization and verify it."""
    report = Report("Reduction", verbosity=config.verbosity)
    report.add_reduction(
        _load_system(path), tol=config.tol, margin=config.margin, horizon=config.horizon
    )
    return report.exit_code, report


def cmd_realize(path: str, config: Config) -> Tuple[ExitCode, Report]:
    """Realize a finite-memory filter, an impulse response or the filter of a linear system."""
    _, source = _expect(
        load_document(path),
        [
            DocumentType.FILTER,
            DocumentType.IMPULSE_RESPONSE,
            DocumentType.LINEAR_SYSTEM,
            DocumentType.REDUCED_REALIZATION,
        ],
        path,
    )
    report = Report("Realization", verbosity=config.verbosity)
    report.add_realization(
        source, eps=config.eps, tol=config.tol, horizon=config.horizon, margin=config.margin
    )
    return report.exit_code, report


def _load_linear(path: str) -> LinearSystem:
    document_type, value = _expect(
        load_document(path),
        [DocumentType.LINEAR_SYSTEM, DocumentType.FILTER, DocumentType.REDUCED_REALIZATION],
        path,
    )
    if document_type == DocumentType.FILTER:
        return shift_realization(value)
    return value


def cmd_compare(first_path: str, second_path: str, config: Config) -> Tuple[ExitCode, Report]:
    """Compare the filters of two linear systems or finite-memory filters."""
    report = Report("Comparison", verbosity=config.verbosity)
    report.add_comparison(
        _load_linear(first_path),
        _load_linear(second_path),
        tol=config.tol,
        margin=config.margin,
        horizon=config.horizon,
    )
    return report.exit_code, report


def cmd_oracle(path: str, config: Config) -> Tuple[ExitCode, Report]:
    """Run the cross-checks of the exact finite-system constructions."""
    _, system = _expect(load_document(path), [DocumentType.FINITE_SYSTEM], path)
    report = Report("Finite system oracle", verbosity=config.verbosity)
    report.add_echo_state(system).add_oracle(system, trials=config.trials, seed=config.seed)
    return report.exit_code, report


def render(report: Report, mode: OutputMode) -> str:
    """Render a report in the requested output mode."""
    if mode == OutputMode.STRUCTURED:
        return report.to_json()
    if mode == OutputMode.NOTEBOOK:
        return report.to_notebook_text()
    return report.to_text()


class _ArgumentParser(argparse.ArgumentParser):
    """Argument parser that reports usage errors with the usage exit code."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(int(ExitCode.USAGE), f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    """Parser of the canreal command line."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="rank tolerance")
    common.add_argument(
        "--margin", type=float, default=DEFAULT_MARGIN, help="spectral radius margin"
    )
    common.add_argument(
        "--horizon", type=int, default=DEFAULT_HORIZON, help="impulse response horizon"
    )
    common.add_argument(
        "--eps", type=float, default=1e-6, help="error budget of approximate realizations"
    )
    common.add_argument(
        "--trials", type=int, default=1000, help="random words per finite oracle check"
    )
    common.add_argument("--seed", type=int, default=0, help="seed of all random draws")
    common.add_argument(
        "--format",
        dest="output_mode",
        type=OutputMode,
        choices=list(OutputMode),
        default=OutputMode.TEXT,
        help="rendering of the report",
    )
    common.add_argument("--output", default=None, help="write the report to this path")
    common.add_argument(
        "--verbosity", type=int, default=0, choices=[0, 1, 2], help="detail level"
    )

    parser = _ArgumentParser(
        prog="canreal",
        description="Echo state property, canonical realizations and reductions of filters.",
    )
    commands = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("check-esp", "decide the echo state property"),
        ("reduce", "reduce a system to its canonical realization"),
        ("realize", "realize a filter by a canonical linear system"),
        ("oracle", "cross-check the exact finite-system constructions"),
    ):
        command = commands.add_parser(name, parents=[common], help=help_text)
        command.add_argument("file", help="input document")
    compare = commands.add_parser(
        "compare", parents=[common], help="compare the filters of two systems"
    )
    compare.add_argument("first", help="first input document")
    compare.add_argument("second", help="second input document")
    return parser


_COMMANDS: Dict[str, Callable[..., Tuple[ExitCode, Report]]] = {
    "check-esp": cmd_check_esp,
    "reduce": cmd_reduce,
    "realize": cmd_realize,
    "compare": cmd_compare,
    "oracle": cmd_oracle,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Entry point of the canreal command; returns the process exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = Config(
            tol=args.tol,
            margin=args.margin,
            horizon=args.horizon,
            eps=args.eps,
            trials=args.trials,
            seed=args.seed,
            output_mode=args.output_mode,
            verbosity=args.verbosity,
        )
    except ValueError as exc:
        parser.error(str(exc))

    paths = [args.first, args.second] if args.command == "compare" else [args.file]
    try:
        exit_code, report = _COMMANDS[args.command](*paths, config)
    except DocumentParseError as exc:
        print(f"canreal: error: {exc}", file=sys.stderr)
        return int(ExitCode.USAGE)

    text = render(report, config.output_mode)
    if args.output is None:
        sys.stdout.write(text)
    else:
        write_atomic(args.output, text)
        logger.info("Report written to %s", args.output)
    return int(exit_code)


if __name__ == "__main__":
    sys.exit(main())
