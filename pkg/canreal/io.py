"""Reading and writing the JSON documents used by the command line interface."""

import json
import logging
import os
import tempfile
from typing import Any, Tuple

from canreal.data_types import DocumentType, infer_document_type, unwrap_report
from canreal.exceptions import DocumentParseError
from canreal.linear_systems import ImpulseResponse, LinearSystem
from canreal.nerode_oracle import FiniteSystem
from canreal.realization import FiniteMemoryFilter
from canreal.reduction import ReducedRealization
from canreal.signals import Signal

logger = logging.getLogger(__name__)

_BUILDERS = {
    DocumentType.LINEAR_SYSTEM: LinearSystem.from_dict,
    DocumentType.FINITE_SYSTEM: FiniteSystem.from_dict,
    DocumentType.FILTER: FiniteMemoryFilter.from_dict,
    DocumentType.IMPULSE_RESPONSE: ImpulseResponse.from_dict,
    DocumentType.SIGNAL: Signal.from_list,
    DocumentType.REDUCED_REALIZATION: ReducedRealization.from_dict,
}


def parse_document(text: str) -> Tuple[DocumentType, Any]:
    """
    Parse a JSON document into the matching canreal object.

    Structured reports are unwrapped to their principal output first.

    Parameters
    ----------
    text : str
        JSON text.

    Returns
    -------
    Tuple[DocumentType, Any]
        The recognized type and the constructed object.

    Raises
    ------
    DocumentParseError
        If the text is not JSON, has no recognizable type or fails validation.
    """
    try:
        document = unwrap_report(json.loads(text))
    except json.JSONDecodeError as exc:
        raise DocumentParseError(f"Invalid JSON: {exc}") from exc
    document_type = infer_document_type(document)
    if document_type == DocumentType.UNKNOWN:
        raise DocumentParseError("Document is not a system, filter, impulse response or signal")
    try:
        return document_type, _BUILDERS[document_type](document)
    except (ValueError, TypeError, KeyError, IndexError) as exc:
        raise DocumentParseError(f"Invalid {document_type} document: {exc}") from exc


def load_document(path: str) -> Tuple[DocumentType, Any]:
    """
    Read and parse a JSON document from a file.

    Parameters
    ----------
    path : str
        File path.

    Returns
    -------
    Tuple[DocumentType, Any]

    Raises
    ------
    DocumentParseError
        If the file cannot be read or parsed.
    """
    try:
        with open(path, encoding="utf-8") as document_file:
            text = document_file.read()
    except OSError as exc:
        raise DocumentParseError(f"Cannot read {path}: {exc}") from exc
    document_type, value = parse_document(text)
    logger.debug("Loaded %s from %s", document_type, path)
    return document_type, value


def dump_document(document: Any) -> str:
    """Deterministic JSON text: sorted keys, two-space indentation, trailing newline."""
    return json.dumps(document, sort_keys=True, indent=2) + "\n"


def write_atomic(path: str, text: str) -> None:
    """
    Write text to a file so that readers see either the old or the complete new content.

    Parameters
    ----------
    path : str
        Target file path.
    text : str
        Content.
    """
    directory = os.path.dirname(os.path.abspath(path))
    with tempfile.NamedTemporaryFile(
        "w", encoding="utf-8", dir=directory, prefix=".canreal-", delete=False
    ) as temporary:
        temporary.write(text)
        temporary_path = temporary.name
    try:
        os.replace(temporary_path, path)
    except OSError:
        os.unlink(temporary_path)
        raise
