"""Module defines the document types read by canreal and helper functions for recognizing them."""

from enum import IntEnum
from typing import Any, Dict, Union


class DocumentType(IntEnum):
    """Class describing the kinds of input documents."""

    LINEAR_SYSTEM = 1
    FINITE_SYSTEM = 2
    FILTER = 3
    IMPULSE_RESPONSE = 4
    SIGNAL = 5
    REDUCED_REALIZATION = 6
    UNKNOWN = 7

    def __str__(self):
        return self.name.lower()


def unwrap_report(document: Any) -> Any:
    """
    Extract the principal output of a structured report, so that reports can be fed back in.

    Parameters
    ----------
    document : Any
        Parsed JSON document.

    Returns
    -------
    Any
        The `output` of the first report section that has one, or the document itself if it is
        not a report.
    """
    if not (isinstance(document, dict) and "schema" in document and "sections" in document):
        return document
    for section in document["sections"]:
        result = section.get("result", {}) if isinstance(section, dict) else {}
        if isinstance(result, dict) and "output" in result:
            return result["output"]
    return document


def infer_document_type(
    document: Any, string_representation: bool = False
) -> Union[DocumentType, str]:
    """Infers the type of a parsed document.

    Parameters
    ----------
    document : Any
        Parsed JSON document.
    string_representation : bool
        Whether to return the document type as DocumentType enum value or string.

    Returns
    -------
    Union[DocumentType, str]
        Inferred document type or its string representation.
    """
    if is_signal(document):
        ret = DocumentType.SIGNAL
    elif not isinstance(document, dict):
        ret = DocumentType.UNKNOWN
    elif is_reduced_realization(document):
        ret = DocumentType.REDUCED_REALIZATION
    elif is_linear_system(document):
        ret = DocumentType.LINEAR_SYSTEM
    elif is_finite_system(document):
        ret = DocumentType.FINITE_SYSTEM
    elif is_filter(document):
        ret = DocumentType.FILTER
    elif is_impulse_response(document):
        ret = DocumentType.IMPULSE_RESPONSE
    else:
        ret = DocumentType.UNKNOWN

    return str(ret) if string_representation else ret


def is_signal(document: Any) -> bool:
    """A signal is a flat list of numbers."""
    return isinstance(document, list) and all(
        isinstance(value, (int, float)) and not isinstance(value, bool) for value in document
    )


def is_linear_system(document: Dict[str, Any]) -> bool:
    """Whether the document has the keys A, C and W of a linear system."""
    return {"A", "C", "W"} <= set(document)


def is_finite_system(document: Dict[str, Any]) -> bool:
    """Whether the document has the transition and output tables of a finite system."""
    return {"transition", "output"} <= set(document)


def is_filter(document: Dict[str, Any]) -> bool:
    """Whether the document holds the coefficients of a finite-memory filter."""
    return "psi" in document


def is_impulse_response(document: Dict[str, Any]) -> bool:
    """Whether the document holds a kernel with a tail bound."""
    return "coefficients" in document


def is_reduced_realization(document: Dict[str, Any]) -> bool:
    """Whether the document holds a reduced system with its projection and section."""
    return {"system", "projection", "section"} <= set(document)
