from pprint import pformat
from textwrap import dedent
from typing import Any


def code_dedent(input_string: str) -> str:
    """Removes all white spaces from each line that is common for all lines.

    Parameters
    ----------
    input_string : str
        Input string with lines.

    Returns
    -------
    str
        input_string with common leading whitespace removed from each line.
    """
    return dedent(input_string.strip("\n"))


def document_literal(document: Any) -> str:
    """Python source of a JSON-compatible document, for embedding inputs in notebooks.

    Parameters
    ----------
    document : Any
        JSON-compatible value.

    Returns
    -------
    str
    """
    return pformat(document, width=96, sort_dicts=True)
