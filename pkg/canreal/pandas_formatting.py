"""Pandas formatting package."""

from typing import Any, Dict, Optional, Sequence, Union

import numpy as np
import pandas as pd


def format_number(number: Union[int, float], significant_digits: int = 6) -> str:
    """
    Formats a number for reports: integers as they are, floats with a fixed number of
    significant digits.

    Parameters
    ---
    number : Union[int, float]
        Number to be converted to string
    significant_digits : int
        Number of significant digits of a float

    Returns
    ---
    str
        Formatted number in a string representation
    """
    if isinstance(number, (bool, np.bool_)):
        return str(bool(number))
    if isinstance(number, (int, np.integer)):
        return str(int(number))
    return f"{float(number):.{significant_digits}g}"


def _format_value(value: Any) -> str:
    if isinstance(value, (int, float, np.integer, np.floating)):
        return format_number(value)
    if isinstance(value, (list, tuple)) and len(value) <= 8:
        return "[" + ", ".join(_format_value(item) for item in value) + "]"
    if isinstance(value, (list, tuple)):
        return f"[{len(value)} entries]"
    return str(value)


def dict_to_frame(dictionary: Dict[str, Any]) -> pd.DataFrame:
    """Converts a dictionary to a single-column dataframe indexed by the keys.

    Parameters
    ----------
    dictionary : Dict[str, Any]
        Dictionary to be converted
    """
    formatted = {key: _format_value(value) for key, value in dictionary.items()}
    return pd.DataFrame.from_dict(formatted, orient="index", columns=["value"])


def matrix_to_frame(
    matrix: np.ndarray,
    row_label: str = "row",
    column_label: str = "col",
    column_names: Optional[Sequence[str]] = None,
) -> pd.DataFrame:
    """
    Converts a vector or matrix to a dataframe with labelled rows and columns.

    Parameters
    ---
    matrix : np.ndarray
        Vector or matrix
    row_label : str
        Name of the row index
    column_label : str
        Prefix of the column names
    column_names : Sequence[str], optional
        Explicit column names, overriding column_label

    Returns
    ---
    pd.DataFrame
    """
    matrix = np.atleast_2d(np.asarray(matrix))
    if column_names is None:
        column_names = [f"{column_label} {j}" for j in range(matrix.shape[1])]
    frame = pd.DataFrame(matrix, columns=list(column_names))
    return frame.rename_axis(index=row_label)


def frame_to_text(frame: pd.DataFrame, heading: Optional[str] = None) -> str:
    """
    Renders a dataframe as plain text with an optional underlined heading.

    Parameters
    ---
    frame : pd.DataFrame
        Dataframe to render
    heading : str, optional
        Text of the heading

    Returns
    ---
    str
    """
    body = frame.to_string(float_format=format_number)
    if heading is None:
        return body
    return f"{heading}\n{'-' * len(heading)}\n{body}"
