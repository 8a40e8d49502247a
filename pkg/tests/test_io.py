import json
import os

import pytest

from canreal import example_systems
from canreal.data_types import DocumentType
from canreal.exceptions import DocumentParseError
from canreal.io import dump_document, load_document, parse_document, write_atomic
from canreal.linear_systems import LinearSystem
from canreal.reduction import reduce
from canreal.report import Report
from canreal.signals import Signal


def test_parse_documents():
    document_type, system = parse_document('{"A": [[0.5]], "C": [1], "W": [1]}')
    assert document_type == DocumentType.LINEAR_SYSTEM
    assert system == LinearSystem([[0.5]], [1.0], [1.0])

    document_type, signal = parse_document("[1, 2, 3]")
    assert document_type == DocumentType.SIGNAL
    assert signal == Signal([1.0, 2.0, 3.0])

    document_type, f = parse_document('{"psi": [0, 0, 0, 1]}')
    assert document_type == DocumentType.FILTER
    assert f.memory == 4


def test_parse_errors():
    with pytest.raises(DocumentParseError):
        parse_document("{not json")
    with pytest.raises(DocumentParseError):
        parse_document('{"B": 1}')
    with pytest.raises(DocumentParseError):
        parse_document('{"A": [[0.5, 1]], "C": [1], "W": [1]}')
    with pytest.raises(DocumentParseError):
        parse_document('{"transition": [[3]], "output": [0]}')
    with pytest.raises(DocumentParseError):
        load_document(example_systems.example_path("malformed"))
    with pytest.raises(DocumentParseError):
        load_document(example_systems.example_path("does_not_exist"))


def test_reduced_realization_round_trip():
    reduced = reduce(example_systems.system_diag_example())
    document_type, restored = parse_document(dump_document(reduced.to_dict()))
    assert document_type == DocumentType.REDUCED_REALIZATION
    assert restored.system == reduced.system


def test_reports_are_unwrapped():
    report = Report().add_reduction(example_systems.system_diag_example())
    document_type, restored = parse_document(report.to_json())
    assert document_type == DocumentType.REDUCED_REALIZATION
    assert restored.dim == 1


def test_dump_document_is_deterministic():
    text = dump_document({"b": [1, 2], "a": 0.5})
    assert text.endswith("\n")
    assert text.index('"a"') < text.index('"b"')
    assert json.loads(text) == {"a": 0.5, "b": [1, 2]}
    assert dump_document({"a": 0.5, "b": [1, 2]}) == text


def test_write_atomic(tmp_path):
    path = str(tmp_path / "report.json")
    write_atomic(path, "first")
    write_atomic(path, "second")
    with open(path, encoding="utf-8") as report_file:
        assert report_file.read() == "second"
    assert os.listdir(tmp_path) == ["report.json"], "No temporary files should be left behind"
