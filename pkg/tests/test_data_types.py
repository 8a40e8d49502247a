from canreal import data_types
from canreal.data_types import DocumentType


def test_inference():
    assert (
        data_types.infer_document_type({"A": [[0.5]], "C": [1.0], "W": [1.0]})
        == DocumentType.LINEAR_SYSTEM
    ), "Should be a linear system"
    assert (
        data_types.infer_document_type({"transition": [[0]], "output": [0]})
        == DocumentType.FINITE_SYSTEM
    ), "Should be a finite system"
    assert (
        data_types.infer_document_type({"psi": [2, -1, 3]}) == DocumentType.FILTER
    ), "Should be a filter"
    assert (
        data_types.infer_document_type({"coefficients": [1.0], "tail_bound": 0.0})
        == DocumentType.IMPULSE_RESPONSE
    ), "Should be an impulse response"
    assert data_types.infer_document_type([1, 2.5, -3]) == DocumentType.SIGNAL, "Should be a signal"
    assert (
        data_types.infer_document_type(
            {"system": {"A": [], "C": [], "W": []}, "projection": [], "section": []}
        )
        == DocumentType.REDUCED_REALIZATION
    ), "Should be a reduced realization"


def test_unknown_documents():
    assert data_types.infer_document_type({"B": 1}) == DocumentType.UNKNOWN
    assert data_types.infer_document_type("text") == DocumentType.UNKNOWN
    assert data_types.infer_document_type([True, False]) == DocumentType.UNKNOWN
    assert data_types.infer_document_type([[1, 2]]) == DocumentType.UNKNOWN


def test_empty_list_is_the_zero_signal():
    assert data_types.is_signal([])


def test_string_representation():
    assert data_types.infer_document_type({"psi": []}, string_representation=True) == "filter"
    assert str(DocumentType.LINEAR_SYSTEM) == "linear_system"


def test_predicates():
    assert data_types.is_linear_system({"A": 0, "C": 0, "W": 0, "extra": 1})
    assert not data_types.is_linear_system({"A": 0, "C": 0})
    assert data_types.is_finite_system({"transition": 0, "output": 0})
    assert not data_types.is_filter({"coefficients": []})
    assert data_types.is_impulse_response({"coefficients": []})
    assert not data_types.is_reduced_realization({"system": {}, "projection": []})


def test_unwrap_report():
    report = {
        "schema": 1,
        "sections": [
            {"name": "Echo state property", "result": {"esp": {}}},
            {"name": "Reduction", "result": {"output": {"psi": [1]}}},
        ],
    }
    assert data_types.unwrap_report(report) == {"psi": [1]}
    assert data_types.unwrap_report({"psi": [1]}) == {"psi": [1]}
    no_output = {"schema": 1, "sections": [{"name": "x", "result": {}}]}
    assert data_types.unwrap_report(no_output) is no_output
