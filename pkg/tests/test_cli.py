import json

import nbformat
import pytest

from canreal import cli
from canreal.example_systems import example_path
from canreal.report_sections.section_base import ExitCode


def _run(capsys, *argv) -> tuple:
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_check_esp(capsys):
    code, out, _ = _run(capsys, "check-esp", example_path("scalar_half"))
    assert code == 0
    assert "exit code: 0 (success)" in out

    code, _, _ = _run(capsys, "check-esp", example_path("identity"))
    assert code == 2

    code, _, _ = _run(capsys, "check-esp", example_path("permutation_finite"))
    assert code == 2

    code, _, _ = _run(capsys, "check-esp", example_path("contracting_finite"))
    assert code == 0


def test_parse_errors_are_usage_errors(capsys):
    code, out, err = _run(capsys, "check-esp", example_path("malformed"))
    assert code == 64
    assert out == ""
    assert "canreal: error" in err

    code, _, err = _run(capsys, "reduce", example_path("zero_filter"))
    assert code == 64, "A filter is not a system"
    assert "filter" in err


def test_argument_errors_are_usage_errors(capsys):
    with pytest.raises(SystemExit) as excinfo:
        cli.main(["check-esp"])
    assert excinfo.value.code == 64
    with pytest.raises(SystemExit) as excinfo:
        cli.main(["reduce", example_path("scalar_half"), "--tol", "-1"])
    assert excinfo.value.code == 64
    with pytest.raises(SystemExit) as excinfo:
        cli.main(["unknown-command"])
    assert excinfo.value.code == 64
    capsys.readouterr()


def test_reduce_structured(capsys):
    code, out, _ = _run(
        capsys, "reduce", example_path("diag_example"), "--format", "structured"
    )
    assert code == 0
    document = json.loads(out)
    result = document["sections"][0]["result"]
    assert result["reduced_dim"] == 1
    assert result["oracle_rank"] == 1

    _, again, _ = _run(capsys, "reduce", example_path("diag_example"), "--format", "structured")
    assert again == out, "Structured output should be deterministic"


def test_reduce_finite(capsys):
    code, out, _ = _run(capsys, "reduce", example_path("cloned_finite"), "--format", "structured")
    assert code == 0
    assert json.loads(out)["sections"][0]["result"]["n_classes"] == 2


def test_reduced_output_feeds_back(capsys, tmp_path):
    path = str(tmp_path / "reduced.json")
    code, out, _ = _run(
        capsys, "reduce", example_path("shift_01"), "--format", "structured", "--output", path
    )
    assert code == 0
    assert out == "", "Output should go to the file"
    code, _, _ = _run(capsys, "check-esp", path)
    assert code == 0
    code, _, _ = _run(capsys, "compare", path, example_path("filter_0001"))
    assert code == 0


def test_realize(capsys):
    code, out, _ = _run(capsys, "realize", example_path("filter_2m13"), "--format", "structured")
    assert code == 0
    assert json.loads(out)["sections"][0]["result"]["dimension"] == 3

    code, _, _ = _run(capsys, "realize", example_path("geometric_impulse"), "--eps", "1e-3")
    assert code == 0
    code, _, _ = _run(capsys, "realize", example_path("geometric_impulse"), "--eps", "1e-10")
    assert code == int(ExitCode.INFEASIBLE)


def test_compare(capsys):
    code, out, _ = _run(
        capsys,
        "compare",
        example_path("diag_example"),
        example_path("scalar_half"),
        "--format",
        "structured",
    )
    assert code == 0
    result = json.loads(out)["sections"][0]["result"]
    assert result["same_filter"] is True
    assert result["isomorphism"] is None


def test_oracle(capsys):
    code, _, _ = _run(capsys, "oracle", example_path("contracting_finite"), "--trials", "100")
    assert code == 0
    code, _, _ = _run(capsys, "oracle", example_path("permutation_finite"))
    assert code == 2
    code, _, _ = _run(capsys, "oracle", example_path("scalar_half"))
    assert code == 64


def test_notebook_format(capsys):
    code, out, _ = _run(
        capsys, "check-esp", example_path("canonical"), "--format", "notebook", "--verbosity", "1"
    )
    assert code == 0
    notebook = nbformat.reads(out, as_version=4)
    assert notebook["cells"][0]["source"] == "# Echo state property Report"


def test_config_validation():
    with pytest.raises(ValueError):
        cli.Config(tol=0.0)
    with pytest.raises(ValueError):
        cli.Config(trials=0)
    with pytest.raises(ValueError):
        cli.Config(verbosity=5)
    assert cli.Config().output_mode == cli.OutputMode.TEXT
