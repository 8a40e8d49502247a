import json

import nbformat
import numpy as np
import pytest

from canreal import example_systems
from canreal.linear_systems import LinearSystem
from canreal.morphisms import LinearMap, gl_action
from canreal.report import Report
from canreal.report_sections.comparison import ComparisonSection
from canreal.report_sections.echo_state import EchoStateSection, FiniteEchoStateSection
from canreal.report_sections.oracle import OracleSection
from canreal.report_sections.realization import RealizationSection
from canreal.report_sections.reduction import FiniteReductionSection, ReductionSection
from canreal.report_sections.section_base import ExitCode


def _execute_code_cells(notebook) -> dict:
    namespace = {}
    for cell in notebook["cells"]:
        if cell["cell_type"] == "code":
            exec(cell["source"], namespace)  # pylint: disable=exec-used
    return namespace


def test_report():
    report = Report()
    assert len(report.sections) == 0, "Report should be empty"
    assert report.exit_code == ExitCode.SUCCESS, "Empty report should succeed"

    report.add_echo_state(example_systems.system_scalar_half(), verbosity=1)
    assert len(report.sections) == 1, "Report should have one section"
    report.add_reduction(example_systems.finite_cloned())
    assert len(report.sections) == 2, "Report should have two sections"

    assert isinstance(report.sections[0], EchoStateSection), "Wrong section type"
    assert isinstance(report.sections[1], FiniteReductionSection), "Wrong section type"
    assert report.sections[0].verbosity == 1, "Wrong section verbosity"
    assert report.sections[1].verbosity == 0, "Default verbosity should be the report's"


def test_section_dispatch():
    report = Report(verbosity=2)
    report.add_echo_state(example_systems.finite_contracting())
    report.add_reduction(example_systems.system_diag_example())
    report.add_realization(example_systems.filter_2m13())
    report.add_comparison(
        example_systems.system_canonical(), example_systems.system_canonical()
    )
    report.add_oracle(example_systems.finite_contracting())
    expected = [
        FiniteEchoStateSection,
        ReductionSection,
        RealizationSection,
        ComparisonSection,
        OracleSection,
    ]
    for section, section_type in zip(report.sections, expected):
        assert isinstance(section, section_type), "Wrong section type"
        assert section.verbosity == 2, "Wrong section verbosity"


def test_invalid_verbosity():
    with pytest.raises(ValueError):
        Report(verbosity=3)
    with pytest.raises(ValueError):
        EchoStateSection(example_systems.system_scalar_half(), verbosity=-1)


def test_exit_code_is_the_most_severe():
    report = Report().add_echo_state(example_systems.system_scalar_half())
    assert report.exit_code == ExitCode.SUCCESS
    report.add_echo_state(LinearSystem([[1 - 1e-10]], [1.0], [1.0]))
    assert report.exit_code == ExitCode.INDETERMINATE
    report.add_echo_state(example_systems.system_identity())
    assert report.exit_code == ExitCode.FAILED


def test_failure_outranks_larger_exit_codes():
    report = Report().add_echo_state(example_systems.system_identity())
    report.add_echo_state(LinearSystem([[1 - 1e-10]], [1.0], [1.0]))
    assert report.exit_code == ExitCode.FAILED, "Indeterminate must not mask a failure"
    report.add_realization(example_systems.impulse_geometric(), eps=1e-10)
    assert report.exit_code == ExitCode.FAILED, "Infeasible must not mask a failure"

    pending = Report().add_echo_state(LinearSystem([[1 - 1e-10]], [1.0], [1.0]))
    pending.add_realization(example_systems.impulse_geometric(), eps=1e-10)
    assert pending.exit_code == ExitCode.INFEASIBLE
    assert Report().exit_code == ExitCode.SUCCESS
    assert sorted(ExitCode, key=lambda code: code.severity) == [
        ExitCode.SUCCESS,
        ExitCode.INDETERMINATE,
        ExitCode.INFEASIBLE,
        ExitCode.FAILED,
        ExitCode.USAGE,
    ]


def test_echo_state_section():
    section = EchoStateSection(example_systems.system_scalar_half(), horizon=10).run()
    result = section.to_dict()
    assert result["status"] == "holds"
    assert result["rho"] == pytest.approx(0.5)
    assert result["tail_bound"] == pytest.approx(2.0**-10)
    assert result["state_gain_bound"] == pytest.approx(2.0)

    failing = EchoStateSection(example_systems.system_identity()).run()
    assert failing.exit_code == ExitCode.FAILED
    assert "tail_bound" not in failing.to_dict()


def test_finite_echo_state_section():
    section = FiniteEchoStateSection(example_systems.finite_permutation()).run()
    assert section.exit_code == ExitCode.FAILED
    assert section.to_dict()["cycle"] is not None
    section = FiniteEchoStateSection(example_systems.finite_contracting()).run()
    assert section.exit_code == ExitCode.SUCCESS
    assert section.to_dict()["pair_graph_depth"] == 1


def test_reduction_section():
    section = ReductionSection(example_systems.system_diag_example()).run()
    result = section.to_dict()
    assert section.exit_code == ExitCode.SUCCESS
    assert result["original_dim"] == 2
    assert result["reduced_dim"] == 1
    assert result["oracle_rank"] == 1
    assert result["verification"]["passed"] is True
    assert np.allclose(result["output"]["system"]["A"], [[0.5]])

    failing = ReductionSection(example_systems.system_identity()).run()
    assert failing.exit_code == ExitCode.FAILED
    assert "output" not in failing.to_dict()


def test_finite_reduction_section():
    section = FiniteReductionSection(example_systems.finite_cloned()).run()
    result = section.to_dict()
    assert section.exit_code == ExitCode.SUCCESS
    assert result["n_classes"] == 2
    assert result["class_of"][0] == result["class_of"][2]
    assert FiniteReductionSection(example_systems.finite_permutation()).run().exit_code == (
        ExitCode.FAILED
    )


def test_realization_section():
    exact = RealizationSection(example_systems.filter_0001()).run()
    assert exact.exact
    assert exact.exit_code == ExitCode.SUCCESS
    assert exact.to_dict()["dimension"] == 1
    assert exact.to_dict()["hankel_rank"] == 1

    approximate = RealizationSection(example_systems.impulse_geometric(), eps=1e-3).run()
    assert not approximate.exact
    assert approximate.exit_code == ExitCode.SUCCESS
    assert approximate.to_dict()["cut"] >= 10
    assert approximate.to_dict()["truncation_error"] <= 1e-3

    infeasible = RealizationSection(example_systems.impulse_geometric(), eps=1e-10).run()
    assert infeasible.exit_code == ExitCode.INFEASIBLE
    assert infeasible.to_dict()["floor"] == pytest.approx(2.0**-30)

    from_system = RealizationSection(example_systems.system_scalar_half(), eps=1e-6).run()
    assert from_system.exit_code == ExitCode.SUCCESS
    assert RealizationSection(example_systems.system_identity()).run().exit_code == (
        ExitCode.FAILED
    )
    with pytest.raises(ValueError):
        RealizationSection([1.0, 2.0])


def test_comparison_section():
    first = example_systems.system_canonical()
    second = gl_action(LinearMap([[2.0, 1.0], [0.0, 1.0]]), first)
    section = ComparisonSection(first, second).run()
    result = section.to_dict()
    assert result["same_filter"] is True
    assert np.allclose(result["isomorphism"], [[2.0, 1.0], [0.0, 1.0]])
    assert section.exit_code == ExitCode.SUCCESS

    different = ComparisonSection(first, example_systems.system_scalar_half()).run()
    assert different.to_dict()["same_filter"] is False
    assert different.to_dict()["isomorphism"] is None
    assert different.exit_code == ExitCode.SUCCESS, "Comparison is informative only"

    reducible = ComparisonSection(
        example_systems.system_diag_example(), example_systems.system_scalar_half()
    ).run()
    assert reducible.to_dict()["same_filter"] is True
    assert reducible.to_dict()["isomorphism"] is None
    assert reducible.to_dict()["reason"]


def test_oracle_section():
    for system in (example_systems.finite_contracting(), example_systems.finite_cloned()):
        section = OracleSection(system, trials=200, seed=1).run()
        result = section.to_dict()
        assert section.exit_code == ExitCode.SUCCESS, result
        assert all(result["checks"].values())
    failing = OracleSection(example_systems.finite_permutation()).run()
    assert failing.exit_code == ExitCode.FAILED
    assert failing.to_dict()["esp"] is False
    with pytest.raises(ValueError):
        OracleSection(example_systems.finite_contracting(), trials=0)


def test_structured_output_is_deterministic():
    def build():
        return (
            Report("Reduction")
            .add_echo_state(example_systems.system_diag_example())
            .add_reduction(example_systems.system_diag_example())
        )

    text = build().to_json()
    assert text == build().to_json()
    document = json.loads(text)
    assert document["schema"] == 1
    assert document["exit_code"] == 0
    assert [section["name"] for section in document["sections"]] == [
        "Echo State Property",
        "Reduction",
    ]
    assert build().output()["original_dim"] == 2


def test_text_output():
    report = Report("Echo state property", verbosity=1)
    report.add_echo_state(example_systems.system_identity())
    text = report.to_text()
    assert text.startswith("Echo state property\n===================")
    assert text.rstrip().endswith("exit code: 2 (failed)")


def test_notebook_export(tmp_path):
    report = Report(verbosity=1)
    report.add_echo_state(example_systems.system_scalar_half())
    report.add_reduction(example_systems.system_shift_01())
    report.add_realization(example_systems.filter_2m13())
    report.add_realization(example_systems.impulse_geometric(), eps=1e-3)
    report.add_reduction(example_systems.finite_cloned())
    report.add_oracle(example_systems.finite_contracting(), trials=20)
    path = tmp_path / "export.ipynb"
    report.export_notebook(str(path))

    notebook = nbformat.read(str(path), as_version=4)
    assert notebook["cells"][0]["source"] == "# canreal Report"
    namespace = _execute_code_cells(notebook)
    assert namespace["realization"].dim == 3
    assert namespace["approximation"].cut >= 10
    assert namespace["reduced"].n_states == 2


def test_exported_comparison_code_runs():
    first = example_systems.system_canonical()
    second = gl_action(LinearMap([[1.0, 1.0], [0.0, 2.0]]), first)
    report = Report().add_comparison(first, second)
    namespace = _execute_code_cells(report._generate_notebook())  # pylint: disable=W0212
    assert namespace["gaps"].max() <= 1e-9
