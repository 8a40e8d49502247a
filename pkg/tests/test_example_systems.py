import numpy as np

from canreal import example_systems
from canreal.linear_systems import esp_check


def test_linear_examples():
    assert example_systems.system_scalar_half().N == 1
    assert not esp_check(example_systems.system_identity()).holds
    assert example_systems.system_shift_01().N == 2
    diag = example_systems.system_diag_example()
    assert np.array_equal(diag.A, np.diag([0.5, 0.3]))
    assert example_systems.system_canonical().N == 2


def test_filter_examples():
    assert example_systems.filter_2m13().psi.tolist() == [2.0, -1.0, 3.0]
    assert example_systems.filter_0001().memory == 4
    assert not np.any(example_systems.filter_zero().psi)


def test_impulse_example():
    psi = example_systems.impulse_geometric()
    assert psi.horizon == 30
    assert np.allclose(psi.coefficients, 0.5 ** np.arange(31))
    assert psi.tail_bound == 2.0**-30


def test_finite_examples():
    assert example_systems.finite_contracting().n_states == 4
    assert not example_systems.finite_permutation().has_esp
    assert example_systems.finite_cloned().has_esp
