import warnings

import numpy as np
import pytest

from canreal import example_systems
from canreal.exceptions import EchoStatePropertyError
from canreal.linear_systems import LinearSystem, simulate
from canreal.random_systems import random_nonminimal_system, random_stable_system
from canreal.subspaces import (
    Subspace,
    column_space,
    controllability_matrix,
    eigenvector_reachability_test,
    intersect,
    is_canonical,
    null_space,
    observability_kernel,
    observability_matrix,
    principal_angles,
    reachable_subspace,
    same_subspace,
)


def test_subspace_basics():
    space = Subspace(np.eye(3)[:, :2], 3)
    assert space.dim == 2
    assert space.contains([1.0, -2.0, 0.0])
    assert not space.contains([0.0, 0.0, 1.0])
    assert np.allclose(space.project([1.0, 2.0, 3.0]), [1.0, 2.0, 0.0])
    assert Subspace.zero(4).dim == 0
    assert Subspace.full(4).dim == 4
    with pytest.raises(ValueError):
        Subspace(np.eye(3), 2)


def test_krylov_matrices():
    system = example_systems.system_shift_01()
    assert np.array_equal(controllability_matrix(system), [[0.0, 1.0], [1.0, 0.0]])
    assert np.array_equal(observability_matrix(system), [[0.0, 1.0], [0.0, 0.0]])
    assert controllability_matrix(system, depth=5).shape == (2, 5)


def test_column_and_null_space():
    matrix = np.array([[1.0, 2.0], [2.0, 4.0], [0.0, 0.0]])
    assert column_space(matrix).dim == 1
    kernel = null_space(matrix)
    assert kernel.dim == 1
    assert np.allclose(matrix @ kernel.basis, 0.0)


def test_diag_example_reachability():
    system = example_systems.system_diag_example()
    reachable = reachable_subspace(system)
    assert reachable.dim == 1
    assert reachable.contains([1.0, 0.0])
    assert observability_kernel(system).dim == 0
    result = is_canonical(system)
    assert not result.canonical
    assert (result.reachable_dim, result.kernel_dim) == (1, 0)


def test_shift_register_is_not_observable():
    system = example_systems.system_shift_01()
    assert reachable_subspace(system).dim == 2
    kernel = observability_kernel(system)
    assert kernel.dim == 1
    assert kernel.contains([1.0, 0.0])
    assert not is_canonical(system).canonical


def test_canonical_example():
    result = is_canonical(example_systems.system_canonical())
    assert result.canonical
    assert result.reachable_dim == 2 and result.kernel_dim == 0


def test_is_canonical_requires_esp():
    with pytest.raises(EchoStatePropertyError):
        is_canonical(example_systems.system_identity())


def test_cayley_hamilton_depth():
    rng = np.random.default_rng(31)
    for _ in range(200):
        n = int(rng.integers(1, 9))
        system = random_nonminimal_system(rng, n, rho=0.9).system
        short = reachable_subspace(system)
        long = reachable_subspace(system, depth=2 * n)
        assert same_subspace(short, long), "Krylov depths beyond N should add no directions"
        short_kernel = observability_kernel(system)
        long_kernel = observability_kernel(system, depth=2 * n)
        assert same_subspace(short_kernel, long_kernel)


def test_subspaces_are_invariant():
    rng = np.random.default_rng(41)
    for _ in range(100):
        system = random_nonminimal_system(rng, int(rng.integers(2, 9))).system
        reachable = reachable_subspace(system)
        kernel = observability_kernel(system)
        assert reachable.contains(system.C, tol=1e-7), "C must be reachable"
        for v in reachable.basis.T:
            assert reachable.contains(system.A @ v, tol=1e-7), "A must map V_R into itself"
        for v in kernel.basis.T:
            assert kernel.contains(system.A @ v, tol=1e-7), "A must map I into itself"
            assert abs(system.W @ v) <= 1e-7 * max(np.linalg.norm(system.W), 1.0)


def test_indistinguishable_states_give_equal_outputs():
    rng = np.random.default_rng(43)
    checked = 0
    for _ in range(100):
        n = int(rng.integers(2, 9))
        system = random_nonminimal_system(rng, n).system
        kernel = observability_kernel(system)
        x1 = rng.normal(size=n)

        if kernel.dim > 0:
            checked += 1
            x2 = x1 + kernel.basis @ rng.normal(size=kernel.dim)
            for _ in range(200):
                inputs = rng.normal(size=int(rng.integers(1, 30)))
                _, first = simulate(system, inputs, x0=x1)
                _, second = simulate(system, inputs, x0=x2)
                assert np.allclose(first, second, rtol=0, atol=1e-9)

        if kernel.dim < n:
            direction = rng.normal(size=n)
            direction -= kernel.project(direction)
            x2 = x1 + direction / np.linalg.norm(direction)
            # y_0 = W x followed by the zero continuation of length N - 1
            _, first = simulate(system, np.zeros(n - 1), x0=x1)
            _, second = simulate(system, np.zeros(n - 1), x0=x2)
            gap = np.append(system.W @ (x1 - x2), first - second)
            sigma_max = np.linalg.norm(observability_matrix(system), 2)
            assert np.linalg.norm(gap) > 1e-9 * sigma_max, "Continuations must separate x1, x2"
    assert checked > 10, "Too few systems with indistinguishable states"


def test_random_systems_are_canonical():
    rng = np.random.default_rng(37)
    for _ in range(50):
        system = random_stable_system(rng, int(rng.integers(1, 9)))
        assert is_canonical(system).canonical
        assert eigenvector_reachability_test(system) is True


def test_intersect():
    first = Subspace(np.eye(3)[:, :2], 3)
    second = Subspace(np.eye(3)[:, 1:], 3)
    both = intersect(first, second)
    assert both.dim == 1
    assert both.contains([0.0, 1.0, 0.0])
    assert intersect(first, Subspace.zero(3)).dim == 0
    with pytest.raises(ValueError):
        intersect(first, Subspace.zero(2))


def test_principal_angles():
    first = Subspace(np.eye(2)[:, :1], 2)
    rotated = Subspace(np.array([[1.0], [1.0]]) / np.sqrt(2), 2)
    assert principal_angles(first, rotated) == pytest.approx([np.pi / 4])
    assert not same_subspace(first, rotated)
    assert same_subspace(first, first)
    assert len(principal_angles(first, Subspace.zero(2))) == 0


def test_eigenvector_reachability_test():
    assert eigenvector_reachability_test(example_systems.system_diag_example()) is False
    assert eigenvector_reachability_test(example_systems.system_canonical()) is True
    repeated = LinearSystem(0.5 * np.eye(2), [1.0, 1.0], [1.0, 0.0])
    assert eigenvector_reachability_test(repeated) is None


def test_ill_conditioned_krylov_falls_back_to_arnoldi():
    n = 12
    system = LinearSystem(np.diag(np.linspace(0.05, 0.1, n)), np.ones(n), np.ones(n))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        reachable = reachable_subspace(system, tol=1e-12)
    assert reachable.unreliable_rank
    assert any(issubclass(item.category, RuntimeWarning) for item in caught)
    assert reachable.dim <= n
