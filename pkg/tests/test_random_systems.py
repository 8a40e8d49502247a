import numpy as np

from canreal.linear_systems import spectral_radius
from canreal.random_systems import (
    random_finite_filter,
    random_nonminimal_system,
    random_orthogonal_matrix,
    random_stable_system,
    random_well_conditioned_matrix,
)
from canreal.reduction import reduction_oracle_rank


def test_orthogonal_matrix():
    rng = np.random.default_rng(103)
    q = random_orthogonal_matrix(rng, 6)
    assert np.allclose(q.T @ q, np.eye(6))
    assert random_orthogonal_matrix(rng, 0).shape == (0, 0)


def test_stable_system_has_the_requested_radius():
    rng = np.random.default_rng(107)
    for n in range(1, 10):
        system = random_stable_system(rng, n, rho=0.9)
        assert system.N == n
        assert abs(spectral_radius(system.A) - 0.9) < 1e-12
    assert random_stable_system(rng, 0).N == 0


def test_seeded_generation_is_reproducible():
    first = random_stable_system(np.random.default_rng(5), 4)
    second = random_stable_system(np.random.default_rng(5), 4)
    assert first == second


def test_nonminimal_system():
    rng = np.random.default_rng(109)
    for _ in range(30):
        sample = random_nonminimal_system(rng, int(rng.integers(1, 10)), rho=0.8)
        assert 0 <= sample.minimal_dim <= sample.system.N
        assert reduction_oracle_rank(sample.system) == sample.minimal_dim


def test_well_conditioned_matrix():
    rng = np.random.default_rng(113)
    matrix = random_well_conditioned_matrix(rng, 5, max_singular_value=4.0)
    singular_values = np.linalg.svd(matrix, compute_uv=False)
    assert singular_values.min() >= 1.0 - 1e-12
    assert singular_values.max() <= 4.0 + 1e-12


def test_finite_filter():
    rng = np.random.default_rng(127)
    f = random_finite_filter(rng, 6, leading_zeros=2)
    assert f.memory == 6
    assert np.all(f.psi[:2] == 0)
    assert np.all(np.abs(f.psi[2:]) >= 0.5)
