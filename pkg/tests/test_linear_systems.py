import numpy as np
import pytest

from canreal import example_systems
from canreal.exceptions import EchoStatePropertyError, NoContractionError, OperationCancelledError
from canreal.linear_systems import (
    EspStatus,
    ImpulseResponse,
    LinearSystem,
    contraction_power,
    convolve,
    default_power_limit,
    esp_check,
    evaluate_filter,
    evaluate_functional,
    evaluate_state,
    fmp_constant,
    ifp_gap_bound,
    impulse_response,
    l1_tail_bound,
    markov_parameters,
    probe_impulse_response,
    simulate,
    state_gain_bound,
)
from canreal.random_systems import random_stable_system
from canreal.signals import Signal, WeightingSequence, concat
from canreal.utils import CancellationToken


def test_inconsistent_dimensions():
    with pytest.raises(ValueError):
        LinearSystem([[1.0, 0.0]], [1.0], [1.0])
    with pytest.raises(ValueError):
        LinearSystem([[0.5]], [1.0, 2.0], [1.0])
    with pytest.raises(ValueError):
        LinearSystem([[np.nan]], [1.0], [1.0])


def test_zero_dimensional_system():
    system = LinearSystem.zero()
    assert system.N == 0
    assert esp_check(system).holds
    psi = impulse_response(system, 5)
    assert np.array_equal(psi.coefficients, np.zeros(6))
    assert psi.tail_bound == 0.0


def test_round_trip_document():
    system = example_systems.system_diag_example()
    assert LinearSystem.from_dict(system.to_dict()) == system
    with pytest.raises(ValueError):
        LinearSystem.from_dict({"A": [[0.5]], "C": [1.0]})


def test_esp_dichotomy():
    rng = np.random.default_rng(7)
    for _ in range(50):
        n = int(rng.integers(1, 9))
        system = random_stable_system(rng, n, rho=rng.uniform(0.1, 0.95))
        certificate = esp_check(system)
        assert certificate.status == EspStatus.HOLDS
        assert certificate.rho < 1
        impulse_response(system, 50)

        scale = rng.uniform(1.05, 2.0) / certificate.rho
        unstable = LinearSystem(system.A * scale, system.C, system.W)
        refuted = esp_check(unstable)
        assert refuted.status == EspStatus.FAILS
        assert abs(refuted.eigenvalue) >= 1
        with pytest.raises(EchoStatePropertyError) as excinfo:
            impulse_response(unstable, 50)
        assert excinfo.value.witness.status == EspStatus.FAILS


def test_esp_indeterminate_band():
    system = LinearSystem([[1 - 1e-10]], [1.0], [1.0])
    assert esp_check(system, margin=1e-8).status == EspStatus.INDETERMINATE
    assert esp_check(system, margin=1e-12).status == EspStatus.HOLDS
    assert esp_check(example_systems.system_identity()).status == EspStatus.FAILS
    with pytest.raises(ValueError):
        esp_check(system, margin=0.0)


def test_scalar_tail_bound():
    system = example_systems.system_scalar_half()
    assert l1_tail_bound(system, 10) == pytest.approx(2.0**-10, rel=1e-12)
    psi = impulse_response(system, 10)
    assert np.allclose(psi.coefficients, 0.5 ** np.arange(11))
    assert psi.l1_norm_bound == pytest.approx(2.0, rel=1e-12)


def test_tail_bound_is_an_upper_bound():
    rng = np.random.default_rng(11)
    for _ in range(20):
        system = random_stable_system(rng, int(rng.integers(2, 7)), rho=0.8)
        horizon = int(rng.integers(0, 30))
        exact = np.sum(np.abs(markov_parameters(system, 2000)[horizon + 1 :]))
        assert l1_tail_bound(system, horizon) >= exact * (1 - 1e-9)


def test_nilpotent_tail_is_zero():
    system = example_systems.system_shift_01()
    assert l1_tail_bound(system, 1) == 0.0
    assert impulse_response(system, 3).tail_bound == 0.0


def test_conjugated_nilpotent_tail_is_zero():
    rng = np.random.default_rng(17)
    for _ in range(50):
        n = int(rng.integers(2, 7))
        q, _ = np.linalg.qr(rng.normal(size=(n, n)))
        B = q * rng.uniform(1.0, 2.0, size=n)
        shift = np.eye(n, k=-1)
        C, W = B @ rng.normal(size=n), rng.normal(size=n)
        system = LinearSystem(B @ shift @ np.linalg.inv(B), C, W)
        for horizon in (n - 1, n, 3 * n):
            assert l1_tail_bound(system, horizon) == 0.0, f"Nonzero tail at {horizon} for N={n}"
        assert impulse_response(system, n).tail_bound == 0.0


def test_contraction_power():
    k0, norm = contraction_power(np.array([[0.5]]))
    assert (k0, norm) == (1, 0.5)
    jordan = np.array([[0.9, 5.0], [0.0, 0.9]])
    k0, norm = contraction_power(jordan)
    assert k0 > 1 and norm <= 0.5
    assert np.linalg.norm(np.linalg.matrix_power(jordan, k0), 2) == pytest.approx(norm)
    with pytest.raises(NoContractionError):
        contraction_power(np.eye(2))
    with pytest.raises(NoContractionError):
        contraction_power(jordan, k_max=2)


def test_default_power_limit():
    assert default_power_limit(3, 0.5) == 60
    assert default_power_limit(2, 0.75) == 80
    assert default_power_limit(0, 0.0) == 10


def test_cancellation():
    token = CancellationToken()
    token.cancel()
    system = LinearSystem([[0.999, 50.0], [0.0, 0.999]], [0.0, 1.0], [1.0, 0.0])
    with pytest.raises(OperationCancelledError):
        impulse_response(system, 5000, cancel_token=token)


def test_simulate_matches_functional():
    rng = np.random.default_rng(3)
    system = random_stable_system(rng, 4, rho=0.7)
    inputs = rng.normal(size=40)
    states, outputs = simulate(system, inputs)
    assert states.shape == (40, 4)
    value = evaluate_functional(system, Signal(inputs))
    assert value.value == pytest.approx(outputs[-1])
    assert value.truncation_bound >= 0
    state = evaluate_state(system, Signal(inputs))
    assert np.allclose(state.state, states[-1])
    assert evaluate_functional(system, Signal([])) == (0.0, 0.0)
    with pytest.raises(ValueError):
        simulate(system, inputs, x0=np.zeros(3))


def test_truncation_bounds_cover_extensions():
    rng = np.random.default_rng(5)
    system = random_stable_system(rng, 3, rho=0.8)
    recent = rng.uniform(-1, 1, size=30)
    z = Signal(recent)
    value = evaluate_functional(system, z)
    state = evaluate_state(system, z)
    for _ in range(10):
        extended = concat(Signal(rng.uniform(-1, 1, size=200) * np.max(np.abs(recent))), recent)
        assert abs(evaluate_functional(system, extended).value - value.value) <= (
            value.truncation_bound + 1e-12
        )
        gap = np.linalg.norm(evaluate_state(system, extended).state - state.state)
        assert gap <= state.truncation_bound + 1e-12


def test_evaluate_filter():
    system = example_systems.system_scalar_half()
    out = evaluate_filter(system, Signal([1.0]), 3)
    assert np.allclose(out.window, [0.0, 0.0, 1.0]), "Outputs before the window are zero"
    out = evaluate_filter(system, Signal([1.0, 0.0, 0.0]), 3)
    assert np.allclose(out.window, [1.0, 0.5, 0.25])
    with pytest.raises(ValueError):
        evaluate_filter(system, Signal([1.0]), 0)


def test_probe_recovers_kernel():
    rng = np.random.default_rng(17)
    system = random_stable_system(rng, 5, rho=0.85)
    probed = probe_impulse_response(system, 40)
    direct = impulse_response(system, 40)
    assert np.allclose(probed.coefficients, direct.coefficients, atol=1e-12)


def test_convolution_agrees_with_functional():
    rng = np.random.default_rng(19)
    system = random_stable_system(rng, 4, rho=0.6)
    psi = impulse_response(system, 60)
    z = Signal(rng.normal(size=60))
    result = convolve(psi, z)
    assert result.value == pytest.approx(evaluate_functional(system, z).value, abs=1e-10)
    assert result.error_bound == pytest.approx(psi.tail_bound * np.max(np.abs(z.window)))


def test_impulse_response_document_validation():
    with pytest.raises(ValueError):
        ImpulseResponse([])
    with pytest.raises(ValueError):
        ImpulseResponse([1.0], tail_bound=-1.0)
    psi = ImpulseResponse([1.0, -2.0, 3.0], tail_bound=0.5)
    assert psi.horizon == 2
    assert psi.suffix_l1(1) == pytest.approx(5.5)
    assert psi.suffix_l1(7) == 0.5
    assert psi.partial_l1(2) == pytest.approx(3.0)
    assert ImpulseResponse.from_dict(psi.to_dict()).to_dict() == psi.to_dict()


def test_input_forgetting():
    rng = np.random.default_rng(23)
    for _ in range(100):
        system = random_stable_system(rng, int(rng.integers(1, 7)), rho=rng.uniform(0.2, 0.9))
        psi = impulse_response(system, 400)
        u = Signal(rng.uniform(-1, 1, size=80))
        v = Signal(rng.uniform(-1, 1, size=80))
        gap = np.max(np.abs((u - v).window))
        continuation = rng.uniform(-1, 1, size=int(rng.integers(1, 40)))
        t = len(continuation)
        difference = abs(
            evaluate_functional(system, concat(u, continuation)).value
            - evaluate_functional(system, concat(v, continuation)).value
        )
        assert difference <= ifp_gap_bound(psi, t, gap) + 1e-10
    with pytest.raises(ValueError):
        ifp_gap_bound(psi, 0, 1.0)
    with pytest.raises(ValueError):
        ifp_gap_bound(psi, 1, -1.0)


def test_input_forgetting_bound_is_monotone():
    psi = impulse_response(example_systems.system_scalar_half(), 50)
    bounds = [ifp_gap_bound(psi, t, 1.0) for t in range(1, 60)]
    assert all(later <= earlier for earlier, later in zip(bounds, bounds[1:]))
    assert bounds[-1] == pytest.approx(psi.tail_bound)


def test_fading_memory_constant():
    system = example_systems.system_scalar_half()
    constant = fmp_constant(system, WeightingSequence(0.8))
    assert constant == pytest.approx(1 / (1 - 0.625), rel=1e-9)
    with pytest.raises(ValueError):
        fmp_constant(system, WeightingSequence(0.4))

    rng = np.random.default_rng(29)
    w = WeightingSequence(0.8)
    for _ in range(20):
        z = Signal(rng.uniform(-1, 1, size=50))
        bound = constant * np.max(np.abs(z.window[::-1]) * w.weights(50))
        assert abs(evaluate_functional(system, z).value) <= bound + 1e-12


def test_state_gain_bound():
    system = example_systems.system_scalar_half()
    assert state_gain_bound(system) == pytest.approx(2.0)
    with pytest.raises(EchoStatePropertyError):
        state_gain_bound(example_systems.system_identity())
