import numpy as np
import pytest

from star_covert._errors import ConfigurationError, DegenerateInputError
from star_covert.star_ris import (
    Side,
    StarCoefficients,
    SurfaceLayout,
    coefficient_vector,
    equal_split,
    extract_rank_one,
    project_feasible,
    wrap_phase,
)


def test_pure_reflector():
    coeffs = StarCoefficients.create(np.ones(4), np.zeros(4), np.zeros(4))
    np.testing.assert_allclose(coefficient_vector(coeffs, Side.REFLECT), np.ones(4))
    np.testing.assert_allclose(coefficient_vector(coeffs, Side.TRANSMIT), np.zeros(4))


def test_equal_split_amplitudes():
    coeffs = equal_split(3)
    np.testing.assert_allclose(coefficient_vector(coeffs, Side.REFLECT), np.full(3, 1.0 / np.sqrt(2.0)))
    np.testing.assert_allclose(coefficient_vector(coeffs, Side.TRANSMIT), np.full(3, 1.0 / np.sqrt(2.0)))


def test_energy_splitting_identity(rng):
    for _ in range(10):
        coeffs = StarCoefficients.create(rng.uniform(size=8), rng.uniform(-10, 10, 8), rng.uniform(-10, 10, 8))
        reflect, transmit = coefficient_vector(coeffs, Side.REFLECT), coefficient_vector(coeffs, Side.TRANSMIT)
        np.testing.assert_allclose(np.abs(reflect) ** 2 + np.abs(transmit) ** 2, 1.0, atol=1e-12)
        assert np.all((coeffs.phase_r >= 0) & (coeffs.phase_r < 2 * np.pi))


@pytest.mark.parametrize(
    ["raw_r", "raw_t", "beta_r"],
    [(0.3, 0.7, 0.3), (2.0, 2.0, 0.5), (0.0, 0.0, 0.5), (0.0, 5.0, 0.0)],
    ids=["feasible", "symmetric", "zero", "transmit-only"],
)
def test_project_feasible(raw_r: float, raw_t: float, beta_r: float):
    coeffs = project_feasible([raw_r], [raw_t], [0.0], [0.0])
    assert coeffs.beta_r[0] == pytest.approx(beta_r)
    assert coeffs.beta_t[0] == pytest.approx(1.0 - beta_r)


def test_project_feasible_rejects_negative_powers():
    with pytest.raises(ValueError):
        project_feasible([-0.1], [0.5], [0.0], [0.0])


def test_projection_is_idempotent(rng):
    coeffs = SurfaceLayout.star(6).random_coefficients(rng)
    theta_r = coefficient_vector(coeffs, Side.REFLECT)
    theta_t = coefficient_vector(coeffs, Side.TRANSMIT)
    again = StarCoefficients.from_vectors(theta_r, theta_t)
    np.testing.assert_allclose(coefficient_vector(again, Side.REFLECT), theta_r, atol=1e-12)
    np.testing.assert_allclose(coefficient_vector(again, Side.TRANSMIT), theta_t, atol=1e-12)


def test_wrap_phase_of_negative_angles():
    np.testing.assert_allclose(wrap_phase([-np.pi / 2]), [3 * np.pi / 2])
    assert wrap_phase([-1e-300]).tolist() == [0.0]


def test_invalid_split_is_rejected():
    with pytest.raises(ValueError):
        StarCoefficients(np.array([0.6]), np.array([0.6]), np.zeros(1), np.zeros(1))


def test_extract_exact_rank_one(rng):
    theta = np.sqrt(rng.uniform(0.1, 0.9, 5)) * np.exp(1j * rng.uniform(0, 2 * np.pi, 5))
    recovered = extract_rank_one(np.outer(theta, theta.conj()), np.abs(theta) ** 2)
    assert abs(np.vdot(recovered, theta)) == pytest.approx(np.linalg.norm(theta) ** 2)
    np.testing.assert_allclose(np.abs(recovered), np.abs(theta))


def test_extract_from_identity_keeps_amplitudes():
    recovered = extract_rank_one(np.eye(2), [0.5, 0.5])
    np.testing.assert_allclose(np.abs(recovered), np.full(2, np.sqrt(0.5)))


def test_extract_from_mixture(rng):
    theta = np.exp(1j * rng.uniform(0, 2 * np.pi, 4)) / np.sqrt(2.0)
    u = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    u -= np.vdot(theta, u) / np.vdot(theta, theta) * theta
    u *= np.linalg.norm(theta) / np.linalg.norm(u)
    q = 0.9 * np.outer(theta, theta.conj()) + 0.1 * np.outer(u, u.conj())

    recovered = extract_rank_one(q, np.full(4, 0.5))
    similarity = abs(np.vdot(recovered, theta)) / (np.linalg.norm(recovered) * np.linalg.norm(theta))
    assert similarity >= 0.99


def test_extract_from_zero_matrix():
    with pytest.raises(DegenerateInputError):
        extract_rank_one(np.zeros((3, 3)), np.full(3, 0.5))


def test_extracted_sides_pair_into_valid_coefficients(rng):
    a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    q_r = a @ a.conj().T
    q_t = np.eye(4) - q_r / np.linalg.norm(q_r, 2) / 2.0
    beta_r = np.real(np.diag(q_r)) / (np.real(np.diag(q_r)) + np.real(np.diag(q_t)))
    theta_r = extract_rank_one(q_r, beta_r)
    theta_t = extract_rank_one(q_t, 1.0 - beta_r)
    coeffs = StarCoefficients.from_vectors(theta_r, theta_t)
    np.testing.assert_allclose(coeffs.beta_r + coeffs.beta_t, 1.0)
    np.testing.assert_allclose(coeffs.beta_r, beta_r, atol=1e-12)


def test_star_layout():
    layout = SurfaceLayout.star(4)
    assert layout.is_star
    np.testing.assert_allclose(layout.default_split(), 0.5)
    assert layout.admits(equal_split(4))


def test_dual_ris_layout(rng):
    layout = SurfaceLayout.conventional_dual_ris(6)
    assert not layout.is_star
    assert layout.reflect.tolist() == [True, True, True, False, False, False]
    np.testing.assert_allclose(layout.default_split(), [1, 1, 1, 0, 0, 0])
    assert layout.admits(layout.random_coefficients(rng))
    assert not layout.admits(equal_split(6))


def test_dual_ris_layout_needs_even_size():
    with pytest.raises(ConfigurationError):
        SurfaceLayout.conventional_dual_ris(5)


def test_coefficients_serialize():
    coeffs = StarCoefficients.create([0.25, 1.0], [0.1, 0.2], [3.0, 4.0])
    data = coeffs.to_dict()
    assert data["beta_t"] == pytest.approx([0.75, 0.0])
    restored = StarCoefficients.from_dict(data)
    np.testing.assert_array_equal(restored.phase_t, coeffs.phase_t)
