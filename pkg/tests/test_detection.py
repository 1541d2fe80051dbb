"""
Tests of the warden's detection statistics, in closed form and in the large-system limit.
"""

import math
import numpy as np
import pytest

from star_covert._errors import NumericalError
from star_covert.detection import (
    DetectionStats,
    asymptotic_dep_gradient,
    asymptotic_min_dep,
    asymptotic_terms,
    covert_threshold_ratio,
    delta_matrices,
    dep,
    fa_md_probabilities,
    lambda_terms,
    min_dep,
    optimal_threshold,
    xi_matrix,
)
from star_covert.rates import Beamformers
from star_covert.star_ris import Side, coefficient_vector
from test_support import oracles
from test_support.scenarios import random_point


def test_probabilities_at_noise_floor():
    assert fa_md_probabilities(1.0, DetectionStats(2.0, 3.0, 1.0)) == (1.0, 0.0)


def test_probabilities_at_half_lives():
    stats = DetectionStats(2.0, 5.0, 1.0)
    p_fa, _ = fa_md_probabilities(1.0 + 2.0 * math.log(2.0), stats)
    _, p_md = fa_md_probabilities(1.0 + 5.0 * math.log(2.0), stats)
    assert p_fa == pytest.approx(0.5)
    assert p_md == pytest.approx(0.5)


def test_no_false_alarms_without_security_power():
    assert fa_md_probabilities(2.0, DetectionStats(0.0, 1.0, 1.0))[0] == 0.0


def test_invalid_statistics():
    with pytest.raises(ValueError):
        DetectionStats(2.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        DetectionStats(1.0, 2.0, 0.0)


def test_optimal_threshold_example():
    stats = DetectionStats(1.0, 2.0, 1.0)
    assert optimal_threshold(stats) == pytest.approx(2.0 * math.log(2.0) + 1.0)
    taus = np.linspace(1.0 + 1e-6, 20.0, 20001)
    grid = [dep(tau, stats) for tau in taus]
    assert taus[int(np.argmin(grid))] == pytest.approx(stats.tau_star, abs=2e-3)
    assert dep(stats.tau_star, stats) <= min(grid) + 1e-12


def test_optimal_threshold_is_homogeneous():
    base = DetectionStats(1.5, 4.0, 0.5)
    scaled = DetectionStats(3.0, 8.0, 0.5)
    assert scaled.tau_star - 0.5 == pytest.approx(2.0 * (base.tau_star - 0.5))


def test_indistinguishable_hypotheses():
    stats = DetectionStats(2.0, 2.0, 1.0)
    assert stats.degenerate
    assert stats.tau_star == 1.0
    assert stats.p_e_star == 1.0


@pytest.mark.parametrize(["lambda0", "lambda1"], [(1.0, 2.0), (1.0, 5.0), (0.3, 0.31), (2.0, 40.0)])
def test_min_dep_matches_threshold_grid(lambda0: float, lambda1: float):
    assert min_dep(lambda0, lambda1) == pytest.approx(oracles.grid_min_dep(lambda0, lambda1), abs=1e-6)


def test_min_dep_limits():
    assert min_dep(1.0, 2.0) == pytest.approx(0.75)
    assert min_dep(1.0, 1.0) == 1.0
    assert min_dep(0.0, 1.0) == 0.0


def test_lambda_terms_match_vectorized_identity(tiny, rng):
    system, channel = tiny
    beams, coeffs = random_point(system, rng)
    theta_r = coefficient_vector(coeffs, Side.REFLECT)
    expected = oracles.warden_lambdas(channel, beams, theta_r)
    assert lambda_terms(channel, beams, theta_r) == pytest.approx(expected, rel=1e-10)


def test_lambda_terms_limits(tiny, rng):
    system, channel = tiny
    beams, coeffs = random_point(system, rng)
    theta_r = coefficient_vector(coeffs, Side.REFLECT)
    lambda0, lambda1 = lambda_terms(channel, beams.scaled(covert=0.0), theta_r)
    assert lambda1 == lambda0
    lambda0, lambda1 = lambda_terms(channel, beams.scaled(secure=0.0), theta_r)
    assert lambda0 == 0.0
    assert lambda1 > 0.0


def test_lambda_terms_dimension_mismatch(tiny, rng):
    system, channel = tiny
    beams, _ = random_point(system, rng)
    with pytest.raises(ValueError):
        lambda_terms(channel, beams, np.ones(system.m + 1))


def test_xi_selects_diagonal():
    theta = np.array([1.0, 2.0 + 1j, -3.0])
    np.testing.assert_allclose(xi_matrix(3) @ theta, oracles.vec(np.diag(theta)))
    np.testing.assert_array_equal(xi_matrix(3).toarray(), oracles.dense_xi(3))


def test_delta_matrices_match_kronecker_form(tiny):
    _, channel = tiny
    np.testing.assert_allclose(delta_matrices(channel), oracles.kron_delta(channel), atol=1e-12)


def test_asymptotic_terms_match_path_loop(tiny, rng):
    system, channel = tiny
    beams, coeffs = random_point(system, rng)
    theta_r = coefficient_vector(coeffs, Side.REFLECT)
    terms = asymptotic_terms(channel, beams, theta_r)
    alpha, beta = oracles.asymptotic_alpha_beta(channel, beams, theta_r)
    assert terms.alpha == pytest.approx(alpha, rel=1e-10)
    assert terms.beta == pytest.approx(beta, rel=1e-10)
    assert terms.p_ea_star == pytest.approx(asymptotic_min_dep(alpha, beta))


def test_asymptotic_terms_are_nonnegative(tiny, rng):
    system, channel = tiny
    for _ in range(10):
        beams, coeffs = random_point(system, rng)
        terms = asymptotic_terms(channel, beams, coefficient_vector(coeffs, Side.REFLECT))
        assert terms.alpha >= 0.0
        assert terms.beta >= 0.0


def test_asymptotic_terms_without_covert_beam(tiny, rng):
    system, channel = tiny
    beams, coeffs = random_point(system, rng)
    terms = asymptotic_terms(channel, beams.scaled(covert=0.0), coefficient_vector(coeffs, Side.REFLECT))
    assert terms.alpha == 0.0
    assert terms.ratio == math.inf


def test_asymptotic_min_dep_limits():
    assert asymptotic_min_dep(2.0, 2.0) == pytest.approx(0.75)
    assert asymptotic_min_dep(1e9, 1.0) < 1e-6
    assert asymptotic_min_dep(1.0, 1e9) > 1.0 - 1e-6
    assert asymptotic_min_dep(0.0, 1.0) == 1.0
    assert asymptotic_min_dep(1.0, 0.0) == 0.0
    with pytest.raises(ValueError):
        asymptotic_min_dep(0.0, 0.0)


def test_asymptotic_min_dep_agrees_with_min_dep():
    """The large-system form is the minimum DEP of statistics with means beta and alpha + beta."""
    for alpha, beta in [(1.0, 0.5), (0.2, 3.0), (4.0, 4.0)]:
        assert asymptotic_min_dep(alpha, beta) == pytest.approx(min_dep(beta, alpha + beta))


def test_asymptotic_min_dep_is_scale_invariant(rng):
    for alpha, beta, c in rng.uniform(0.01, 10.0, (10, 3)):
        assert asymptotic_min_dep(c * alpha, c * beta) == pytest.approx(asymptotic_min_dep(alpha, beta))


def test_asymptotic_min_dep_monotonicity(rng):
    for alpha, beta in rng.uniform(0.05, 5.0, (20, 2)):
        h = 1e-6
        d_alpha = (asymptotic_min_dep(alpha + h, beta) - asymptotic_min_dep(alpha - h, beta)) / (2 * h)
        d_beta = (asymptotic_min_dep(alpha, beta + h) - asymptotic_min_dep(alpha, beta - h)) / (2 * h)
        assert d_alpha < 0 < d_beta
        assert asymptotic_dep_gradient(alpha, beta) == pytest.approx((d_alpha, d_beta), rel=1e-4)


@pytest.mark.parametrize(["epsilon", "expected", "tolerance"], [(0.25, 1.0, 1e-8), (0.5, 0.295, 1e-3)])
def test_covert_threshold_ratio(epsilon: float, expected: float, tolerance: float):
    assert covert_threshold_ratio(epsilon) == pytest.approx(expected, abs=tolerance)


@pytest.mark.parametrize("epsilon", [0.01, 0.1, 0.3, 0.9])
def test_covert_threshold_ratio_inverts_asymptotic_dep(epsilon: float):
    phi = covert_threshold_ratio(epsilon)
    assert asymptotic_min_dep(1.0, phi) == pytest.approx(1.0 - epsilon, abs=1e-8)
    assert oracles.covert_gap(phi) == pytest.approx(epsilon, abs=1e-8)


def test_covert_threshold_ratio_is_decreasing():
    ratios = [covert_threshold_ratio(eps) for eps in (0.05, 0.1, 0.2, 0.4, 0.8)]
    assert all(a > b for a, b in zip(ratios, ratios[1:]))


def test_covert_threshold_ratio_from_small_interval():
    assert covert_threshold_ratio(0.01, interval=1e-3) == pytest.approx(covert_threshold_ratio(0.01), abs=1e-8)


@pytest.mark.parametrize("epsilon", [0.0, 1.0, -0.5])
def test_covert_threshold_ratio_domain(epsilon: float):
    with pytest.raises(ValueError):
        covert_threshold_ratio(epsilon)


def test_covert_threshold_ratio_bracket_failure():
    with pytest.raises(NumericalError):
        covert_threshold_ratio(1e-300)


def test_single_beam_power_limits(tiny):
    system, channel = tiny
    beams = Beamformers(np.zeros(system.n_t, dtype=complex), np.zeros((system.k_users, system.n_t), dtype=complex))
    assert lambda_terms(channel, beams, np.ones(system.m)) == (0.0, 0.0)
