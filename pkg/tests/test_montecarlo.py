"""
Tests of the sampling estimators that back the closed forms.
"""

import dataclasses
import math
import numpy as np
import pytest

from star_covert import montecarlo
from star_covert.detection import DetectionStats, fa_md_probabilities, lambda_terms
from star_covert.montecarlo import (
    LargeSystemPoint,
    LargeSystemReport,
    McSettings,
    Moments,
    empirical_dep,
    empirical_eavesdrop_rate,
    exponentiality_check,
    large_system_convergence,
    map_chunks,
    warden_power_samples,
    within_confidence,
)
from star_covert.rates import avg_eavesdrop_rate_exact, eta_terms
from star_covert.star_ris import Side, coefficient_vector
from test_support.scenarios import random_point, tiny_channel, tiny_system
from typing import List


def test_chunk_layout():
    sizes = map_chunks(McSettings(n_samples=2500, chunk_size=1000), lambda rng, size: size)
    assert sizes == [1000, 1000, 500]


def test_results_do_not_depend_on_worker_count(tiny, rng):
    system, channel = tiny
    beams, coeffs = random_point(system, rng)
    theta_r = coefficient_vector(coeffs, Side.REFLECT)
    taus = system.noise_w + np.array([1e-12, 1e-11])
    serial = empirical_dep(channel, beams, theta_r, taus, system.noise_w, McSettings(5000, seed=9, chunk_size=1000))
    threaded = empirical_dep(
        channel, beams, theta_r, taus, system.noise_w, McSettings(5000, seed=9, chunk_size=1000, workers=3)
    )
    np.testing.assert_array_equal(serial.p_fa, threaded.p_fa)
    np.testing.assert_array_equal(serial.p_md, threaded.p_md)


def test_moments_merge(rng):
    x = rng.standard_normal((100, 2))
    merged = Moments.of(x[:30]) + Moments.of(x[30:])
    np.testing.assert_allclose(merged.mean, x.mean(axis=0))
    np.testing.assert_allclose(merged.variance, x.var(axis=0, ddof=1))


def test_settings_validation():
    with pytest.raises(ValueError):
        McSettings(n_samples=0)
    with pytest.raises(ValueError):
        McSettings(confidence_sigmas=0.0)
    assert not McSettings(n_samples=999).acceptance_grade
    assert McSettings(n_samples=500).scaled(4).n_samples == 2000


def test_confidence_floor():
    assert within_confidence(0.0, 0.0005, 0.0, 3.0, 1000)
    assert not within_confidence(0.0, 0.01, 0.0, 3.0, 1000)


def test_warden_power_means(tiny, rng):
    system, channel = tiny
    beams, coeffs = random_point(system, rng)
    theta_r = coefficient_vector(coeffs, Side.REFLECT)
    lambda0, lambda1 = lambda_terms(channel, beams, theta_r)
    samples0, samples1 = warden_power_samples(channel, beams, theta_r, rng, 50000)
    for samples, expected in ((samples0, lambda0), (samples1, lambda1)):
        assert abs(samples.mean() - expected) <= 4.0 * samples.std(ddof=1) / math.sqrt(len(samples))


def test_empirical_dep_matches_closed_form(tiny, rng):
    system, channel = tiny
    beams, coeffs = random_point(system, rng)
    theta_r = coefficient_vector(coeffs, Side.REFLECT)
    lambda0, lambda1 = lambda_terms(channel, beams, theta_r)
    stats = DetectionStats(lambda0, lambda1, system.noise_w)
    taus = system.noise_w + np.array([0.5, 1.0, 2.0]) * lambda1
    estimate = empirical_dep(channel, beams, theta_r, taus, system.noise_w, McSettings(40000, seed=1))

    for i, tau in enumerate(taus):
        p_fa, p_md = fa_md_probabilities(tau, stats)
        assert within_confidence(estimate.p_fa[i], p_fa, estimate.stderr_fa[i], 4.0, estimate.n_samples)
        assert within_confidence(estimate.p_md[i], p_md, estimate.stderr_md[i], 4.0, estimate.n_samples)
    assert estimate.to_dict()["n_samples"] == 40000


def test_empirical_dep_below_noise_floor(tiny, rng):
    system, channel = tiny
    beams, coeffs = random_point(system, rng)
    theta_r = coefficient_vector(coeffs, Side.REFLECT)
    estimate = empirical_dep(channel, beams, theta_r, [0.0, system.noise_w], system.noise_w, McSettings(1000))
    np.testing.assert_array_equal(estimate.p_fa, [1.0, 1.0])
    np.testing.assert_array_equal(estimate.p_md, [0.0, 0.0])
    np.testing.assert_array_equal(estimate.dep, [1.0, 1.0])


def test_single_beam_power_is_exponential(tiny, rng):
    system, channel = tiny
    beams, coeffs = random_point(system, rng)
    report = exponentiality_check(
        channel, beams.w_k[0], coefficient_vector(coeffs, Side.REFLECT), McSettings(200_000, seed=3)
    )
    assert not report.degenerate
    assert report.passed
    assert report.dispersion == pytest.approx(1.0, abs=0.03)


def test_zero_beam_is_degenerate(tiny):
    system, channel = tiny
    report = exponentiality_check(channel, np.zeros(system.n_t, dtype=complex), np.ones(system.m), McSettings(1000))
    assert report.degenerate
    assert report.passed


@pytest.mark.slow
def test_large_system_convergence(rng):
    system = tiny_system()
    beams, _ = random_point(system, rng)
    report = large_system_convergence(
        system, beams, (16, 64, 256), McSettings(20000, seed=5), scenario_seed=2, scenarios=3
    )
    assert [p.m for p in report.points] == [16, 64, 256]
    assert [p.paths for p in report.points] == [4, 8, 16]
    for point in report.points:
        assert point.relative_error <= 4.0 * point.relative_stderr
    assert report.concentrating
    assert report.passed
    assert report.to_dict()["passed"]


def test_single_warden_path_keeps_the_mean_exact(rng, monkeypatch):
    # One path on every link: lambda0 is a fixed multiple of |g|^2, so its spread equals its mean.
    monkeypatch.setattr(montecarlo, "scattering_paths", lambda m: 1)
    system = tiny_system()
    beams, _ = random_point(system, rng)
    report = large_system_convergence(system, beams, (4, 16), McSettings(50000, seed=6), scenario_seed=1)
    for point in report.points:
        assert point.dispersion == pytest.approx(1.0, abs=0.05)
        assert point.relative_error <= 4.0 * point.relative_stderr


def test_large_system_catches_a_frozen_beta(rng, monkeypatch):
    exact = montecarlo.asymptotic_terms
    first: List[float] = []

    def frozen(channel, beams, theta_r):
        terms = exact(channel, beams, theta_r)
        first.append(terms.beta)
        return dataclasses.replace(terms, beta=first[0])

    monkeypatch.setattr(montecarlo, "asymptotic_terms", frozen)
    system = tiny_system()
    beams, _ = random_point(system, rng)
    report = large_system_convergence(system, beams, (16, 64), McSettings(5000, seed=7), scenario_seed=2)
    assert not report.concentrating
    assert not report.passed


def test_large_system_needs_increasing_sizes(rng):
    system = tiny_system()
    beams, _ = random_point(system, rng)
    with pytest.raises(ValueError):
        large_system_convergence(system, beams, (16, 4), McSettings(1000))


@pytest.mark.parametrize(
    "errors, spreads, passed",
    [
        pytest.param((0.04, 0.01), (0.6, 0.4), True, id="converging"),
        pytest.param((0.01, 0.04), (0.6, 0.4), False, id="error-grows"),
        pytest.param((0.2, 0.08), (0.6, 0.4), False, id="final-error-too-large"),
        pytest.param((0.04, 0.01), (0.6, 0.6), False, id="no-concentration"),
    ],
)
def test_large_system_verdict(errors, spreads, passed):
    points = tuple(
        LargeSystemPoint(m, 4, error, 0.001, spread) for m, error, spread in zip((16, 64), errors, spreads)
    )
    assert LargeSystemReport(points, 3.0).passed is passed


def test_eavesdrop_rate_matches_exact_form_for_single_path(rng):
    # With one eavesdropper path every power sum is exponential, so the exact form applies.
    system, channel = tiny_channel(seed=4, p_paths=1)
    beams, coeffs = random_point(system, rng)
    theta_t = coefficient_vector(coeffs, Side.TRANSMIT)
    estimate = empirical_eavesdrop_rate(channel, theta_t, beams, system.noise_e, McSettings(100_000, seed=8))
    for k in range(system.k_users):
        eta = eta_terms(channel, theta_t, beams, k)
        exact_h0 = avg_eavesdrop_rate_exact(eta.eta0, eta.eta0_hat, system.noise_e)
        exact_h1 = avg_eavesdrop_rate_exact(eta.eta1, eta.eta1_hat, system.noise_e)
        assert abs(estimate.rate_h0[k] - exact_h0) <= 4.0 * estimate.stderr_h0[k] + 1e-9
        assert abs(estimate.rate_h1[k] - exact_h1) <= 4.0 * estimate.stderr_h1[k] + 1e-9
