"""
Tests of the subproblem matrices, their surrogates and the alternating optimizer.
"""

import numpy as np
import pytest

from star_covert._errors import ConfigurationError, DegenerateInputError, InitializationError
from star_covert.config import SolverSettings
from star_covert.detection import asymptotic_terms, covert_threshold_ratio
from star_covert.optimizer import (
    balance_split,
    build_active,
    build_passive,
    check_constraints,
    complexity_estimate,
    extract_beamformers,
    extract_coefficients,
    init_feasible,
    passive_reference,
    rank_one_penalty,
    rank_one_residual,
    run_alternating_optimization,
    solve_active_loop,
    solve_passive_loop,
    taylor_active,
    taylor_passive,
)
from star_covert.rates import evaluate_rates
from star_covert.star_ris import Side, SurfaceLayout, coefficient_vector
from test_support.scenarios import random_point, tiny_channel, tiny_system


def _random_psd(rng: np.random.Generator, n: int) -> np.ndarray:
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    x = a @ a.conj().T
    return x / np.real(np.trace(x))


def _lifted(beams) -> np.ndarray:
    vector = beams.stack()
    return np.outer(vector, vector.conj())


def test_rank_one_residual():
    assert rank_one_residual(np.diag([1.0, 0.0])) == pytest.approx(0.0)
    assert rank_one_residual(np.eye(3)) == pytest.approx(2.0)


def test_rank_one_penalty_example():
    assert rank_one_penalty(np.eye(2), np.diag([1.0, 0.0]), np.array([1.0, 0.0])) == pytest.approx(1.0)


def test_rank_one_penalty_bounds_residual(rng):
    x_ref = _random_psd(rng, 4)
    principal = np.linalg.eigh(x_ref)[1][:, -1]
    assert rank_one_penalty(x_ref, x_ref, principal) == pytest.approx(rank_one_residual(x_ref))
    for _ in range(10):
        x = _random_psd(rng, 4)
        assert rank_one_penalty(x, x_ref, principal) >= rank_one_residual(x) - 1e-12


def test_active_matrices_reproduce_rates(tiny, rng):
    system, channel = tiny
    beams, coeffs = random_point(system, rng)
    phi_eps = covert_threshold_ratio(system.epsilon)
    data = build_active(channel, coeffs, system, phi_eps)
    w_cs = _lifted(beams)
    breakdown = evaluate_rates(channel, coeffs, beams, system)
    surrogates = taylor_active(data, w_cs)

    assert surrogates.covert.true_value({"W": w_cs}) == pytest.approx(breakdown.covert_rate, rel=1e-9)
    for k in range(system.k_users):
        h0 = max(surrogates.secure_h0[k].true_value({"W": w_cs}), 0.0)
        h1 = max(surrogates.secure_h1[k].true_value({"W": w_cs}), 0.0)
        assert h0 == pytest.approx(breakdown.secure_h0[k], rel=1e-9, abs=1e-12)
        assert h1 == pytest.approx(breakdown.secure_h1[k], rel=1e-9, abs=1e-12)

    terms = asymptotic_terms(channel, beams, coefficient_vector(coeffs, Side.REFLECT))
    assert np.real(np.trace(data.d_1 @ w_cs)) == pytest.approx(terms.alpha, rel=1e-9)
    assert np.real(np.trace(data.d_hat @ w_cs)) == pytest.approx(terms.beta, rel=1e-9)
    assert np.real(np.trace(w_cs)) == pytest.approx(beams.power)


def test_passive_matrices_reproduce_rates(tiny, rng):
    system, channel = tiny
    beams, coeffs = random_point(system, rng)
    layout = SurfaceLayout.star(system.m)
    data = build_passive(channel, beams, system, covert_threshold_ratio(system.epsilon), layout)
    q = passive_reference(coeffs, layout)
    breakdown = evaluate_rates(channel, coeffs, beams, system)
    surrogates = taylor_passive(data, q)

    assert surrogates.covert.true_value(q) == pytest.approx(breakdown.covert_rate, rel=1e-9)
    for k in range(system.k_users):
        assert max(surrogates.secure_h0[k].true_value(q), 0.0) == pytest.approx(breakdown.secure_h0[k], abs=1e-9)
        assert max(surrogates.secure_h1[k].true_value(q), 0.0) == pytest.approx(breakdown.secure_h1[k], abs=1e-9)

    terms = asymptotic_terms(channel, beams, coefficient_vector(coeffs, Side.REFLECT))
    assert np.real(np.trace(q["Q_r"] @ data.e_matrix)) == pytest.approx(terms.alpha, rel=1e-9)
    assert np.real(np.trace(q["Q_r"] @ data.f_matrix)) == pytest.approx(terms.beta, rel=1e-9)


def test_passive_matrices_follow_dual_ris_layout(tiny, rng):
    system, channel = tiny
    layout = SurfaceLayout.conventional_dual_ris(system.m)
    beams, coeffs = random_point(system, rng, layout)
    data = build_passive(channel, beams, system, 1.0, layout)
    half = system.m // 2
    assert data.g_matrix.shape == (half, half)
    assert data.s_matrix.shape == (half, half)
    q = passive_reference(coeffs, layout)
    assert q["Q_r"].shape == (half, half)
    restored = extract_coefficients(q, layout)
    np.testing.assert_allclose(restored.beta_r, coeffs.beta_r, atol=1e-9)
    assert layout.admits(restored)


def test_surrogates_touch_and_bound(tiny, rng):
    system, channel = tiny
    beams, coeffs = random_point(system, rng)
    data = build_active(channel, coeffs, system, covert_threshold_ratio(system.epsilon))
    reference = {"W": _lifted(beams)}
    surrogates = taylor_active(data, reference["W"])
    n = reference["W"].shape[0]
    for _, _, surrogate in surrogates.items():
        exact = surrogate.true_value(reference)
        assert surrogate.value(reference) == pytest.approx(exact)
        assert surrogate.minorant(reference) == pytest.approx(exact)
        for _ in range(5):
            point = {"W": _random_psd(rng, n) * system.p_tmax}
            assert surrogate.minorant(point) <= surrogate.value(point) + 1e-12
            assert surrogate.value(point) <= surrogate.true_value(point) + 1e-12


def test_extract_beamformers_from_rank_one(tiny, rng):
    system, _ = tiny
    beams, _ = random_point(system, rng)
    extracted = extract_beamformers(_lifted(beams), system.n_t)
    assert extracted.power == pytest.approx(beams.power)
    overlap = abs(np.vdot(extracted.stack(), beams.stack()))
    assert overlap == pytest.approx(beams.power)


def test_init_feasible(tiny, rng):
    system, channel = tiny
    phi_eps = covert_threshold_ratio(system.epsilon)
    start = init_feasible(channel, system, rng, phi_eps=phi_eps)
    report = check_constraints(channel, start.coeffs, start.beams, system, phi_eps)
    assert report.passed, report.worst
    assert start.attempts >= 1
    assert report.p_ea_star >= 1.0 - system.epsilon - 1e-9


def test_init_feasible_with_dual_ris_layout(tiny, rng):
    system, channel = tiny
    layout = SurfaceLayout.conventional_dual_ris(system.m)
    start = init_feasible(channel, system, rng, layout=layout)
    assert layout.admits(start.coeffs)


def test_init_feasible_reports_impossible_targets(rng):
    system, channel = tiny_channel(seed=3, r_b_star=60.0)
    with pytest.raises(InitializationError) as exc_info:
        init_feasible(channel, system, rng, settings=SolverSettings(init_restarts=3))
    assert exc_info.value.constraint == "covert_rate"
    assert exc_info.value.margin < 0


def test_optimizer_needs_two_security_users(rng):
    system, channel = tiny_channel(seed=3, k_users=1)
    with pytest.raises(ConfigurationError):
        run_alternating_optimization(channel, system, rng=rng)


def test_optimizer_rejects_infeasible_start(tiny, rng):
    system, channel = tiny
    beams, coeffs = random_point(system, rng)
    with pytest.raises(InitializationError):
        run_alternating_optimization(channel, system, start=(beams.scaled(3.0, 3.0), coeffs))


def test_active_subproblem_does_not_lose_objective(tiny, rng):
    system, channel = tiny
    phi_eps = covert_threshold_ratio(system.epsilon)
    start = init_feasible(channel, system, rng, phi_eps=phi_eps)
    data = build_active(channel, start.coeffs, system, phi_eps)
    result = solve_active_loop(data, start.beams, SolverSettings(max_inner=1))
    (record,) = result.loop.records
    assert record.objective >= record.reference_objective - 1e-6
    assert result.beams.power <= system.p_tmax * (1 + 1e-9)


def _split(values, layout: SurfaceLayout) -> np.ndarray:
    total = np.zeros(layout.m)
    total[layout.reflect] += np.real(np.diag(values["Q_r"]))
    total[layout.transmit] += np.real(np.diag(values["Q_t"]))
    return total


@pytest.mark.parametrize(
    "layout", [SurfaceLayout.star(4), SurfaceLayout.conventional_dual_ris(4)], ids=["star", "dual_ris"]
)
def test_balance_split(rng, layout):
    n_r, n_t = int(layout.reflect.sum()), int(layout.transmit.sum())
    v = rng.standard_normal(n_r) + 1j * rng.standard_normal(n_r)
    values = {"Q_r": 3.0 * np.outer(v, v.conj()), "Q_t": _random_psd(rng, n_t) * 0.5}
    balanced = balance_split(values, layout)
    np.testing.assert_allclose(_split(balanced, layout), 1.0, atol=1e-12)
    # a diagonal congruence keeps rank and definiteness
    assert rank_one_residual(balanced["Q_r"]) == pytest.approx(0.0, abs=1e-9)
    assert np.all(np.linalg.eigvalsh(balanced["Q_t"]) > 0)


def test_balance_split_rejects_a_dark_element():
    layout = SurfaceLayout.star(2)
    values = {"Q_r": np.diag([1.0, 0.0]), "Q_t": np.diag([0.5, 0.0])}
    with pytest.raises(DegenerateInputError):
        balance_split(values, layout)


def test_passive_loop_keeps_the_split_exact(tiny, rng):
    system, channel = tiny
    phi_eps = covert_threshold_ratio(system.epsilon)
    start = init_feasible(channel, system, rng, phi_eps=phi_eps)
    layout = SurfaceLayout.star(system.m)
    data = build_passive(channel, start.beams, system, phi_eps, layout)
    result = solve_passive_loop(data, start.coeffs, SolverSettings(max_inner=3))
    assert result.loop.iterates
    for values in result.loop.iterates:
        np.testing.assert_allclose(_split(values, layout), 1.0, atol=1e-8)


@pytest.mark.slow
def test_active_loop_reaches_rank_one(tiny, rng):
    system, channel = tiny
    phi_eps = covert_threshold_ratio(system.epsilon)
    start = init_feasible(channel, system, rng, phi_eps=phi_eps)
    settings = SolverSettings()
    result = solve_active_loop(build_active(channel, start.coeffs, system, phi_eps), start.beams, settings)
    assert result.loop.converged
    assert result.loop.residual <= settings.active_tol
    assert result.beams.power <= system.p_tmax * (1 + 1e-9)


@pytest.mark.slow
def test_alternating_optimization_is_monotone(tiny):
    system, channel = tiny
    settings = SolverSettings(max_outer=3, max_inner=8)
    trace = run_alternating_optimization(channel, system, settings, rng=np.random.default_rng(1))
    objectives = trace.objectives
    assert len(objectives) >= 2
    assert all(b >= a - settings.monotone_tol for a, b in zip(objectives, objectives[1:]))
    phi_eps = covert_threshold_ratio(system.epsilon)
    assert check_constraints(channel, trace.coeffs, trace.beams, system, phi_eps).passed
    assert trace.objective == pytest.approx(trace.breakdown.average_sum)
    assert 0.0 <= trace.p_e_star <= 1.0
    assert trace.p_ea_star >= 1.0 - system.epsilon - 1e-6
    assert [row["outer_iter"] for row in trace.to_rows()] == list(range(len(objectives)))


@pytest.mark.slow
def test_dual_ris_optimization_respects_layout(tiny):
    system, channel = tiny
    layout = SurfaceLayout.conventional_dual_ris(system.m)
    settings = SolverSettings(max_outer=2, max_inner=6)
    trace = run_alternating_optimization(channel, system, settings, rng=np.random.default_rng(2), layout=layout)
    assert layout.admits(trace.coeffs)


def test_complexity_estimate():
    estimate = complexity_estimate(tiny_system())
    assert estimate["active_real_dim"] == 2 * 3 * 4
    assert estimate["passive_real_dim"] == 16
    assert estimate["bisection_steps"] == 30
    assert all(value > 0 for value in estimate.values())
