"""
Tests of the semidefinite programming layer: the problem description, its real
standard form and the built-in interior-point solver.
"""

import json
import numpy as np
import pytest

from star_covert._errors import ConfigurationError
from star_covert.sdp_backend import (
    Block,
    Constraint,
    IpmSettings,
    LinearFunctional,
    Relation,
    ScalarVariable,
    SdpProblem,
    Sense,
    SolverStatus,
    dump_problem,
    embed_hermitian,
    extract_hermitian,
    get_backend,
    realify,
    solve,
)
from test_support.oracles import planted_sdp


def _hermitian(rng: np.random.Generator, n: int) -> np.ndarray:
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (a + a.conj().T) / 2.0


def _psd(rng: np.random.Generator, n: int) -> np.ndarray:
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return a @ a.conj().T


def test_embed_preserves_trace_products(rng):
    a, x = _hermitian(rng, 3), _psd(rng, 3)
    expected = np.real(np.trace(a @ x))
    assert np.sum(embed_hermitian(a) * embed_hermitian(x)) / 2.0 == pytest.approx(expected)
    np.testing.assert_allclose(extract_hermitian(embed_hermitian(x)), x)


def test_embed_preserves_semidefiniteness(rng):
    x = _psd(rng, 4)
    eigenvalues = np.linalg.eigvalsh(embed_hermitian(x))
    assert eigenvalues.min() > -1e-9
    # Every eigenvalue of the embedding appears twice
    np.testing.assert_allclose(eigenvalues[::2], eigenvalues[1::2], atol=1e-9)


def test_problem_rejects_unknown_block():
    with pytest.raises(ValueError):
        SdpProblem(
            blocks=(Block("X", 2),),
            scalars=(),
            objective=LinearFunctional(blocks={"Y": np.eye(2)}),
            sense=Sense.MINIMIZE,
            constraints=(),
        )


def test_problem_rejects_non_hermitian_coefficient():
    with pytest.raises(ValueError):
        SdpProblem(
            blocks=(Block("X", 2),),
            scalars=(),
            objective=LinearFunctional(blocks={"X": np.array([[0.0, 1.0], [0.0, 0.0]])}),
            sense=Sense.MINIMIZE,
            constraints=(),
        )


def test_problem_rejects_wrong_shape():
    with pytest.raises(ValueError):
        SdpProblem(
            blocks=(Block("X", 3),),
            scalars=(),
            objective=LinearFunctional(blocks={"X": np.eye(2)}),
            sense=Sense.MINIMIZE,
            constraints=(),
        )


def test_constraint_slack_signs():
    x = {"X": np.diag([2.0, 1.0])}
    functional = LinearFunctional(blocks={"X": np.eye(2)})
    assert Constraint(functional, Relation.LE, 4.0, "le").slack(x, {}) == pytest.approx(1.0)
    assert Constraint(functional, Relation.GE, 4.0, "ge").slack(x, {}) == pytest.approx(-1.0)
    assert Constraint(functional, Relation.EQ, 4.0, "eq").slack(x, {}) == pytest.approx(-1.0)


def test_realify_preserves_functional_values(rng):
    a, c, x = _hermitian(rng, 3), _hermitian(rng, 3), _psd(rng, 3)
    problem = SdpProblem(
        blocks=(Block("X", 3),),
        scalars=(ScalarVariable("t"), ScalarVariable("s", lower=-1.0)),
        objective=LinearFunctional(blocks={"X": c}, scalars={"t": 2.0, "s": -1.0}, constant=0.5),
        sense=Sense.MAXIMIZE,
        constraints=(Constraint(LinearFunctional(blocks={"X": a}), Relation.EQ, 1.0, "a"),),
    )
    sdp = realify(problem)
    embedded = embed_hermitian(x)

    assert sdp.dims == (6,)
    assert np.sum(sdp.a_blocks[0][0] * embedded) == pytest.approx(np.real(np.trace(a @ x)))
    # Maximization becomes minimization of the negated objective
    assert np.sum(sdp.c_blocks[0] * embedded) == pytest.approx(-np.real(np.trace(c @ x)))

    # t is split into two nonnegative parts, s is shifted by its lower bound
    x_lp = np.zeros(len(sdp.c_lp))
    (t_plus, _), (t_minus, _) = sdp.scalar_columns["t"]
    ((s_col, _),) = sdp.scalar_columns["s"]
    x_lp[t_minus] = 0.75
    x_lp[s_col] = 3.0
    blocks, scalars = sdp.recover([embedded], x_lp)
    assert scalars == pytest.approx({"t": -0.75, "s": 2.0})
    np.testing.assert_allclose(blocks["X"], x, atol=1e-12)
    assert sdp.objective_value([embedded], x_lp) == pytest.approx(
        np.real(np.trace(c @ x)) - 1.5 - 2.0 + 0.5
    )


def test_minimum_trace_with_fixed_corner():
    problem = SdpProblem(
        blocks=(Block("X", 3),),
        scalars=(),
        objective=LinearFunctional(blocks={"X": np.eye(3)}),
        sense=Sense.MINIMIZE,
        constraints=(
            Constraint(LinearFunctional(blocks={"X": np.diag([1.0, 0.0, 0.0])}), Relation.EQ, 1.0, "corner"),
        ),
    )
    solution = solve(problem)
    assert solution.status is SolverStatus.OPTIMAL
    assert solution.objective_value == pytest.approx(1.0, abs=1e-6)
    assert solution.block_values["X"][0, 0] == pytest.approx(1.0, abs=1e-6)


def test_largest_eigenvalue():
    problem = SdpProblem(
        blocks=(Block("X", 2),),
        scalars=(),
        objective=LinearFunctional(blocks={"X": np.diag([3.0, 1.0])}),
        sense=Sense.MAXIMIZE,
        constraints=(Constraint(LinearFunctional(blocks={"X": np.eye(2)}), Relation.EQ, 1.0, "trace"),),
    )
    solution = solve(problem)
    assert solution.status is SolverStatus.OPTIMAL
    assert solution.objective_value == pytest.approx(3.0, abs=1e-6)
    assert solution.duality_gap < 1e-6


def test_inequality_and_scalar():
    # maximize t subject to t <= Tr(X) <= 2, X PSD
    problem = SdpProblem(
        blocks=(Block("X", 2, is_complex=False),),
        scalars=(ScalarVariable("t"),),
        objective=LinearFunctional(scalars={"t": 1.0}),
        sense=Sense.MAXIMIZE,
        constraints=(
            Constraint(LinearFunctional(blocks={"X": np.eye(2)}), Relation.LE, 2.0, "budget"),
            Constraint(LinearFunctional(blocks={"X": -np.eye(2)}, scalars={"t": 1.0}), Relation.LE, 0.0, "link"),
        ),
    )
    solution = solve(problem)
    assert solution.status is SolverStatus.OPTIMAL
    assert solution.scalar_values["t"] == pytest.approx(2.0, abs=1e-6)


@pytest.mark.parametrize("n", [2, 4, 6])
def test_planted_optimum(n: int):
    problem, optimum, v = planted_sdp(np.random.default_rng(n), n)
    solution = solve(problem)
    assert solution.status is SolverStatus.OPTIMAL
    assert solution.objective_value == pytest.approx(optimum, abs=1e-5 * (1.0 + abs(optimum)))
    np.testing.assert_allclose(solution.block_values["X"], np.outer(v, v.conj()), atol=1e-4)


def test_infeasible_problem_is_reported():
    # Tr(X) = -1 has no PSD solution
    problem = SdpProblem(
        blocks=(Block("X", 2),),
        scalars=(),
        objective=LinearFunctional(blocks={"X": np.eye(2)}),
        sense=Sense.MINIMIZE,
        constraints=(Constraint(LinearFunctional(blocks={"X": np.eye(2)}), Relation.EQ, -1.0, "trace"),),
    )
    solution = solve(problem, IpmSettings(max_iters=60))
    assert solution.status is not SolverStatus.OPTIMAL


def test_unknown_backend():
    with pytest.raises(ConfigurationError):
        get_backend("mosek")


def test_dump_problem():
    problem = SdpProblem(
        blocks=(Block("X", 2),),
        scalars=(ScalarVariable("t", lower=0.0),),
        objective=LinearFunctional(blocks={"X": np.array([[1.0, 1j], [-1j, 2.0]])}, scalars={"t": 1.0}),
        sense=Sense.MAXIMIZE,
        constraints=(Constraint(LinearFunctional(blocks={"X": np.eye(2)}), Relation.LE, 1.0, "power"),),
    )
    document = json.loads(dump_problem(problem))
    assert document["sense"] == Sense.MAXIMIZE.value
    assert document["blocks"] == [{"name": "X", "dim": 2, "complex": True}]
    assert document["scalars"] == [{"name": "t", "lower": 0.0}]
    assert document["objective"]["blocks"]["X"][0][1] == [0.0, 1.0]
    assert document["constraints"][0]["relation"] == "<="


def test_cvxpy_backend_agrees_on_planted_problem():
    pytest.importorskip("cvxpy")
    problem, optimum, _ = planted_sdp(np.random.default_rng(7), 3)
    solution = solve(problem, backend="cvxpy")
    assert solution.status is SolverStatus.OPTIMAL
    assert solution.objective_value == pytest.approx(optimum, abs=1e-4 * (1.0 + abs(optimum)))
