"""
Slow, literal evaluations of the closed forms, written from the channel model with
explicit loops and dense matrices. Tests compare the vectorized package code
against these.
"""

import math
import numpy as np

from star_covert.channel_model import ChannelRealization
from star_covert.rates import Beamformers
from star_covert.sdp_backend import Block, Constraint, LinearFunctional, Relation, SdpProblem, Sense
from typing import List, Tuple


def vec(matrix: np.ndarray) -> np.ndarray:
    """Stack columns."""
    return np.asarray(matrix).reshape(-1, order="F")


def dense_xi(m: int) -> np.ndarray:
    xi = np.zeros((m * m, m))
    for i in range(m):
        xi[i * m + i, i] = 1.0
    return xi


def warden_beam_power(channel: ChannelRealization, w: np.ndarray, theta_r: np.ndarray) -> float:
    """``(N_t M rho / L) ||conj(Phi) vec((w h_rw^H Theta_r)^T)||^2``."""
    product = np.outer(w, channel.h_rw.conj()) @ np.diag(theta_r)
    return channel.br_scale * float(np.linalg.norm(channel.phi_matrix.conj() @ vec(product.T)) ** 2)


def warden_lambdas(channel: ChannelRealization, beams: Beamformers, theta_r: np.ndarray) -> Tuple[float, float]:
    lambda0 = sum(warden_beam_power(channel, w, theta_r) for w in beams.w_k)
    return lambda0, lambda0 + warden_beam_power(channel, beams.w_b, theta_r)


def kron_delta(channel: ChannelRealization) -> np.ndarray:
    """``Xi^T (Psi_hat^l kron R^T) Xi`` for every path, built with a dense Kronecker product."""
    m = channel.geometry.m
    xi = dense_xi(m)
    gram = channel.omega_rw.conj().T @ channel.omega_rw
    return np.stack([xi.T @ np.kron(psi, gram.T) @ xi for psi in channel.psi_ris])


def asymptotic_alpha_beta(
    channel: ChannelRealization, beams: Beamformers, theta_r: np.ndarray
) -> Tuple[float, float]:
    """Loop over paths: ``|a_B,l^H w|^2 ||Omega_rw Theta_r a_R,l||^2``."""

    def term(w: np.ndarray) -> float:
        total = 0.0
        for a_bs, a_ris in zip(channel.steering_bs, channel.steering_ris):
            bs = abs(np.vdot(a_bs, w)) ** 2
            ris = float(np.linalg.norm(channel.omega_rw @ (theta_r * a_ris)) ** 2)
            total += bs * ris
        return channel.br_scale * channel.rw_scale * total

    return term(beams.w_b), sum(term(w) for w in beams.w_k)


def loop_secure_sinrs(
    channel: ChannelRealization, theta_t: np.ndarray, beams: Beamformers, noise_k: float, covert_active: bool
) -> List[float]:
    theta = np.diag(theta_t)
    sinrs = []
    for k in range(beams.k_users):
        g = channel.h_rk[k].conj() @ theta @ channel.h_br
        signal = abs(g @ beams.w_k[k]) ** 2
        interference = sum(abs(g @ beams.w_k[j]) ** 2 for j in range(beams.k_users) if j != k)
        if covert_active:
            interference += abs(g @ beams.w_b) ** 2
        sinrs.append(signal / (interference + noise_k))
    return sinrs


def grid_min_dep(lambda0: float, lambda1: float, points: int = 200_001) -> float:
    """Minimum of ``P_FA + P_MD`` over a dense grid of thresholds above the noise floor."""
    excess = np.linspace(0.0, 20.0 * lambda1, points)
    return float(np.min(np.exp(-excess / lambda0) + 1.0 - np.exp(-excess / lambda1)))


def covert_gap(ratio: float) -> float:
    """``1 - P_ea*`` from the detection error at the optimal threshold of unit-mean statistics."""
    lambda0, lambda1 = ratio, ratio + 1.0
    tau = lambda0 * lambda1 * math.log(lambda1 / lambda0) / (lambda1 - lambda0)
    return 1.0 - (math.exp(-tau / lambda0) + 1.0 - math.exp(-tau / lambda1))


def _random_hermitian(rng: np.random.Generator, n: int) -> np.ndarray:
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (a + a.conj().T) / 2.0


def planted_sdp(rng: np.random.Generator, n: int, extra_constraints: int = 2) -> Tuple[SdpProblem, float, np.ndarray]:
    """
    A minimization over one ``n x n`` Hermitian block whose optimum is known in advance.

    The optimizer is ``v v^H`` for a random unit ``v``: the constraints are ``Tr(X) = 1``
    plus random equalities that ``v v^H`` satisfies, and the cost ``C = Z + sum y_i A_i``
    with ``Z = P B B^H P`` (``P`` projects out ``v``) makes ``(y, Z)`` an optimal dual pair.
    Returns the problem, its optimal value and ``v``.
    """
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    v /= np.linalg.norm(v)
    a_matrices = [np.eye(n, dtype=complex)] + [_random_hermitian(rng, n) for _ in range(extra_constraints)]
    rhs = [float(np.real(v.conj() @ a @ v)) for a in a_matrices]
    y = rng.standard_normal(len(a_matrices))
    projector = np.eye(n) - np.outer(v, v.conj())
    b = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    z = projector @ b @ b.conj().T @ projector
    cost = z + sum(yi * a for yi, a in zip(y, a_matrices))
    cost = (cost + cost.conj().T) / 2.0
    problem = SdpProblem(
        blocks=(Block("X", n),),
        scalars=(),
        objective=LinearFunctional(blocks={"X": cost}),
        sense=Sense.MINIMIZE,
        constraints=tuple(
            Constraint(LinearFunctional(blocks={"X": a}), Relation.EQ, b_i, f"a{i}")
            for i, (a, b_i) in enumerate(zip(a_matrices, rhs))
        ),
    )
    return problem, float(y @ np.array(rhs)), v
