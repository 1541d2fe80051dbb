"""
Warden-side analytics: false-alarm and missed-detection probabilities of the
radiometer, the optimal threshold, the minimum detection error probability, its
large-system form, and the covert ratio that the optimizer constrains.

Over the base-station channel draws, the power the warden collects from one beam
``w`` is exponential with mean

    br_scale * sum_l |a_B,l^H w|^2 |h_rw^H Theta_r a_R,l|^2

which is ``(N_t M rho_BR / L) ||conj(Phi) vec((w h_rw^H Theta_r)^T)||^2`` written per path.
"""

import dataclasses
import logging
import math
import numpy as np
import numpy.typing as npt
import scipy.optimize
import scipy.sparse

from star_covert._errors import NumericalError
from star_covert.channel_model import ChannelRealization
from star_covert.rates import Beamformers
from typing import Tuple


_logger = logging.getLogger("star_covert")

ComplexArray = npt.NDArray[np.complex128]


def _covert_gap(r: float) -> float:
    """``1 - P_ea*`` as a function of ``r = beta / alpha``; decreases from 1 to 0."""
    return math.exp(-r * math.log1p(1.0 / r)) / (1.0 + r)


@dataclasses.dataclass(frozen=True)
class DetectionStats:
    lambda0: float
    """Mean received power (above noise) when no covert signal is sent"""
    lambda1: float
    """Mean received power (above noise) when the covert signal is sent"""
    noise_w: float

    def __post_init__(self) -> None:
        if self.lambda0 < 0:
            raise ValueError(f"lambda0 must be nonnegative, got {self.lambda0}")
        if self.lambda1 < self.lambda0 * (1.0 - 1e-12):
            raise ValueError(f"lambda1 ({self.lambda1}) must not be below lambda0 ({self.lambda0})")
        if not self.noise_w > 0:
            raise ValueError("noise_w must be positive")

    @property
    def degenerate(self) -> bool:
        """The hypotheses are indistinguishable, or one of them is noise only."""
        return self.lambda1 <= self.lambda0 or self.lambda0 == 0.0

    @property
    def tau_star(self) -> float:
        return optimal_threshold(self)

    @property
    def p_e_star(self) -> float:
        return min_dep(self.lambda0, self.lambda1)


def fa_md_probabilities(tau: float, stats: DetectionStats) -> Tuple[float, float]:
    """
    False-alarm and missed-detection probabilities of the threshold ``tau``.

    With ``lambda0 == 0`` the false-alarm probability is 0 above the noise floor.

    >>> fa_md_probabilities(1.0, DetectionStats(1.0, 2.0, 1.0))
    (1.0, 0.0)
    """
    excess = tau - stats.noise_w
    if excess <= 0:
        return 1.0, 0.0
    p_fa = math.exp(-excess / stats.lambda0) if stats.lambda0 > 0 else 0.0
    p_md = -math.expm1(-excess / stats.lambda1) if stats.lambda1 > 0 else 1.0
    return p_fa, p_md


def dep(tau: float, stats: DetectionStats) -> float:
    """Detection error probability ``P_FA + P_MD`` at threshold ``tau``."""
    return sum(fa_md_probabilities(tau, stats))


def optimal_threshold(stats: DetectionStats) -> float:
    """
    The threshold minimizing the detection error probability.

    For degenerate statistics (see :py:attr:`DetectionStats.degenerate`) the noise
    floor is returned.
    """
    if stats.degenerate:
        return stats.noise_w
    lam0, lam1 = stats.lambda0, stats.lambda1
    return lam1 * lam0 * math.log(lam1 / lam0) / (lam1 - lam0) + stats.noise_w


def min_dep(lambda0: float, lambda1: float) -> float:
    """
    Minimum detection error probability over all thresholds.

    >>> min_dep(1.0, 2.0)
    0.75
    >>> min_dep(3.0, 3.0)
    1.0
    """
    if lambda1 <= lambda0:
        return 1.0
    if lambda0 == 0.0:
        return 0.0
    r = lambda1 / lambda0
    e0 = math.log(r) / (r - 1.0)
    return 1.0 - math.exp(-e0) + math.exp(-r * e0)


def beam_power_mean(channel: ChannelRealization, w: ComplexArray, theta_r: ComplexArray) -> float:
    """Mean warden power of a single beam over base-station channel draws."""
    bs_gain = np.abs(channel.steering_bs.conj() @ w) ** 2
    ris_gain = np.abs(channel.steering_ris @ (theta_r * channel.h_rw.conj())) ** 2
    return float(channel.br_scale * np.dot(bs_gain, ris_gain))


def lambda_terms(channel: ChannelRealization, beams: Beamformers, theta_r: ComplexArray) -> Tuple[float, float]:
    """
    Exponential means ``(lambda0, lambda1)`` of the warden's power statistic above
    noise; ``lambda1 - lambda0`` is the covert beam's contribution.
    """
    if beams.n_t != channel.geometry.n_t or len(theta_r) != channel.geometry.m:
        raise ValueError("beamformer or coefficient dimensions do not match the channel")
    lambda0 = sum(beam_power_mean(channel, w, theta_r) for w in beams.w_k)
    return lambda0, lambda0 + beam_power_mean(channel, beams.w_b, theta_r)


def xi_matrix(m: int) -> scipy.sparse.csr_matrix:
    """
    The ``M^2 x M`` selection matrix with ``Xi theta = vec(Diag(theta))``.

    >>> (xi_matrix(3) @ np.arange(1.0, 4.0)).tolist()
    [1.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 3.0]
    """
    rows = np.arange(m) * (m + 1)
    return scipy.sparse.csr_matrix((np.ones(m), (rows, np.arange(m))), shape=(m * m, m))


def delta_matrices(channel: ChannelRealization) -> ComplexArray:
    """
    ``Delta^l = Xi^T (Psi_hat^l kron R^T) Xi`` with ``R = Omega_rw^H Omega_rw``, so that
    ``Tr(Q_r Delta^l)`` with ``Q_r = conj(theta) theta^T`` is ``||Omega_rw Theta_r a_R,l||^2``.

    The selection keeps only the diagonal blocks' diagonals, so the product reduces
    to the Hadamard form computed here.
    """
    gram = channel.omega_rw.conj().T @ channel.omega_rw
    return channel.psi_ris * gram.T[np.newaxis, :, :]


@dataclasses.dataclass(frozen=True)
class AsymptoticTerms:
    alpha: float
    """Large-system mean of the covert beam's warden power"""
    beta: float
    """Large-system mean of the security beams' warden power"""
    delta_l: ComplexArray
    xi_matrix: scipy.sparse.csr_matrix

    @property
    def ratio(self) -> float:
        return self.beta / self.alpha if self.alpha > 0 else math.inf

    @property
    def p_ea_star(self) -> float:
        return asymptotic_min_dep(self.alpha, self.beta)


def asymptotic_terms(channel: ChannelRealization, beams: Beamformers, theta_r: ComplexArray) -> AsymptoticTerms:
    """
    Evaluate ``alpha`` and ``beta``: the means of ``lambda1 - lambda0`` and ``lambda0``
    over the warden's channel, which the warden only knows statistically.
    """
    m = channel.geometry.m
    if beams.n_t != channel.geometry.n_t or len(theta_r) != m:
        raise ValueError("beamformer or coefficient dimensions do not match the channel")
    deltas = delta_matrices(channel)
    q_r = np.outer(theta_r.conj(), theta_r)
    ris_terms = np.real(np.einsum("mn,lnm->l", q_r, deltas))
    scale = channel.br_scale * channel.rw_scale

    def term(w: ComplexArray) -> float:
        bs_terms = np.real(np.einsum("i,lij,j->l", w.conj(), channel.psi_bs, w))
        return float(scale * np.dot(bs_terms, ris_terms))

    alpha = max(term(beams.w_b), 0.0)
    beta = max(sum(term(w) for w in beams.w_k), 0.0)
    return AsymptoticTerms(alpha, beta, deltas, xi_matrix(m))


def asymptotic_min_dep(alpha: float, beta: float) -> float:
    """
    Large-system minimum detection error probability. It depends on ``alpha`` and
    ``beta`` only through their ratio.

    >>> asymptotic_min_dep(2.0, 2.0)
    0.75
    >>> asymptotic_min_dep(0.0, 1.0)
    1.0
    """
    if alpha < 0 or beta < 0:
        raise ValueError("alpha and beta must be nonnegative")
    if alpha == 0.0 and beta == 0.0:
        raise ValueError("alpha and beta cannot both be zero")
    if alpha == 0.0:
        return 1.0
    if beta == 0.0:
        return 0.0
    return 1.0 - _covert_gap(beta / alpha)


def asymptotic_dep_gradient(alpha: float, beta: float) -> Tuple[float, float]:
    """Partial derivatives of :py:func:`asymptotic_min_dep` in ``alpha`` and ``beta``."""
    if not (alpha > 0 and beta > 0):
        raise ValueError("the gradient is defined for positive alpha and beta")
    r = beta / alpha
    d_dr = _covert_gap(r) * math.log1p(1.0 / r)
    return -d_dr * beta / alpha**2, d_dr / alpha


def covert_threshold_ratio(epsilon: float, interval: float = 1.0, tolerance: float = 1e-9) -> float:
    """
    The ratio ``phi(epsilon)`` such that ``beta / alpha >= phi(epsilon)`` is equivalent to
    an asymptotic minimum detection error probability of at least ``1 - epsilon``.

    :param interval: Initial upper end of the bisection bracket; doubled until it
        brackets the root.
    :param tolerance: Absolute tolerance of the bisection.
    :raise ValueError: If ``epsilon`` is not in ``(0, 1)``.
    :raise NumericalError: If no bracket is found.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    lo, hi = 1e-8, interval
    for _ in range(200):
        if _covert_gap(lo) >= epsilon:
            break
        lo /= 2.0
    else:
        raise NumericalError(f"could not bracket the covert ratio for epsilon={epsilon} from below")
    for _ in range(200):
        if _covert_gap(hi) <= epsilon:
            break
        hi *= 2.0
    else:
        raise NumericalError(f"could not bracket the covert ratio for epsilon={epsilon} from above")
    root = scipy.optimize.bisect(lambda r: _covert_gap(r) - epsilon, lo, hi, xtol=tolerance)
    _logger.debug("phi(%g) = %.12g", epsilon, root)
    return float(root)


__all__ = [
    "AsymptoticTerms",
    "DetectionStats",
    "asymptotic_dep_gradient",
    "asymptotic_min_dep",
    "asymptotic_terms",
    "beam_power_mean",
    "covert_threshold_ratio",
    "delta_matrices",
    "dep",
    "fa_md_probabilities",
    "lambda_terms",
    "min_dep",
    "optimal_threshold",
    "xi_matrix",
]
