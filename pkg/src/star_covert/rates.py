"""
Achievable rates: the covert rate at the covert user, secure SINRs of the security
users under both hypotheses, average eavesdropping rates, their robust upper bounds
and the Bernoulli-averaged sum rate the optimizer maximizes.

Hypothesis ``H1`` means the covert beam ``w_b`` is active; under ``H0`` it is silent.
"""

import dataclasses
import enum
import logging
import math
import numpy as np
import numpy.typing as npt
import scipy.special
import warnings

from star_covert.channel_model import ChannelRealization
from star_covert.config import SystemConfig
from star_covert.star_ris import Side, StarCoefficients, coefficient_vector
from typing import Any, Dict, List, Mapping, Tuple


_logger = logging.getLogger("star_covert")

ComplexArray = npt.NDArray[np.complex128]
RealArray = npt.NDArray[np.float64]

LN2 = math.log(2.0)


class Hypothesis(enum.Enum):
    H0 = 0
    H1 = 1


@dataclasses.dataclass(frozen=True)
class Beamformers:
    w_b: ComplexArray
    """Covert beam, length ``N_t``"""
    w_k: ComplexArray
    """Security beams, ``K x N_t``"""

    def __post_init__(self) -> None:
        if self.w_k.ndim != 2 or self.w_k.shape[1] != len(self.w_b):
            raise ValueError(f"w_k must be K x {len(self.w_b)}, got shape {self.w_k.shape}")

    @property
    def n_t(self) -> int:
        return len(self.w_b)

    @property
    def k_users(self) -> int:
        return self.w_k.shape[0]

    @property
    def power(self) -> float:
        return float(np.vdot(self.w_b, self.w_b).real + np.vdot(self.w_k, self.w_k).real)

    def stack(self) -> ComplexArray:
        """``vec(W)`` with ``W = [w_b, w_1, ..., w_K]``."""
        return np.concatenate([self.w_b, self.w_k.reshape(-1)])

    @classmethod
    def from_stacked(cls, vector: ComplexArray, n_t: int) -> "Beamformers":
        columns = np.asarray(vector, dtype=complex).reshape(-1, n_t)
        return cls(columns[0].copy(), columns[1:].copy())

    def scaled(self, covert: float = 1.0, secure: float = 1.0) -> "Beamformers":
        return Beamformers(self.w_b * covert, self.w_k * secure)

    def to_dict(self) -> Dict[str, Any]:
        def pairs(v: ComplexArray) -> List[List[float]]:
            return [[z.real, z.imag] for z in v.tolist()]

        return {"w_b": pairs(self.w_b), "w_k": [pairs(w) for w in self.w_k]}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "Beamformers":
        def vector(pairs: List[List[float]]) -> ComplexArray:
            return np.array([complex(re, im) for re, im in pairs], dtype=complex)

        w_b = vector(data["w_b"])
        w_k = np.array([vector(w) for w in data["w_k"]], dtype=complex).reshape(-1, len(w_b))
        return cls(w_b, w_k)


def effective_channel(h: ComplexArray, theta: ComplexArray, h_br: ComplexArray) -> ComplexArray:
    """The row vector ``h^H Theta H_BR``; the receiver sees ``effective_channel(...) @ w``."""
    return (h.conj() * theta) @ h_br


def covert_rate(channel: ChannelRealization, theta_r: ComplexArray, beams: Beamformers, noise_b: float) -> float:
    """Rate of the covert user, who suffers interference from every security beam."""
    eff = effective_channel(channel.h_rb, theta_r, channel.h_br)
    signal = abs(eff @ beams.w_b) ** 2
    interference = float(np.sum(np.abs(beams.w_k @ eff) ** 2))
    return math.log2(1.0 + signal / (interference + noise_b))


def secure_sinrs(
    channel: ChannelRealization, theta_t: ComplexArray, beams: Beamformers, noise_k: float, hypothesis: Hypothesis
) -> RealArray:
    """SINR of each security user; under ``H1`` the covert beam adds interference."""
    if beams.k_users < 1:
        raise ValueError("secure SINRs need at least one security user")
    sinrs = np.empty(beams.k_users)
    for k in range(beams.k_users):
        eff = effective_channel(channel.h_rk[k], theta_t, channel.h_br)
        powers = np.abs(beams.w_k @ eff) ** 2
        interference = powers.sum() - powers[k]
        if hypothesis is Hypothesis.H1:
            interference += abs(eff @ beams.w_b) ** 2
        sinrs[k] = powers[k] / (interference + noise_k)
    return sinrs


@dataclasses.dataclass(frozen=True)
class EtaTerms:
    """
    Mean eavesdropper powers over its channel, for one protected user ``k``:
    all security beams (``eta0``), all but beam ``k`` (``eta0_hat``), and the same two
    with the covert beam added (``eta1``, ``eta1_hat``).
    """

    eta0: float
    eta0_hat: float
    eta1: float
    eta1_hat: float

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return self.eta0, self.eta0_hat, self.eta1, self.eta1_hat

    @property
    def degenerate_h0(self) -> bool:
        return self.eta0_hat <= 0.0


def eavesdropper_beam_means(channel: ChannelRealization, theta_t: ComplexArray, beams: Beamformers) -> RealArray:
    """``re_scale ||Omega_re Theta_t H_BR w||^2`` for ``w_b`` followed by each ``w_k``."""
    projected = (channel.omega_re * theta_t) @ channel.h_br
    stacked = np.vstack([beams.w_b[np.newaxis, :], beams.w_k])
    return channel.re_scale * np.sum(np.abs(stacked @ projected.T) ** 2, axis=1)


def eta_terms(channel: ChannelRealization, theta_t: ComplexArray, beams: Beamformers, exclude_user: int) -> EtaTerms:
    """The four mean powers for protected user ``exclude_user``."""
    if not 0 <= exclude_user < beams.k_users:
        raise IndexError(f"user index {exclude_user} out of range for K={beams.k_users}")
    means = eavesdropper_beam_means(channel, theta_t, beams)
    covert, secure = float(means[0]), means[1:]
    eta0 = float(secure.sum())
    eta0_hat = eta0 - float(secure[exclude_user])
    return EtaTerms(eta0, max(eta0_hat, 0.0), eta0 + covert, max(eta0_hat, 0.0) + covert)


def exp_e1(x: float) -> float:
    """
    ``e^x E1(x)``, i.e. ``e^x Gamma(0, x)``, without overflow for large ``x``.

    >>> round(exp_e1(1.0), 6)
    0.596347
    """
    if x < 500.0:
        return float(math.exp(x) * scipy.special.exp1(x))
    inv = 1.0 / x
    return inv * (1.0 - inv + 2.0 * inv**2 - 6.0 * inv**3)


def avg_eavesdrop_rate_exact(eta_num: float, eta_den: float, noise_e: float) -> float:
    """
    Average eavesdropping rate when both power sums are exponential with means
    ``eta_num >= eta_den``. Zero means contribute nothing.
    """
    if eta_num < eta_den or eta_den < 0:
        raise ValueError(f"need eta_num >= eta_den >= 0, got {eta_num}, {eta_den}")

    def term(eta: float) -> float:
        return exp_e1(noise_e / eta) if eta > 0 else 0.0

    return (term(eta_num) - term(eta_den)) / LN2


def _robust_leakage(eta: float, eta_hat: float) -> float:
    return math.log2(eta / eta_hat) if eta > 0 else 0.0


@dataclasses.dataclass(frozen=True)
class RobustRates:
    h0: RealArray
    h1: RealArray
    fallback_h0: bool = False
    """At least one user's ``H0`` bound was replaced by the exact average rate."""


def robust_secure_rates(
    channel: ChannelRealization, theta_t: ComplexArray, beams: Beamformers, noise_k: float, noise_e: float
) -> RobustRates:
    """
    Lower bounds on each user's average secure rate under both hypotheses, with the
    eavesdropping rate bounded by ``log2(eta / eta_hat)``.

    When ``eta_hat`` vanishes (a single security user, under ``H0``) the bound is
    unbounded below; that user's rate then uses the exact average eavesdropping rate
    instead and a warning is issued.
    """
    gamma0 = secure_sinrs(channel, theta_t, beams, noise_k, Hypothesis.H0)
    gamma1 = secure_sinrs(channel, theta_t, beams, noise_k, Hypothesis.H1)
    h0 = np.empty(beams.k_users)
    h1 = np.empty(beams.k_users)
    fallback = False
    for k in range(beams.k_users):
        eta = eta_terms(channel, theta_t, beams, k)
        if eta.eta0_hat > 0 or eta.eta0 == 0:
            leak0 = _robust_leakage(eta.eta0, eta.eta0_hat)
        else:
            fallback = True
            leak0 = avg_eavesdrop_rate_exact(eta.eta0, eta.eta0_hat, noise_e)
        if eta.eta1_hat > 0 or eta.eta1 == 0:
            leak1 = _robust_leakage(eta.eta1, eta.eta1_hat)
        else:
            fallback = True
            leak1 = avg_eavesdrop_rate_exact(eta.eta1, eta.eta1_hat, noise_e)
        h0[k] = max(math.log2(1.0 + gamma0[k]) - leak0, 0.0)
        h1[k] = max(math.log2(1.0 + gamma1[k]) - leak1, 0.0)
    if fallback:
        warnings.warn(
            "eavesdropper interference vanishes for a protected user; using the exact average "
            "eavesdropping rate in place of the robust bound",
            stacklevel=2,
        )
    return RobustRates(h0, h1, fallback)


def exact_average_secrecy_rates(
    channel: ChannelRealization, theta_t: ComplexArray, beams: Beamformers, noise_k: float, noise_e: float
) -> Tuple[RealArray, RealArray]:
    """Per-user average secrecy rates under ``H0`` and ``H1`` using the exact exponential form."""
    gamma0 = secure_sinrs(channel, theta_t, beams, noise_k, Hypothesis.H0)
    gamma1 = secure_sinrs(channel, theta_t, beams, noise_k, Hypothesis.H1)
    h0 = np.empty(beams.k_users)
    h1 = np.empty(beams.k_users)
    for k in range(beams.k_users):
        eta = eta_terms(channel, theta_t, beams, k)
        h0[k] = max(math.log2(1.0 + gamma0[k]) - avg_eavesdrop_rate_exact(eta.eta0, eta.eta0_hat, noise_e), 0.0)
        h1[k] = max(math.log2(1.0 + gamma1[k]) - avg_eavesdrop_rate_exact(eta.eta1, eta.eta1_hat, noise_e), 0.0)
    return h0, h1


def average_sum_rate(p1: float, covert: float, min_h0: float, min_h1: float) -> float:
    """
    >>> round(average_sum_rate(0.5, 1.0, 0.6, 0.6), 12)
    1.1
    """
    if not 0.0 <= p1 <= 1.0:
        raise ValueError(f"p1 must lie in [0, 1], got {p1}")
    return p1 * covert + (1.0 - p1) * min_h0 + p1 * min_h1


@dataclasses.dataclass(frozen=True)
class RateBreakdown:
    covert_rate: float
    secure_h0: RealArray
    secure_h1: RealArray
    eta: Tuple[EtaTerms, ...]
    p1: float
    fallback_h0: bool = False

    @property
    def min_secure_h0(self) -> float:
        return float(self.secure_h0.min())

    @property
    def min_secure_h1(self) -> float:
        return float(self.secure_h1.min())

    @property
    def average_sum(self) -> float:
        return average_sum_rate(self.p1, self.covert_rate, self.min_secure_h0, self.min_secure_h1)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "covert_rate": self.covert_rate,
            "secure_h0": self.secure_h0.tolist(),
            "secure_h1": self.secure_h1.tolist(),
            "min_secure_h0": self.min_secure_h0,
            "min_secure_h1": self.min_secure_h1,
            "average_sum": self.average_sum,
            "eta": [list(e.as_tuple()) for e in self.eta],
            "fallback_h0": self.fallback_h0,
        }


def evaluate_rates(
    channel: ChannelRealization, coeffs: StarCoefficients, beams: Beamformers, config: SystemConfig
) -> RateBreakdown:
    """Every rate of one design point."""
    theta_r = coefficient_vector(coeffs, Side.REFLECT)
    theta_t = coefficient_vector(coeffs, Side.TRANSMIT)
    robust = robust_secure_rates(channel, theta_t, beams, config.noise_k, config.noise_e)
    return RateBreakdown(
        covert_rate=covert_rate(channel, theta_r, beams, config.noise_b),
        secure_h0=robust.h0,
        secure_h1=robust.h1,
        eta=tuple(eta_terms(channel, theta_t, beams, k) for k in range(beams.k_users)),
        p1=config.p1,
        fallback_h0=robust.fallback_h0,
    )


__all__ = [
    "Beamformers",
    "EtaTerms",
    "Hypothesis",
    "RateBreakdown",
    "RobustRates",
    "average_sum_rate",
    "avg_eavesdrop_rate_exact",
    "covert_rate",
    "eavesdropper_beam_means",
    "effective_channel",
    "eta_terms",
    "evaluate_rates",
    "exact_average_secrecy_rates",
    "exp_e1",
    "robust_secure_rates",
    "secure_sinrs",
]
