"""
Sampling oracles for the closed forms in :py:mod:`star_covert.detection` and
:py:mod:`star_covert.rates`.

Every estimator splits its samples into chunks with independent generator streams
spawned from one :py:class:`numpy.random.SeedSequence`, so results depend on the
seed and the chunk size but not on how many worker threads evaluate the chunks.
"""

import concurrent.futures
import dataclasses
import logging
import math
import numpy as np
import numpy.typing as npt

from star_covert.channel_model import ChannelRealization, complex_gaussian, draw_scenario
from star_covert.config import SystemConfig, grid_shape
from star_covert.detection import asymptotic_terms, beam_power_mean
from star_covert.rates import Beamformers, eavesdropper_beam_means
from star_covert.star_ris import Side, coefficient_vector, equal_split
from typing import Any, Callable, Dict, List, Sequence, Tuple, TypeVar


_logger = logging.getLogger("star_covert")

ComplexArray = npt.NDArray[np.complex128]
RealArray = npt.NDArray[np.float64]

T = TypeVar("T")


@dataclasses.dataclass(frozen=True)
class McSettings:
    n_samples: int = 100_000
    seed: int = 0
    confidence_sigmas: float = 3.0
    chunk_size: int = 25_000
    workers: int = 1

    def __post_init__(self) -> None:
        if self.n_samples < 1 or self.chunk_size < 1 or self.workers < 1:
            raise ValueError(f"sample, chunk and worker counts must be positive: {self}")
        if not self.confidence_sigmas > 0:
            raise ValueError("confidence_sigmas must be positive")

    @property
    def acceptance_grade(self) -> bool:
        return self.n_samples >= 1000

    def scaled(self, factor: int) -> "McSettings":
        """The same stream layout with ``factor`` times as many samples."""
        return dataclasses.replace(self, n_samples=self.n_samples * factor)


def _streams(mc: McSettings) -> List[Tuple[int, np.random.Generator]]:
    full, rest = divmod(mc.n_samples, mc.chunk_size)
    sizes = [mc.chunk_size] * full + ([rest] if rest else [])
    children = np.random.SeedSequence(mc.seed).spawn(len(sizes))
    return [(size, np.random.default_rng(child)) for size, child in zip(sizes, children)]


def map_chunks(mc: McSettings, sample: Callable[[np.random.Generator, int], T]) -> List[T]:
    """Evaluate ``sample(rng, size)`` on every chunk, on a thread pool if ``mc.workers > 1``."""
    streams = _streams(mc)
    if mc.workers == 1:
        return [sample(rng, size) for size, rng in streams]
    with concurrent.futures.ThreadPoolExecutor(max_workers=mc.workers) as executor:
        return list(executor.map(lambda stream: sample(stream[1], stream[0]), streams))


@dataclasses.dataclass(frozen=True)
class Moments:
    """Running first and second moments; ``+`` merges two accumulators."""

    count: int
    total: RealArray
    total_sq: RealArray

    @classmethod
    def of(cls, samples: npt.ArrayLike) -> "Moments":
        x = np.asarray(samples, dtype=float)
        return cls(x.shape[0], x.sum(axis=0), (x * x).sum(axis=0))

    def __add__(self, other: "Moments") -> "Moments":
        return Moments(self.count + other.count, self.total + other.total, self.total_sq + other.total_sq)

    @property
    def mean(self) -> RealArray:
        return self.total / self.count

    @property
    def variance(self) -> RealArray:
        mean = self.mean
        return np.maximum(self.total_sq / self.count - mean * mean, 0.0) * self.count / max(self.count - 1, 1)

    @property
    def stderr(self) -> RealArray:
        return np.sqrt(self.variance / self.count)


def _merge(parts: Sequence[Moments]) -> Moments:
    total = parts[0]
    for part in parts[1:]:
        total = total + part
    return total


def binomial_stderr(p: npt.ArrayLike, n: int) -> RealArray:
    p = np.asarray(p, dtype=float)
    return np.sqrt(p * (1.0 - p) / n)


def within_confidence(estimate: float, reference: float, stderr: float, sigmas: float, n_samples: int) -> bool:
    """
    ``|estimate - reference| <= sigmas * stderr``, with the standard error floored at
    ``1 / n_samples`` so that frequencies of 0 or 1 are not held to exact equality.
    """
    return abs(estimate - reference) <= sigmas * max(stderr, 1.0 / n_samples)


def _beam_coefficients(channel: ChannelRealization, beams: Beamformers, theta_r: ComplexArray) -> ComplexArray:
    """
    ``coef[l, j]`` such that the warden's received amplitude from beam ``j`` (covert
    beam first) is ``g @ coef[:, j]`` for path gains ``g`` of ``H_BR``.
    """
    ris = channel.steering_ris @ (theta_r * channel.h_rw.conj())
    stacked = np.vstack([beams.w_b[np.newaxis, :], beams.w_k])
    bs = channel.steering_bs.conj() @ stacked.T
    return math.sqrt(channel.br_scale) * ris[:, np.newaxis] * bs


def warden_power_samples(
    channel: ChannelRealization, beams: Beamformers, theta_r: ComplexArray, rng: np.random.Generator, size: int
) -> Tuple[RealArray, RealArray]:
    """Warden power above noise under ``H0`` and ``H1`` for ``size`` draws of the ``H_BR`` gains."""
    powers = np.abs(complex_gaussian(rng, (size, channel.l_paths)) @ _beam_coefficients(channel, beams, theta_r)) ** 2
    lambda0 = powers[:, 1:].sum(axis=1)
    return lambda0, lambda0 + powers[:, 0]


@dataclasses.dataclass(frozen=True)
class DepEstimate:
    taus: RealArray
    p_fa: RealArray
    p_md: RealArray
    n_samples: int

    @property
    def stderr_fa(self) -> RealArray:
        return binomial_stderr(self.p_fa, self.n_samples)

    @property
    def stderr_md(self) -> RealArray:
        return binomial_stderr(self.p_md, self.n_samples)

    @property
    def dep(self) -> RealArray:
        return self.p_fa + self.p_md

    def to_dict(self) -> Dict[str, Any]:
        return {
            "taus": self.taus.tolist(),
            "p_fa": self.p_fa.tolist(),
            "p_md": self.p_md.tolist(),
            "stderr_fa": self.stderr_fa.tolist(),
            "stderr_md": self.stderr_md.tolist(),
            "n_samples": self.n_samples,
        }


def empirical_dep(
    channel: ChannelRealization,
    beams: Beamformers,
    theta_r: ComplexArray,
    taus: npt.ArrayLike,
    noise_w: float,
    mc: McSettings,
) -> DepEstimate:
    """
    False-alarm and missed-detection frequencies of the radiometer at each threshold,
    with the warden's channel ``h_rw`` and all angles fixed and only the ``H_BR``
    gains random. Thresholds at or below the noise floor give ``(1, 0)`` exactly.
    """
    excess = np.atleast_1d(np.asarray(taus, dtype=float)) - noise_w

    def sample(rng: np.random.Generator, size: int) -> Tuple[RealArray, RealArray]:
        lambda0, lambda1 = warden_power_samples(channel, beams, theta_r, rng, size)
        alarms = (lambda0[:, np.newaxis] > excess[np.newaxis, :]).sum(axis=0)
        misses = (lambda1[:, np.newaxis] <= excess[np.newaxis, :]).sum(axis=0)
        return alarms, misses

    parts = map_chunks(mc, sample)
    p_fa = sum(part[0] for part in parts) / mc.n_samples
    p_md = sum(part[1] for part in parts) / mc.n_samples
    floor = excess <= 0
    p_fa = np.where(floor, 1.0, p_fa)
    p_md = np.where(floor, 0.0, p_md)
    return DepEstimate(excess + noise_w, p_fa, p_md, mc.n_samples)


@dataclasses.dataclass(frozen=True)
class ExponentialityReport:
    expected_mean: float
    mean: float
    stderr: float
    dispersion: float
    """Sample variance over squared sample mean; 1 for an exponential law"""
    degenerate: bool
    passed: bool

    def to_dict(self) -> Dict[str, Any]:
        return dataclasses.asdict(self)


def exponentiality_check(
    channel: ChannelRealization, beam: ComplexArray, theta_r: ComplexArray, mc: McSettings, dispersion_tol: float = 0.03
) -> ExponentialityReport:
    """
    Check that one beam's warden power is exponential with the closed-form mean: the
    sample mean agrees within ``mc.confidence_sigmas`` standard errors and the
    variance-to-squared-mean ratio lies within ``dispersion_tol`` of 1.
    """
    expected = beam_power_mean(channel, beam, theta_r)
    if expected == 0.0:
        return ExponentialityReport(0.0, 0.0, 0.0, math.nan, degenerate=True, passed=True)
    ris = channel.steering_ris @ (theta_r * channel.h_rw.conj())
    coef = math.sqrt(channel.br_scale) * ris * (channel.steering_bs.conj() @ beam)

    def sample(rng: np.random.Generator, size: int) -> Moments:
        return Moments.of(np.abs(complex_gaussian(rng, (size, channel.l_paths)) @ coef) ** 2)

    moments = _merge(map_chunks(mc, sample))
    mean, stderr = float(moments.mean), float(moments.stderr)
    dispersion = float(moments.variance) / mean**2
    passed = within_confidence(mean, expected, stderr, mc.confidence_sigmas, mc.n_samples) and (
        abs(dispersion - 1.0) <= dispersion_tol
    )
    return ExponentialityReport(expected, mean, stderr, dispersion, degenerate=False, passed=passed)


@dataclasses.dataclass(frozen=True)
class LargeSystemPoint:
    """
    One surface size of the large-system comparison, averaged over scenario draws.
    Errors and spreads are relative to the large-system ``beta``.
    """

    m: int
    paths: int
    relative_error: float
    """Distance between the sample mean of ``lambda0`` and ``beta``"""
    relative_stderr: float
    dispersion: float
    """Root-mean-square distance between single draws of ``lambda0`` and ``beta``"""


@dataclasses.dataclass(frozen=True)
class LargeSystemReport:
    points: Tuple[LargeSystemPoint, ...]
    confidence_sigmas: float
    final_tolerance: float = 0.05

    @property
    def concentrating(self) -> bool:
        """``lambda0`` gathers around ``beta`` as the surface grows."""
        spreads = [p.dispersion for p in self.points]
        return all(later < earlier for earlier, later in zip(spreads, spreads[1:]))

    @property
    def passed(self) -> bool:
        """
        The dispersion shrinks with every size step, the final mean error is within
        tolerance, and no larger than the first beyond the noise band.
        """
        first, last = self.points[0], self.points[-1]
        band = self.confidence_sigmas * math.hypot(first.relative_stderr, last.relative_stderr)
        return (
            self.concentrating
            and last.relative_error < self.final_tolerance
            and last.relative_error <= first.relative_error + band
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "m": [p.m for p in self.points],
            "paths": [p.paths for p in self.points],
            "relative_error": [p.relative_error for p in self.points],
            "relative_stderr": [p.relative_stderr for p in self.points],
            "dispersion": [p.dispersion for p in self.points],
            "concentrating": self.concentrating,
            "passed": self.passed,
        }


def scattering_paths(m: int) -> int:
    """
    Path count of the base-station and warden links of an ``m``-element surface in
    the large-system comparison, which grows with the aperture.

    >>> [scattering_paths(m) for m in (16, 64, 256)]
    [4, 8, 16]
    """
    return max(1, math.isqrt(m))


def lambda0_over_warden_gains(
    channel: ChannelRealization, beams: Beamformers, theta_r: ComplexArray, rng: np.random.Generator, size: int
) -> RealArray:
    """``lambda0`` for ``size`` fresh draws of the warden's path gains, everything else fixed."""
    ris_cross = channel.omega_rw @ (theta_r[:, np.newaxis] * channel.steering_ris.T)
    bs = np.sum(np.abs(beams.w_k @ channel.steering_bs.T.conj()) ** 2, axis=0)
    gains = complex_gaussian(rng, (size, ris_cross.shape[0]))
    ris = np.abs(gains.conj() @ ris_cross) ** 2
    return channel.br_scale * channel.rw_scale * (ris @ bs)


def large_system_convergence(
    config: SystemConfig,
    beams: Beamformers,
    m_values: Sequence[int],
    mc: McSettings,
    scenario_seed: int = 0,
    scenarios: int = 1,
) -> LargeSystemReport:
    """
    Compare the large-system ``beta`` with samples of ``lambda0`` over the warden's
    path gains, for surfaces of increasing size with equal power split and random
    phases. The links to the surface carry :py:func:`scattering_paths` paths, and
    every size is averaged over ``scenarios`` scenario draws.
    """
    if list(m_values) != sorted(set(m_values)):
        raise ValueError(f"element counts must be strictly increasing, got {m_values}")
    if beams.n_t != config.n_t:
        raise ValueError("beamformers do not match the configured antenna count")
    if scenarios < 1:
        raise ValueError(f"scenarios must be positive, got {scenarios}")
    rng = np.random.default_rng(mc.seed)
    points = []
    for m in m_values:
        m_y, m_z = grid_shape(m)
        paths = scattering_paths(m)
        system = config.replace(m_y=m_y, m_z=m_z, l_paths=paths, p_paths=paths)
        errors, stderrs, spreads = [], [], []
        for s in range(scenarios):
            channel = draw_scenario(system, scenario_seed + s).realize()
            theta_r = coefficient_vector(equal_split(m, rng), Side.REFLECT)
            beta_hat = asymptotic_terms(channel, beams, theta_r).beta

            def sample(stream: np.random.Generator, size: int) -> Moments:
                return Moments.of(lambda0_over_warden_gains(channel, beams, theta_r, stream, size))

            moments = _merge(map_chunks(mc, sample))
            mean = float(moments.mean)
            second = float(moments.total_sq) / moments.count
            errors.append(abs(mean - beta_hat) / beta_hat)
            stderrs.append(float(moments.stderr) / beta_hat)
            spreads.append(math.sqrt(max(second - 2.0 * beta_hat * mean + beta_hat**2, 0.0)) / beta_hat)
        point = LargeSystemPoint(
            m, paths, float(np.mean(errors)), float(np.mean(stderrs)), float(np.mean(spreads))
        )
        _logger.info(
            "Large-system check M=%d (%d paths): relative error %.4f, dispersion %.4f",
            m,
            paths,
            point.relative_error,
            point.dispersion,
        )
        points.append(point)
    return LargeSystemReport(tuple(points), mc.confidence_sigmas)


@dataclasses.dataclass(frozen=True)
class EavesdropEstimate:
    """Per-user average eavesdropping rates with standard errors, under both hypotheses."""

    rate_h0: RealArray
    stderr_h0: RealArray
    rate_h1: RealArray
    stderr_h1: RealArray

    def to_dict(self) -> Dict[str, Any]:
        return {name: getattr(self, name).tolist() for name in ("rate_h0", "stderr_h0", "rate_h1", "stderr_h1")}


def eavesdropper_amplitudes(
    channel: ChannelRealization, theta_t: ComplexArray, beams: Beamformers, rng: np.random.Generator, size: int
) -> ComplexArray:
    """Received amplitudes (covert beam first) for ``size`` draws of the eavesdropper's path gains."""
    projected = (channel.omega_re * theta_t) @ channel.h_br
    stacked = np.vstack([beams.w_b[np.newaxis, :], beams.w_k])
    gains = complex_gaussian(rng, (size, projected.shape[0]))
    return math.sqrt(channel.re_scale) * (gains.conj() @ projected @ stacked.T)


def empirical_eavesdrop_rate(
    channel: ChannelRealization, theta_t: ComplexArray, beams: Beamformers, noise_e: float, mc: McSettings
) -> EavesdropEstimate:
    """
    Sample means of ``log2(1 + gamma_e)`` for every protected user, where the
    eavesdropper decodes that user's stream against the other security beams (and,
    under ``H1``, the covert beam) plus noise.
    """
    if np.all(eavesdropper_beam_means(channel, theta_t, beams) == 0):
        _logger.warning("The eavesdropper receives no power; every eavesdropping rate is zero")

    def sample(rng: np.random.Generator, size: int) -> Tuple[Moments, Moments]:
        powers = np.abs(eavesdropper_amplitudes(channel, theta_t, beams, rng, size)) ** 2
        covert, secure = powers[:, 0], powers[:, 1:]
        total0 = secure.sum(axis=1, keepdims=True) + noise_e
        total1 = total0 + covert[:, np.newaxis]
        rate0 = np.log2(total0) - np.log2(total0 - secure)
        rate1 = np.log2(total1) - np.log2(total1 - secure)
        return Moments.of(rate0), Moments.of(rate1)

    parts = map_chunks(mc, sample)
    h0 = _merge([part[0] for part in parts])
    h1 = _merge([part[1] for part in parts])
    return EavesdropEstimate(h0.mean, h0.stderr, h1.mean, h1.stderr)


__all__ = [
    "DepEstimate",
    "EavesdropEstimate",
    "ExponentialityReport",
    "LargeSystemPoint",
    "LargeSystemReport",
    "McSettings",
    "Moments",
    "binomial_stderr",
    "eavesdropper_amplitudes",
    "empirical_dep",
    "empirical_eavesdrop_rate",
    "exponentiality_check",
    "lambda0_over_warden_gains",
    "large_system_convergence",
    "map_chunks",
    "scattering_paths",
    "warden_power_samples",
    "within_confidence",
]
