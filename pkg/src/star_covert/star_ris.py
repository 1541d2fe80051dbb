"""
Reflection and transmission coefficients of a STAR surface in energy-splitting
mode, where every element forwards a fraction ``beta_r`` of the incident power to
the reflection side and ``beta_t = 1 - beta_r`` to the transmission side.
"""

import dataclasses
import enum
import numpy as np
import numpy.typing as npt

from star_covert._errors import ConfigurationError, DegenerateInputError
from typing import Any, Dict, Mapping, Optional


ComplexArray = npt.NDArray[np.complex128]
RealArray = npt.NDArray[np.float64]

TWO_PI = 2.0 * np.pi
_SPLIT_TOL = 1e-9


class Side(enum.Enum):
    REFLECT = "reflect"
    TRANSMIT = "transmit"


def wrap_phase(phase: npt.ArrayLike) -> RealArray:
    """
    Map phases into ``[0, 2 pi)``.

    >>> wrap_phase([2 * np.pi, 0.5]).tolist()
    [0.0, 0.5]
    """
    wrapped = np.mod(np.asarray(phase, dtype=float), TWO_PI)
    # mod can round up to exactly 2 pi for tiny negative inputs
    return np.where(wrapped >= TWO_PI, 0.0, wrapped)


@dataclasses.dataclass(frozen=True)
class StarCoefficients:
    beta_r: RealArray
    beta_t: RealArray
    phase_r: RealArray
    phase_t: RealArray

    def __post_init__(self) -> None:
        m = len(self.beta_r)
        if any(len(a) != m for a in (self.beta_t, self.phase_r, self.phase_t)):
            raise ValueError("coefficient vectors must have equal lengths")
        for name in ("beta_r", "beta_t"):
            beta = getattr(self, name)
            if np.any(beta < -_SPLIT_TOL) or np.any(beta > 1.0 + _SPLIT_TOL):
                raise ValueError(f"{name} must lie in [0, 1]")
        if np.any(np.abs(self.beta_r + self.beta_t - 1.0) > _SPLIT_TOL):
            raise ValueError("beta_r + beta_t must equal 1 for every element")
        for name in ("phase_r", "phase_t"):
            phase = getattr(self, name)
            if np.any(phase < 0.0) or np.any(phase >= TWO_PI):
                raise ValueError(f"{name} must be wrapped into [0, 2 pi)")

    @classmethod
    def create(cls, beta_r: npt.ArrayLike, phase_r: npt.ArrayLike, phase_t: npt.ArrayLike) -> "StarCoefficients":
        """Build coefficients from the reflection split, wrapping the phases."""
        beta_r = np.clip(np.asarray(beta_r, dtype=float), 0.0, 1.0)
        return cls(beta_r, 1.0 - beta_r, wrap_phase(phase_r), wrap_phase(phase_t))

    @classmethod
    def from_vectors(cls, theta_r: ComplexArray, theta_t: ComplexArray) -> "StarCoefficients":
        """Recover coefficients from the diagonals of ``Theta_r`` and ``Theta_t``."""
        return project_feasible(np.abs(theta_r) ** 2, np.abs(theta_t) ** 2, np.angle(theta_r), np.angle(theta_t))

    @property
    def m(self) -> int:
        return len(self.beta_r)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "beta_r": self.beta_r.tolist(),
            "beta_t": self.beta_t.tolist(),
            "phase_r": self.phase_r.tolist(),
            "phase_t": self.phase_t.tolist(),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "StarCoefficients":
        return cls(*(np.array(data[key], dtype=float) for key in ("beta_r", "beta_t", "phase_r", "phase_t")))


def coefficient_vector(coeffs: StarCoefficients, side: Side) -> ComplexArray:
    """
    The diagonal of ``Theta_r`` or ``Theta_t``.

    >>> c = StarCoefficients.create([1.0, 1.0], [0.0, 0.0], [0.0, 0.0])
    >>> coefficient_vector(c, Side.REFLECT)
    array([1.+0.j, 1.+0.j])
    """
    if side is Side.REFLECT:
        return np.sqrt(coeffs.beta_r) * np.exp(1j * coeffs.phase_r)
    return np.sqrt(coeffs.beta_t) * np.exp(1j * coeffs.phase_t)


def project_feasible(
    raw_beta_r: npt.ArrayLike, raw_beta_t: npt.ArrayLike, phase_r: npt.ArrayLike, phase_t: npt.ArrayLike
) -> StarCoefficients:
    """
    Renormalize a pair of nonnegative amplitude powers so that they split the unit
    power of every element. Elements with no power on either side get an equal split.

    :raise ValueError: If any raw amplitude power is negative.
    """
    raw_r = np.asarray(raw_beta_r, dtype=float)
    raw_t = np.asarray(raw_beta_t, dtype=float)
    if np.any(raw_r < 0) or np.any(raw_t < 0):
        raise ValueError("raw amplitude powers must be nonnegative")
    total = raw_r + raw_t
    beta_r = np.divide(raw_r, total, out=np.full_like(total, 0.5), where=total > 0)
    return StarCoefficients(beta_r, 1.0 - beta_r, wrap_phase(phase_r), wrap_phase(phase_t))


def extract_rank_one(q_matrix: npt.ArrayLike, target_beta: npt.ArrayLike) -> ComplexArray:
    """
    Return the principal eigenvector of ``q_matrix`` with its amplitudes replaced by
    ``sqrt(target_beta)``. The global phase is fixed so that the first nonzero entry
    is real and nonnegative.

    :raise DegenerateInputError: If ``q_matrix`` is zero.
    """
    q = np.asarray(q_matrix, dtype=complex)
    scale = np.abs(q).max(initial=0.0)
    if scale == 0.0:
        raise DegenerateInputError("cannot extract a rank-one factor from a zero matrix")
    _, vectors = np.linalg.eigh((q + q.conj().T) / 2.0)
    v = vectors[:, -1]
    magnitude = np.abs(v)
    first = int(np.argmax(magnitude > 1e-12 * magnitude.max()))
    v = v * np.exp(-1j * np.angle(v[first]))
    phase = np.where(magnitude > 1e-12 * magnitude.max(), np.angle(v), 0.0)
    return np.sqrt(np.clip(np.asarray(target_beta, dtype=float), 0.0, None)) * np.exp(1j * phase)


@dataclasses.dataclass(frozen=True)
class SurfaceLayout:
    """
    Which elements may reflect and which may transmit.

    A STAR surface lets every element do both. The conventional baseline models two
    adjacent ordinary surfaces of ``M/2`` elements each: the first half only reflects
    (toward the covert user and the warden) and the second half only transmits
    (toward the security users and the eavesdropper).
    """

    reflect: npt.NDArray[np.bool_]
    transmit: npt.NDArray[np.bool_]

    def __post_init__(self) -> None:
        if self.reflect.shape != self.transmit.shape:
            raise ValueError("layout masks must have equal shapes")
        if not np.all(self.reflect | self.transmit):
            raise ValueError("every element must serve at least one side")

    @property
    def m(self) -> int:
        return len(self.reflect)

    @property
    def is_star(self) -> bool:
        return bool(np.all(self.reflect & self.transmit))

    @classmethod
    def star(cls, m: int) -> "SurfaceLayout":
        return cls(np.ones(m, dtype=bool), np.ones(m, dtype=bool))

    @classmethod
    def conventional_dual_ris(cls, m: int) -> "SurfaceLayout":
        if m % 2:
            raise ConfigurationError(f"the dual-RIS baseline needs an even element count, got M={m}")
        reflect = np.arange(m) < m // 2
        return cls(reflect, ~reflect)

    def default_split(self) -> RealArray:
        """Equal split where both sides are allowed, otherwise all power on the allowed side."""
        return np.where(self.reflect & self.transmit, 0.5, np.where(self.reflect, 1.0, 0.0))

    def random_coefficients(self, rng: np.random.Generator) -> StarCoefficients:
        phase_r = rng.uniform(0.0, TWO_PI, self.m)
        phase_t = rng.uniform(0.0, TWO_PI, self.m)
        return StarCoefficients.create(self.default_split(), phase_r, phase_t)

    def admits(self, coeffs: StarCoefficients, tol: float = 1e-9) -> bool:
        return bool(np.all(coeffs.beta_r[~self.reflect] <= tol) and np.all(coeffs.beta_t[~self.transmit] <= tol))


def equal_split(m: int, rng: Optional[np.random.Generator] = None) -> StarCoefficients:
    """Equal power split; random phases if ``rng`` is given, zero phases otherwise."""
    return SurfaceLayout.star(m).random_coefficients(rng) if rng is not None else StarCoefficients.create(
        np.full(m, 0.5), np.zeros(m), np.zeros(m)
    )


__all__ = [
    "Side",
    "StarCoefficients",
    "SurfaceLayout",
    "coefficient_vector",
    "equal_split",
    "extract_rank_one",
    "project_feasible",
    "wrap_phase",
]
