"""
Saleh-Valenzuela mmWave channels between the base station, the STAR surface and
the receivers, plus the structural matrices the closed forms are written in.

Steering vectors are unit norm. The surface is a ``m_y x m_z`` planar array whose
elements are ordered with the ``m_z`` index running fastest, i.e. element
``(i_y, i_z)`` sits at position ``i_y * m_z + i_z``. Matrices are vectorized by
stacking columns.
"""

import dataclasses
import json
import logging
import numpy as np
import numpy.typing as npt

from star_covert.config import SystemConfig
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union


_logger = logging.getLogger("star_covert")

ComplexArray = npt.NDArray[np.complex128]
RealArray = npt.NDArray[np.float64]


@dataclasses.dataclass(frozen=True)
class ArrayGeometry:
    n_t: int
    """Number of base-station antennas (uniform linear array)"""
    m_y: int
    m_z: int
    spacing_ratio: float = 0.5
    """Element spacing over wavelength, shared by both arrays"""

    def __post_init__(self) -> None:
        if min(self.n_t, self.m_y, self.m_z) < 1:
            raise ValueError(f"array dimensions must be positive, got {self}")
        if not self.spacing_ratio > 0:
            raise ValueError(f"spacing_ratio must be positive, got {self.spacing_ratio}")

    @property
    def m(self) -> int:
        return self.m_y * self.m_z

    @classmethod
    def from_config(cls, config: SystemConfig) -> "ArrayGeometry":
        return cls(config.n_t, config.m_y, config.m_z, config.spacing_ratio)


def ula_steering(gamma: Union[float, npt.ArrayLike], geometry: ArrayGeometry) -> ComplexArray:
    """
    Steering vector of the base-station array toward departure angle ``gamma``.

    An array of angles gives one vector per row.

    >>> ula_steering(0.0, ArrayGeometry(4, 1, 1))
    array([0.5+0.j, 0.5+0.j, 0.5+0.j, 0.5+0.j])
    """
    gamma = np.asarray(gamma, dtype=float)
    n = np.arange(geometry.n_t)
    phase = 2.0 * np.pi * geometry.spacing_ratio * np.multiply.outer(np.sin(gamma), n)
    return np.exp(1j * phase) / np.sqrt(geometry.n_t)


def upa_steering(
    phi: Union[float, npt.ArrayLike], theta: Union[float, npt.ArrayLike], geometry: ArrayGeometry
) -> ComplexArray:
    """
    Steering vector of the surface toward azimuth ``phi`` and elevation ``theta``.

    Arrays of angles (of equal shape) give one vector per row.
    """
    phi = np.asarray(phi, dtype=float)
    theta = np.asarray(theta, dtype=float)
    i_y, i_z = np.divmod(np.arange(geometry.m), geometry.m_z)
    phase = 2.0 * np.pi * geometry.spacing_ratio * (
        np.multiply.outer(np.sin(phi) * np.sin(theta), i_y) + np.multiply.outer(np.cos(theta), i_z)
    )
    return np.exp(1j * phase) / np.sqrt(geometry.m)


def path_loss_db(distance_m: float) -> float:
    """
    Free-space distance-dependent path loss, ``-30 - 22 log10(d)``.

    >>> path_loss_db(10.0)
    -52.0
    """
    if not distance_m > 0:
        raise ValueError(f"distance must be positive, got {distance_m}")
    return -30.0 - 22.0 * float(np.log10(distance_m))


def path_loss_linear(distance_m: float) -> float:
    return 10.0 ** (path_loss_db(distance_m) / 10.0)


def complex_gaussian(rng: np.random.Generator, shape: Union[int, Tuple[int, ...]]) -> ComplexArray:
    """Circularly symmetric complex Gaussian samples with unit variance."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


@dataclasses.dataclass(frozen=True)
class PathSet:
    """
    The paths of one link. For the base-station link, ``azimuth`` and ``elevation``
    are the arrival angles at the surface and ``departure`` the departure angles at
    the base station; for surface-to-receiver links they are the departure angles at
    the surface and ``departure`` is ``None``.
    """

    azimuth: RealArray
    elevation: RealArray
    gains: ComplexArray
    path_loss_linear: float
    departure: Optional[RealArray] = None

    def __post_init__(self) -> None:
        count = len(self.gains)
        if count < 1:
            raise ValueError("a link needs at least one path")
        lengths = [len(self.azimuth), len(self.elevation)]
        if self.departure is not None:
            lengths.append(len(self.departure))
        if any(length != count for length in lengths):
            raise ValueError(f"all per-path arrays must have length {count}")
        if not self.path_loss_linear > 0:
            raise ValueError("path_loss_linear must be positive")

    @property
    def count(self) -> int:
        return len(self.gains)

    def with_gains(self, gains: ComplexArray) -> "PathSet":
        return dataclasses.replace(self, gains=np.asarray(gains, dtype=complex))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "azimuth": self.azimuth.tolist(),
            "elevation": self.elevation.tolist(),
            "departure": None if self.departure is None else self.departure.tolist(),
            "gains": [[g.real, g.imag] for g in self.gains.tolist()],
            "path_loss_linear": self.path_loss_linear,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "PathSet":
        departure = data.get("departure")
        return cls(
            azimuth=np.array(data["azimuth"], dtype=float),
            elevation=np.array(data["elevation"], dtype=float),
            gains=np.array([complex(re, im) for re, im in data["gains"]], dtype=complex),
            path_loss_linear=float(data["path_loss_linear"]),
            departure=None if departure is None else np.array(departure, dtype=float),
        )


def draw_path_set(
    config: SystemConfig, count: int, distance_m: float, rng: np.random.Generator, *, with_departure: bool = False
) -> PathSet:
    """Draw angles uniformly over the configured ranges, and unit-variance gains."""
    azimuth = rng.uniform(config.azimuth_min, config.azimuth_max, count)
    elevation = rng.uniform(config.elevation_min, config.elevation_max, count)
    departure = rng.uniform(config.azimuth_min, config.azimuth_max, count) if with_departure else None
    return PathSet(azimuth, elevation, complex_gaussian(rng, count), path_loss_linear(distance_m), departure)


def phi_matrix(steering_ris: ComplexArray, steering_bs: ComplexArray) -> ComplexArray:
    """
    Stack ``vec(A_l)^H`` as rows, where ``A_l = a_R,l a_B,l^H`` is ``M x N_t``.

    :param steering_ris: ``L x M`` surface steering vectors, one per row.
    :param steering_bs: ``L x N_t`` base-station steering vectors, one per row.
    """
    # vec(a b^H) = conj(b) kron a, so its conjugate transpose is b kron conj(a)
    return np.stack([np.kron(b, a.conj()) for a, b in zip(steering_ris, steering_bs)])


def omega_matrix(steering_ris: ComplexArray) -> ComplexArray:
    """Stack ``a_R,p^H`` as rows (``P x M``)."""
    return np.asarray(steering_ris).conj()


def _outer_stack(rows: ComplexArray) -> ComplexArray:
    return np.einsum("li,lj->lij", rows, rows.conj())


def sample_bs_ris_channel(
    geometry: ArrayGeometry, paths: PathSet, rng: Optional[np.random.Generator] = None
) -> Tuple[ComplexArray, ComplexArray, ComplexArray, ComplexArray]:
    """
    Build ``H_BR`` (``M x N_t``) from a path set, together with ``Phi`` and the
    rank-one projectors onto each path's base-station and surface steering vectors.

    With ``rng``, fresh gains are drawn; otherwise the gains stored in ``paths`` are used.
    """
    if paths.departure is None:
        raise ValueError("the base-station link needs departure angles")
    gains = paths.gains if rng is None else complex_gaussian(rng, paths.count)
    a_ris = upa_steering(paths.azimuth, paths.elevation, geometry)
    a_bs = ula_steering(paths.departure, geometry)
    scale = np.sqrt(geometry.n_t * geometry.m * paths.path_loss_linear / paths.count)
    h_br = scale * np.einsum("l,lm,ln->mn", gains, a_ris, a_bs.conj())
    return h_br, phi_matrix(a_ris, a_bs), _outer_stack(a_bs), _outer_stack(a_ris)


def sample_ris_user_channel(
    geometry: ArrayGeometry, paths: PathSet, rng: Optional[np.random.Generator] = None
) -> ComplexArray:
    """
    Build a surface-to-receiver channel ``h = sqrt(M rho / P) sum_p g_p a_R,p``.

    The receiver sees ``h^H Theta H_BR w``. With ``rng``, fresh gains are drawn.
    """
    gains = paths.gains if rng is None else complex_gaussian(rng, paths.count)
    omega = omega_matrix(upa_steering(paths.azimuth, paths.elevation, geometry))
    return np.sqrt(geometry.m * paths.path_loss_linear / paths.count) * (omega.conj().T @ gains)


@dataclasses.dataclass(frozen=True)
class ChannelRealization:
    """One draw of every channel together with the deterministic path structure."""

    geometry: ArrayGeometry
    h_br: ComplexArray
    """``M x N_t`` base-station to surface channel"""
    h_rb: ComplexArray
    h_rk: ComplexArray
    """``K x M``, one security user per row"""
    h_rw: ComplexArray
    h_re: ComplexArray
    phi_matrix: ComplexArray
    omega_rw: ComplexArray
    omega_re: ComplexArray
    psi_bs: ComplexArray
    """``L x N_t x N_t`` projectors ``a_B,l a_B,l^H``"""
    psi_ris: ComplexArray
    """``L x M x M`` projectors ``a_R,l a_R,l^H``"""
    steering_bs: ComplexArray
    steering_ris: ComplexArray
    br_scale: float
    """``N_t M rho_BR / L``"""
    rw_scale: float
    """``M rho_rw / P``"""
    re_scale: float
    """``M rho_re / P``"""

    @property
    def k_users(self) -> int:
        return self.h_rk.shape[0]

    @property
    def l_paths(self) -> int:
        return self.phi_matrix.shape[0]


_LINKS: Tuple[str, ...] = ("br", "rb", "rw", "re")


@dataclasses.dataclass(frozen=True)
class Scenario:
    """
    Everything random about one channel draw, kept so that a run can be replayed.

    Angles are fixed for the lifetime of a scenario; gains are fixed too unless
    :py:meth:`resample_gains` is called.
    """

    geometry: ArrayGeometry
    br: PathSet
    rb: PathSet
    rk: Tuple[PathSet, ...]
    rw: PathSet
    re: PathSet
    seed: Optional[int] = None

    def realize(self) -> ChannelRealization:
        h_br, phi, psi_bs, psi_ris = sample_bs_ris_channel(self.geometry, self.br)
        geometry = self.geometry
        return ChannelRealization(
            geometry=geometry,
            h_br=h_br,
            h_rb=sample_ris_user_channel(geometry, self.rb),
            h_rk=np.stack([sample_ris_user_channel(geometry, paths) for paths in self.rk]),
            h_rw=sample_ris_user_channel(geometry, self.rw),
            h_re=sample_ris_user_channel(geometry, self.re),
            phi_matrix=phi,
            omega_rw=omega_matrix(upa_steering(self.rw.azimuth, self.rw.elevation, geometry)),
            omega_re=omega_matrix(upa_steering(self.re.azimuth, self.re.elevation, geometry)),
            psi_bs=psi_bs,
            psi_ris=psi_ris,
            steering_bs=ula_steering(self.br.departure, geometry),
            steering_ris=upa_steering(self.br.azimuth, self.br.elevation, geometry),
            br_scale=geometry.n_t * geometry.m * self.br.path_loss_linear / self.br.count,
            rw_scale=geometry.m * self.rw.path_loss_linear / self.rw.count,
            re_scale=geometry.m * self.re.path_loss_linear / self.re.count,
        )

    def resample_gains(self, rng: np.random.Generator) -> "Scenario":
        """Keep the angles and draw fresh gains on every link."""

        def fresh(paths: PathSet) -> PathSet:
            return paths.with_gains(complex_gaussian(rng, paths.count))

        return dataclasses.replace(
            self,
            br=fresh(self.br),
            rb=fresh(self.rb),
            rk=tuple(fresh(paths) for paths in self.rk),
            rw=fresh(self.rw),
            re=fresh(self.re),
        )

    def to_dict(self) -> Dict[str, Any]:
        links: Dict[str, Any] = {name: getattr(self, name).to_dict() for name in _LINKS}
        links["rk"] = [paths.to_dict() for paths in self.rk]
        return {"geometry": dataclasses.asdict(self.geometry), "seed": self.seed, "links": links}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "Scenario":
        links = data["links"]
        return cls(
            geometry=ArrayGeometry(**data["geometry"]),
            rk=tuple(PathSet.from_dict(paths) for paths in links["rk"]),
            seed=data.get("seed"),
            **{name: PathSet.from_dict(links[name]) for name in _LINKS},
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "Scenario":
        return cls.from_dict(json.loads(text))


def draw_scenario(config: SystemConfig, seed: Optional[int] = None) -> Scenario:
    """Draw every link of a scenario from one seeded generator."""
    rng = np.random.default_rng(seed)
    geometry = ArrayGeometry.from_config(config)
    br = draw_path_set(config, config.l_paths, config.d_br, rng, with_departure=True)
    rb = draw_path_set(config, config.p_paths, config.d_rb, rng)
    rk: List[PathSet] = [draw_path_set(config, config.p_paths, config.d_rk, rng) for _ in range(config.k_users)]
    rw = draw_path_set(config, config.p_paths, config.d_rw, rng)
    re = draw_path_set(config, config.p_paths, config.d_re, rng)
    _logger.debug("Drew scenario seed=%s with M=%d, N_t=%d, K=%d", seed, geometry.m, geometry.n_t, config.k_users)
    return Scenario(geometry, br, rb, tuple(rk), rw, re, seed)


__all__ = [
    "ArrayGeometry",
    "ChannelRealization",
    "PathSet",
    "Scenario",
    "complex_gaussian",
    "draw_path_set",
    "draw_scenario",
    "omega_matrix",
    "path_loss_db",
    "path_loss_linear",
    "phi_matrix",
    "sample_bs_ris_channel",
    "sample_ris_user_channel",
    "ula_steering",
    "upa_steering",
]
