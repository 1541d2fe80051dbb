"""
Configuration objects and their TOML/JSON persistence.

A configuration file is organized in blocks::

    seeds = [0, 1, 2, 3, 4]
    baseline = "star"

    [system]
    n_t = 7
    m_y = 5
    m_z = 6

    [power]
    p_tmax_dbw = 0.0

    [sweep]
    parameter = "p_tmax_dbw"
    values = [-3.0, 0.0, 3.0]

Every block and every key is optional; missing entries take the defaults below.
"""

import dataclasses
import hashlib
import json
import logging
import math
import pathlib
import tomlkit

from star_covert._errors import ConfigurationError
from star_covert._types import ConfigDocument
from typing import Any, Dict, Mapping, Optional, Tuple, Union


_logger = logging.getLogger("star_covert")


BASELINES: Tuple[str, ...] = ("star", "conventional_dual_ris")

SWEEP_PARAMETERS: Tuple[str, ...] = ("p_tmax_dbw", "epsilon", "p1", "m", "n_t")

# Sweeps along which the feasible set only grows, so a converged point is a valid
# start for the next value.
NESTED_SWEEPS: Tuple[str, ...] = ("p_tmax_dbw", "epsilon")


def dbm_to_watts(power_dbm: float) -> float:
    """
    >>> dbm_to_watts(30.0)
    1.0
    >>> dbm_to_watts(-90.0)  # doctest: +ELLIPSIS
    1.0...e-12
    """
    return 10.0 ** ((power_dbm - 30.0) / 10.0)


def dbw_to_watts(power_dbw: float) -> float:
    """
    >>> dbw_to_watts(0.0)
    1.0
    """
    return 10.0 ** (power_dbw / 10.0)


def grid_shape(m: int) -> Tuple[int, int]:
    """
    Return the most square ``(m_y, m_z)`` factorization of an element count.

    >>> grid_shape(30)
    (5, 6)
    >>> grid_shape(16)
    (4, 4)
    >>> grid_shape(7)
    (1, 7)
    """
    if m < 1:
        raise ConfigurationError(f"element count must be positive, got {m}")
    m_y = int(math.isqrt(m))
    while m % m_y:
        m_y -= 1
    return m_y, m // m_y


@dataclasses.dataclass(frozen=True)
class SystemConfig:
    """
    All scalar system parameters. Defaults follow the desk-scale simulation setup:
    28 GHz carrier, three security users, unit transmit power, -90 dBm noise.
    """

    n_t: int = 7
    m_y: int = 5
    m_z: int = 6
    k_users: int = 3
    l_paths: int = 4
    p_paths: int = 4
    spacing_ratio: float = 0.5
    azimuth_min: float = -math.pi / 2
    azimuth_max: float = math.pi / 2
    elevation_min: float = 0.0
    elevation_max: float = math.pi
    resample_gains: bool = False
    """Draw fresh path gains for every slot instead of keeping them per scenario."""
    carrier_ghz: float = 28.0
    """Metadata only; path loss depends on distance alone."""
    bandwidth_mhz: float = 251.1886
    """Metadata only; noise powers are given directly."""

    p_tmax_dbw: float = 0.0
    noise_b_dbm: float = -90.0
    noise_k_dbm: float = -90.0
    noise_w_dbm: float = -90.0
    noise_e_dbm: float = -90.0

    epsilon: float = 0.1
    p1: float = 0.5

    r_b_star: float = 0.5
    r_s0_star: float = 0.6
    r_s1_star: float = 0.6

    d_br: float = 40.0
    d_rb: float = 15.0
    d_rk: float = 15.0
    d_rw: float = 15.0
    d_re: float = 15.0

    def __post_init__(self) -> None:
        for name in ("n_t", "m_y", "m_z", "l_paths", "p_paths"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise ConfigurationError(f"{name} must be a positive integer, got {value!r}")
        if isinstance(self.k_users, bool) or not isinstance(self.k_users, int) or self.k_users < 1:
            raise ConfigurationError(f"k_users must be a positive integer, got {self.k_users!r}")
        if not self.spacing_ratio > 0:
            raise ConfigurationError(f"spacing_ratio must be positive, got {self.spacing_ratio!r}")
        if not self.azimuth_min <= self.azimuth_max or not self.elevation_min <= self.elevation_max:
            raise ConfigurationError("angle ranges must be ordered (min <= max)")
        if not 0.0 < self.epsilon < 1.0:
            raise ConfigurationError(f"epsilon must lie in (0, 1), got {self.epsilon!r}")
        if not 0.0 <= self.p1 <= 1.0:
            raise ConfigurationError(f"p1 must lie in [0, 1], got {self.p1!r}")
        for name in ("r_b_star", "r_s0_star", "r_s1_star"):
            if getattr(self, name) < 0:
                raise ConfigurationError(f"{name} must be nonnegative")
        for name in ("d_br", "d_rb", "d_rk", "d_rw", "d_re"):
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"distance {name} must be positive")

    @property
    def m(self) -> int:
        return self.m_y * self.m_z

    @property
    def p_tmax(self) -> float:
        """Transmit power budget in watts."""
        return dbw_to_watts(self.p_tmax_dbw)

    @property
    def noise_b(self) -> float:
        return dbm_to_watts(self.noise_b_dbm)

    @property
    def noise_k(self) -> float:
        return dbm_to_watts(self.noise_k_dbm)

    @property
    def noise_w(self) -> float:
        return dbm_to_watts(self.noise_w_dbm)

    @property
    def noise_e(self) -> float:
        return dbm_to_watts(self.noise_e_dbm)

    @property
    def p0(self) -> float:
        return 1.0 - self.p1

    def replace(self, **changes: Any) -> "SystemConfig":
        return dataclasses.replace(self, **changes)


@dataclasses.dataclass(frozen=True)
class SolverSettings:
    """Tolerances and limits of the alternating optimizer and its SDP backend."""

    outer_tol: float = 1e-4
    active_tol: float = 1e-6
    passive_tol: float = 1e-6
    penalty_init: float = 1e-3
    active_penalty_scale: float = 3.0
    passive_penalty_scale: float = 3.0
    penalty_cap: float = 1e6
    max_outer: int = 30
    max_inner: int = 30
    stall_window: int = 10
    bisection_interval: float = 1.0
    """Initial upper end ``s`` of the bisection bracket for the covert ratio."""
    bisection_tol: float = 1e-9
    init_restarts: int = 50
    monotone_tol: float = 1e-6
    feasibility_tol: float = 1e-6
    backend: str = "builtin"
    sdp_max_iters: int = 100
    sdp_tol: float = 1e-8

    def __post_init__(self) -> None:
        for name in ("outer_tol", "active_tol", "passive_tol", "penalty_init", "penalty_cap", "bisection_tol"):
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"{name} must be positive")
        if self.active_penalty_scale <= 1 or self.passive_penalty_scale <= 1:
            raise ConfigurationError("penalty scale factors must exceed 1")
        for name in ("max_outer", "max_inner", "init_restarts", "sdp_max_iters", "stall_window"):
            if getattr(self, name) < 1:
                raise ConfigurationError(f"{name} must be at least 1")
        if self.backend not in ("builtin", "cvxpy"):
            raise ConfigurationError(f"unknown SDP backend {self.backend!r}")


@dataclasses.dataclass(frozen=True)
class ValidationSettings:
    """Sample sizes and seeds of the oracle battery."""

    n_samples: int = 100_000
    n_scenarios: int = 5
    n_taus: int = 10
    large_system_m: Tuple[int, ...] = (16, 64, 256)
    large_system_samples: int = 10_000
    bound_seeds: int = 20
    surrogate_samples: int = 100
    seed: int = 2024
    confidence_sigmas: float = 3.0
    retry_factor: int = 4
    convergence_seeds: int = 10
    """Seeded instances of the configured system that the optimizer must solve cleanly"""
    brute_force_beams: int = 200
    """Random beamformer sets, each searched over the whole phase grid"""
    brute_force_ratio: float = 0.95
    trend_tolerance: float = 1e-6
    """Slack, in bit/s/Hz, allowed against the expected direction of a sweep mean"""

    def __post_init__(self) -> None:
        if self.n_samples < 1000 or self.large_system_samples < 1000:
            raise ConfigurationError("acceptance-grade checks need at least 1000 samples")
        if self.convergence_seeds < 1 or self.brute_force_beams < 1:
            raise ConfigurationError("convergence_seeds and brute_force_beams must be positive")
        if not 0.0 < self.brute_force_ratio <= 1.0:
            raise ConfigurationError(f"brute_force_ratio must lie in (0, 1], got {self.brute_force_ratio!r}")
        if self.trend_tolerance < 0:
            raise ConfigurationError("trend_tolerance must be nonnegative")
        if list(self.large_system_m) != sorted(set(self.large_system_m)):
            raise ConfigurationError("large_system_m must be strictly increasing")


@dataclasses.dataclass(frozen=True)
class SweepSpec:
    parameter: str
    values: Tuple[float, ...]

    def __post_init__(self) -> None:
        if self.parameter not in SWEEP_PARAMETERS:
            raise ConfigurationError(
                f"unknown sweep parameter {self.parameter!r}; expected one of {', '.join(SWEEP_PARAMETERS)}"
            )
        if not self.values:
            raise ConfigurationError("sweep needs at least one value")
        if self.parameter in ("m", "n_t"):
            for value in self.values:
                if float(value) != int(value) or int(value) < 1:
                    raise ConfigurationError(f"{self.parameter} sweep values must be positive integers")

    @property
    def nested(self) -> bool:
        """Whether values are ascending along a direction that only enlarges the feasible set."""
        return self.parameter in NESTED_SWEEPS and list(self.values) == sorted(self.values)


_SYSTEM_BLOCKS: Dict[str, Tuple[str, ...]] = {
    "system": (
        "n_t",
        "m_y",
        "m_z",
        "k_users",
        "l_paths",
        "p_paths",
        "spacing_ratio",
        "azimuth_min",
        "azimuth_max",
        "elevation_min",
        "elevation_max",
        "resample_gains",
        "carrier_ghz",
        "bandwidth_mhz",
    ),
    "power": ("p_tmax_dbw", "noise_b_dbm", "noise_k_dbm", "noise_w_dbm", "noise_e_dbm"),
    "covert": ("epsilon", "p1"),
    "qos": ("r_b_star", "r_s0_star", "r_s1_star"),
    "geometry": ("d_br", "d_rb", "d_rk", "d_rw", "d_re"),
}


def _checked_keys(block: str, data: Mapping[str, Any], allowed: Tuple[str, ...]) -> Dict[str, Any]:
    unknown = sorted(set(data) - set(allowed))
    if unknown:
        raise ConfigurationError(f"unknown key(s) in [{block}]: {', '.join(unknown)}")
    return dict(data)


@dataclasses.dataclass(frozen=True)
class ExperimentConfig:
    system: SystemConfig = dataclasses.field(default_factory=SystemConfig)
    solver: SolverSettings = dataclasses.field(default_factory=SolverSettings)
    validation: ValidationSettings = dataclasses.field(default_factory=ValidationSettings)
    seeds: Tuple[int, ...] = (0, 1, 2, 3, 4)
    sweep: Optional[SweepSpec] = None
    baseline: str = "star"

    def __post_init__(self) -> None:
        if not self.seeds:
            raise ConfigurationError("at least one seed is required")
        if self.baseline not in BASELINES:
            raise ConfigurationError(f"baseline must be one of {', '.join(BASELINES)}, got {self.baseline!r}")
        if self.baseline == "conventional_dual_ris" and self.system.m % 2:
            raise ConfigurationError(f"the dual-RIS baseline needs an even element count, got M={self.system.m}")
        if self.sweep is not None:
            for value in self.sweep.values:
                self.point(value)

    def point(self, value: float) -> SystemConfig:
        """The system configuration at one sweep value."""
        if self.sweep is None:
            raise ConfigurationError("configuration has no sweep")
        parameter = self.sweep.parameter
        if parameter == "m":
            m_y, m_z = grid_shape(int(value))
            point = self.system.replace(m_y=m_y, m_z=m_z)
        elif parameter == "n_t":
            point = self.system.replace(n_t=int(value))
        else:
            point = self.system.replace(**{parameter: float(value)})
        if self.baseline == "conventional_dual_ris" and point.m % 2:
            raise ConfigurationError(f"the dual-RIS baseline needs an even element count, got M={point.m}")
        return point

    def to_dict(self) -> ConfigDocument:
        system = dataclasses.asdict(self.system)
        document: Dict[str, Any] = {"seeds": list(self.seeds), "baseline": self.baseline}
        for block, keys in _SYSTEM_BLOCKS.items():
            document[block] = {key: system[key] for key in keys}
        document["solver"] = dataclasses.asdict(self.solver)
        validation = dataclasses.asdict(self.validation)
        validation["large_system_m"] = list(validation["large_system_m"])
        document["validation"] = validation
        if self.sweep is not None:
            document["sweep"] = {"parameter": self.sweep.parameter, "values": list(self.sweep.values)}
        return document  # type: ignore[return-value]

    @staticmethod
    def from_dict(data: Mapping[str, Any]) -> "ExperimentConfig":
        top = set(_SYSTEM_BLOCKS) | {"solver", "validation", "sweep", "seeds", "baseline"}
        unknown = sorted(set(data) - top)
        if unknown:
            raise ConfigurationError(f"unknown configuration block(s): {', '.join(unknown)}")

        system_values: Dict[str, Any] = {}
        for block, keys in _SYSTEM_BLOCKS.items():
            system_values.update(_checked_keys(block, data.get(block, {}), keys))
        if "m" in data.get("system", {}):
            raise ConfigurationError("give the element grid as m_y and m_z")

        solver_keys = tuple(f.name for f in dataclasses.fields(SolverSettings))
        validation_keys = tuple(f.name for f in dataclasses.fields(ValidationSettings))
        validation_values = _checked_keys("validation", data.get("validation", {}), validation_keys)
        if "large_system_m" in validation_values:
            validation_values["large_system_m"] = tuple(int(m) for m in validation_values["large_system_m"])

        sweep: Optional[SweepSpec] = None
        if "sweep" in data:
            sweep_data = _checked_keys("sweep", data["sweep"], ("parameter", "values"))
            try:
                sweep = SweepSpec(sweep_data["parameter"], tuple(sweep_data["values"]))
            except KeyError as e:
                raise ConfigurationError(f"[sweep] is missing {e.args[0]!r}") from None

        try:
            return ExperimentConfig(
                system=SystemConfig(**system_values),
                solver=SolverSettings(**_checked_keys("solver", data.get("solver", {}), solver_keys)),
                validation=ValidationSettings(**validation_values),
                seeds=tuple(int(seed) for seed in data.get("seeds", (0, 1, 2, 3, 4))),
                sweep=sweep,
                baseline=str(data.get("baseline", "star")),
            )
        except TypeError as e:
            raise ConfigurationError(str(e)) from e

    def to_toml(self) -> str:
        document = tomlkit.document()
        document.add(tomlkit.comment("Resolved star-covert configuration"))
        data = self.to_dict()
        document["seeds"] = data["seeds"]
        document["baseline"] = data["baseline"]
        for block in (*_SYSTEM_BLOCKS, "solver", "validation", "sweep"):
            if block in data:
                table = tomlkit.table()
                for key, value in data[block].items():  # type: ignore[literal-required]
                    table[key] = value
                document[block] = table
        return tomlkit.dumps(document)

    @property
    def config_hash(self) -> str:
        return config_hash(self.to_dict())


def config_hash(document: Mapping[str, Any]) -> str:
    """SHA-256 of the canonical JSON form of a configuration document."""
    canonical = json.dumps(document, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def load_config(path: Union[str, pathlib.Path, None]) -> ExperimentConfig:
    """
    Read a configuration file, TOML or JSON depending on the suffix. ``None``
    returns the defaults.

    :raise ConfigurationError: If the file has an unsupported suffix or invalid content.
    """
    if path is None:
        return ExperimentConfig()
    path = pathlib.Path(path)
    text = path.read_text(encoding="utf-8")
    data: Mapping[str, Any]
    if path.suffix == ".toml":
        data = tomlkit.parse(text).unwrap()
    elif path.suffix == ".json":
        data = json.loads(text)
    else:
        raise ConfigurationError(f"configuration must be a .toml or .json file, got {path.name}")
    _logger.debug("Loaded configuration from %s", path)
    return ExperimentConfig.from_dict(data)


__all__ = [
    "BASELINES",
    "ExperimentConfig",
    "SWEEP_PARAMETERS",
    "SolverSettings",
    "SweepSpec",
    "SystemConfig",
    "ValidationSettings",
    "config_hash",
    "dbm_to_watts",
    "dbw_to_watts",
    "grid_shape",
    "load_config",
]
