"""
Small systems that the tests can afford to optimize.
"""

import numpy as np

from star_covert.channel_model import ChannelRealization, draw_scenario
from star_covert.config import SystemConfig
from star_covert.rates import Beamformers
from star_covert.star_ris import StarCoefficients, SurfaceLayout
from typing import Any, Optional, Tuple


def tiny_system(**changes: Any) -> SystemConfig:
    """Four antennas, a 2x2 surface, two security users and loose rate targets."""
    values = dict(
        n_t=4,
        m_y=2,
        m_z=2,
        k_users=2,
        l_paths=2,
        p_paths=2,
        r_b_star=0.1,
        r_s0_star=0.1,
        r_s1_star=0.1,
    )
    values.update(changes)
    return SystemConfig(**values)


def tiny_channel(seed: int = 0, **changes: Any) -> Tuple[SystemConfig, ChannelRealization]:
    system = tiny_system(**changes)
    return system, draw_scenario(system, seed).realize()


def random_point(
    system: SystemConfig, rng: np.random.Generator, layout: Optional[SurfaceLayout] = None
) -> Tuple[Beamformers, StarCoefficients]:
    """Gaussian beams at full power and random surface phases, not necessarily feasible."""
    layout = layout or SurfaceLayout.star(system.m)
    shape = (system.k_users + 1, system.n_t)
    stacked = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
    stacked *= np.sqrt(system.p_tmax / np.sum(np.abs(stacked) ** 2))
    return Beamformers(stacked[0], stacked[1:]), layout.random_coefficients(rng)


TINY_TOML = """\
seeds = [0]

[system]
n_t = 4
m_y = 2
m_z = 2
k_users = 2
l_paths = 2
p_paths = 2

[qos]
r_b_star = 0.1
r_s0_star = 0.1
r_s1_star = 0.1

[solver]
max_outer = 2
max_inner = 4

[validation]
n_samples = 4000
n_scenarios = 2
n_taus = 4
large_system_m = [16, 256]
large_system_samples = 2000
bound_seeds = 3
surrogate_samples = 10
"""
"""A configuration small enough to run every command in a test."""
