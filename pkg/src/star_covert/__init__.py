"""
Joint covert and secure transmission through a simultaneously transmitting and
reflecting reconfigurable surface: channel models, warden detection statistics,
rate expressions, a semidefinite solver and the alternating optimizer built on them.
"""

import logging

from star_covert._errors import (
    ConfigurationError,
    DegenerateInputError,
    InitializationError,
    NumericalError,
    SubproblemError,
)
from star_covert.channel_model import ChannelRealization, Scenario, draw_scenario
from star_covert.config import ExperimentConfig, SolverSettings, SystemConfig, ValidationSettings, load_config
from star_covert.optimizer import OptimizationTrace, init_feasible, run_alternating_optimization
from star_covert.rates import Beamformers, RateBreakdown, evaluate_rates
from star_covert.star_ris import StarCoefficients, SurfaceLayout


_logger = logging.getLogger("star_covert")
_logger.addHandler(logging.NullHandler())


__all__ = [
    "Beamformers",
    "ChannelRealization",
    "ConfigurationError",
    "DegenerateInputError",
    "ExperimentConfig",
    "InitializationError",
    "NumericalError",
    "OptimizationTrace",
    "RateBreakdown",
    "Scenario",
    "SolverSettings",
    "StarCoefficients",
    "SubproblemError",
    "SurfaceLayout",
    "SystemConfig",
    "ValidationSettings",
    "draw_scenario",
    "evaluate_rates",
    "init_feasible",
    "load_config",
    "run_alternating_optimization",
]
