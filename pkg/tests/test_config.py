"""
Tests of configuration defaults, validation and persistence.
"""

import json
import math
import pytest
import tomlkit

from star_covert._errors import ConfigurationError
from star_covert.config import (
    ExperimentConfig,
    SolverSettings,
    SweepSpec,
    SystemConfig,
    ValidationSettings,
    config_hash,
    load_config,
)
from test_support.scenarios import TINY_TOML


def test_defaults():
    system = SystemConfig()
    assert (system.n_t, system.m_y, system.m_z, system.m) == (7, 5, 6, 30)
    assert system.k_users == 3
    assert system.p_tmax == pytest.approx(1.0)
    assert system.noise_b == pytest.approx(1e-12)
    assert system.p0 == pytest.approx(0.5)
    assert (system.r_b_star, system.r_s0_star, system.r_s1_star) == (0.5, 0.6, 0.6)
    assert system.azimuth_min == pytest.approx(-math.pi / 2)


def test_load_without_file_gives_defaults():
    assert load_config(None) == ExperimentConfig()


def test_load_toml(tmp_path):
    path = tmp_path / "experiment.toml"
    path.write_text(TINY_TOML, encoding="utf-8")
    config = load_config(path)
    assert config.seeds == (0,)
    assert config.system.n_t == 4
    assert config.system.m == 4
    assert config.system.r_b_star == pytest.approx(0.1)
    assert config.solver.max_outer == 2
    assert config.validation.large_system_m == (16, 256)
    # Unlisted values keep their defaults
    assert config.system.epsilon == pytest.approx(0.1)


def test_load_json(tmp_path):
    path = tmp_path / "experiment.json"
    path.write_text(json.dumps({"covert": {"epsilon": 0.2}, "seeds": [3, 4]}), encoding="utf-8")
    config = load_config(path)
    assert config.system.epsilon == pytest.approx(0.2)
    assert config.seeds == (3, 4)


def test_unsupported_suffix(tmp_path):
    path = tmp_path / "experiment.yaml"
    path.write_text("seeds: [0]\n", encoding="utf-8")
    with pytest.raises(ConfigurationError):
        load_config(path)


@pytest.mark.parametrize(
    "document",
    [
        {"systm": {}},
        {"system": {"antennas": 4}},
        {"system": {"m": 16}},
        {"solver": {"tolerance": 1e-3}},
        {"sweep": {"parameter": "p_tmax_dbw"}},
        {"sweep": {"parameter": "noise", "values": [1.0]}},
    ],
    ids=["unknown-block", "unknown-key", "flat-m", "unknown-solver-key", "sweep-without-values", "bad-parameter"],
)
def test_rejected_documents(document):
    with pytest.raises(ConfigurationError):
        ExperimentConfig.from_dict(document)


@pytest.mark.parametrize(
    "changes",
    [
        {"epsilon": 0.0},
        {"epsilon": 1.0},
        {"p1": 1.5},
        {"n_t": 0},
        {"k_users": 0},
        {"d_rw": -1.0},
        {"r_b_star": -0.1},
        {"azimuth_min": 1.0, "azimuth_max": 0.0},
    ],
)
def test_invalid_system_values(changes):
    with pytest.raises(ConfigurationError):
        SystemConfig(**changes)


def test_invalid_solver_settings():
    with pytest.raises(ConfigurationError):
        SolverSettings(active_penalty_scale=1.0)
    with pytest.raises(ConfigurationError):
        SolverSettings(backend="mosek")


def test_invalid_validation_settings():
    with pytest.raises(ConfigurationError):
        ValidationSettings(n_samples=100)
    with pytest.raises(ConfigurationError):
        ValidationSettings(large_system_m=(64, 16))


@pytest.mark.parametrize(
    "changes",
    [
        {"convergence_seeds": 0},
        {"brute_force_beams": 0},
        {"brute_force_ratio": 0.0},
        {"brute_force_ratio": 1.5},
        {"trend_tolerance": -1e-9},
    ],
    ids=["no-seeds", "no-beams", "zero-ratio", "ratio-above-one", "negative-tolerance"],
)
def test_invalid_optimizer_check_settings(changes):
    with pytest.raises(ConfigurationError):
        ValidationSettings(**changes)


def test_optimizer_check_settings_from_toml(tmp_path):
    path = tmp_path / "experiment.toml"
    path.write_text("[validation]\nconvergence_seeds = 3\nbrute_force_ratio = 0.9\n", encoding="utf-8")
    validation = load_config(path).validation
    assert (validation.convergence_seeds, validation.brute_force_ratio) == (3, 0.9)
    assert validation.brute_force_beams == 200


def test_sweep_points():
    config = ExperimentConfig(sweep=SweepSpec("m", (16, 30, 7)))
    assert [(p.m_y, p.m_z) for p in map(config.point, config.sweep.values)] == [(4, 4), (5, 6), (1, 7)]
    power = ExperimentConfig(sweep=SweepSpec("p_tmax_dbw", (-3.0, 0.0)))
    assert power.point(-3.0).p_tmax == pytest.approx(10**-0.3)
    assert power.sweep.nested
    assert not ExperimentConfig(sweep=SweepSpec("p_tmax_dbw", (3.0, 0.0))).sweep.nested
    assert not ExperimentConfig(sweep=SweepSpec("p1", (0.2, 0.8))).sweep.nested


def test_point_without_sweep():
    with pytest.raises(ConfigurationError):
        ExperimentConfig().point(1.0)


def test_integer_sweep_values():
    with pytest.raises(ConfigurationError):
        SweepSpec("n_t", (4.5,))


def test_dual_ris_baseline_needs_even_surface():
    with pytest.raises(ConfigurationError):
        ExperimentConfig(system=SystemConfig(m_y=3, m_z=3), baseline="conventional_dual_ris")
    with pytest.raises(ConfigurationError):
        ExperimentConfig(sweep=SweepSpec("m", (16, 25)), baseline="conventional_dual_ris")


def test_toml_output_reloads(tmp_path):
    config = ExperimentConfig(
        system=SystemConfig(n_t=5, epsilon=0.05),
        seeds=(1, 2),
        sweep=SweepSpec("epsilon", (0.05, 0.1)),
    )
    text = config.to_toml()
    assert tomlkit.parse(text)["covert"]["epsilon"] == pytest.approx(0.05)
    path = tmp_path / "config.toml"
    path.write_text(text, encoding="utf-8")
    assert load_config(path) == config


def test_config_hash_is_stable():
    config = ExperimentConfig(seeds=(0, 1))
    assert config.config_hash == ExperimentConfig(seeds=(0, 1)).config_hash
    assert config.config_hash != ExperimentConfig(seeds=(0, 2)).config_hash
    assert len(config.config_hash) == 64


def test_config_hash_ignores_key_order():
    assert config_hash({"a": 1, "b": [1, 2]}) == config_hash({"b": [1, 2], "a": 1})
