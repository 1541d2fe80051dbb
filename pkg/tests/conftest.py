import numpy as np
import pathlib
import pytest
import test_support
from pytest_console_scripts import ScriptRunner
from star_covert.channel_model import ChannelRealization
from star_covert.config import SystemConfig
from test_support.scenarios import tiny_channel
from typing import Tuple


@pytest.fixture
def console_script_runner(script_runner: ScriptRunner) -> test_support.CommandRunner:
    """The ``script_runner`` fixture of pytest-console-scripts, typed as a :py:class:`test_support.CommandRunner`."""
    return script_runner.run


@pytest.fixture
def workspace(tmp_path: pathlib.Path, monkeypatch: pytest.MonkeyPatch) -> test_support.Workspace:
    """
    A temporary directory to run ``star-covert`` in, as a :py:class:`test_support.Workspace`.
    The working directory is changed to it for the duration of the test.
    """
    monkeypatch.chdir(tmp_path)
    return test_support.Workspace(tmp_path)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def tiny() -> Tuple[SystemConfig, ChannelRealization]:
    """A 4-antenna, 4-element, two-user system and one channel draw of it."""
    return tiny_channel(seed=3)
