import csv
import json
import logging
import os
import pathlib
import warnings
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union

try:
    from typing import Protocol
except ImportError:
    from typing_extensions import Protocol  # type: ignore[assignment]


_logger = logging.getLogger("star_covert:test_support:" + __name__)


class CommandResult(Protocol):
    success: bool
    returncode: int
    stdout: str
    stderr: str


class CommandRunner(Protocol):
    """
    Runs a console script and captures its output; ``script_runner.run`` from
    `pytest-console-scripts`_ satisfies it.

    .. _pytest-console-scripts: https://github.com/kvas-it/pytest-console-scripts
    """

    def __call__(self, args: Sequence[str], cwd: Union[str, os.PathLike]) -> CommandResult:
        """
        :param args: The script name (``star-covert``) followed by its arguments.
        :param cwd: Directory to run in.
        """
        ...


class Workspace:
    """
    A scratch directory for end-to-end runs of ``star-covert``, normally obtained
    from the ``workspace`` fixture.

    Write the experiment configuration with :py:meth:`.config()`, run a command
    with :py:meth:`.run_cli()`, and inspect what it wrote with
    :py:meth:`.records()` and :py:meth:`.json()`.

    :param root: An existing directory, typically pytest's ``tmp_path``.
    """

    CONFIG_NAME = "experiment.toml"
    OUTPUT_NAME = "out"

    def __init__(self, root: pathlib.Path) -> None:
        self.root = root

    @property
    def config_path(self) -> pathlib.Path:
        return self.root / self.CONFIG_NAME

    @property
    def out_dir(self) -> pathlib.Path:
        return self.root / self.OUTPUT_NAME

    def config(self, content: str) -> pathlib.Path:
        """Write the configuration that :py:meth:`run_cli()` passes with ``--config``."""
        if self.config_path.exists():
            warnings.warn(f"Replacing configuration {self.config_path}")
        _logger.debug("Writing configuration to %s", self.config_path)
        self.config_path.write_text(content, encoding="utf-8")
        return self.config_path

    def run_cli(
        self, runner: CommandRunner, command: str, *, extra_args: Optional[Iterable[str]] = None
    ) -> CommandResult:
        """
        Run ``star-covert <command>`` with the workspace output directory and, if
        one was written, its configuration.
        """
        args = ["star-covert", command, "--out-dir", self.OUTPUT_NAME]
        if self.config_path.exists():
            args += ["--config", self.CONFIG_NAME]
        args += list(extra_args or ())
        _logger.debug("Running %s in %s", " ".join(args), self.root)
        return runner(args, cwd=self.root)

    def records(self, name: str = "records.csv") -> List[Dict[str, str]]:
        """Rows of a CSV file in the output directory, all values as strings."""
        with (self.out_dir / name).open(newline="", encoding="utf-8") as f:
            return list(csv.DictReader(f))

    def json(self, name: str) -> Any:
        return json.loads((self.out_dir / name).read_text(encoding="utf-8"))
