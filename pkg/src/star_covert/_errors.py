"""
Exception types raised by this package.

Most of them derive from a builtin exception so that callers which only care
about the broad category (a bad value, a runtime failure) can keep catching
``ValueError`` or ``RuntimeError``.
"""

from typing import Optional, Sequence


class ConfigurationError(ValueError):
    """A configuration value, or a combination of values, is invalid."""


class DegenerateInputError(ValueError):
    """An input has no meaningful answer, e.g. rank-one extraction from a zero matrix."""


class NumericalError(ArithmeticError):
    """A numerical procedure failed, e.g. a bisection bracket could not be found."""


class InitializationError(RuntimeError):
    """
    No feasible starting point was found.

    :param message: Human-readable description.
    :param constraint: Name of the most violated constraint of the best attempt.
    :param margin: Its (negative) slack.
    """

    def __init__(self, message: str, constraint: Optional[str] = None, margin: Optional[float] = None):
        super().__init__(message)
        self.constraint = constraint
        self.margin = margin


class SubproblemError(RuntimeError):
    """
    A convex subproblem could not be solved.

    :param message: Human-readable description.
    :param stage: ``"active"`` or ``"passive"``.
    :param outer_iter: Outer iteration index, if known.
    :param inner_iter: Inner (penalty loop) iteration index.
    :param constraints: Names of the constraints implicated by the solver, if any.
    """

    def __init__(
        self,
        message: str,
        stage: str,
        *,
        outer_iter: Optional[int] = None,
        inner_iter: Optional[int] = None,
        constraints: Sequence[str] = (),
    ):
        super().__init__(message)
        self.stage = stage
        self.outer_iter = outer_iter
        self.inner_iter = inner_iter
        self.constraints = tuple(constraints)

    def __str__(self) -> str:
        where = [self.stage]
        if self.outer_iter is not None:
            where.append(f"outer iteration {self.outer_iter}")
        if self.inner_iter is not None:
            where.append(f"inner iteration {self.inner_iter}")
        text = f"{super().__str__()} ({', '.join(where)})"
        if self.constraints:
            text += "; implicated constraints: " + ", ".join(self.constraints)
        return text
