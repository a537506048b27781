"""Exception types shared across the package."""

from __future__ import annotations


class InvalidInputError(ValueError):
    """Raised when an argument violates a documented precondition."""


class ConvergenceError(RuntimeError):
    """Raised when a depth integral cannot be evaluated to tolerance."""


class ConfigError(ValueError):
    """Raised for malformed or inconsistent run configurations.

    ``key`` names the offending entry (``section.key``) when known and
    ``line`` is the 1-based line number in the source text, if available.
    """

    def __init__(self, message: str, key: str | None = None, line: int | None = None):
        self.key = key
        self.line = line
        where = ""
        if key is not None:
            where = f"[{key}] "
        if line is not None:
            where += f"(line {line}) "
        super().__init__(where + message)


class BlowUpError(RuntimeError):
    """Raised by the time stepper when the solution leaves the admissible range.

    Attributes
    ----------
    step_index:
        Index of the step that produced the invalid state.
    t:
        Time of the last finite state.
    last_norms:
        Wiener norms of the last finite state.
    partial:
        Observer outputs accumulated up to (and including) the last finite state.
    """

    def __init__(self, message, step_index, t, last_norms, partial=None):
        super().__init__(message)
        self.step_index = step_index
        self.t = t
        self.last_norms = last_norms
        self.partial = partial if partial is not None else []
