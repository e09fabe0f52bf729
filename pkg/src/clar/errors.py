"""Exception hierarchy. Every error carries a category used by the CLI."""

from __future__ import annotations


class ClarError(Exception):
    category = "error"


class ParseError(ClarError):
    """Malformed or structurally invalid input text."""

    category = "parse"

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class FormatError(ParseError):
    category = "format"


class InfeasibleError(ClarError):
    category = "infeasible"


class DegenerateInputError(InfeasibleError):
    pass


class NumericError(ClarError):
    category = "numeric"


class ConvergenceError(NumericError):
    pass


class ConfigError(ClarError):
    category = "config"
