"""Exception hierarchy shared by the engine and the command line front end.

Each class carries the process exit code ``lecalc`` uses for it.
"""

from __future__ import annotations


class LecalcError(Exception):
    exit_code = 1


class InputError(LecalcError, ValueError):
    """Malformed user input: parse errors, bad parameters, schema violations."""

    exit_code = 2


class ParseError(InputError):
    def __init__(self, message: str, position: int | None = None, text: str | None = None):
        self.position = position
        self.text = text
        if position is not None:
            message = f"{message} at position {position}"
            if text is not None:
                message += f"\n  {text}\n  {' ' * position}^"
        super().__init__(message)


class GenericityError(LecalcError):
    """No accepted coordinate frame was found within the attempt cap."""

    exit_code = 3


class ResourceCapExceeded(LecalcError):
    """A configured computational limit was hit; not a mathematical failure."""

    exit_code = 4


class ConsistencyError(LecalcError):
    """A pipeline cross-check disagreed (raised only in strict mode)."""

    exit_code = 5


class NotIsolatedError(LecalcError):
    """The origin is not an isolated point of the scheme being measured.

    Signals an improper intersection; the caller should move to more generic
    coordinates.
    """

    exit_code = 3
