"""Exception hierarchy shared by the library and the command line."""

from __future__ import annotations


class RthPowerError(Exception):
    """Base class for every error raised by :mod:`rthpower`."""

    exit_code = 1


class ParseError(RthPowerError):
    """Malformed measurement, platform or metadata file."""

    exit_code = 3

    def __init__(self, message: str, *, path: str | None = None, line: int | None = None):
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        elif line is not None:
            where = f"line {line}: "
        super().__init__(where + message)
        self.path = path
        self.line = line


class FitError(RthPowerError):
    """A fit could not be carried out or did not converge.

    ``best`` carries the best-so-far estimate when one exists.
    """

    exit_code = 4

    def __init__(self, message: str, best=None):
        super().__init__(message)
        self.best = best


class DomainError(RthPowerError, ValueError):
    """An argument lies outside the mathematical domain of an equation."""

    exit_code = 5


class CoreRangeError(RthPowerError, ValueError):
    """Core count outside ``[0, max_cores]``."""

    exit_code = 6


class UnknownOperationError(RthPowerError, KeyError):
    """An operation name does not resolve in the platform's operation table."""

    exit_code = 7

    def __init__(self, name: str):
        super().__init__(name)
        self.name = name

    def __str__(self) -> str:
        return f"unknown operation {self.name!r}"


class MetadataError(RthPowerError):
    """Application metadata is missing something the framework needs."""

    exit_code = 8


class ConfigurationError(RthPowerError):
    """Inconsistent model configuration, e.g. an empty intensity grid."""

    exit_code = 9
