"""Shared exception hierarchy.

Everything raised on a domain/validation path derives from LabError so the
CLI and the HTTP layer can map failures to exit codes / status codes in one
place.
"""


class LabError(Exception):
    """Base for all domain errors raised by this package."""

    code = "error"


class ConfigError(LabError):
    """Invalid or degenerate rig configuration."""

    code = "config"


class RangeError(LabError):
    """Argument outside its documented range."""

    code = "range"


class DegenerateSignalError(LabError):
    """A sensed channel never crosses mid-scale, so phase is undefined."""

    code = "degenerate"
