"""
Exception hierarchy for orliczembed.

Every error carries the exit code the command line reports for it.
"""


class OrliczEmbedError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 1


class DomainError(OrliczEmbedError, ValueError):
    """Argument outside the domain of an operation."""

    exit_code = 2


class OrliczRangeError(OrliczEmbedError, ValueError):
    """Value beyond the finite range of a bounded-domain function."""

    exit_code = 2


class UsageError(OrliczEmbedError):
    """Invalid command line or configuration value."""

    exit_code = 2


class ResourceError(OrliczEmbedError):
    """Exact enumeration requested beyond the configured caps."""

    exit_code = 3


class PreconditionError(OrliczEmbedError):
    """A regularity precondition of a check does not hold."""

    def __init__(self, message, violation=None):
        super().__init__(message)
        self.violation = violation


class InvariantError(OrliczEmbedError):
    """Internal invariant broken (a bug, not bad input)."""
