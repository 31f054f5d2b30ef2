"""
Exception hierarchy and command error handling for the OSR toolkit.

Library code raises the domain exceptions below; the management command turns
them into consistent error messages and exit codes.
"""

import logging

from django.core.management.base import CommandError

logger = logging.getLogger(__name__)


class OSRError(Exception):
    """Base class for every error raised by the toolkit."""

    exit_code = 1


class InvalidInputError(OSRError, ValueError):
    """A library call received arguments violating its preconditions."""


class DimensionMismatchError(InvalidInputError):
    """Vectors or matrices disagree on the feature dimension."""


class EmptyGroupError(InvalidInputError):
    """A known-class group or class has no instances."""


class SamplerStateError(OSRError, RuntimeError):
    """The sampler state violated one of its count or statistics invariants."""


class ConfigurationError(OSRError):
    """A run configuration is malformed or inconsistent with the data."""

    exit_code = 2

    def __init__(self, message, details=None):
        super().__init__(message)
        self.details = details or {}


class DatasetError(OSRError):
    """A dataset file could not be read or parsed."""

    exit_code = 3


class ArtifactWriteError(OSRError):
    """A result file or run record could not be written."""

    exit_code = 4


def command_error_for(exc):
    """
    Convert an exception into a CommandError carrying the mapped exit code.

    Domain errors keep their message; anything else is reported as an
    unexpected failure with exit code 1.
    """
    if isinstance(exc, CommandError):
        return exc

    if isinstance(exc, ConfigurationError):
        message = f"Configuration error: {exc}"
        if exc.details:
            message = f"{message} {exc.details}"
    elif isinstance(exc, DatasetError):
        message = f"Dataset error: {exc}"
    elif isinstance(exc, ArtifactWriteError):
        message = f"Write error: {exc}"
    elif isinstance(exc, OSRError):
        message = f"Recognition error: {exc}"
    else:
        message = f"Unexpected error: {exc}"

    returncode = getattr(exc, "exit_code", 1)

    # Log the error for post-mortem inspection
    logger.error(f"Run failed: {exc}", exc_info=exc)

    return CommandError(message, returncode=returncode)
