"""Exception hierarchy and CLI exit codes."""
from typing import Any

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_NUMERIC = 4
EXIT_CONFIG = 5


class PandaError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = EXIT_NUMERIC


class UsageError(PandaError, ValueError):
    """Required command-line input is missing or inconsistent."""

    exit_code = EXIT_USAGE


class DomainError(PandaError, ValueError):
    """A value left the domain of a log-partition or link function."""


class DimensionError(PandaError, ValueError):
    """Array shapes do not agree."""

    exit_code = EXIT_CONFIG


class ConfigError(PandaError, ValueError):
    """Invalid configuration, scheme parameters, or unknown names."""

    exit_code = EXIT_CONFIG


class DataError(PandaError, ValueError):
    """Invalid input data (CSV content, non-finite values, missing columns)."""

    exit_code = EXIT_IO


class UnderAugmentationError(PandaError, ValueError):
    """Augmented data has no more rows than predictors."""

    exit_code = EXIT_CONFIG


class FitError(PandaError, RuntimeError):
    """Maximum-likelihood fit failed.

    Args:
        message: Human-readable description
        last_iterate: Coefficients at the point of failure, if any
    """

    def __init__(self, message: str, last_iterate: Any = None):
        super().__init__(message)
        self.last_iterate = last_iterate


class SingularDesignError(FitError):
    """Design matrix is numerically rank deficient."""


class InferenceError(PandaError, RuntimeError):
    """Variance estimation is not possible for this fit."""


class TuningError(PandaError, RuntimeError):
    """Every tuning candidate failed."""

    def __init__(self, message: str, scores: Any = None):
        super().__init__(message)
        self.scores = scores
